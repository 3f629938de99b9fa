"""Arithmetic in GF(2^t), characteristic-2 determinants and interpolation.

Elements are plain ints below ``2**t``. The modulus for each ``t`` is the
smallest integer whose bit pattern is an irreducible polynomial of degree
``t`` (x^3+x+1 for t=3, x^8+x^4+x^3+x+1 for t=8, ...), so every run and
every platform uses the same field.

Two multiplication routes exist and must agree bit for bit: a portable
shift-and-xor carryless product with reduction, and a log/antilog table
lookup built for ``t <= TABLE_MAX_T``. Numpy batch versions of both back the
vectorised determinant used by the algebraic engine.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

TABLE_MAX_T = 16
MAX_T = 63


class UnsupportedDegree(ValueError):
    pass


class DuplicateAbscissa(ValueError):
    pass


# -- polynomials over GF(2) packed into ints --------------------------------

def clmul(a: int, b: int) -> int:
    """Carryless (GF(2)[x]) product."""
    r = 0
    while b:
        if b & 1:
            r ^= a
        a <<= 1
        b >>= 1
    return r


def poly_mod(a: int, m: int) -> int:
    dm = m.bit_length()
    while a.bit_length() >= dm:
        a ^= m << (a.bit_length() - dm)
    return a


def poly_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, poly_mod(a, b)
    return a


def _prime_factors(x: int) -> list:
    out = []
    p = 2
    while p * p <= x:
        if x % p == 0:
            out.append(p)
            while x % p == 0:
                x //= p
        p += 1
    if x > 1:
        out.append(x)
    return out


def is_irreducible(f: int) -> bool:
    """Rabin's irreducibility test for a polynomial over GF(2)."""
    t = f.bit_length() - 1
    if t < 1:
        return False
    if t == 1:
        return True

    def frob(k):
        # x^(2^k) mod f
        r = 0b10
        for _ in range(k):
            r = poly_mod(clmul(r, r), f)
        return r

    if frob(t) != 0b10:
        return False
    for q in _prime_factors(t):
        if poly_gcd(f, frob(t // q) ^ 0b10) != 1:
            return False
    return True


@lru_cache(maxsize=None)
def smallest_irreducible(t: int) -> int:
    if t == 1:
        return 0b10
    f = (1 << t) | 1
    while not is_irreducible(f):
        f += 2
    return f


# -- the field ----------------------------------------------------------------

class FieldCtx:
    """GF(2^t) with a fixed modulus. Immutable after construction."""

    def __init__(self, t: int, modulus: int | None = None):
        if not 1 <= t <= MAX_T:
            raise UnsupportedDegree(f"t={t} outside 1..{MAX_T}")
        if modulus is None:
            modulus = smallest_irreducible(t)
        if modulus.bit_length() - 1 != t or not is_irreducible(modulus):
            raise ValueError(f"modulus {modulus:#b} is not irreducible of degree {t}")
        self.t = t
        self.modulus = modulus
        self.q = 1 << t
        self.mask = self.q - 1
        self._tables = None
        self._generator = None

    def __repr__(self):
        return f"FieldCtx(t={self.t}, modulus={self.modulus:#x})"

    # scalar ops
    @staticmethod
    def add(a: int, b: int) -> int:
        return a ^ b

    def mul_shift_xor(self, a: int, b: int) -> int:
        r = 0
        top = self.q
        m = self.modulus
        while b:
            if b & 1:
                r ^= a
            b >>= 1
            a <<= 1
            if a & top:
                a ^= m
        return r

    def mul_table(self, a: int, b: int) -> int:
        log, exp = self.tables()
        return int(exp[log[a] + log[b]])

    def mul(self, a: int, b: int) -> int:
        if self.t <= TABLE_MAX_T:
            return self.mul_table(a, b)
        return self.mul_shift_xor(a, b)

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            a = self.inv(a)
            e = -e
        r = 1
        while e:
            if e & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            e >>= 1
        return r

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in GF(2^t)")
        if self.t <= TABLE_MAX_T:
            log, exp = self.tables()
            return int(exp[(self.q - 1) - log[a]])
        return self.pow(a, self.q - 2)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    # multiplicative group
    def generator(self) -> int:
        """Smallest primitive element."""
        if self._generator is None:
            if self.t > 32:
                raise UnsupportedDegree("primitive element search limited to t <= 32")
            order = self.q - 1
            factors = _prime_factors(order) if order > 1 else []
            g = 1 if order == 1 else 2
            while any(self.pow_slow(g, order // p) == 1 for p in factors):
                g += 1
            self._generator = g
        return self._generator

    def pow_slow(self, a: int, e: int) -> int:
        r = 1
        while e:
            if e & 1:
                r = self.mul_shift_xor(r, a)
            a = self.mul_shift_xor(a, a)
            e >>= 1
        return r

    def tables(self):
        """(log, exp) lookup tables; ``log[0]`` points into a zero tail of ``exp``."""
        if self._tables is None:
            if self.t > TABLE_MAX_T:
                raise UnsupportedDegree("tables only for t <= %d" % TABLE_MAX_T)
            order = self.q - 1
            g = self.generator()
            exp = np.zeros(4 * self.q + 2, dtype=np.int64)
            log = np.zeros(self.q, dtype=np.int64)
            x = 1
            for i in range(order):
                exp[i] = x
                log[x] = i
                x = self.mul_shift_xor(x, g)
            exp[order:2 * order] = exp[:order]
            log[0] = 2 * self.q
            self._tables = (log, exp)
        return self._tables

    # numpy batch ops
    def vmul(self, a, b):
        if self.t <= TABLE_MAX_T:
            log, exp = self.tables()
            return exp[log[a] + log[b]]
        return self._vmul_shift_xor(a, b)

    def _vmul_shift_xor(self, a, b):
        a = np.asarray(a, dtype=np.uint64)
        b = np.asarray(b, dtype=np.uint64)
        a, b = np.broadcast_arrays(a, b)
        a = a.copy()
        r = np.zeros(a.shape, dtype=np.uint64)
        top = np.uint64(self.q)
        mod = np.uint64(self.modulus)
        one = np.uint64(1)
        for i in range(self.t):
            bit = (b >> np.uint64(i)) & one
            r ^= a * bit
            a <<= one
            a ^= mod * ((a & top) >> np.uint64(self.t))
        return r.astype(np.int64)

    def vinv(self, a):
        if self.t <= TABLE_MAX_T:
            log, exp = self.tables()
            return exp[(self.q - 1) - log[a]]
        r = np.ones(np.shape(a), dtype=np.int64)
        base = np.asarray(a, dtype=np.int64)
        e = self.q - 2
        while e:
            if e & 1:
                r = self.vmul(r, base)
            base = self.vmul(base, base)
            e >>= 1
        return r

    def vpow_gen(self, exponents):
        """``g ** e`` for an array of exponents (taken mod the group order)."""
        e = np.asarray(exponents, dtype=np.int64) % (self.q - 1)
        if self.t <= TABLE_MAX_T:
            return self.tables()[1][e]
        g = self.generator()
        return np.array([self.pow(g, int(x)) for x in e.ravel()],
                        dtype=np.int64).reshape(e.shape)

    def random(self, rng, size=None):
        return rng.integers(0, self.q, size=size, dtype=np.int64)


@lru_cache(maxsize=None)
def field_new(t: int) -> FieldCtx:
    return FieldCtx(t)


# -- determinants -------------------------------------------------------------

def det_char2(ctx: FieldCtx, A) -> int:
    """Determinant over GF(2^t) by Gaussian elimination.

    In characteristic 2 this is also the permanent.
    """
    n = len(A)
    M = [list(row) for row in A]
    det = 1
    for c in range(n):
        p = next((r for r in range(c, n) if M[r][c]), None)
        if p is None:
            return 0
        if p != c:
            M[c], M[p] = M[p], M[c]
        pv = M[c][c]
        det = ctx.mul(det, pv)
        pinv = ctx.inv(pv)
        rowc = M[c]
        for r in range(c + 1, n):
            x = M[r][c]
            if x:
                f = ctx.mul(x, pinv)
                rowr = M[r]
                for j in range(c, n):
                    if rowc[j]:
                        rowr[j] ^= ctx.mul(f, rowc[j])
    return det


def det_batch(ctx: FieldCtx, A) -> np.ndarray:
    """Determinants of a stack of square matrices, shape ``(B, N, N)``."""
    A = np.array(A, dtype=np.int64, copy=True)
    B, N = A.shape[0], A.shape[1]
    det = np.ones(B, dtype=np.int64)
    if N == 0:
        return det
    idx = np.arange(B)
    for c in range(N):
        nz = A[:, c:, c] != 0
        has = nz.any(axis=1)
        piv = c + nz.argmax(axis=1)
        swap = piv != c
        if swap.any():
            s, p = idx[swap], piv[swap]
            tmp = A[s, c, :].copy()
            A[s, c, :] = A[s, p, :]
            A[s, p, :] = tmp
        pv = A[:, c, c]
        det = ctx.vmul(det, pv)
        if c == N - 1:
            break
        pinv = ctx.vinv(np.where(has, pv, 1))
        f = ctx.vmul(A[:, c + 1:, c], pinv[:, None])
        A[:, c + 1:, c:] ^= ctx.vmul(f[:, :, None], A[:, None, c, c:])
    return det


# -- interpolation ------------------------------------------------------------

def lagrange_interpolate(ctx: FieldCtx, points) -> list:
    """Coefficients ``c_0..c_{k-1}`` of the polynomial through ``k`` points."""
    xs = [int(x) for x, _ in points]
    ys = [int(y) for _, y in points]
    k = len(xs)
    if len(set(xs)) != k:
        raise DuplicateAbscissa("interpolation abscissae must be distinct")
    if k == 0:
        return []
    # master polynomial W(y) = prod (y - x_i), low degree first
    W = [1]
    for x in xs:
        nxt = [0] * (len(W) + 1)
        for j, c in enumerate(W):
            nxt[j + 1] ^= c
            nxt[j] ^= ctx.mul(c, x)
        W = nxt
    X = np.array(xs, dtype=np.int64)
    # synthetic division W / (y - x_i) for every i at once
    Q = np.zeros((k, k), dtype=np.int64)
    acc = np.zeros(k, dtype=np.int64)
    for j in range(k - 1, -1, -1):
        acc = W[j + 1] ^ ctx.vmul(acc, X) if j < k - 1 else np.full(k, W[k], dtype=np.int64)
        Q[:, j] = acc
    # denominators Q_i(x_i) by Horner
    den = np.zeros(k, dtype=np.int64)
    for j in range(k - 1, -1, -1):
        den = ctx.vmul(den, X) ^ Q[:, j]
    scale = ctx.vmul(np.array(ys, dtype=np.int64), ctx.vinv(den))
    coeffs = np.bitwise_xor.reduce(ctx.vmul(Q, scale[:, None]), axis=0)
    return [int(c) for c in coeffs]


def subgroup_order(ctx: FieldCtx, at_least: int) -> int:
    """Smallest divisor of ``2^t - 1`` that is ``>= at_least``."""
    order = ctx.q - 1
    if at_least > order:
        raise ValueError("field too small for the requested number of points")
    best = order
    i = 1
    while i * i <= order:
        if order % i == 0:
            for dvs in (i, order // i):
                if at_least <= dvs < best:
                    best = dvs
        i += 1
    return best


def subgroup_points(ctx: FieldCtx, N: int) -> np.ndarray:
    """The ``N`` powers ``w^0..w^(N-1)`` of an element ``w`` of order ``N``."""
    step = (ctx.q - 1) // N
    return ctx.vpow_gen(step * np.arange(N, dtype=np.int64))


def subgroup_coeffs(ctx: FieldCtx, values, N: int, indices) -> np.ndarray:
    """Coefficients at ``indices`` of the degree ``< N`` polynomial whose values
    at ``subgroup_points(ctx, N)`` are ``values``.

    ``N`` is odd, so ``1/N = 1`` and the inverse transform is
    ``c_j = sum_i v_i w^(-ij)``.
    """
    values = np.asarray(values, dtype=np.int64)
    step = (ctx.q - 1) // N
    i = np.arange(N, dtype=np.int64)
    out = np.zeros(len(indices), dtype=np.int64)
    for pos, j in enumerate(indices):
        w = ctx.vpow_gen(-step * ((i * int(j)) % N))
        out[pos] = np.bitwise_xor.reduce(ctx.vmul(values, w))
    return out


def subgroup_coeffs_all(ctx: FieldCtx, values, N: int, count: int, block: int = 256):
    """Coefficients ``0..count-1``, computed in blocks to bound memory."""
    values = np.asarray(values, dtype=np.int64)
    step = (ctx.q - 1) // N
    i = np.arange(N, dtype=np.int64)
    out = np.zeros(count, dtype=np.int64)
    for lo in range(0, count, block):
        js = np.arange(lo, min(count, lo + block), dtype=np.int64)
        w = ctx.vpow_gen(-step * ((js[:, None] * i[None, :]) % N))
        out[lo:lo + len(js)] = np.bitwise_xor.reduce(ctx.vmul(w, values[None, :]), axis=1)
    return out


def first_nonzero_coeff(ctx: FieldCtx, values, N: int, lo: int, hi: int, block: int = 256):
    """Smallest index in ``[lo, hi)`` with a nonzero coefficient, or ``None``."""
    values = np.asarray(values, dtype=np.int64)
    step = (ctx.q - 1) // N
    i = np.arange(N, dtype=np.int64)
    for start in range(lo, hi, block):
        js = np.arange(start, min(hi, start + block), dtype=np.int64)
        w = ctx.vpow_gen(-step * ((js[:, None] * i[None, :]) % N))
        c = np.bitwise_xor.reduce(ctx.vmul(w, values[None, :]), axis=1)
        nz = np.flatnonzero(c)
        if len(nz):
            return int(js[nz[0]])
    return None
