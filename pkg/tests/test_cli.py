import csv
import math
import json

import pytest

from mvtsp.cli import (EXIT_INFEASIBLE, EXIT_INVALID, EXIT_OK, EXIT_PARSE, EXIT_VERIFY,
                       bench_rows, generate, main)
from mvtsp.core import validate


def _write(tmp_path, name, doc):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


TRI = {"n": 3, "costs": [[None, 1, 1], [1, None, 1], [1, 1, None]], "visits": [1, 1, 1]}
LOOPS = {"n": 2, "costs": [[1, None], [None, 1]], "visits": [1, 1]}


def _run(capsys, argv):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("alg", ["auto", "expspace", "polyspace", "algebraic", "approx", "brute"])
def test_solve_then_verify(tmp_path, capsys, alg):
    inst = _write(tmp_path, "tri.json", TRI)
    code, out, _ = _run(capsys, ["solve", inst, "--alg", alg, "--tour"])
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["cost"] == 3 and sorted(doc["tour"]) == [0, 1, 2]
    sol = _write(tmp_path, "sol.json", doc)
    code, out, _ = _run(capsys, ["verify", inst, sol])
    assert code == EXIT_OK and json.loads(out) == {"ok": True, "reason": None, "cost": 3}


def test_verify_rejections(tmp_path, capsys):
    inst = _write(tmp_path, "tri.json", TRI)
    cases = [
        ({"cost": 2, "multiplicity": [[0, 1, 0], [0, 0, 1], [1, 0, 0]]}, "cost-mismatch"),
        ({"cost": 3, "multiplicity": [[0, 1, 0], [1, 0, 0], [0, 0, 0]]}, "degree-mismatch"),
        ({"cost": "infeasible", "multiplicity": None}, "no-solution"),
        ({"cost": 3, "multiplicity": [[0, 1, 0], [0, 0, 1], [1, 0, 0]], "tour": [0, 2, 1]},
         "tour-mismatch"),
        ([], "malformed-solution"),
    ]
    for doc, reason in cases:
        sol = _write(tmp_path, "bad.json", doc)
        code, out, _ = _run(capsys, ["verify", inst, sol])
        assert code == EXIT_VERIFY and json.loads(out)["reason"] == reason


def test_infeasible_and_invalid(tmp_path, capsys):
    code, out, _ = _run(capsys, ["solve", _write(tmp_path, "l.json", LOOPS)])
    assert code == EXIT_INFEASIBLE and json.loads(out)["cost"] == "infeasible"
    bad = _write(tmp_path, "bad.json", {"n": 1, "costs": [[-1]], "visits": [1]})
    assert _run(capsys, ["solve", bad])[0] == EXIT_INVALID
    fd = _write(tmp_path, "fd.json", {"n": 3, "costs": TRI["costs"], "in": [1, 1, 1],
                                      "out": [1, 1, 1], "family": "connected"})
    assert _run(capsys, ["solve", fd, "--alg", "expspace"])[0] == EXIT_INVALID
    with pytest.raises(SystemExit) as exc:
        main(["solve"])
    assert exc.value.code == EXIT_PARSE


def test_state_counts_on_stderr(tmp_path, capsys):
    code, _, err = _run(capsys, ["solve", _write(tmp_path, "t.json", TRI),
                                 "--alg", "expspace", "--count-states"])
    assert code == EXIT_OK and json.loads(err)["memo_states"] > 0


def test_kernelize(tmp_path, capsys):
    big = {**TRI, "visits": [10 ** 6] * 3}
    code, out, _ = _run(capsys, ["kernelize", _write(tmp_path, "b.json", big)])
    doc = json.loads(out)
    assert code == EXIT_OK and max(doc["reduced"]["in"]) <= 9
    assert validate(doc["reduced"]).n == 3
    code, _, _ = _run(capsys, ["kernelize", _write(tmp_path, "x.json",
                                                   {"n": 2, "costs": [[None, 1], [None, None]],
                                                    "visits": [1, 1]})])
    assert code == EXIT_INFEASIBLE


def test_gen_is_seeded(capsys):
    code, out, _ = _run(capsys, ["gen", "4", "3", "9", "0.7", "--seed", "5"])
    assert code == EXIT_OK
    assert json.loads(out) == generate(4, 3, 9, 0.7, 5)
    inst = validate(json.loads(out))
    assert inst.n == 4 and all(inst.d[v][v] == float("inf") for v in range(4))
    code, out, _ = _run(capsys, ["gen", "3", "2", "9", "1", "--fdcs"])
    assert validate(json.loads(out)).root is None


def test_bench_csv_and_figures(tmp_path, capsys):
    out = tmp_path / "bench.csv"
    figs = tmp_path / "figs"
    code, _, err = _run(capsys, ["bench", "--engines", "expspace,algebraic", "--n-min", "2",
                                 "--n-max", "3", "--seeds", "2", "--out", str(out),
                                 "--figures", str(figs)])
    assert code == EXIT_OK
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 2 * 2 * 2
    assert list(rows[0]) == ["engine", "n", "seed", "cost", "wall_ms", "memo_states"]
    for a, b in zip(rows[::2], rows[1::2]):
        assert a["cost"] == b["cost"]
    assert (figs / "wall_time.png").stat().st_size > 0
    assert (figs / "memo_states.png").stat().st_size > 0
    assert _run(capsys, ["bench", "--engines", "nope"])[0] == EXIT_PARSE


def test_complete_bench_counts_states():
    rows = list(bench_rows(["expspace"], [4, 5], [0], complete=True))
    assert [r["memo_states"] for r in rows] == [math.comb(7, 2), math.comb(9, 3)]
