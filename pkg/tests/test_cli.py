import json
import subprocess
import sys
from fractions import Fraction as F

import pytest

from gik.bench import plan, read_csv, run_bench, write_csv
from gik.cli import main
from gik.errors import BadParams
from gik.generate import generate
from gik.io import dumps_instance, loads_instance

from support import INST_A


@pytest.fixture
def inst_a_file(tmp_path):
    path = tmp_path / "a.json"
    path.write_text(dumps_instance(INST_A))
    return path


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_generate_families():
    ti = generate(3, "time-invariant", 5, 4)
    for i in ti.items:
        phi = ti.profits[i][-1]
        assert all(ti.profits[i][t - 1] == (4 + 1 - t) * phi for t in range(1, 5))
    assert dumps_instance(generate(7, "discounted", 4, 3)) == dumps_instance(generate(7, "discounted", 4, 3))
    empty = generate(1, "uniform", 0, 2)
    assert empty.n == 0 and empty.T == 2
    for fam in ("uniform", "heavy-tail-weights", "well-spaced-adversarial"):
        inst = generate(2, fam, 6, 3)
        assert list(inst.capacities) == sorted(inst.capacities)
    with pytest.raises(BadParams):
        generate(1, "nope", 3, 2)
    with pytest.raises(BadParams):
        generate(1, "uniform", 3, 2, {"bogus": 1})


def test_json_round_trip():
    for fam in ("uniform", "discounted"):
        text = dumps_instance(generate(5, fam, 5, 3))
        assert dumps_instance(loads_instance(text)) == text
    labelled = loads_instance('{"weights": [1], "capacities": [2], "profits": [["1/3"]], "item_ids": ["x"]}')
    assert dumps_instance(labelled) == '{"weights": ["1"], "capacities": ["2"], "profits": [["1/3"]], "item_ids": ["x"]}\n'


def test_solve_exact_and_half(capsys, inst_a_file):
    code, out = run_cli(capsys, "solve", "--algorithm", "exact", "--input", str(inst_a_file))
    assert code == 0 and json.loads(out)["profit"] == "22"
    code, out = run_cli(capsys, "solve", "--algorithm", "half", "--epsilon", "1/4", "--input", str(inst_a_file))
    res = json.loads(out)
    assert code == 0 and F(res["profit"]) >= F(33, 4) and res["certified"] is True


def test_solve_exit_codes(capsys, tmp_path, inst_a_file):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["solve", "--algorithm", "exact", "--input", str(bad)]) == 2
    assert main(["solve", "--algorithm", "half", "--epsilon", "1/2", "--input", str(inst_a_file)]) == 2
    assert main(["solve", "--algorithm", "exact", "--input", str(tmp_path / "missing.json")]) == 2
    code, out = run_cli(capsys, "solve", "--algorithm", "qptas", "--epsilon", "1/5", "--budget-ms", "0",
                        "--input", str(inst_a_file))
    assert code == 3 and json.loads(out)["certified"] is False
    with pytest.raises(SystemExit) as exc:
        main(["solve", "--algorithm", "fancy", "--input", str(inst_a_file)])
    assert exc.value.code == 2


def test_budget_env(monkeypatch, capsys, inst_a_file):
    monkeypatch.setenv("GIK_BUDGET_MS", "0")
    code, _ = run_cli(capsys, "solve", "--algorithm", "qptas-bounded", "--epsilon", "1/2",
                      "--input", str(inst_a_file))
    assert code == 3


def test_bench_round_trip(tmp_path):
    records = run_bench(plan(["uniform", "time-invariant"], [(4, 2)], ["1/4"], 3, ["exact", "half"]))
    path = tmp_path / "b.csv"
    with open(path, "w", newline="") as fh:
        write_csv(records, fh, float_view=True)
    parsed, summaries = read_csv(path)
    assert parsed == records
    assert [r.sort_key() for r in parsed] == sorted(r.sort_key() for r in parsed)
    assert all(r.ratio == 1 for r in parsed if r.algorithm == "exact")
    assert {s.stat for s in summaries} == {"min", "mean"}


def test_bench_cli(capsys, tmp_path):
    out = tmp_path / "b.csv"
    assert main(["bench", "--families", "uniform", "--sizes", "4x2", "--seeds", "2", "--out", str(out)]) == 0
    assert len(read_csv(out)[0]) == 4
    assert main(["bench", "--families", "", "--out", str(out)]) == 0
    assert out.read_text().strip().count("\n") == 0


def test_generate_cli(tmp_path):
    out = tmp_path / "g.json"
    assert main(["generate", "--family", "uniform", "--n", "3", "--T", "2", "--seed", "9", "--out", str(out)]) == 0
    assert loads_instance(out.read_text()) == generate(9, "uniform", 3, 2)


def test_console_entry_point(inst_a_file):
    proc = subprocess.run([sys.executable, "-m", "gik.cli", "solve", "--algorithm", "exact",
                           "--input", str(inst_a_file)], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["chain"] == [[0], [0, 1, 2]]
