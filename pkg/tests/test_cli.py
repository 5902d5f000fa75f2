import json
from pathlib import Path

import numpy as np
import pytest

from weakgreedy import io
from weakgreedy.cli import main
from weakgreedy.config import ConfigError, bundled_configs, load_config

GOLDEN = Path(__file__).parent / "golden"


def _files(d):
    return {p.name: p.read_bytes() for p in sorted(Path(d).iterdir())}


def test_run_diagonal_hilbert_golden(tmp_path, capsys):
    assert main(["run", "--config", "diagonal_hilbert", "--out", str(tmp_path)]) == 0
    got = (tmp_path / "sigmas.csv").read_text()
    assert got == (GOLDEN / "diagonal_hilbert_sigmas.csv").read_text()
    rows = io.read_csv(tmp_path / "sigmas.csv")
    for r in rows[:4]:
        assert float(r["sigma_n"]) == 1.0 / (int(r["n"]) + 1)
    assert "fail=0" in capsys.readouterr().out


def test_run_writes_every_table(tmp_path):
    assert main(["run", "--config", "diagonal_hilbert", "--out", str(tmp_path)]) == 0
    for name in ("sigmas.csv", "A.csv", "widths.csv", "bounds.csv", "elements.csv", "summary.json"):
        assert (tmp_path / name).is_file()
    head = lambda n: (tmp_path / n).read_text().splitlines()[0]
    assert head("sigmas.csv") == "n,sigma_n"
    assert head("A.csv") == "i,j,a_ij"
    assert head("widths.csv") == "n,value,tag,method"
    assert head("bounds.csv") == "name,N,K,m,gamma,lhs_log,rhs_log,slack_log,pass,notes"
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["exit_code"] == 0
    assert summary["trace"]["selected"][:3] == [0, 1, 2]


def test_missing_config_exits_2(tmp_path, capsys):
    assert main(["run", "--config", str(tmp_path / "nope.ini"), "--out", str(tmp_path)]) == 2
    assert "error" in capsys.readouterr().err


def test_bad_config_exits_2(tmp_path):
    p = tmp_path / "bad.ini"
    p.write_text("[set]\nkind = sphere\n[norm]\nkind = hilbert\n")
    assert main(["run", "--config", str(p), "--out", str(tmp_path)]) == 2


def test_randomized_set_needs_a_seed(tmp_path):
    p = tmp_path / "rb.ini"
    p.write_text("[set]\nkind = randomball\ndim = 3\ncount = 5\n[norm]\nkind = hilbert\n"
                 "[greedy]\ngamma = 1\n")
    with pytest.raises(ConfigError, match="seed"):
        load_config(str(p))
    assert main(["run", "--config", str(p), "--out", str(tmp_path)]) == 2
    assert main(["run", "--config", str(p), "--seed", "4", "--out", str(tmp_path / "o")]) == 0


def test_halved_constant_exits_1(tmp_path, capsys):
    args = ["run", "--config", "frommatrix_twoline_hilbert", "--out", str(tmp_path)]
    assert main(args) == 0
    assert main(args + ["--override", "bounds.c1_scale=1/2"]) == 1
    out = capsys.readouterr().out
    assert "FAIL C1_ii N=1" in out


def test_overrides_change_the_run(tmp_path):
    assert main(["run", "--config", "diagonal_hilbert", "--out", str(tmp_path),
                 "--override", "set.count=8", "--override", "greedy.n_max=8",
                 "--override", "greedy.gamma=0.5"]) == 0
    assert len(io.read_csv(tmp_path / "sigmas.csv")) == 9


def test_output_dir_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("WEAKGREEDY_OUT", str(tmp_path / "env"))
    assert main(["run", "--config", "diagonal_hilbert", "--override", "set.count=4",
                 "--override", "greedy.n_max=4"]) == 0
    assert (tmp_path / "env" / "sigmas.csv").is_file()


def test_widths_command(tmp_path):
    assert main(["widths", "--config", "randomball_small_hilbert", "--out", str(tmp_path)]) == 0
    rows = io.read_csv(tmp_path / "widths.csv")
    assert rows[0]["n"] == "0" and rows[0]["tag"] == "exact"
    assert {r["tag"] for r in rows} <= {"exact", "upper", "lower"}


def test_report_command(tmp_path, capsys):
    assert main(["report", "--out", str(tmp_path)]) == 2
    main(["run", "--config", "frommatrix_twoline_hilbert", "--out", str(tmp_path)])
    capsys.readouterr()
    assert main(["report", "--out", str(tmp_path)]) == 0
    assert "C1_ii" in capsys.readouterr().out
    main(["run", "--config", "frommatrix_twoline_hilbert", "--out", str(tmp_path),
          "--override", "bounds.c1_scale=0.5"])
    assert main(["report", "--out", str(tmp_path)]) == 1


# -- lowerbound ------------------------------------------------------------------

def test_lowerbound_rejects_small_alpha(tmp_path):
    assert main(["lowerbound", "--alpha", "0.4", "--out", str(tmp_path)]) == 2


def test_lowerbound_small_run(tmp_path, capsys):
    rc = main(["lowerbound", "--levels", "3", "--trials", "2", "--seed", "1", "--out", str(tmp_path)])
    assert rc == 0
    assert "sigmas exact: True" in capsys.readouterr().out
    ratios = io.read_csv(tmp_path / "ratios.csv")
    assert [int(r["N"]) for r in ratios] == [4, 8]
    for name in ("sigmas.csv", "trials.csv", "summary.json"):
        assert (tmp_path / name).is_file()
    # sigmas are the dyadic block values
    s = [float(r["sigma_n"]) for r in io.read_csv(tmp_path / "sigmas.csv")]
    assert s[:8] == [1.0, 0.5, 0.25, 0.25, 0.125, 0.125, 0.125, 0.125]


# -- lemma fuzz ------------------------------------------------------------------

def test_lemma_fuzz_passes_and_is_reproducible(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["lemma-fuzz", "--K-max", "8", "--draws", "1000", "--seed", "3", "--out", str(a)]) == 0
    assert main(["lemma-fuzz", "--K-max", "8", "--draws", "1000", "--seed", "3", "--out", str(b)]) == 0
    assert (a / "lemma_worst.json").read_bytes() == (b / "lemma_worst.json").read_bytes()
    assert (a / "lemma_fuzz.csv").read_bytes() == (b / "lemma_fuzz.csv").read_bytes()
    worst = json.loads((a / "lemma_worst.json").read_text())
    assert worst["slack_log"] >= -1e-10


def test_lemma_fuzz_zero_draws_warns(tmp_path, capsys):
    assert main(["lemma-fuzz", "--draws", "0", "--out", str(tmp_path)]) == 0
    assert "warning" in capsys.readouterr().err


# -- determinism -----------------------------------------------------------------

@pytest.mark.parametrize("name", ["diagonal_linf", "randomball_l3", "frommatrix_hilbert"])
def test_byte_identical_reruns(tmp_path, name):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["run", "--config", name, "--out", str(a)]) == 0
    assert main(["run", "--config", name, "--out", str(b)]) == 0
    assert _files(a) == _files(b)


def test_csv_floats_round_trip(tmp_path):
    vals = [0.1, 1 / 3, 2.0 ** -1074, np.float64(1e300), float("inf")]
    io.write_csv(tmp_path / "x.csv", ["v"], [(v,) for v in vals])
    back = [float(r["v"]) for r in io.read_csv(tmp_path / "x.csv")]
    assert back == [float(v) for v in vals]


def test_bundled_config_list():
    names = bundled_configs()
    assert "diagonal_hilbert" in names and "dyadic_linf" in names
