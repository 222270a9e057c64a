import csv
import io
import json
import subprocess
import sys

import pytest

from polyharmonic import cli
from polyharmonic.profile import OutcomeKind, ShootOutcome


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    return code, json.loads(out)


def test_classify_prop_a(capsys):
    code, doc = run_json(capsys, "classify", "--n", "3", "--m", "2", "--alpha", "-2", "--sign", "-")
    assert code == 0
    assert doc["schema"] == "polyharmonic/1"
    assert doc["exists_positive"] is True and doc["citation_positive"] == "PropA"
    assert doc["exists_nonneg"] is None
    assert doc["thresholds"] == {"p_s": "inf", "singular_threshold": "-1"}


def test_classify_theorem2(capsys):
    code, doc = run_json(capsys, "classify", "--n", "5", "--m", "2", "--alpha", "9", "--sign", "+")
    assert code == 0
    assert doc["exists_positive"] is True
    assert doc["citation_positive"].startswith("Theorem2")
    assert doc["exists_nonneg"] is True and doc["positivity_gap"] is False


def test_classify_flags_inexact_alpha(capsys):
    _, doc = run_json(capsys, "classify", "--n", "3", "--m", "1", "--alpha", "0.5", "--sign", "+")
    assert doc["spec"]["alpha_exact"] is False
    _, doc = run_json(capsys, "classify", "--n", "3", "--m", "1", "--alpha", "1/2", "--sign", "+")
    assert doc["spec"]["alpha_exact"] is True and doc["spec"]["alpha"] == "1/2"


@pytest.mark.parametrize(
    "argv",
    [
        ["classify", "--n", "0", "--m", "1", "--alpha", "1", "--sign", "+"],
        ["classify", "--n", "3", "--m", "1", "--alpha", "x", "--sign", "+"],
        ["certificate", "decay", "--n", "3", "--m", "1", "--alpha", "1"],
        ["certificate", "moser", "--n", "3", "--m", "1", "--alpha", "0"],
        ["shoot", "--n", "3", "--m", "1", "--alpha", "1/2", "--sign", "-", "--init", "-1"],
        ["search", "--n", "3", "--m", "1", "--alpha", "3", "--sign", "-", "--vary", "0",
         "--bracket", "0.5", "100"],
        ["verify", "--family", "bubble", "--n", "4", "--m", "2"],
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2
    assert "error" in err


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["classify", "--n", "3"])
    assert exc.value.code == 2


def test_table_minus_m2_n3(capsys, tmp_path):
    path = tmp_path / "t.csv"
    code, out, _ = run(capsys, "table", "--m", "2", "--n", "3", "--sign", "-", "--csv", str(path))
    assert code == 0
    assert "p_s = inf" in out
    rows = list(csv.DictReader(path.open()))
    assert rows[-1]["interval"] == "(1, inf)" and rows[-1]["exists_positive"] == "False"
    assert rows[0]["exists_positive"] == "True"


def test_table_plus_m1_n3(capsys, tmp_path):
    path = tmp_path / "t.csv"
    run(capsys, "table", "--m", "1", "--n", "3", "--sign", "+", "--csv", str(path))
    rows = list(csv.DictReader(path.open()))
    for r in rows:
        lo_le_one = r["interval"] in ("(-inf, 0)", "[0, 1]")
        assert (r["exists_positive"] == "True") == lo_le_one


def test_table_minus_m3_n7(capsys, tmp_path):
    path = tmp_path / "t.csv"
    run(capsys, "table", "--m", "3", "--n", "7", "--sign", "-", "--csv", str(path))
    rows = list(csv.DictReader(path.open()))
    assert rows[-1]["interval"] == "[13, inf)" and rows[-1]["exists_positive"] == "True"


def test_shoot_sinc_writes_profile(capsys, tmp_path):
    prof = tmp_path / "p.csv"
    js = tmp_path / "o.json"
    code, doc = run_json(capsys, "shoot", "--n", "3", "--m", "1", "--alpha", "1", "--sign", "-",
                         "--init", "1", "--rmax", "10", "--out", str(prof), "--json", str(js))
    assert code == 0
    assert doc["outcome"]["kind"] == "ZeroTouch"
    assert abs(doc["outcome"]["r_star"] - 3.141592653589793) < 1e-6
    assert json.loads(js.read_text()) == doc
    assert prof.read_text().startswith("# Delta^1 u = -u^1 in R^3")


def test_shoot_step_underflow_exits_4(capsys, monkeypatch):
    from polyharmonic import shooting
    real = shooting.solve_ivp

    def fake(spec, init, r_max, **kw):
        profile, _ = real(spec, init, 1.0)
        return profile, ShootOutcome(OutcomeKind.STEP_UNDERFLOW, 1.0, (1.0, 1.0), "forced")

    monkeypatch.setattr(shooting, "solve_ivp", fake)
    code, _, _ = run(capsys, "shoot", "--n", "3", "--m", "1", "--alpha", "2", "--sign", "-")
    assert code == 4


def test_search_writes_both_profiles(capsys, tmp_path):
    prefix = tmp_path / "s"
    code, doc = run_json(capsys, "search", "--n", "5", "--m", "2", "--alpha", "9", "--sign", "+",
                         "--init", "1", "0", "--vary", "1", "--bracket", "-20", "0",
                         "--rtarget", "50", "--out-prefix", str(prefix))
    assert code == 0
    assert {doc["outcome_lo"]["kind"], doc["outcome_hi"]["kind"]} >= {"ZeroTouch"}
    assert (tmp_path / "s_lo.csv").exists() and (tmp_path / "s_hi.csv").exists()


def test_verify_power(capsys):
    code, doc = run_json(capsys, "verify", "--family", "power", "--n", "3", "--m", "2",
                         "--alpha", "1/2")
    assert code == 0
    assert doc["residual"]["max_residual"] <= 1e-12
    assert doc["params"]["C_exact"] == f"1/{3024 ** 2}"
    assert doc["passed"]


def test_verify_bubble(capsys):
    code, doc = run_json(capsys, "verify", "--family", "bubble", "--n", "5", "--m", "2",
                         "--threshold", "1e-6")
    assert code == 0 and doc["passed"]
    assert doc["expected_constant"] == "105/16"
    assert abs(doc["eigen_ratio_mean"] - 105 / 16) < 1e-8


def test_certificate_moser(capsys, tmp_path):
    path = tmp_path / "c.json"
    code, doc = run_json(capsys, "certificate", "moser", "--n", "3", "--m", "1", "--alpha", "1/2",
                         "--out", str(path))
    assert code == 0
    assert doc["j_star"] == 0 and doc["q_min"] == 4
    assert doc["absorption"][0]["equality_at_zero"] is True
    assert json.loads(path.read_text())["schema"] == "polyharmonic/1"


def test_certificate_decay(capsys):
    code, doc = run_json(capsys, "certificate", "decay", "--n", "5", "--m", "2", "--alpha", "2")
    assert (doc["cutoff_power"], doc["decay_exponent"]) == ("8", "1")
    assert doc["liouville_applicable"] is True


SWEEP = ["sweep", "--ns", "3,5", "--ms", "1,2", "--alphas=-2,1/2,3,9", "--shoot"]


def test_sweep_rows_independent_of_parallelism(capsys, tmp_path):
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    c1, _, _ = run(capsys, *SWEEP, "--jobs", "1", "--out", str(p1))
    c2, _, err = run(capsys, *SWEEP, "--jobs", "3", "--out", str(p2))
    assert c1 == c2 == 0
    assert p1.read_text() == p2.read_text()
    rows = list(csv.DictReader(p1.open()))
    assert len(rows) == 32
    assert all(r["agreement"] in ("agree", "inconclusive") for r in rows)
    assert all(r["evidence"].startswith("evidence:") for r in rows)
    assert "0 disagreements" in err


def test_sweep_jobs_from_environment(capsys, monkeypatch):
    monkeypatch.setenv(cli.JOBS_ENV, "2")
    code, out, _ = run(capsys, "sweep", "--alphas", "1/2,2", "--ms", "1,2")
    assert code == 0
    assert len(list(csv.DictReader(io.StringIO(out)))) == 8
    monkeypatch.setenv(cli.JOBS_ENV, "many")
    code, _, _ = run(capsys, "sweep", "--alphas", "1/2")
    assert code == 2


def test_sweep_disagreement_exits_3(capsys):
    # a tiny a_0 pushes the Lane-Emden zero (near 690) past the horizon 30
    code, out, err = run(capsys, "sweep", "--ns", "3", "--ms", "1", "--alphas", "3", "--signs", "-",
                         "--shoot", "--init", "0.01")
    assert code == 3
    row = next(csv.DictReader(io.StringIO(out)))
    assert row["outcome"] == "Survived" and row["agreement"] == "disagree"


def test_agreement_rules():
    from polyharmonic.core import ProblemSpec
    survived = ShootOutcome(OutcomeKind.SURVIVED, 30.0)
    blew = ShootOutcome(OutcomeKind.BLOW_UP, 3.0)
    touched = ShootOutcome(OutcomeKind.ZERO_TOUCH, 3.0)
    plus = ProblemSpec(5, 2, 9, 1)
    assert cli.agreement(plus, True, [1.0, 0.0], survived) == "disagree"
    assert cli.agreement(plus, True, [1.0, 0.0], blew) == "agree"
    assert cli.agreement(plus, True, [1.0, -1.0], touched) == "inconclusive"
    minus = ProblemSpec(3, 1, 3, -1)
    assert cli.agreement(minus, False, [1.0], touched) == "agree"
    assert cli.agreement(minus, False, [1.0], survived) == "disagree"


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "polyharmonic", "certificate", "moser", "--n", "3",
                          "--m", "2", "--alpha", "1/2"], capture_output=True, text=True, check=True)
    doc = json.loads(out.stdout)
    assert doc["q_min"] == 4 and doc["j_star"] == 0


@pytest.mark.parametrize("n, m, sign", [(5, 2, 1), (7, 3, -1)])
def test_verify_bubble_defaults_follow_order(capsys, n, m, sign):
    code, doc = run_json(capsys, "verify", "--family", "bubble", "--n", str(n), "--m", str(m),
                         "--lam", "2")
    assert code == 0 and doc["passed"]
    assert doc["spec"]["sign"] == sign
    assert doc["eigen_ratio_spread"] < 1e-6
