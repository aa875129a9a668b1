import math
import os
from pathlib import Path

import pytest

import tsdelay

CONFIGS = Path(os.environ.get("TSDELAY_CONFIGS", Path(__file__).resolve().parents[2] / "configs"))


def test_expression_roundtrip_and_eval():
    e = tsdelay.parse_expr("2*exp(-t)+1")
    assert e(0.0) == 3.0
    again = tsdelay.parse_expr(tsdelay.format_expr(e))
    assert tsdelay.same_expr(e, again)
    assert tsdelay.format_expr(tsdelay.parse_expr("-3/2")) == "((-3)/2)"


def test_syntax_error_carries_offset():
    with pytest.raises(tsdelay.SyntaxError, match=r"2:"):
        tsdelay.parse_expr("t^")


def test_eval_error():
    with pytest.raises(tsdelay.EvalError):
        tsdelay.parse_expr("1/t")(0.0)


def test_time_scale_jumps():
    z = tsdelay.TimeScale.q_lattice(2.0)
    assert z.sigma(4.0) == 8.0
    assert z.mu(4.0) == 4.0
    assert tsdelay.TimeScale.real_line().mu(1.5) == 0.0


def test_integers_simulation_matches_recurrence():
    cfg = tsdelay.load_config(str(CONFIGS / "integers.cfg"))
    cfg.horizon = 30
    out = tsdelay.simulate(cfg)
    xs = dict(zip(out["t"], out["x"]))
    ref = {-1.0: 1.0, 0.0: 1.0}
    for n in range(1, 31):
        ref[float(n)] = ref[n - 1.0] - 0.25 * ref[n - 2.0]
    for n in range(0, 31):
        assert xs[float(n)] == ref[float(n)]


def test_certify_first_example():
    cfg = tsdelay.load_config(str(CONFIGS / "example1.cfg"))
    cert = tsdelay.certify(cfg)
    assert cert.verdict == "ExpStable_SplitWindow"
    assert cert.lambda_ == pytest.approx(1 / 3)
    assert cert.alpha == pytest.approx(1 / 6)
    assert math.isclose(cert.V0, 7 / 24, abs_tol=1e-12)


def test_axioms_and_compare():
    ok, text = tsdelay.verify_axioms(tsdelay.load_config(str(CONFIGS / "axioms_q.cfg")))
    assert ok, text
    ok, text = tsdelay.verify_axioms(tsdelay.load_config(str(CONFIGS / "axioms_broken.cfg")))
    assert not ok
    assert "closure FAIL" in text
    report = tsdelay.compare(tsdelay.load_config(str(CONFIGS / "example2.cfg")))
    assert "fixed-point-contraction FAILS" in report
