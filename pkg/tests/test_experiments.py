import itertools
import json
import math
from dataclasses import dataclass
from typing import ClassVar

import numpy as np
import pytest

from _oracles import tanh_check
from localbp import experiments as ex
from localbp.channels import BEC, BIAWGN, BSC, ChannelSpecError

# pure-Python tanh-rule sum over all 512 patterns, frozen once
SEC3_EXACT_BSC005 = 0.043805122249999905


def sec3_tree_error(p):
    """Exact error of the depth-2 message on the section-3 edge, by hand."""
    a = math.log((1 - p) / p)
    total = 0.0
    for y in itertools.product((0, 1), repeat=9):
        llr = [a if b == 0 else -a for b in y]
        m = llr[0] + tanh_check(llr[1:5]) + tanh_check(llr[5:9])
        prob = math.prod(p if b else 1 - p for b in y)
        total += prob * (1.0 if m < 0 else 0.5 if m == 0 else 0.0)
    return total


@dataclass(frozen=True)
class LopsidedBSC(BSC):
    """Flip probability of a 1 is twice that of a 0; not output-symmetric."""
    kind: ClassVar[str] = "lopsided"

    def log_prob(self, y, x):
        p = np.where(np.asarray(x) == 0, self.param, 2 * self.param)
        agree = np.asarray(y) == np.asarray(x)
        return np.where(agree, np.log1p(-p), np.log(p)).astype(float)


def test_error_weights():
    assert ex.error_weights([1.0, -1.0, 0.0]).tolist() == [0.0, 1.0, 0.5]
    assert ex.error_weights([1.0, -1.0, 0.0], sent_bit=1).tolist() == [1.0, 0.0, 0.5]


def test_exact_frozen_value(sec3):
    r = ex.message_error_exact(sec3, BSC(0.05))
    assert r.p_hat == pytest.approx(SEC3_EXACT_BSC005, abs=1e-14)
    assert r.trials == 512 and r.ci_half_width == 0.0


@pytest.mark.parametrize("p", [0.02, 0.1, 0.3])
def test_exact_matches_hand_oracle(sec3, p):
    assert ex.message_error_exact(sec3, BSC(p)).p_hat == pytest.approx(sec3_tree_error(p), abs=1e-13)


def test_exact_endpoints(sec2, sec3):
    for code in (sec2, sec3):
        assert ex.message_error_exact(code, BSC(0.0)).p_hat == 0.0
        assert ex.message_error_exact(code, BSC(0.5)).p_hat == pytest.approx(0.5, abs=1e-12)
        assert ex.message_error_exact(code, BEC(1.0)).p_hat == pytest.approx(0.5)


@pytest.mark.parametrize("p", [0.05, 0.08, 0.1])
def test_section2_root_observation_decides(sec2, p):
    # two checks with five children each never outweigh the root LLR here
    assert ex.message_error_exact(sec2, BSC(p)).p_hat == pytest.approx(p, abs=1e-14)


def test_exact_rejects_continuous(sec3):
    with pytest.raises(ValueError):
        ex.message_error_exact(sec3, BIAWGN(0.8))
    with pytest.raises(ValueError):
        ex.message_error_exact(sec3, BSC(0.1), iteration=2)


def test_mc_deterministic_and_close(sec3):
    a = ex.message_error_mc(sec3, BSC(0.05), 20_000, seed=7)
    b = ex.message_error_mc(sec3, BSC(0.05), 20_000, seed=7)
    assert a == b
    assert a.mode == "monte-carlo" and a.trials == 20_000
    assert a.contains(SEC3_EXACT_BSC005)
    with pytest.raises(ValueError):
        ex.message_error_mc(sec3, BSC(0.05), 0, seed=0)


def test_pool_estimates():
    e = [ex.ErrorEstimate(0.1, 100, 0.0, "monte-carlo"), ex.ErrorEstimate(0.3, 300, 0.0, "monte-carlo")]
    pooled = ex.pool_estimates(e)
    assert pooled.trials == 400 and pooled.p_hat == pytest.approx(0.25)
    assert pooled.ci_half_width == pytest.approx(3 * math.sqrt(0.25 * 0.75 / 400))


def test_auxiliary_channel_rates():
    rng = np.random.default_rng(0)
    y = np.zeros(200_000, dtype=np.uint8)
    assert ex.auxiliary_channel(BSC(0.1), y, 0.2, rng).mean() == pytest.approx(0.2, abs=0.005)
    e = ex.auxiliary_channel(BEC(0.1), y, 0.3, rng)
    assert (e == 2).mean() == pytest.approx(0.3, abs=0.005)
    g = ex.auxiliary_channel(BIAWGN(1.0), np.zeros(200_000), 0.5, rng)
    assert g.std() == pytest.approx(0.5, abs=0.005)


def test_zero_degradation_is_equality(sec3):
    r = ex.check_monotonicity(sec3, BSC(0.05), 0.0, mode="exact")
    assert r.p == r.p_prime and r.passed


def test_bsc_degradation_for():
    q = ex.bsc_degradation_for(0.05, 0.08)
    assert BSC(0.05).degrade(q).param == pytest.approx(0.08, abs=1e-15)


def test_monotonicity_exact_and_sweep(sec3):
    q = ex.bsc_degradation_for(0.05, 0.08)
    r = ex.check_monotonicity(sec3, BSC(0.05), q)
    assert r.mode == "exact" and r.p < r.p_prime
    rows = ex.monotonicity_sweep(sec3, [0.01, 0.05, 0.1], 0.02)
    assert ex.sweep_dominates(rows)
    assert not ex.sweep_dominates([{"p": 0.2, "p_prime": 0.1}])


def test_monotonicity_coupled_awgn(sec3):
    r = ex.check_monotonicity(sec3, BIAWGN(0.8), math.sqrt(1.0 - 0.64), trials=20_000, seed=1)
    assert r.mode == "monte-carlo" and r.passed
    assert r.degraded == "biawgn:1"
    with pytest.raises(ValueError):
        ex.check_monotonicity(sec3, BSC(0.1), 0.1, mode="bogus")


def test_equivalence(sec2):
    r = ex.embedded_vs_tree_equivalence(sec2, BIAWGN(0.8), 500, seed=0)
    assert r.passed and r.total == 500


def test_independence_on_symmetric_channel(sec2, sec3):
    r = ex.codeword_independence(sec3, BSC(0.05))
    assert r.passed and r.n_codewords == 2 ** 19
    assert r.n_projections == sec3.subcode.words.shape[0]
    assert r.probabilities[0] == pytest.approx(SEC3_EXACT_BSC005, abs=1e-14)
    assert ex.codeword_independence(sec2, BEC(0.3)).passed


def test_independence_detects_asymmetric_channel(sec3):
    r = ex.codeword_independence(sec3, LopsidedBSC(0.05))
    assert not r.passed and r.max_diff > 1e-3


def test_run_suite_subset_and_outputs(tmp_path):
    cfg = ex.SuiteConfig(sections=("b2", "mc"), mc_trials=20_000)
    s1 = ex.run_suite(cfg, out_dir=tmp_path / "a")
    ex.run_suite(ex.SuiteConfig(sections=("b2", "mc"), mc_trials=20_000), out_dir=tmp_path / "b")
    assert s1["passed"]
    assert set(s1["sections"]) == {"b2", "mc"}
    ja = (tmp_path / "a" / "summary.json").read_bytes()
    assert ja == (tmp_path / "b" / "summary.json").read_bytes()
    assert json.loads(ja)["sections"]["mc"]["sec3"]["exact"] == pytest.approx(SEC3_EXACT_BSC005)
    lines = (tmp_path / "a" / "table_mc_sec3.csv").read_text().splitlines()
    assert lines[0] == "channel_param,exact,p_hat,ci_half_width" and len(lines) == 2


def test_run_suite_monotonicity_table(tmp_path):
    s = ex.run_suite(ex.SuiteConfig(sections=("c2",), mc_trials=10_000), out_dir=tmp_path)
    assert s["passed"]
    rows = (tmp_path / "table_monotonicity_sec3.csv").read_text().splitlines()
    assert len(rows) == 11


def test_run_suite_config_errors():
    with pytest.raises(ValueError):
        ex.run_suite(ex.SuiteConfig(sections=("nope",)))
    with pytest.raises(ChannelSpecError):
        ex.run_suite(ex.SuiteConfig(witness_channel="gauss:1"))


def test_run_suite_records_section_failure():
    s = ex.run_suite(ex.SuiteConfig(sections=("c2",), monotonicity_channel="bec:0.1"))
    assert not s["passed"] and "error" in s["sections"]["c2"]
