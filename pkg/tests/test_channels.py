import itertools
import math

import numpy as np
import pytest

from localbp.channels import (BEC, BIAWGN, BSC, ERASED, LLR_CLAMP, ChannelSpecError, likelihood,
                              parse_channel)


def test_noiseless_bsc():
    rng = np.random.default_rng(0)
    assert (BSC(0.0).sample(np.ones(1000, dtype=np.uint8), rng) == 1).all()


def test_bec_near_one_erases_everything():
    rng = np.random.default_rng(0)
    y = BEC(1 - 1e-9).sample(np.zeros(10_000, dtype=np.uint8), rng)
    assert (y == ERASED).all()


def test_bsc_flip_rate_within_three_sigma():
    rng = np.random.default_rng(7)
    y = BSC(0.1).sample(np.zeros(100_000, dtype=np.uint8), rng)
    sigma = math.sqrt(0.1 * 0.9 / 1e5)
    assert abs(y.mean() - 0.1) <= 3 * sigma


def test_sampling_is_seeded():
    a = BIAWGN(0.8).sample(np.zeros(5), np.random.default_rng(3))
    b = BIAWGN(0.8).sample(np.zeros(5), np.random.default_rng(3))
    assert (a == b).all()


def test_llr_values():
    assert BEC(0.3).llr(ERASED) == 0.0
    assert BSC(0.2).llr(0) == pytest.approx(math.log(0.8 / 0.2))
    assert BSC(0.2).llr(1) == pytest.approx(-math.log(0.8 / 0.2))
    assert BIAWGN(0.8).llr(0.3) == pytest.approx(2 * 0.3 / 0.64)
    assert BSC(0.0).llr(1) == -LLR_CLAMP
    assert BSC(0.5).llr(0) == 0.0


def test_llr_is_log_ratio_of_log_prob():
    for ch, ys in ((BSC(0.07), [0, 1]), (BEC(0.2), [0, 1, ERASED]), (BIAWGN(1.3), [-0.4, 0.0, 2.1])):
        for y in ys:
            with np.errstate(invalid="ignore"):
                ratio = ch.log_prob(y, 0) - ch.log_prob(y, 1)
            if np.isfinite(ratio):
                assert ch.llr(y) == pytest.approx(ratio)


def _compose_bsc(p, q):
    # flip iff exactly one stage flips
    total = 0.0
    for a, b in itertools.product((0, 1), repeat=2):
        pr = (p if a else 1 - p) * (q if b else 1 - q)
        if a ^ b:
            total += pr
    return total


def test_degrade_bsc():
    assert BSC(0.1).degrade(0.1).param == pytest.approx(0.18)
    assert _compose_bsc(0.1, 0.1) == pytest.approx(0.18)


def test_degrade_bec():
    assert BEC(0.2).degrade(0.5).param == pytest.approx(1 - 0.8 * 0.5)


def test_degrade_biawgn():
    assert BIAWGN(0.8).degrade(0.6).param == pytest.approx(1.0)


@pytest.mark.parametrize("ch", [BSC(0.13), BEC(0.4), BIAWGN(0.9)])
def test_identity_degradation(ch):
    assert ch.degrade(0.0) == ch


def test_bsc_degradation_associative():
    rng = np.random.default_rng(1)
    for _ in range(200):
        p, q1, q2 = rng.uniform(0, 0.5, size=3)
        lhs = BSC(p).degrade(q1).degrade(q2).param
        rhs = BSC(p).degrade(q1 * (1 - q2) + q2 * (1 - q1)).param
        assert lhs == pytest.approx(rhs, abs=1e-15)
        assert BSC(p).degrade(q1).param >= p - 1e-15


def test_invalid_parameters():
    with pytest.raises(ChannelSpecError):
        BSC(0.7)
    with pytest.raises(ChannelSpecError):
        BIAWGN(0.0)
    with pytest.raises(ChannelSpecError):
        BSC(0.1).degrade(0.9)
    with pytest.raises(ChannelSpecError):
        BEC(0.1).degrade(-0.1)


def test_parse_channel():
    assert parse_channel("bsc:0.05") == BSC(0.05)
    assert parse_channel("biawgn:0.8") == BIAWGN(0.8)
    assert parse_channel("bec:0.3") == BEC(0.3)
    with pytest.raises(ChannelSpecError, match="qsc"):
        parse_channel("qsc:0.1")
    with pytest.raises(ChannelSpecError, match="abc"):
        parse_channel("bsc:abc")


def test_likelihood():
    p = 0.1
    x = np.zeros(11, dtype=np.uint8)
    assert likelihood(BSC(p), x, x) == pytest.approx(11 * math.log(1 - p))
    assert likelihood(BEC(0.3), np.full(4, ERASED), np.array([0, 1, 1, 0])) == pytest.approx(4 * math.log(0.3))
    y = x.copy()
    y[[2, 7]] = 1
    direct = math.log(math.prod(p if a != b else 1 - p for a, b in zip(y, x)))
    assert likelihood(BSC(p), y, x) == pytest.approx(direct)
    assert likelihood(BSC(p), y, x) == pytest.approx(9 * math.log(0.9) + 2 * math.log(0.1))
    with pytest.raises(ValueError):
        likelihood(BSC(p), y, x[:3])


def test_all_erased_likelihood_is_constant():
    y = np.full(5, ERASED)
    vals = {likelihood(BEC(0.25), y, np.array(x)) for x in itertools.product((0, 1), repeat=5)}
    assert len(vals) == 1


@pytest.mark.parametrize("ch", [BSC(0.1), BEC(0.3), BIAWGN(0.8)])
def test_output_symmetry(ch):
    """LLR under x=0 and negated LLR under x=1 have the same distribution."""
    rng = np.random.default_rng(11)
    n = 100_000
    l0 = ch.llr(ch.sample(np.zeros(n, dtype=np.uint8), rng))
    l1 = -ch.llr(ch.sample(np.ones(n, dtype=np.uint8), rng))
    if ch.outputs is not None:
        for v in np.unique(np.concatenate([l0, l1])):
            f0, f1 = (l0 == v).mean(), (l1 == v).mean()
            assert abs(f0 - f1) <= 4 * math.sqrt(max(f0, 1e-6) / n) + 1e-9
    else:
        from scipy.stats import ks_2samp
        assert ks_2samp(l0, l1).pvalue > 1e-3
