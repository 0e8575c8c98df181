import json

import numpy as np
import pytest

from localbp.bp import Verdict
from localbp.channels import BEC, BIAWGN, BSC
from localbp.counterexamples import (code_from_matrix, edge_messages, find_witness,
                                     observation_patterns)
from localbp.gf2 import rank, same_row_space
from localbp.tanner import DirectedEdge


def test_section2_shape(sec2):
    assert sec2.H.shape == (5, 21)
    assert rank(sec2.H) == 5
    assert sec2.codebook.dimension == 16
    assert sec2.tree.is_tree_like
    assert len(sec2.I) == 11 and sec2.I[0] == 0


def test_section3_shape(sec3):
    assert sec3.H.shape == (11, 29)
    assert rank(sec3.H) == 10
    assert sec3.codebook.dimension == 19
    assert sec3.tree.is_tree_like
    assert sec3.I == tuple(range(9))


def test_section3_forces_root_bit(sec3):
    assert not sec3.subcode.words[:, 0].any()


def test_verify_reports_expected_span(sec2, sec3):
    for code in (sec2, sec3):
        r = code.verify()
        assert r["tree_like"] and r["implicit_matches"]
    assert sec2.verify()["implicit_rank"] == 1
    assert sec3.verify()["implicit_rank"] == 3


def test_section3_implicit_span_contains_root_indicator(sec3):
    e_v = np.zeros(9, dtype=np.uint8)
    e_v[0] = 1
    basis = np.vstack([sec3.local_checks, sec3.implicit()])
    assert same_row_space(basis, np.vstack([basis, e_v]))


def test_local_only_has_no_implicit_constraints(sec2, sec3):
    for code in (sec2, sec3):
        loc = code.local_only()
        assert loc.I == code.I
        assert loc.implicit().shape[0] == 0
        assert loc.verify()["implicit_matches"]


def test_local_only_has_no_witness(sec3):
    r = find_witness(sec3.local_only(), BSC(0.1))
    assert r.disagreements == 0 and not r.found


def test_section3_witness(sec3):
    r = find_witness(sec3, BSC(0.1))
    assert r.patterns_scanned == 512
    assert r.found
    assert r.pattern == [1] + [0] * 8
    assert r.bp_verdict == Verdict.ONE and r.bp_message < 0
    assert r.local_ml.verdict == Verdict.ZERO
    assert r.disagreements == 256


def test_section2_no_disagreement(sec2):
    r = find_witness(sec2, BSC(0.1))
    assert r.patterns_scanned == 2 ** 11
    assert r.disagreements == 0 and not r.found
    d = json.loads(r.to_json())
    assert d["found"] is False and "pattern" not in d


def test_witness_json_roundtrip(sec3):
    d = json.loads(find_witness(sec3, BSC(0.1)).to_json())
    assert d["bp"]["verdict"] == "one-bit"
    assert d["local_ml"]["verdict"] == "zero-bit"
    assert len(d["trace"]["edges"]) == len(sec3.graph.edges)
    assert np.asarray(d["trace"]["v2c"]).shape == (2, len(sec3.graph.edges))


def test_sampled_mode_is_deterministic(sec3):
    a = find_witness(sec3, BSC(0.2), "sampled", n_samples=2000, seed=3)
    b = find_witness(sec3, BSC(0.2), "sampled", n_samples=2000, seed=3)
    assert a.to_json() == b.to_json()
    assert a.patterns_scanned == 2000 and a.found


def test_witness_errors(sec3):
    with pytest.raises(ValueError):
        find_witness(sec3, BSC(0.1), "bogus")
    with pytest.raises(ValueError):
        find_witness(sec3, BIAWGN(0.8))


def test_observation_patterns_order():
    Y = observation_patterns(BSC(0.1), 3)
    assert Y.shape == (8, 3)
    assert Y[1].tolist() == [0, 0, 1] and Y[4].tolist() == [1, 0, 0]
    assert observation_patterns(BEC(0.1), 2).shape == (9, 2)


def test_edge_messages_ignore_outside_variables(sec2):
    rng = np.random.default_rng(0)
    llr = rng.normal(size=(5, len(sec2.I)))
    a = edge_messages(sec2, llr)
    # chunking must not change anything
    b = np.concatenate([edge_messages(sec2, llr[i:i + 1]) for i in range(5)])
    assert np.array_equal(a, b)


def test_code_from_matrix_non_tree_like():
    # variable 0 meets variable 1 through both of its other checks
    H = np.array([[1, 0, 1], [1, 1, 0], [1, 1, 0]], dtype=np.uint8)
    code = code_from_matrix(H, DirectedEdge(0, 0))
    assert not code.tree.is_tree_like
    assert code.local_checks.shape[0] == 0
