"""Small codes whose tree-like neighborhoods hide extra parity constraints.

Two fixed constructions, both around the edge ``e = (v, c)`` with ``v = 0``
and ``c = 0``:

``section2``
    ``v`` sits in the root check ``c`` (five fresh outside variables) and in
    two local checks ``{v, x1..x5}`` and ``{v, x6..x10}``. Two outside checks
    ``x1 + x11 + ... + x15 = 0`` and ``x2 + x11 + ... + x15 = 0`` force
    ``x1 = x2`` on the neighborhood without creating a short cycle.

``section3``
    Local checks ``{v, x1..x4}`` and ``{v, x5..x8}``; each of the pairs
    (x1, x2), (x3, x4), (x5, x6), (x7, x8) is tied together by two outside
    checks sharing a fresh block of four variables. Together with the local
    checks the pair equalities force ``v = 0``.

Variable numbering: ``v`` is 0, ``x1..x_k`` are 1..k, outside variables follow.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

from . import bp
from .bp import Verdict
from .channels import Channel
from .gf2 import Codebook, enumerate_codewords, implicit_constraints, project, same_row_space
from .ml_oracle import Decision, bitwise_scores, channel_symbol_loglik, verdicts
from .tanner import (DirectedEdge, TannerGraph, from_matrix, local_check_matrix, unroll,
                     variable_index_set)

MAX_EXHAUSTIVE_INDEX_SET = 20
_CHUNK = 4096


@dataclass(frozen=True)
class CounterexampleCode:
    name: str
    H: np.ndarray
    edge: DirectedEdge
    I: tuple[int, ...]
    local_checks: np.ndarray
    expected_implicit: np.ndarray | None = None
    depth: int = 2

    @cached_property
    def graph(self) -> TannerGraph:
        return from_matrix(self.H)

    @cached_property
    def tree(self):
        return unroll(self.graph, self.edge, self.depth)

    @cached_property
    def codebook(self) -> Codebook:
        return enumerate_codewords(self.H)

    @cached_property
    def subcode(self):
        return project(self.codebook, self.I)

    @property
    def iteration(self) -> int:
        return self.depth // 2

    def implicit(self) -> np.ndarray:
        return implicit_constraints(self.H, self.I, self.local_checks)

    def local_only(self) -> "CounterexampleCode":
        """Same neighborhood with every outside check dropped, except the root check.

        Variables left in no check are removed as well.
        """
        tree_checks = {nd.origin for nd in self.tree.nodes if nd.kind == "check"}
        rows = sorted(tree_checks | {self.edge.check})
        H = self.H[rows]
        cols = [j for j in range(H.shape[1]) if H[:, j].any() or j in self.I]
        remap = {j: k for k, j in enumerate(cols)}
        edge = DirectedEdge(remap[self.edge.var], rows.index(self.edge.check))
        code = code_from_matrix(H[:, cols], edge, depth=self.depth, name=self.name + "-local")
        return replace(code, expected_implicit=np.zeros((0, len(code.I)), dtype=np.uint8))

    def verify(self) -> dict:
        """Certify tree-likeness and the implicit-constraint span."""
        found = self.implicit()
        out = {"tree_like": self.tree.is_tree_like, "implicit_rank": int(found.shape[0])}
        if self.expected_implicit is not None:
            out["implicit_matches"] = same_row_space(
                np.vstack([self.local_checks, found]),
                np.vstack([self.local_checks, self.expected_implicit]))
        return out


def code_from_matrix(H, edge: DirectedEdge, depth: int = 2, name: str = "custom") -> CounterexampleCode:
    """Wrap an arbitrary parity-check matrix around one of its edges."""
    H = np.asarray(H, dtype=np.uint8)
    G = from_matrix(H)
    T = unroll(G, edge, depth)
    I = variable_index_set(T)
    L = local_check_matrix(T, G) if T.is_tree_like else np.zeros((0, len(I)), np.uint8)
    return CounterexampleCode(name=name, H=H, edge=edge, I=I, local_checks=L, depth=depth)


def _matrix(n: int, checks: list[list[int]]) -> np.ndarray:
    H = np.zeros((len(checks), n), dtype=np.uint8)
    for r, vs in enumerate(checks):
        H[r, vs] = 1
    return H


def _pair_indicator(size: int, a: int, b: int) -> np.ndarray:
    row = np.zeros(size, dtype=np.uint8)
    row[[a, b]] = 1
    return row


def build_section2_code() -> CounterexampleCode:
    v = 0
    xs = list(range(1, 11))
    outer = list(range(11, 16))   # x11..x15
    root_ext = list(range(16, 21))
    checks = [
        [v] + root_ext,              # c: the root check of e = (v, c)
        [v] + xs[:5],                # local check c1
        [v] + xs[5:],                # local check c2
        [xs[0]] + outer,             # x1 + x11 + ... + x15 = 0
        [xs[1]] + outer,             # x2 + x11 + ... + x15 = 0
    ]
    H = _matrix(21, checks)
    code = code_from_matrix(H, DirectedEdge(v, 0), name="section2")
    expected = _pair_indicator(len(code.I), code.I.index(1), code.I.index(2))[None, :]
    return replace(code, expected_implicit=expected)


def build_section3_code() -> CounterexampleCode:
    v = 0
    xs = list(range(1, 9))
    root_ext = list(range(9, 13))
    checks = [[v] + root_ext, [v] + xs[:4], [v] + xs[4:]]
    nxt = 13
    pairs = [(1, 2), (3, 4), (5, 6), (7, 8)]
    for a, b in pairs:
        block = list(range(nxt, nxt + 4))
        nxt += 4
        checks.append([a] + block)
        checks.append([b] + block)
    H = _matrix(nxt, checks)
    code = code_from_matrix(H, DirectedEdge(v, 0), name="section3")
    expected = np.array([_pair_indicator(len(code.I), code.I.index(a), code.I.index(b))
                         for a, b in pairs])
    return replace(code, expected_implicit=expected)


BUILTIN_CODES = {"sec2": build_section2_code, "sec3": build_section3_code}


# -- witness search -------------------------------------------------------

def edge_messages(code: CounterexampleCode, llr_I: np.ndarray, iteration: int | None = None,
                  edge: DirectedEdge | None = None) -> np.ndarray:
    """BP message on the code's edge for a batch of LLR vectors on ``I``.

    Variables outside ``I`` get the neutral LLR 0.
    """
    iteration = code.iteration if iteration is None else iteration
    edge = code.edge if edge is None else edge
    llr_I = np.atleast_2d(llr_I)
    out = np.empty(llr_I.shape[0])
    cols = list(code.I)
    for s in range(0, llr_I.shape[0], _CHUNK):
        block = llr_I[s:s + _CHUNK]
        X = np.zeros((block.shape[0], code.graph.n_vars))
        X[:, cols] = block
        trace = bp.run_bp(code.graph, X, iteration)
        out[s:s + block.shape[0]] = trace.message(edge, iteration)
    return out


def observation_patterns(ch: Channel, size: int) -> np.ndarray:
    """Every output pattern of length ``size``, lexicographic with column 0 most significant."""
    if ch.outputs is None:
        raise ValueError(f"exhaustive enumeration needs a finite-output channel, got {ch.kind}")
    return np.array(list(itertools.product(ch.outputs, repeat=size)), dtype=np.uint8).reshape(-1, size)


@dataclass
class WitnessReport:
    code: str
    channel: str
    mode: str
    patterns_scanned: int
    disagreements: int
    pattern: list | None = None
    bp_message: float | None = None
    bp_verdict: Verdict | None = None
    local_ml: Decision | None = None
    trace: dict | None = field(default=None, repr=False)

    @property
    def found(self) -> bool:
        return self.pattern is not None

    def to_dict(self) -> dict:
        d = {"code": self.code, "channel": self.channel, "mode": self.mode,
             "patterns_scanned": self.patterns_scanned, "disagreements": self.disagreements,
             "found": self.found}
        if self.found:
            d.update({
                "pattern": self.pattern,
                "bp": {"message": self.bp_message, "verdict": self.bp_verdict.label},
                "local_ml": json.loads(self.local_ml.to_json()),
                "trace": self.trace,
            })
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _trace_dict(trace: bp.MessageTrace) -> dict:
    return {"edges": [list(e) for e in trace.edges],
            "v2c": trace.v2c.tolist(), "c2v": trace.c2v.tolist()}


def find_witness(code: CounterexampleCode, ch: Channel, mode: str = "exhaustive", *,
                 n_samples: int = 10_000, seed: int = 0) -> WitnessReport:
    """First observation pattern on ``I`` where BP and local ML disagree.

    ``exhaustive`` scans every output pattern in lexicographic order (root
    observation most significant); ``sampled`` draws observations of random
    codewords. Patterns where either side ties never count.
    """
    if mode == "exhaustive":
        if len(code.I) > MAX_EXHAUSTIVE_INDEX_SET:
            raise ValueError(f"index set of size {len(code.I)} too large for exhaustive search")
        Y = observation_patterns(ch, len(code.I))
    elif mode == "sampled":
        rng = np.random.default_rng(seed)
        picks = rng.integers(0, len(code.codebook), size=n_samples)
        X = code.codebook.words[picks][:, list(code.I)]
        Y = ch.sample(X, rng)
    else:
        raise ValueError(f"unknown mode {mode!r}")

    msgs = edge_messages(code, ch.llr(Y))
    bp_v = bp.classify(msgs)
    s0, s1 = bitwise_scores(code.subcode.words, channel_symbol_loglik(ch, Y), 0)
    ml_v = verdicts(s0, s1)
    bad = np.flatnonzero((bp_v != Verdict.TIE) & (ml_v != Verdict.TIE) & (bp_v != ml_v))
    report = WitnessReport(code=code.name, channel=str(ch), mode=mode,
                           patterns_scanned=int(Y.shape[0]), disagreements=int(bad.size))
    if bad.size:
        k = int(bad[0])
        X = np.zeros(code.graph.n_vars)
        X[list(code.I)] = ch.llr(Y[k])
        trace = bp.run_bp(code.graph, X, code.iteration)
        report.pattern = Y[k].tolist()
        report.bp_message = float(msgs[k])
        report.bp_verdict = Verdict(int(bp_v[k]))
        report.local_ml = Decision(Verdict(int(ml_v[k])), float(s0[k]), float(s1[k]))
        report.trace = _trace_dict(trace)
    return report
