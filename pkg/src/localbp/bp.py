"""Flooding sum-product decoding with full per-edge message traces.

Messages are LLRs (positive favours 0). Iteration 0 variable-to-check
messages are the channel LLRs; iteration ``l`` computes all check-to-variable
messages from iteration ``l-1`` and then all variable-to-check messages, so
the message on ``(v, c)`` at iteration ``l`` is a function of the depth-``2l``
directed neighborhood of that edge only.

Check updates fold the pairwise rule ``a [+] b = 2 atanh(tanh(a/2) tanh(b/2))``
in its log-domain form, which stays accurate where ``tanh`` saturates. The
graph decoder and the standalone tree evaluator call the same fold helpers
in the same operand order, so their outputs agree bit for bit.

Every function accepts a single LLR vector of shape ``(n,)`` or a batch of
shape ``(batch, n)``; per-edge values then carry a trailing batch axis.
"""

from __future__ import annotations

import csv
import io
from collections.abc import Mapping
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .channels import LLR_CLAMP
from .tanner import CHECK_TO_VAR, VAR_TO_CHECK, ComputationTree, DirectedEdge, TannerGraph


class Verdict(IntEnum):
    ZERO = 0
    ONE = 1
    TIE = 2

    @property
    def label(self) -> str:
        return {0: "zero-bit", 1: "one-bit", 2: "tie"}[int(self)]


def classify(llr, tol: float = 0.0):
    """Map LLRs to verdict codes: 0 if > tol, 1 if < -tol, 2 (tie) otherwise."""
    llr = np.asarray(llr)
    out = np.where(llr > tol, Verdict.ZERO, np.where(llr < -tol, Verdict.ONE, Verdict.TIE))
    return Verdict(int(out)) if out.ndim == 0 else out.astype(np.int8)


def boxplus(a, b):
    """Exact pairwise check-node combination of two LLRs."""
    mag = np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b))
    # grouping keeps the rule exactly odd in each argument
    return mag + (np.log1p(np.exp(-np.abs(a + b))) - np.log1p(np.exp(-np.abs(a - b))))


def _prefix(msgs):
    out = [msgs[0]]
    for m in msgs[1:]:
        out.append(boxplus(out[-1], m))
    return out


def _suffix(msgs):
    out = [msgs[-1]]
    for m in reversed(msgs[:-1]):
        out.append(boxplus(m, out[-1]))
    return out[::-1]


def _join(left, right, like):
    if left is None and right is None:
        # a degree-1 check pins its variable to 0
        return np.full_like(like, LLR_CLAMP)
    if left is None:
        return right
    if right is None:
        return left
    return boxplus(left, right)


def check_messages(msgs):
    """Extrinsic outputs of one check for each of its incoming messages."""
    d = len(msgs)
    pre = _prefix(msgs)
    suf = _suffix(msgs)
    return [_join(pre[i - 1] if i > 0 else None, suf[i + 1] if i + 1 < d else None, msgs[i])
            for i in range(d)]


def check_message_excluding(left, right, like):
    """Output of a check toward a neighbour whose slot splits inputs into ``left`` and ``right``."""
    lv = _prefix(left)[-1] if left else None
    rv = _suffix(right)[0] if right else None
    return _join(lv, rv, like)


def variable_sum(llr, incoming):
    total = llr
    for m in incoming:
        total = total + m
    return np.clip(total, -LLR_CLAMP, LLR_CLAMP)


def _as_batch(llrs, n):
    X = np.asarray(llrs, dtype=float)
    single = X.ndim == 1
    if single:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] != n:
        raise ValueError(f"expected {n} channel LLRs per word, got shape {np.shape(llrs)}")
    return np.clip(X, -LLR_CLAMP, LLR_CLAMP).T.copy(), single


@dataclass(frozen=True)
class MessageTrace:
    """All messages of a flooding run.

    ``v2c[l, k]`` and ``c2v[l, k]`` hold the messages on ``edges[k]`` at
    iteration ``l``; ``marginals[l, v]`` is the a-posteriori LLR of variable
    ``v``. Batched runs add a trailing batch axis to each array.
    """

    graph: TannerGraph
    edges: tuple[tuple[int, int], ...]
    v2c: np.ndarray
    c2v: np.ndarray
    marginals: np.ndarray

    @property
    def iterations(self) -> int:
        return self.v2c.shape[0] - 1

    def edge_index(self, v: int, c: int) -> int:
        try:
            return self.edges.index((v, c))
        except ValueError:
            raise KeyError(f"({v}, {c}) is not an edge") from None

    def message(self, e: DirectedEdge, iteration: int):
        if not 0 <= iteration <= self.iterations:
            raise IndexError(f"iteration {iteration} outside 0..{self.iterations}")
        k = self.edge_index(e.var, e.check)
        table = self.v2c if e.direction == VAR_TO_CHECK else self.c2v
        return table[iteration, k]

    def to_csv(self) -> str:
        """Rows ``iteration, var, check, direction, value`` (plus ``sample`` when batched)."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        batched = self.v2c.ndim == 3
        w.writerow(["iteration", "var", "check", "direction", "value"] + (["sample"] if batched else []))
        for it in range(self.iterations + 1):
            for k, (v, c) in enumerate(self.edges):
                for direction, table in ((VAR_TO_CHECK, self.v2c), (CHECK_TO_VAR, self.c2v)):
                    vals = table[it, k]
                    if batched:
                        for s, val in enumerate(vals):
                            w.writerow([it, v, c, direction, repr(float(val)), s])
                    else:
                        w.writerow([it, v, c, direction, repr(float(vals))])
        return buf.getvalue()


def run_bp(G: TannerGraph, channel_llrs, L: int) -> MessageTrace:
    """Run ``L`` flooding sum-product iterations and keep every message."""
    if L < 1:
        raise ValueError("iteration count must be at least 1")
    X, single = _as_batch(channel_llrs, G.n_vars)
    B = X.shape[1]
    edges = tuple(G.edges)
    eid = {e: k for k, e in enumerate(edges)}
    E = len(edges)
    v2c = np.zeros((L + 1, E, B))
    c2v = np.zeros((L + 1, E, B))
    marg = np.zeros((L + 1, G.n_vars, B))
    for k, (v, _) in enumerate(edges):
        v2c[0, k] = X[v]
    marg[0] = X
    for it in range(1, L + 1):
        for c, vs in enumerate(G.check_adj):
            if not vs:
                continue
            ks = [eid[(v, c)] for v in vs]
            outs = check_messages([v2c[it - 1, k] for k in ks])
            for k, o in zip(ks, outs):
                c2v[it, k] = o
        for v, cs in enumerate(G.var_adj):
            ks = [eid[(v, c)] for c in cs]
            for k, c in zip(ks, cs):
                v2c[it, k] = variable_sum(X[v], [c2v[it, k2] for k2, c2 in zip(ks, cs) if c2 != c])
            marg[it, v] = variable_sum(X[v], [c2v[it, k2] for k2 in ks])
    if single:
        v2c, c2v, marg = v2c[..., 0], c2v[..., 0], marg[..., 0]
    return MessageTrace(graph=G, edges=edges, v2c=v2c, c2v=c2v, marginals=marg)


def message_sign(T: MessageTrace, e: DirectedEdge, iteration: int):
    """Verdict carried by the message on ``e`` at ``iteration`` (ties kept)."""
    return classify(T.message(e, iteration))


def run_bp_on_tree(T: ComputationTree, llrs):
    """Root-to-parent message of a tree-like neighborhood, computed leaves-up.

    ``llrs`` maps each original variable index to its channel LLR: either a
    mapping, or an array indexed by variable (``(n,)`` or ``(batch, n)``).
    Equals ``run_bp`` on the same observations at iteration ``T.depth // 2``.
    """
    if not T.is_tree_like:
        raise ValueError("tree evaluation requires a tree-like neighborhood")
    needed = {nd.origin for nd in T.nodes if nd.kind == "var"}
    if isinstance(llrs, Mapping):
        missing = needed - set(llrs)
        if missing:
            raise KeyError(f"no LLR for tree variables {sorted(missing)}")
        values = {v: np.atleast_1d(np.clip(np.asarray(llrs[v], dtype=float),
                                           -LLR_CLAMP, LLR_CLAMP)) for v in needed}
        single = all(np.ndim(llrs[v]) == 0 for v in needed)
    else:
        X = np.asarray(llrs, dtype=float)
        single = X.ndim == 1
        X2 = X[None, :] if single else X
        if max(needed) >= X2.shape[1]:
            raise KeyError(f"no LLR for tree variables beyond index {X2.shape[1] - 1}")
        X2 = np.clip(X2, -LLR_CLAMP, LLR_CLAMP)
        values = {v: X2[:, v].copy() for v in needed}

    out: dict[int, np.ndarray] = {}
    for i in range(len(T.nodes) - 1, -1, -1):
        nd = T.nodes[i]
        kids = [out[j] for j in nd.children]
        if nd.kind == "var":
            out[i] = variable_sum(values[nd.origin], kids)
        else:
            s = nd.parent_slot
            out[i] = check_message_excluding(kids[:s], kids[s:], values[T.nodes[nd.parent].origin])
    root = out[0]
    return float(root[0]) if single else root
