"""Tanner graphs, directed-edge neighborhoods and computation trees."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .gf2 import as_bits

VAR_TO_CHECK = "v2c"
CHECK_TO_VAR = "c2v"


@dataclass(frozen=True)
class TannerGraph:
    """Bipartite variable/check adjacency.

    Adjacency lists are sorted ascending; message-passing code relies on that
    fixed order for reproducible floating-point sums.
    """

    n_vars: int
    n_checks: int
    var_adj: tuple[tuple[int, ...], ...]
    check_adj: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.var_adj) != self.n_vars or len(self.check_adj) != self.n_checks:
            raise ValueError("adjacency lists do not match the node counts")
        for v, checks in enumerate(self.var_adj):
            if len(set(checks)) != len(checks):
                raise ValueError(f"parallel edges at variable {v}")
            for c in checks:
                if v not in self.check_adj[c]:
                    raise ValueError(f"inconsistent adjacency for edge ({v}, {c})")
        n_edges = sum(len(a) for a in self.var_adj)
        if n_edges != sum(len(a) for a in self.check_adj):
            raise ValueError("inconsistent adjacency: edge counts differ")

    @property
    def edges(self) -> list[tuple[int, int]]:
        """Undirected edges ``(v, c)`` ordered by check, then variable."""
        return [(v, c) for c, vs in enumerate(self.check_adj) for v in vs]

    def has_edge(self, v: int, c: int) -> bool:
        return 0 <= v < self.n_vars and c in self.var_adj[v]

    def to_matrix(self) -> np.ndarray:
        H = np.zeros((self.n_checks, self.n_vars), dtype=np.uint8)
        for v, c in self.edges:
            H[c, v] = 1
        return H


def from_matrix(H) -> TannerGraph:
    """Graph with an edge ``(v, c)`` for every ``H[c, v] == 1``."""
    H = as_bits(H)
    m, n = H.shape
    check_adj = tuple(tuple(int(v) for v in np.flatnonzero(H[c])) for c in range(m))
    var_adj = tuple(tuple(int(c) for c in np.flatnonzero(H[:, v])) for v in range(n))
    return TannerGraph(n_vars=n, n_checks=m, var_adj=var_adj, check_adj=check_adj)


@dataclass(frozen=True)
class DirectedEdge:
    var: int
    check: int
    direction: Literal["v2c", "c2v"] = VAR_TO_CHECK

    @classmethod
    def parse(cls, text: str) -> "DirectedEdge":
        """Parse ``"v,c"`` as a variable-to-check edge."""
        try:
            v, c = (int(t) for t in text.split(","))
        except ValueError:
            raise ValueError(f"edge must look like 'v,c', got {text!r}") from None
        return cls(v, c)


@dataclass
class TreeNode:
    kind: Literal["var", "check"]
    origin: int
    depth: int
    parent: int | None
    #: position of the parent among this node's graph neighbours
    parent_slot: int = 0
    children: list[int] = field(default_factory=list)


@dataclass(frozen=True)
class ComputationTree:
    """The directed neighborhood of an edge unrolled into a rooted tree.

    ``nodes[0]`` is the root variable. Every node records the graph node it
    copies (``origin``); the neighborhood is tree-like exactly when no graph
    node is copied twice.
    """

    edge: DirectedEdge
    depth: int
    nodes: tuple[TreeNode, ...]

    @property
    def root(self) -> TreeNode:
        return self.nodes[0]

    @property
    def is_tree_like(self) -> bool:
        seen = [(nd.kind, nd.origin) for nd in self.nodes]
        return len(seen) == len(set(seen))

    def layers(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.depth + 1)]
        for i, nd in enumerate(self.nodes):
            out[nd.depth].append(i)
        return out

    def to_json(self) -> str:
        layers = [
            [{"node": i, "kind": self.nodes[i].kind, "origin": self.nodes[i].origin,
              "parent": self.nodes[i].parent} for i in layer]
            for layer in self.layers()
        ]
        return json.dumps({
            "edge": [self.edge.var, self.edge.check],
            "depth": self.depth,
            "is_tree_like": self.is_tree_like,
            "layers": layers,
        }, sort_keys=True)

    def to_dot(self) -> str:
        lines = ["digraph computation_tree {", "  rankdir=TB;"]
        for i, nd in enumerate(self.nodes):
            if nd.kind == "var":
                lines.append(f'  n{i} [shape=circle, label="x{nd.origin}"];')
            else:
                lines.append(f'  n{i} [shape=box, label="c{nd.origin}"];')
        for i, nd in enumerate(self.nodes):
            for ch in nd.children:
                lines.append(f"  n{i} -> n{ch};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def unroll(G: TannerGraph, e: DirectedEdge, depth: int) -> ComputationTree:
    """Unroll ``G`` from edge ``e = (v, c)`` away from ``c`` to ``depth`` (= 2*iterations).

    Layers alternate variable/check. The root variable expands to its checks
    other than ``c``; every later node expands to its neighbours other than
    its parent.
    """
    if not G.has_edge(e.var, e.check):
        raise ValueError(f"({e.var}, {e.check}) is not an edge of the graph")
    if depth < 2 or depth % 2:
        raise ValueError("depth must be even and at least 2")
    nodes = [TreeNode("var", e.var, 0, None)]
    frontier = [0]
    excluded = {0: e.check}
    for d in range(1, depth + 1):
        nxt = []
        for i in frontier:
            nd = nodes[i]
            skip = excluded[i]
            nbrs = G.var_adj[nd.origin] if nd.kind == "var" else G.check_adj[nd.origin]
            kind = "check" if nd.kind == "var" else "var"
            for o in nbrs:
                if o == skip:
                    continue
                back = G.check_adj[o] if kind == "check" else G.var_adj[o]
                nodes.append(TreeNode(kind, o, d, i, back.index(nd.origin)))
                j = len(nodes) - 1
                nd.children.append(j)
                excluded[j] = nd.origin
                nxt.append(j)
        frontier = nxt
    return ComputationTree(edge=e, depth=depth, nodes=tuple(nodes))


def variable_index_set(T: ComputationTree) -> tuple[int, ...]:
    """Distinct original variables in the tree, root first, then breadth-first."""
    seen: dict[int, None] = {}
    for nd in T.nodes:
        if nd.kind == "var":
            seen.setdefault(nd.origin, None)
    return tuple(seen)


def local_check_matrix(T: ComputationTree, G: TannerGraph) -> np.ndarray:
    """Rows of ``H`` for the checks in the tree, restricted to the tree's variables.

    Columns follow ``variable_index_set(T)``.
    """
    if not T.is_tree_like:
        raise ValueError("local check matrix is only defined for tree-like neighborhoods")
    I = variable_index_set(T)
    col = {v: k for k, v in enumerate(I)}
    checks = [nd.origin for nd in T.nodes if nd.kind == "check"]
    L = np.zeros((len(checks), len(I)), dtype=np.uint8)
    for r, c in enumerate(checks):
        for v in G.check_adj[c]:
            if v not in col:
                raise ValueError(f"check {c} reaches outside the neighborhood")
            L[r, col[v]] = 1
    return L
