"""Error-rate experiments on edge messages: exact sums, Monte Carlo, degradation.

An edge message is *incorrect* when its sign disagrees with the bit sent
at the edge's variable; a message of exactly zero counts as half an error.
Unless stated otherwise the all-zero codeword is transmitted.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import bp
from .bp import Verdict
from .channels import BEC, BIAWGN, BSC, ERASED, Channel, parse_channel
from .counterexamples import (BUILTIN_CODES, CounterexampleCode, edge_messages, find_witness,
                              observation_patterns)
from .gf2 import pack_rows, same_row_space, unpack_rows

#: Largest index set for which exact pattern sums are attempted.
MAX_EXACT_INDEX_SET = 20
_MC_CHUNK = 10_000


@dataclass(frozen=True)
class ErrorEstimate:
    p_hat: float
    trials: int
    ci_half_width: float
    mode: str

    def contains(self, value: float) -> bool:
        return abs(self.p_hat - value) <= self.ci_half_width


def error_weights(messages, sent_bit=0) -> np.ndarray:
    """1 for a wrong sign, 0.5 for a zero message, 0 otherwise."""
    v = bp.classify(messages)
    wrong = np.where(np.asarray(sent_bit) == 0, Verdict.ONE, Verdict.ZERO)
    return np.where(v == Verdict.TIE, 0.5, np.where(v == wrong, 1.0, 0.0))


def _require_tree_like(code: CounterexampleCode, iteration: int):
    if iteration != code.iteration:
        raise ValueError(f"code neighborhood was built for iteration {code.iteration}, not {iteration}")
    if not code.tree.is_tree_like:
        raise ValueError("the edge neighborhood is not tree-like")


def _exact_ok(code: CounterexampleCode, ch: Channel) -> bool:
    return ch.outputs is not None and len(code.I) <= MAX_EXACT_INDEX_SET


def _pattern_table(code: CounterexampleCode, ch: Channel):
    """All output patterns on ``I`` and the edge message for each of them."""
    Y = observation_patterns(ch, len(code.I))
    return Y, edge_messages(code, ch.llr(Y))


def _pattern_probs(ch: Channel, Y: np.ndarray, x_I) -> np.ndarray:
    return np.exp(np.sum(ch.log_prob(Y, np.asarray(x_I)[None, :]), axis=1))


def message_error_exact(code: CounterexampleCode, ch: Channel, iteration: int | None = None) -> ErrorEstimate:
    """Exact error probability of the edge message, summed over every output pattern."""
    iteration = code.iteration if iteration is None else iteration
    _require_tree_like(code, iteration)
    if ch.outputs is None:
        raise ValueError(f"exact error needs a finite-output channel, got {ch.kind}")
    if len(code.I) > MAX_EXACT_INDEX_SET:
        raise ValueError(f"index set of size {len(code.I)} too large for exact summation")
    Y, msgs = _pattern_table(code, ch)
    probs = _pattern_probs(ch, Y, np.zeros(len(code.I), dtype=np.uint8))
    p = float(np.dot(probs, error_weights(msgs)))
    return ErrorEstimate(p_hat=p, trials=int(Y.shape[0]), ci_half_width=0.0, mode="exact")


def _mc_errors(code: CounterexampleCode, ch: Channel, iteration: int, trials: int,
               rng: np.random.Generator, degrade: float | None = None):
    n = code.graph.n_vars
    errs, errs_deg = [], []
    for s in range(0, trials, _MC_CHUNK):
        b = min(_MC_CHUNK, trials - s)
        y = ch.sample(np.zeros((b, n), dtype=np.uint8), rng)
        msg = bp.run_bp(code.graph, ch.llr(y), iteration).message(code.edge, iteration)
        errs.append(error_weights(msg))
        if degrade is not None:
            y2 = auxiliary_channel(ch, y, degrade, rng)
            ch2 = ch.degrade(degrade)
            msg2 = bp.run_bp(code.graph, ch2.llr(y2), iteration).message(code.edge, iteration)
            errs_deg.append(error_weights(msg2))
    e = np.concatenate(errs)
    return (e, np.concatenate(errs_deg)) if degrade is not None else e


def _estimate(errs: np.ndarray) -> ErrorEstimate:
    n = errs.size
    p = float(errs.mean()) if n else 0.0
    return ErrorEstimate(p_hat=p, trials=n, ci_half_width=3.0 * math.sqrt(p * (1 - p) / n) if n else 0.0,
                         mode="monte-carlo")


def message_error_mc(code: CounterexampleCode, ch: Channel, trials: int, seed: int,
                     iteration: int | None = None) -> ErrorEstimate:
    """Monte Carlo estimate with full-graph decoding of i.i.d. channel outputs."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    iteration = code.iteration if iteration is None else iteration
    rng = np.random.default_rng(seed)
    return _estimate(_mc_errors(code, ch, iteration, trials, rng))


def pool_estimates(estimates) -> ErrorEstimate:
    """Trial-weighted average of independent Monte Carlo estimates."""
    estimates = list(estimates)
    n = sum(e.trials for e in estimates)
    p = sum(e.p_hat * e.trials for e in estimates) / n
    return ErrorEstimate(p_hat=p, trials=n, ci_half_width=3.0 * math.sqrt(p * (1 - p) / n),
                         mode="monte-carlo")


def auxiliary_channel(ch: Channel, y, q: float, rng: np.random.Generator):
    """Pass outputs of ``ch`` through the auxiliary channel that degrades it by ``q``."""
    y = np.asarray(y)
    if isinstance(ch, BSC):
        return y ^ (rng.random(y.shape) < q).astype(y.dtype)
    if isinstance(ch, BEC):
        return np.where(rng.random(y.shape) < q, ERASED, y).astype(y.dtype)
    if isinstance(ch, BIAWGN):
        return y + q * rng.standard_normal(y.shape)
    raise TypeError(f"no auxiliary channel for {type(ch).__name__}")


@dataclass(frozen=True)
class MonotonicityReport:
    channel: str
    degraded: str
    p: float
    p_prime: float
    margin: float
    passed: bool
    mode: str
    trials: int = 0


def check_monotonicity(code: CounterexampleCode, W: Channel, q: float, *, mode: str = "auto",
                       trials: int = 100_000, seed: int = 0,
                       iteration: int | None = None) -> MonotonicityReport:
    """Compare edge-message error rates on ``W`` and on ``W`` degraded by ``q``.

    Exact mode requires ``p <= p'``. Monte Carlo mode samples ``R`` from
    ``W``, derives ``R'`` from ``R`` through the auxiliary channel, decodes
    both, and requires ``p_hat <= p'_hat`` up to the combined 3-sigma width.
    """
    iteration = code.iteration if iteration is None else iteration
    W2 = W.degrade(q)
    if mode == "auto":
        mode = "exact" if _exact_ok(code, W) else "mc"
    if mode == "exact":
        p = message_error_exact(code, W, iteration).p_hat
        p2 = message_error_exact(code, W2, iteration).p_hat
        return MonotonicityReport(str(W), str(W2), p, p2, p2 - p, p <= p2, "exact")
    if mode != "mc":
        raise ValueError(f"unknown mode {mode!r}")
    rng = np.random.default_rng(seed)
    e1, e2 = _mc_errors(code, W, iteration, trials, rng, degrade=q)
    a, b = _estimate(e1), _estimate(e2)
    slack = math.hypot(a.ci_half_width, b.ci_half_width)
    return MonotonicityReport(str(W), str(W2), a.p_hat, b.p_hat, b.p_hat - a.p_hat,
                              a.p_hat <= b.p_hat + slack, "monte-carlo", trials)


def monotonicity_sweep(code: CounterexampleCode, ps, q: float, iteration: int | None = None) -> list[dict]:
    """Exact BSC error rates before and after degradation, one row per crossover."""
    rows = []
    for p in ps:
        r = check_monotonicity(code, BSC(p), q, mode="exact", iteration=iteration)
        rows.append({"channel_param": p, "degraded_param": BSC(p).degrade(q).param,
                     "p": r.p, "p_prime": r.p_prime})
    return rows


def sweep_dominates(rows: list[dict]) -> bool:
    """Degraded column strictly above the original at every point and non-decreasing."""
    pp = [r["p_prime"] for r in rows]
    return all(r["p"] < r["p_prime"] for r in rows) and all(a <= b for a, b in zip(pp, pp[1:]))


@dataclass(frozen=True)
class EquivalenceReport:
    matches: int
    total: int

    @property
    def passed(self) -> bool:
        return self.matches == self.total


def embedded_vs_tree_equivalence(code: CounterexampleCode, ch: Channel, trials: int, seed: int,
                                 iteration: int | None = None) -> EquivalenceReport:
    """Bit-exact comparison of full-graph and standalone-tree edge messages."""
    iteration = code.iteration if iteration is None else iteration
    _require_tree_like(code, iteration)
    rng = np.random.default_rng(seed)
    matches = 0
    n = code.graph.n_vars
    for s in range(0, trials, _MC_CHUNK):
        b = min(_MC_CHUNK, trials - s)
        llr = ch.llr(ch.sample(np.zeros((b, n), dtype=np.uint8), rng))
        graph_msg = bp.run_bp(code.graph, llr, iteration).message(code.edge, iteration)
        tree_msg = bp.run_bp_on_tree(code.tree, llr)
        matches += int(np.sum(graph_msg.view(np.int64) == tree_msg.view(np.int64)))
    return EquivalenceReport(matches, trials)


@dataclass
class IndependenceReport:
    n_codewords: int
    n_projections: int
    probabilities: list[float]
    max_diff: float
    tolerance: float = 1e-12

    @property
    def passed(self) -> bool:
        return self.max_diff <= self.tolerance


def codeword_independence(code: CounterexampleCode, ch: Channel, iteration: int | None = None,
                          tolerance: float = 1e-12) -> IndependenceReport:
    """Exact edge-message error probability conditioned on each codeword.

    The message only reads observations on ``I``, so codewords with the same
    projection onto ``I`` share one value; every codeword is still mapped to
    its own probability before the spread is measured.
    """
    iteration = code.iteration if iteration is None else iteration
    _require_tree_like(code, iteration)
    if not _exact_ok(code, ch):
        raise ValueError("codeword independence needs a finite-output channel and a small index set")
    Y, msgs = _pattern_table(code, ch)
    words = code.codebook.words
    keys, inverse = np.unique(pack_rows(words[:, list(code.I)]), return_inverse=True)
    proj = unpack_rows(keys, len(code.I))
    per_proj = np.array([np.dot(_pattern_probs(ch, Y, x), error_weights(msgs, x[0])) for x in proj])
    per_word = per_proj[inverse.ravel()]
    return IndependenceReport(n_codewords=int(words.shape[0]), n_projections=int(proj.shape[0]),
                              probabilities=per_proj.tolist(),
                              max_diff=float(per_word.max() - per_word.min()), tolerance=tolerance)


# -- suite ----------------------------------------------------------------

SECTIONS = ("demo", "a2", "b2", "c2", "mc")


@dataclass
class SuiteConfig:
    sections: tuple[str, ...] = SECTIONS
    codes: tuple[str, ...] = ("sec2", "sec3")
    witness_channel: str = "bsc:0.1"
    equivalence_channel: str = "biawgn:0.8"
    independence_channel: str = "bsc:0.05"
    monotonicity_channel: str = "bsc:0.05"
    degraded_param: float = 0.08
    sweep: tuple[float, ...] = tuple(round(0.01 * k, 2) for k in range(1, 11))
    sweep_q: float = 0.02
    awgn_pair: tuple[float, float] = (0.8, 1.0)
    trials: int = 10_000
    mc_trials: int = 100_000
    seed: int = 0

    def validate(self):
        bad = [s for s in self.sections if s not in SECTIONS]
        if bad:
            raise ValueError(f"unknown suite sections {bad}; choose from {list(SECTIONS)}")
        bad = [c for c in self.codes if c not in BUILTIN_CODES]
        if bad:
            raise ValueError(f"unknown builtin codes {bad}")
        for spec in (self.witness_channel, self.equivalence_channel,
                     self.independence_channel, self.monotonicity_channel):
            parse_channel(spec)


def bsc_degradation_for(p: float, p_target: float) -> float:
    """Flip probability ``q`` with ``BSC(p).degrade(q) == BSC(p_target)``."""
    return (p_target - p) / (1 - 2 * p)


def _section_demo(codes, cfg):
    out = {}
    ch = parse_channel(cfg.witness_channel)
    for name, code in codes.items():
        found = code.implicit()
        w = find_witness(code, ch, "exhaustive")
        entry = {
            "tree_like": code.tree.is_tree_like,
            "implicit_constraints": found.astype(int).tolist(),
            "implicit_matches": bool(same_row_space(np.vstack([code.local_checks, found]),
                                                    np.vstack([code.local_checks, code.expected_implicit]))),
            "dim_local_code": int(len(code.I) - np.linalg.matrix_rank(code.local_checks)),
            "dim_projected_code": code.subcode.dimension,
            "witness": {k: v for k, v in w.to_dict().items() if k != "trace"},
        }
        passed = entry["tree_like"] and entry["implicit_matches"]
        if name == "sec3":
            passed = passed and w.found
        entry["passed"] = bool(passed)
        out[name] = entry
    return out, []


def _section_a2(codes, cfg):
    ch = parse_channel(cfg.equivalence_channel)
    out = {}
    for name, code in codes.items():
        r = embedded_vs_tree_equivalence(code, ch, cfg.trials, cfg.seed)
        out[name] = {"channel": str(ch), "matches": r.matches, "total": r.total, "passed": r.passed}
    return out, []


def _section_b2(codes, cfg):
    ch = parse_channel(cfg.independence_channel)
    out = {}
    for name, code in codes.items():
        r = codeword_independence(code, ch)
        out[name] = {"channel": str(ch), "n_codewords": r.n_codewords,
                     "n_projections": r.n_projections, "max_diff": r.max_diff, "passed": r.passed}
    return out, []


def _section_c2(codes, cfg):
    W = parse_channel(cfg.monotonicity_channel)
    if not isinstance(W, BSC):
        raise ValueError("the exact monotonicity section expects a BSC channel")
    q = bsc_degradation_for(W.param, cfg.degraded_param)
    out, tables = {}, []
    for name, code in codes.items():
        r = check_monotonicity(code, W, q, mode="exact")
        rows = monotonicity_sweep(code, cfg.sweep, cfg.sweep_q)
        strict = r.p < r.p_prime
        out[name] = {"exact": asdict(r), "strict": strict, "sweep_dominates": sweep_dominates(rows),
                     "passed": bool(strict and sweep_dominates(rows))}
        tables.append((f"table_monotonicity_{name}.csv", rows))
    s1, s2 = cfg.awgn_pair
    code = next(iter(codes.values()))
    r = check_monotonicity(code, BIAWGN(s1), math.sqrt(s2**2 - s1**2), mode="mc",
                           trials=cfg.mc_trials, seed=cfg.seed)
    out["biawgn_coupled"] = {**asdict(r), "code": code.name}
    return out, tables


def _section_mc(codes, cfg):
    ch = parse_channel(cfg.independence_channel)
    out, tables = {}, []
    for name, code in codes.items():
        exact = message_error_exact(code, ch)
        est = message_error_mc(code, ch, cfg.mc_trials, cfg.seed)
        out[name] = {"channel": str(ch), "exact": exact.p_hat, "p_hat": est.p_hat,
                     "ci_half_width": est.ci_half_width, "trials": est.trials,
                     "passed": est.contains(exact.p_hat)}
        tables.append((f"table_mc_{name}.csv",
                       [{"channel_param": ch.param, "exact": exact.p_hat, "p_hat": est.p_hat,
                         "ci_half_width": est.ci_half_width}]))
    return out, tables


_RUNNERS = {"demo": _section_demo, "a2": _section_a2, "b2": _section_b2,
            "c2": _section_c2, "mc": _section_mc}


def _all_passed(node) -> bool:
    if isinstance(node, dict):
        if "error" in node:
            return False
        return all(_all_passed(v) for k, v in node.items() if k != "passed") and node.get("passed", True)
    return True


def run_suite(cfg: SuiteConfig | None = None, out_dir=None) -> dict:
    """Run the selected sections; failures are recorded and the suite carries on."""
    cfg = cfg or SuiteConfig()
    cfg.validate()
    codes = {name: BUILTIN_CODES[name]() for name in cfg.codes}
    summary: dict = {"config": _jsonable(asdict(cfg)), "sections": {}}
    tables = []
    for sec in cfg.sections:
        try:
            res, tabs = _RUNNERS[sec](codes, cfg)
            summary["sections"][sec] = res
            tables.extend(tabs)
        except Exception as exc:  # keep going; the summary records the failure
            summary["sections"][sec] = {"error": f"{type(exc).__name__}: {exc}"}
    summary["passed"] = _all_passed(summary["sections"])
    if out_dir is not None:
        write_outputs(summary, tables, out_dir)
    return summary


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    return obj


def write_outputs(summary: dict, tables, out_dir) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "summary.json").write_text(json.dumps(_jsonable(summary), indent=2, sort_keys=True) + "\n")
    for fname, rows in tables:
        write_table(out / fname, rows)


def write_table(path, rows: list[dict]) -> None:
    if not rows:
        return
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: repr(float(v)) if isinstance(v, float) else v for k, v in r.items()})
