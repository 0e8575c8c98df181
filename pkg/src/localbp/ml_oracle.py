"""Exact bitwise estimators by brute-force marginalization over codewords.

Scores are ``log sum_x P(y | x)`` over the candidate words with the target
bit fixed. Every word carries the same prior weight (projections of a linear
code have equal-size fibers), so comparing the two scores is both the
bitwise ML and the bitwise MAP decision over that word set.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import logsumexp

from .bp import Verdict
from .channels import Channel
from .gf2 import MAX_ENUM_DIMENSION, Codebook, enumerate_codewords, project

#: Absolute tolerance on the log-score gap below which a decision is a tie.
TIE_TOL = 1e-12


@dataclass(frozen=True)
class Decision:
    verdict: Verdict
    log_score_0: float
    log_score_1: float

    @property
    def llr(self) -> float:
        return self.log_score_0 - self.log_score_1

    def to_json(self) -> str:
        return json.dumps({"verdict": self.verdict.label,
                           "log_score_0": self.log_score_0,
                           "log_score_1": self.log_score_1}, sort_keys=True)


def verdicts(score0, score1, tol: float = TIE_TOL) -> np.ndarray:
    """Vectorized verdict codes; an empty side (score ``-inf``) always loses."""
    s0 = np.asarray(score0, dtype=float)
    s1 = np.asarray(score1, dtype=float)
    with np.errstate(invalid="ignore"):
        gap = s0 - s1
    gap = np.where(np.isneginf(s1) & ~np.isneginf(s0), np.inf, gap)
    gap = np.where(np.isneginf(s0) & ~np.isneginf(s1), -np.inf, gap)
    # both sides empty cannot happen for a nonempty word set; treat as tie
    gap = np.where(np.isneginf(s0) & np.isneginf(s1), 0.0, gap)
    return np.where(gap > tol, Verdict.ZERO,
                    np.where(gap < -tol, Verdict.ONE, Verdict.TIE)).astype(np.int8)


def word_log_likelihoods(words: np.ndarray, symbol_loglik: np.ndarray) -> np.ndarray:
    """``(batch, n_words)`` table of ``sum_i symbol_loglik[b, i, words[w, i]]``.

    ``symbol_loglik`` has shape ``(batch, len_I, 2)`` holding
    ``log P(y_i | x_i = 0)`` and ``log P(y_i | x_i = 1)``.
    """
    B, n, _ = symbol_loglik.shape
    if words.shape[1] != n:
        raise ValueError(f"words have {words.shape[1]} coordinates, observations {n}")
    out = np.zeros((B, words.shape[0]))
    for i in range(n):
        out += symbol_loglik[:, i, :][:, words[:, i]]
    return out


def bitwise_scores(words: np.ndarray, symbol_loglik: np.ndarray, target: int,
                   multiplicity: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Log-sum of word likelihoods split by the value of column ``target``."""
    W = word_log_likelihoods(words, symbol_loglik)
    if multiplicity != 1.0:
        W = W + np.log(multiplicity)
    ones = words[:, target].astype(bool)
    with np.errstate(divide="ignore"):
        s0 = logsumexp(W[:, ~ones], axis=1) if (~ones).any() else np.full(W.shape[0], -np.inf)
        s1 = logsumexp(W[:, ones], axis=1) if ones.any() else np.full(W.shape[0], -np.inf)
    return s0, s1


def channel_symbol_loglik(ch: Channel, y) -> np.ndarray:
    """``(batch, len, 2)`` per-symbol log-likelihoods for observations ``y``."""
    Y = np.asarray(y)
    if Y.ndim == 1:
        Y = Y[None, :]
    return np.stack([ch.log_prob(Y, 0), ch.log_prob(Y, 1)], axis=-1)


def _decide(words, ch, y, target, multiplicity=1.0):
    y = np.asarray(y)
    single = y.ndim == 1
    s0, s1 = bitwise_scores(words, channel_symbol_loglik(ch, y), target, multiplicity)
    if single:
        v = Verdict(int(verdicts(s0, s1)[0]))
        return Decision(v, float(s0[0]), float(s1[0]))
    return s0, s1


def local_ml(C: Codebook, I: Sequence[int], y_I, ch: Channel, target: int):
    """Bitwise decision on variable ``target`` from observations on ``I`` only.

    Marginalizes over the true projected code ``C_I``. ``target`` is a
    variable index that must belong to ``I``. A single observation vector
    gives a ``Decision``; a batch ``(patterns, |I|)`` gives the score arrays.
    """
    I = list(I)
    if target not in I:
        raise ValueError(f"target {target} is not in the index set")
    if np.shape(y_I)[-1] != len(I):
        raise ValueError(f"{np.shape(y_I)[-1]} observations for an index set of size {len(I)}")
    S = project(C, I)
    return _decide(S.words, ch, y_I, I.index(target))


def local_ml_full_code(C: Codebook, I: Sequence[int], y_I, ch: Channel, target: int):
    """Same decision, summing over every codeword of ``C`` rather than over ``C_I``."""
    I = list(I)
    words = C.words[:, I]
    return _decide(words, ch, y_I, I.index(target))


def tree_local_ml(local_checks, y_I, ch: Channel, target: int,
                  max_dimension: int = MAX_ENUM_DIMENSION):
    """Bitwise decision over the code cut out by ``local_checks`` alone.

    ``target`` is a column of ``local_checks``.
    """
    words = enumerate_codewords(local_checks, max_dimension=max_dimension).words
    if np.shape(y_I)[-1] != words.shape[1]:
        raise ValueError("observation length does not match the local check matrix")
    return _decide(words, ch, y_I, target)


def global_map(C: Codebook, y, ch: Channel, target: int):
    """Bitwise MAP over the full code with a uniform codeword prior."""
    if np.shape(y)[-1] != C.n:
        raise ValueError(f"expected {C.n} observations, got {np.shape(y)[-1]}")
    return _decide(C.words, ch, y, target)
