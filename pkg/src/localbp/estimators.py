"""scikit-learn style decoders.

Both estimators are fitted on a parity-check matrix and then map channel
LLR matrices ``X`` of shape ``(n_samples, n_features)`` to per-bit LLRs
(``decision_function``) or hard bits (``predict``). Hard decisions use
``LLR >= 0 -> 0``; call ``decision_function`` to see ties.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from . import bp
from .gf2 import MAX_ENUM_DIMENSION, as_bits, enumerate_codewords, project
from .ml_oracle import bitwise_scores
from .tanner import from_matrix


def _check_parity_matrix(H):
    H = check_array(H, dtype=None, ensure_min_samples=1, ensure_min_features=1)
    return as_bits(H)


class SumProductDecoder(BaseEstimator):
    """Flooding sum-product decoder.

    Parameters
    ----------
    n_iter : int
        Number of flooding iterations.
    """

    def __init__(self, n_iter: int = 10):
        self.n_iter = n_iter

    def fit(self, H, y=None):
        if int(self.n_iter) < 1:
            raise ValueError("n_iter must be at least 1")
        H = _check_parity_matrix(H)
        self.graph_ = from_matrix(H)
        self.n_features_in_ = H.shape[1]
        return self

    def decision_function(self, X):
        check_is_fitted(self, "graph_")
        X = check_array(X, dtype=float, ensure_all_finite=False)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, decoder expects {self.n_features_in_}")
        trace = bp.run_bp(self.graph_, X, int(self.n_iter))
        return trace.marginals[-1].T

    def predict(self, X):
        return (self.decision_function(X) < 0).astype(np.uint8)

    def trace(self, x) -> bp.MessageTrace:
        """Full message trace for a single LLR vector."""
        check_is_fitted(self, "graph_")
        return bp.run_bp(self.graph_, np.asarray(x, dtype=float), int(self.n_iter))


class BitwiseMAPDecoder(BaseEstimator):
    """Exhaustive bitwise MAP decoder over a (projected) linear code.

    Parameters
    ----------
    index_set : sequence of int or None
        Coordinates the decoder observes. ``None`` observes the whole block.
        The decision for each observed bit marginalizes over the projected
        code ``C_I``, i.e. the set of words the full code induces on those
        coordinates.
    max_dimension : int
        Enumeration bound on the code dimension.
    """

    def __init__(self, index_set=None, max_dimension: int = MAX_ENUM_DIMENSION):
        self.index_set = index_set
        self.max_dimension = max_dimension

    def fit(self, H, y=None):
        H = _check_parity_matrix(H)
        C = enumerate_codewords(H, max_dimension=self.max_dimension)
        I = range(C.n) if self.index_set is None else self.index_set
        self.subcode_ = project(C, I)
        self.n_features_in_ = len(self.subcode_.index_set)
        return self

    def decision_function(self, X):
        """Bitwise log-posterior ratios ``log P(x_i=0|y) - log P(x_i=1|y)``."""
        check_is_fitted(self, "subcode_")
        X = check_array(X, dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, decoder expects {self.n_features_in_}")
        # per-symbol log-likelihoods normalized so that their ratio is the LLR
        sym = np.stack([-np.logaddexp(0.0, -X), -np.logaddexp(0.0, X)], axis=-1)
        out = np.empty_like(X)
        for t in range(X.shape[1]):
            s0, s1 = bitwise_scores(self.subcode_.words, sym, t)
            with np.errstate(invalid="ignore"):
                out[:, t] = s0 - s1
        return out

    def predict(self, X):
        return (self.decision_function(X) < 0).astype(np.uint8)
