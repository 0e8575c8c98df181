"""Dense GF(2) linear algebra for small parity-check codes.

Binary matrices are plain ``numpy`` arrays of dtype ``uint8`` holding 0/1.
Codes in scope have a few dozen columns at most, so nothing here is packed
or sparse; the expensive step is always the 2**k codeword enumeration.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

#: Largest code dimension ``enumerate_codewords`` will expand by default.
MAX_ENUM_DIMENSION = 24


class DimensionTooLargeError(ValueError):
    """Raised when a codebook would exceed the enumeration bound."""


def as_bits(M) -> np.ndarray:
    """Coerce ``M`` to a 2-D uint8 array of 0/1 values."""
    A = np.asarray(M)
    if A.ndim == 1:
        A = A.reshape(1, -1)
    if A.ndim != 2:
        raise ValueError(f"expected a 2-D binary matrix, got shape {A.shape}")
    if A.size and not np.isin(A, (0, 1)).all():
        raise ValueError("binary matrix entries must be 0 or 1")
    return A.astype(np.uint8, copy=True)


def row_reduce(M) -> tuple[np.ndarray, int]:
    """Gauss-Jordan elimination over GF(2).

    Returns ``(R, rank)`` where ``R`` is the reduced row-echelon form of ``M``
    (same shape, zero rows at the bottom) and ``rank`` is the number of
    nonzero rows.
    """
    R = as_bits(M)
    m, n = R.shape
    row = 0
    for col in range(n):
        if row == m:
            break
        hits = np.flatnonzero(R[row:, col])
        if hits.size == 0:
            continue
        piv = row + hits[0]
        if piv != row:
            R[[row, piv]] = R[[piv, row]]
        others = np.flatnonzero(R[:, col])
        others = others[others != row]
        R[others] ^= R[row]
        row += 1
    return R, row


def rank(M) -> int:
    return row_reduce(M)[1]


def pivot_columns(R: np.ndarray) -> list[int]:
    """Pivot columns of a matrix already in reduced row-echelon form."""
    return [int(np.flatnonzero(r)[0]) for r in R if r.any()]


def nullspace(M, n: int | None = None) -> np.ndarray:
    """Basis (as rows) of ``{x : M x = 0}`` over GF(2).

    ``n`` gives the column count when ``M`` has no rows.
    """
    A = np.asarray(M)
    if A.size == 0:
        cols = n if n is not None else (A.shape[1] if A.ndim == 2 else 0)
        return np.eye(cols, dtype=np.uint8)
    R, r = row_reduce(A)
    cols = R.shape[1]
    R = R[:r]
    pivots = pivot_columns(R)
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = np.zeros((len(free), cols), dtype=np.uint8)
    for k, f in enumerate(free):
        basis[k, f] = 1
        # x_pivot = sum of free vars appearing in that pivot's row
        for i, p in enumerate(pivots):
            basis[k, p] = R[i, f]
    return basis


def row_space_contains(M, v) -> bool:
    """True when vector ``v`` lies in the GF(2) row space of ``M``."""
    A = as_bits(M)
    v = np.asarray(v, dtype=np.uint8).reshape(1, -1)
    if A.shape[0] == 0:
        return not v.any()
    return rank(np.vstack([A, v])) == rank(A)


def span(basis) -> np.ndarray:
    """All 2**r vectors spanned by the rows of ``basis``, in binary-counter order."""
    B = as_bits(basis)
    r = B.shape[0]
    counter = np.arange(1 << r, dtype=np.int64)
    words = np.zeros((1 << r, B.shape[1]), dtype=np.uint8)
    for j in range(r):
        bit = ((counter >> (r - 1 - j)) & 1).astype(np.uint8)
        words ^= bit[:, None] * B[j]
    return words


@dataclass(frozen=True)
class Codebook:
    """All codewords of a binary linear code, one per row."""

    n: int
    words: np.ndarray

    def __len__(self) -> int:
        return self.words.shape[0]

    @property
    def dimension(self) -> int:
        return int(round(np.log2(len(self))))


@dataclass(frozen=True)
class SubCodebook:
    """Projection of a code onto an ordered index set.

    ``words`` are the distinct projected vectors in lexicographic order and
    ``fiber_size`` is the number of full codewords above each of them.
    """

    index_set: tuple[int, ...]
    words: np.ndarray
    fiber_size: int

    def __len__(self) -> int:
        return self.words.shape[0]

    @property
    def dimension(self) -> int:
        return int(round(np.log2(len(self))))


def enumerate_codewords(H, max_dimension: int = MAX_ENUM_DIMENSION) -> Codebook:
    """Expand the null space of ``H`` into an explicit codebook."""
    H = as_bits(H)
    n = H.shape[1]
    basis = nullspace(H, n=n)
    k = basis.shape[0]
    if k > max_dimension:
        raise DimensionTooLargeError(
            f"code dimension {k} exceeds enumeration bound {max_dimension}"
        )
    return Codebook(n=n, words=span(basis))


def _check_index_set(I: Sequence[int], n: int) -> tuple[int, ...]:
    I = tuple(int(i) for i in I)
    if not I:
        raise ValueError("index set must be nonempty")
    bad = [i for i in I if not 0 <= i < n]
    if bad:
        raise IndexError(f"indices {bad} out of range for block length {n}")
    if len(set(I)) != len(I):
        raise ValueError("index set contains duplicates")
    return I


def pack_rows(words: np.ndarray) -> np.ndarray:
    """Integer key per row (at most 62 columns), first column most significant.

    Sorting keys sorts the rows lexicographically.
    """
    cols = words.shape[1]
    weights = np.left_shift(np.int64(1), np.arange(cols - 1, -1, -1, dtype=np.int64))
    return words.astype(np.int64) @ weights


def unpack_rows(keys: np.ndarray, cols: int) -> np.ndarray:
    weights = np.left_shift(np.int64(1), np.arange(cols - 1, -1, -1, dtype=np.int64))
    return ((np.asarray(keys)[:, None] & weights) != 0).astype(np.uint8)


def project(C: Codebook, I: Sequence[int]) -> SubCodebook:
    """Restrict every codeword of ``C`` to the coordinates ``I`` (in that order)."""
    I = _check_index_set(I, C.n)
    sub = C.words[:, list(I)]
    if len(I) <= 62:
        keys, counts = np.unique(pack_rows(sub), return_counts=True)
        words = unpack_rows(keys, len(I))
    else:
        words, counts = np.unique(sub, axis=0, return_counts=True)
    # a linear map has equal-size fibers; anything else means C was not linear
    if not (counts == counts[0]).all():
        raise ValueError("non-uniform fibers: codebook is not a linear space")
    return SubCodebook(index_set=I, words=words.astype(np.uint8), fiber_size=int(counts[0]))


def fiber_counts(C: Codebook, S: SubCodebook) -> np.ndarray:
    """Count preimages in ``C`` of each word of ``S`` by direct comparison."""
    proj = C.words[:, list(S.index_set)]
    return np.array([(proj == w).all(axis=1).sum() for w in S.words], dtype=np.int64)


def dual_basis(S: SubCodebook | np.ndarray) -> np.ndarray:
    """Basis of the orthogonal complement of ``span(S.words)``."""
    words = S.words if isinstance(S, SubCodebook) else as_bits(S)
    if words.shape[0] == 0:
        raise ValueError("empty word set")
    return nullspace(words, n=words.shape[1])


def _min_weight_extension(base: np.ndarray, candidates: np.ndarray) -> np.ndarray:
    """Greedy minimum-weight basis of ``span(candidates)`` modulo ``span(base)``.

    Candidates are tried by (weight, lexicographic) order, so the result is
    canonical: the lightest independent representatives are kept.
    """
    cols = candidates.shape[1]
    chosen: list[np.ndarray] = []
    acc = base.copy() if base.size else np.zeros((0, cols), dtype=np.uint8)
    r = rank(acc) if acc.shape[0] else 0
    order = sorted(range(candidates.shape[0]),
                   key=lambda i: (int(candidates[i].sum()), tuple(candidates[i])))
    for i in order:
        c = candidates[i]
        if not c.any():
            continue
        trial = np.vstack([acc, c])
        r2 = rank(trial)
        if r2 > r:
            chosen.append(c)
            acc, r = trial, r2
    return np.array(chosen, dtype=np.uint8).reshape(-1, cols)


def implicit_constraints(H, I: Sequence[int], local_checks, *,
                         max_dimension: int = MAX_ENUM_DIMENSION,
                         max_canonical: int = 20) -> np.ndarray:
    """Parity constraints satisfied on ``I`` that the local checks do not imply.

    Returns a basis (rows over the coordinates of ``I``) of the dual of the
    projected code, taken modulo the row space of ``local_checks``. An empty
    result certifies that the local checks alone cut out ``C_I``. When the
    dual is small enough the basis is the minimum-weight one, so that e.g. an
    equality ``x_a = x_b`` comes back as the weight-2 indicator of ``{a, b}``.
    """
    S = project(enumerate_codewords(H, max_dimension=max_dimension), I)
    L = as_bits(local_checks) if np.asarray(local_checks).size else np.zeros((0, len(I)), np.uint8)
    if L.shape[1] != len(I):
        raise ValueError(f"local checks have {L.shape[1]} columns, index set has {len(I)}")
    D = dual_basis(S)
    if D.shape[0] <= max_canonical:
        candidates = span(D)
    else:
        candidates = D
    return _min_weight_extension(L, candidates)


def same_row_space(A, B) -> bool:
    A = as_bits(A)
    B = as_bits(B)
    if A.shape[1] != B.shape[1]:
        return False
    ra, rb = rank(A), rank(B)
    return ra == rb == rank(np.vstack([A, B]))


# -- file formats ---------------------------------------------------------

def read_alist(path) -> np.ndarray:
    """Parse a MacKay-style alist file into a dense ``m x n`` matrix.

    Layout: ``n m``; ``max_col_deg max_row_deg``; the n column degrees; the m
    row degrees; n lines of 1-based row indices per column; m lines of
    1-based column indices per row. Zero padding is ignored. Files that omit
    the max-degree line are accepted.
    """
    lines = Path(path).read_text().splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    rows = [[int(t) for t in line.split()] for line in lines]
    n, m = rows[0][:2]
    body = rows[1:]
    if len(body) in (3 + n + m, 3 + n):
        body = body[1:]  # drop the max-degree line
    col_deg, row_deg = body[0], body[1]
    if len(col_deg) != n or len(row_deg) != m:
        raise ValueError("alist degree lists do not match the declared dimensions")
    H = np.zeros((m, n), dtype=np.uint8)
    col_lists = body[2:2 + n]
    row_lists = body[2 + n:2 + n + m]
    for j, idx in enumerate(col_lists):
        for i in idx:
            if i:
                H[i - 1, j] = 1
    if row_lists:
        H2 = np.zeros_like(H)
        for i, idx in enumerate(row_lists):
            for j in idx:
                if j:
                    H2[i, j - 1] = 1
        if not (H2 == H).all():
            raise ValueError("alist column and row lists disagree")
    if (H.sum(axis=0) != col_deg).any() or (H.sum(axis=1) != row_deg).any():
        raise ValueError("alist degree lists disagree with the index lists")
    return H


def write_alist(H, path=None) -> str:
    """Serialize ``H`` in alist format; also writes to ``path`` when given."""
    H = as_bits(H)
    m, n = H.shape
    col_deg = H.sum(axis=0)
    row_deg = H.sum(axis=1)
    lines = [f"{n} {m}", f"{int(col_deg.max(initial=0))} {int(row_deg.max(initial=0))}",
             " ".join(str(int(d)) for d in col_deg), " ".join(str(int(d)) for d in row_deg)]
    for j in range(n):
        lines.append(" ".join(str(i + 1) for i in np.flatnonzero(H[:, j])) or "0")
    for i in range(m):
        lines.append(" ".join(str(j + 1) for j in np.flatnonzero(H[i])) or "0")
    text = "\n".join(lines) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


def subcodebook_json(S: SubCodebook, dual: np.ndarray | None = None) -> str:
    """``{"index_set", "dimension", "dual_basis", "fiber_size"}`` as JSON text."""
    if dual is None:
        dual = dual_basis(S)
    payload = {
        "index_set": list(S.index_set),
        "dimension": S.dimension,
        "dual_basis": dual.astype(int).tolist(),
        "fiber_size": S.fiber_size,
    }
    return json.dumps(payload, sort_keys=True)
