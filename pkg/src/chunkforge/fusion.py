"""Cosine-preserving vector fusion for ultra-long chunks.

A chunk longer than an embedding model's window is encoded as N sub-segment
vectors. Instead of storing all N, we store the sum of their unit vectors
``v_f`` plus the scalar ``k = |v_f| / n``; then ``k * cos(v_f, q)`` equals
the mean cosine similarity between the query and the N sub-segments exactly
(up to float rounding), because

    mean_i cos(v_i, q) = (1/n) * sum_i (v̂_i · q̂) = ((sum_i v̂_i) / n) · q̂.

One vector and two scalars therefore stand in for any number of sub-segments
without changing retrieval scores. ``average_similarity`` computes the naive
mean directly and exists as the independent test oracle for that identity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatchError, InputError


@dataclass(frozen=True)
class FusedVector:
    """The (v_f, k, n) triple standing in for n sub-segment embeddings.

    ``n`` is retained (one extra integer) so entries can be extended with new
    sub-segments without re-reading the originals.
    """

    v_f: np.ndarray  # float64, shape (d,)
    k: float
    n: int

    @property
    def dim(self) -> int:
        return int(self.v_f.shape[0])


def _as_matrix(vectors: Sequence[Sequence[float]] | np.ndarray) -> np.ndarray:
    try:
        mat = np.asarray(vectors, dtype=np.float64)
    except ValueError as exc:
        raise InputError(f"vectors must share one dimension: {exc}") from exc
    if mat.ndim == 1:
        mat = mat.reshape(1, -1)
    if mat.ndim != 2 or mat.shape[0] == 0 or mat.shape[1] == 0:
        raise InputError("expected a non-empty list of equal-length vectors")
    if not np.all(np.isfinite(mat)):
        raise InputError("embedding vectors must be finite")
    return mat


def _unit_rows(mat: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(mat, axis=1)
    if np.any(norms == 0.0):
        raise InputError("zero-norm vector: unit conversion undefined")
    return mat / norms[:, None]


def fuse(vectors: Sequence[Sequence[float]] | np.ndarray) -> FusedVector:
    """Accumulate unit sub-vectors and derive the correction scalar.

    Accumulation runs in float64 regardless of the input precision.
    """
    mat = _as_matrix(vectors)
    units = _unit_rows(mat)
    v_f = units.sum(axis=0)
    n = mat.shape[0]
    return FusedVector(v_f=v_f, k=float(np.linalg.norm(v_f)) / n, n=n)


def extend(fused: FusedVector, vectors: Sequence[Sequence[float]] | np.ndarray) -> FusedVector:
    """Fold additional sub-segments into an existing fusion."""
    mat = _as_matrix(vectors)
    if mat.shape[1] != fused.dim:
        raise DimensionMismatchError(f"expected dimension {fused.dim}, got {mat.shape[1]}")
    v_f = fused.v_f + _unit_rows(mat).sum(axis=0)
    n = fused.n + mat.shape[0]
    return FusedVector(v_f=v_f, k=float(np.linalg.norm(v_f)) / n, n=n)


def _query_vector(query: Sequence[float] | np.ndarray, dim: int) -> np.ndarray:
    q = np.asarray(query, dtype=np.float64).reshape(-1)
    if q.shape[0] != dim:
        raise DimensionMismatchError(f"query has dimension {q.shape[0]}, expected {dim}")
    if not np.all(np.isfinite(q)):
        raise InputError("query vector must be finite")
    if np.linalg.norm(q) == 0.0:
        raise InputError("zero-norm query")
    return q


def corrected_score(fused: FusedVector, query: Sequence[float] | np.ndarray) -> float:
    """Retrieval score ``k * cos(v_f, query)``.

    A fully cancelled fusion (``|v_f| = 0``, antipodal sub-vectors) scores 0
    for every query; that is the exact mean-cosine value, not a convention.
    """
    q = _query_vector(query, fused.dim)
    norm = float(np.linalg.norm(fused.v_f))
    if norm == 0.0:
        return 0.0
    cos = float(np.dot(fused.v_f, q)) / (norm * float(np.linalg.norm(q)))
    return fused.k * cos


def average_similarity(
    vectors: Sequence[Sequence[float]] | np.ndarray,
    query: Sequence[float] | np.ndarray,
) -> float:
    """Brute-force oracle: mean cosine similarity over all sub-segments."""
    mat = _as_matrix(vectors)
    q = _query_vector(query, mat.shape[1])
    q_hat = q / np.linalg.norm(q)
    cosines = _unit_rows(mat) @ q_hat
    return float(cosines.sum()) / mat.shape[0]
