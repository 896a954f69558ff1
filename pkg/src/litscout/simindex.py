"""Exact similarity search over document embeddings and 2-D projections.

FlatIndex scans the full embedding matrix (exact L2); PlanarIndex wraps
the kd-tree for 2-D Euclidean queries. Both share the result contract:
ties break by ascending paper id, scores are 1/(1+distance).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .kdtree import KDTree
from .projection import PlanarCoordinates


class SimIndexError(Exception):
    pass


class EmptyCorpusError(SimIndexError):
    pass


class DimensionMismatchError(SimIndexError):
    def __init__(self, expected: int, got: int):
        super().__init__(f"expected {expected} dims, got {got}")
        self.expected = expected
        self.got = got


class EmptySeedSetError(SimIndexError):
    pass


class UnknownSeedIdError(SimIndexError):
    def __init__(self, paper_id: int):
        super().__init__(f"seed id {paper_id} not in index")
        self.paper_id = paper_id


@dataclass(frozen=True)
class SimilarityResult:
    paper_id: int
    distance: float
    score: float


def score_from_distance(distance: float) -> float:
    """Map distance to a similarity score in (0, 1]: 1/(1+d).

    Strictly decreasing, exactly 1 at distance 0. Isolated here on
    purpose; it is the one place to swap the scoring transform.
    """
    if distance < 0:
        raise ValueError("distance must be >= 0")
    return 1.0 / (1.0 + distance)


def centroid(vectors: Sequence[np.ndarray] | np.ndarray) -> np.ndarray:
    """Component-wise arithmetic mean of the seed vectors."""
    if len(vectors) == 0:
        raise EmptySeedSetError("centroid of an empty seed set")
    matrix = np.asarray(vectors, dtype=np.float64)
    if matrix.ndim != 2:
        raise DimensionMismatchError(2, matrix.ndim)
    return matrix.mean(axis=0)


def _results_from_pairs(pairs: Iterable[tuple[float, int]]) -> list[SimilarityResult]:
    return [
        SimilarityResult(paper_id=pid, distance=d, score=score_from_distance(d))
        for d, pid in pairs
    ]


class FlatIndex:
    """Immutable exact n-D index: ids aligned to rows of one dense matrix."""

    def __init__(self, ids: Sequence[int], matrix: np.ndarray):
        matrix = np.ascontiguousarray(matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[0] == 0:
            raise EmptyCorpusError("index needs a non-empty 2-D matrix")
        if len(ids) != matrix.shape[0]:
            raise SimIndexError(f"{len(ids)} ids for {matrix.shape[0]} rows")
        if not np.isfinite(matrix).all():
            raise SimIndexError("embedding matrix contains NaN/Inf")
        self.ids = np.asarray(ids, dtype=np.int64)
        self.matrix = matrix
        self._row_of = {int(pid): row for row, pid in enumerate(self.ids)}
        if len(self._row_of) != len(self.ids):
            raise SimIndexError("duplicate paper ids in index")
        self._sq_norms = np.einsum("ij,ij->i", matrix, matrix)

    @property
    def dims(self) -> int:
        return self.matrix.shape[1]

    def __len__(self) -> int:
        return self.matrix.shape[0]

    def __contains__(self, paper_id: int) -> bool:
        return int(paper_id) in self._row_of

    def vector_for(self, paper_id: int) -> np.ndarray:
        row = self._row_of.get(int(paper_id))
        if row is None:
            raise UnknownSeedIdError(int(paper_id))
        return self.matrix[row]

    def knn(
        self, query: np.ndarray, k: int, exclude_ids: Iterable[int] = ()
    ) -> list[SimilarityResult]:
        """k nearest rows by L2 distance, (distance asc, id asc) order."""
        query = np.asarray(query, dtype=np.float64).ravel()
        if query.shape[0] != self.dims:
            raise DimensionMismatchError(self.dims, query.shape[0])
        if k < 1:
            return []
        # d^2 via the expansion ||x||^2 - 2 x.q + ||q||^2; cheaper than
        # materializing the full difference matrix per query.
        d2 = self._sq_norms - 2.0 * (self.matrix @ query) + float(query @ query)
        np.maximum(d2, 0.0, out=d2)
        mask = np.ones(len(self.ids), dtype=bool)
        excluded = {int(e) for e in exclude_ids}
        if excluded:
            for pid in excluded:
                row = self._row_of.get(pid)
                if row is not None:
                    mask[row] = False
        candidates = np.flatnonzero(mask)
        if candidates.size == 0:
            return []
        order = np.lexsort((self.ids[candidates], d2[candidates]))
        top = candidates[order[: min(k, candidates.size)]]
        return _results_from_pairs(
            (float(np.sqrt(d2[row])), int(self.ids[row])) for row in top
        )


def build_flat_index(ids: Sequence[int], vectors: Sequence[np.ndarray] | np.ndarray) -> FlatIndex:
    """Validate uniform dimensions and build the index."""
    if len(ids) == 0:
        raise EmptyCorpusError("no embeddings to index")
    rows = [np.asarray(v, dtype=np.float64).ravel() for v in vectors]
    dims = rows[0].shape[0]
    for row in rows[1:]:
        if row.shape[0] != dims:
            raise DimensionMismatchError(dims, row.shape[0])
    return FlatIndex(ids, np.vstack(rows))


class PlanarIndex:
    """Exact 2-D index over projected coordinates (kd-tree backed)."""

    def __init__(self, coords: PlanarCoordinates):
        if len(coords.ids) == 0:
            raise EmptyCorpusError("no coordinates to index")
        self.ids = list(coords.ids)
        self._xy = {int(pid): (float(x), float(y)) for pid, (x, y) in zip(coords.ids, coords.xy)}
        if len(self._xy) != len(coords.ids):
            raise SimIndexError("duplicate paper ids in projection")
        self._tree = KDTree([(int(pid), float(x), float(y)) for pid, (x, y) in zip(coords.ids, coords.xy)])

    @property
    def dims(self) -> int:
        return 2

    def __len__(self) -> int:
        return len(self.ids)

    def __contains__(self, paper_id: int) -> bool:
        return int(paper_id) in self._xy

    def vector_for(self, paper_id: int) -> np.ndarray:
        xy = self._xy.get(int(paper_id))
        if xy is None:
            raise UnknownSeedIdError(int(paper_id))
        return np.asarray(xy, dtype=np.float64)

    def knn(
        self, query: np.ndarray, k: int, exclude_ids: Iterable[int] = ()
    ) -> list[SimilarityResult]:
        query = np.asarray(query, dtype=np.float64).ravel()
        if query.shape[0] != 2:
            raise DimensionMismatchError(2, query.shape[0])
        if k < 1:
            return []
        pairs = self._tree.knn(float(query[0]), float(query[1]), k, frozenset(int(e) for e in exclude_ids))
        return _results_from_pairs((float(np.sqrt(d2)), pid) for d2, pid in pairs)


def build_planar_index(coords: PlanarCoordinates) -> PlanarIndex:
    return PlanarIndex(coords)


def search_by_seeds(index, seed_ids: Sequence[int], k: int) -> list[SimilarityResult]:
    """Similarity search seeded by corpus papers.

    One seed queries by its own vector; several seeds query by their
    centroid. Seeds never appear in the results.
    """
    if len(seed_ids) == 0:
        raise EmptySeedSetError("search_by_seeds needs at least one seed")
    seeds = [index.vector_for(pid) for pid in seed_ids]
    return index.knn(centroid(seeds), k, exclude_ids=seed_ids)
