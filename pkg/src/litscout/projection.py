"""2-D coordinates for the visualization canvas.

Projections are either ingested from an externally computed file (the
production path; any 2-D reduction works) or computed here with a
deterministic PCA fallback so the pipeline stays self-contained.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


class ProjectionError(Exception):
    pass


class MissingIdsError(ProjectionError):
    def __init__(self, missing: list[int]):
        shown = ", ".join(map(str, missing[:10]))
        more = f" (+{len(missing) - 10} more)" if len(missing) > 10 else ""
        super().__init__(f"projection file missing {len(missing)} ids: {shown}{more}")
        self.missing = missing


class ProjectionParseError(ProjectionError):
    def __init__(self, path, line: int, message: str):
        super().__init__(f"{path}:{line}: {message}")
        self.line = line


@dataclass
class PlanarCoordinates:
    """One (x, y) pair per paper id, tagged with where it came from."""

    ids: list[int]
    xy: np.ndarray
    provenance: str
    extra_count: int = 0
    warnings: list[str] = field(default_factory=list)

    def as_dict(self) -> dict[int, tuple[float, float]]:
        return {pid: (float(x), float(y)) for pid, (x, y) in zip(self.ids, self.xy)}


def _parse_rows(path: str | Path) -> Iterable[tuple[int, tuple[int, float, float]]]:
    """Yield (line_number, (paper_id, x, y)) from CSV or JSON."""
    path = Path(path)
    if path.suffix.lower() == ".json":
        with open(path, encoding="utf-8") as fh:
            items = json.load(fh)
        for i, obj in enumerate(items, start=1):
            try:
                yield i, (int(obj["paper_id"]), float(obj["x"]), float(obj["y"]))
            except (KeyError, TypeError, ValueError) as exc:
                raise ProjectionParseError(path, i, f"bad entry: {exc}") from None
        return
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header[:3]] != ["paper_id", "x", "y"]:
            raise ProjectionParseError(path, 1, "expected header paper_id,x,y")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                yield lineno, (int(row[0]), float(row[1]), float(row[2]))
            except (IndexError, ValueError) as exc:
                raise ProjectionParseError(path, lineno, f"bad row: {exc}") from None


def load_projection(path: str | Path, expected_ids: Sequence[int]) -> PlanarCoordinates:
    """Load externally computed coordinates covering at least expected_ids.

    Ids missing from the file abort with the full list; file entries for
    unknown ids are skipped and counted.
    """
    coords: dict[int, tuple[float, float]] = {}
    expected = set(expected_ids)
    extra = 0
    for lineno, (pid, x, y) in _parse_rows(path):
        if not (math.isfinite(x) and math.isfinite(y)):
            raise ProjectionParseError(path, lineno, f"non-finite coordinate for id {pid}")
        if pid not in expected:
            extra += 1
            continue
        coords[pid] = (x, y)
    missing = sorted(expected - coords.keys())
    if missing:
        raise MissingIdsError(missing)
    ids = sorted(expected)
    xy = np.array([coords[p] for p in ids], dtype=np.float64)
    warnings = [f"ignored {extra} entries for unknown ids"] if extra else []
    return PlanarCoordinates(ids=ids, xy=xy, provenance="external", extra_count=extra, warnings=warnings)


def save_projection_csv(coords: PlanarCoordinates, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["paper_id", "x", "y"])
        for pid, (x, y) in zip(coords.ids, coords.xy):
            writer.writerow([pid, repr(float(x)), repr(float(y))])


def pca_project_2d(ids: Sequence[int], embeddings: np.ndarray) -> PlanarCoordinates:
    """Deterministic PCA to 2-D: mean-center, project onto the top two
    principal directions.

    Axis 1 carries at least as much variance as axis 2. Each direction is
    sign-fixed (largest-magnitude loading positive) so repeated runs agree
    bit-for-bit. Inputs of rank < 2 degrade gracefully: rank 1 puts all
    variance on x, rank 0 collapses to the origin; both warn.
    """
    embeddings = np.asarray(embeddings, dtype=np.float64)
    if embeddings.ndim != 2 or embeddings.shape[0] < 3 or embeddings.shape[1] < 2:
        raise ProjectionError("need >= 3 vectors of dimension >= 2")
    if len(ids) != embeddings.shape[0]:
        raise ProjectionError("ids and embeddings disagree on count")
    if not np.isfinite(embeddings).all():
        raise ProjectionError("embeddings contain NaN/Inf")

    centered = embeddings - embeddings.mean(axis=0)
    _, s, vt = np.linalg.svd(centered, full_matrices=False)
    tol = s[0] * max(centered.shape) * np.finfo(np.float64).eps if s.size else 0.0
    rank = int((s > tol).sum())

    warnings: list[str] = []
    xy = np.zeros((embeddings.shape[0], 2), dtype=np.float64)
    n_axes = min(2, rank)
    if rank < 2:
        warnings.append(f"degenerate rank {rank}: filling remaining axes with zeros")
    for axis in range(n_axes):
        direction = vt[axis]
        if direction[int(np.argmax(np.abs(direction)))] < 0:
            direction = -direction
        xy[:, axis] = centered @ direction
    return PlanarCoordinates(
        ids=list(ids), xy=xy, provenance="pca", warnings=warnings
    )
