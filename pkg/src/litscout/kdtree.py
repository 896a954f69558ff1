"""Balanced 2-d kd-tree with exact k-nearest-neighbor queries.

Ordering is fully pinned: results sort by (distance asc, point id asc),
and the tree search never prunes a subtree that could still contain an
equal-distance point with a smaller id.
"""

from __future__ import annotations

import heapq
from typing import Sequence


class _Node:
    __slots__ = ("point_id", "x", "y", "axis", "left", "right")

    def __init__(self, point_id: int, x: float, y: float, axis: int):
        self.point_id = point_id
        self.x = x
        self.y = y
        self.axis = axis
        self.left: _Node | None = None
        self.right: _Node | None = None


def _build(points: list[tuple[float, float, int]], depth: int) -> _Node | None:
    if not points:
        return None
    axis = depth % 2
    points.sort(key=lambda p: (p[axis], p[2]))
    mid = len(points) // 2
    x, y, point_id = points[mid]
    node = _Node(point_id, x, y, axis)
    node.left = _build(points[:mid], depth + 1)
    node.right = _build(points[mid + 1 :], depth + 1)
    return node


class KDTree:
    """Exact 2-d nearest-neighbor search over (id, x, y) points."""

    def __init__(self, points: Sequence[tuple[int, float, float]]):
        self._size = len(points)
        self._root = _build([(x, y, pid) for pid, x, y in points], 0)

    def __len__(self) -> int:
        return self._size

    def knn(
        self, x: float, y: float, k: int, exclude: frozenset[int] | set[int] = frozenset()
    ) -> list[tuple[float, int]]:
        """The k nearest points to (x, y) as (squared distance, id), sorted
        by (distance asc, id asc); excluded ids are skipped entirely."""
        if k < 1 or self._root is None:
            return []
        # Max-heap of the best k seen so far, keyed by (-d2, -id) so the
        # root is the current worst under (distance asc, id asc).
        heap: list[tuple[float, int]] = []

        def worst() -> tuple[float, int]:
            d2, pid = heap[0]
            return (-d2, -pid)

        def visit(node: _Node | None) -> None:
            if node is None:
                return
            dx = x - node.x
            dy = y - node.y
            if node.point_id not in exclude:
                candidate = (dx * dx + dy * dy, node.point_id)
                if len(heap) < k:
                    heapq.heappush(heap, (-candidate[0], -candidate[1]))
                elif candidate < worst():
                    heapq.heapreplace(heap, (-candidate[0], -candidate[1]))
            axis_delta = dx if node.axis == 0 else dy
            near, far = (node.left, node.right) if axis_delta < 0 else (node.right, node.left)
            visit(near)
            # The far side can still hold a closer point, or an equal-distance
            # point with a smaller id, unless it is strictly beyond the worst.
            if len(heap) < k or axis_delta * axis_delta <= worst()[0]:
                visit(far)

        visit(self._root)
        return sorted((-d2, -pid) for d2, pid in heap)
