"""
Brute-force reference implementations used by the tests.
"""

import itertools
from fractions import Fraction
from typing import List, Sequence, Set, Tuple

import numpy as np


def exact_incircle(a, b, c, d) -> Fraction:
    """In-circle determinant in rational arithmetic (positive: inside for ccw a, b, c)."""
    rows = []
    for p in (a, b, c):
        dx = Fraction(p[0]) - Fraction(d[0])
        dy = Fraction(p[1]) - Fraction(d[1])
        rows.append((dx, dy, dx * dx + dy * dy))
    (a1, a2, a3), (b1, b2, b3), (c1, c2, c3) = rows
    return a1 * (b2 * c3 - b3 * c2) - a2 * (b1 * c3 - b3 * c1) + a3 * (b1 * c2 - b2 * c1)


def exact_orient(a, b, c) -> Fraction:
    return (Fraction(b[0]) - Fraction(a[0])) * (Fraction(c[1]) - Fraction(a[1])) - (
        Fraction(b[1]) - Fraction(a[1])
    ) * (Fraction(c[0]) - Fraction(a[0]))


def empty_circumcircle_violations(vertices: np.ndarray, triangles: np.ndarray) -> List[Tuple[int, int]]:
    """
    All (triangle, vertex) pairs with the vertex strictly inside the triangle's
    circumcircle, checked against every vertex.
    """
    bad = []
    for t, (i, j, k) in enumerate(triangles):
        a, b, c = vertices[i], vertices[j], vertices[k]
        sign = 1 if exact_orient(a, b, c) > 0 else -1
        for v in range(vertices.shape[0]):
            if v in (i, j, k):
                continue
            if sign * exact_incircle(a, b, c, vertices[v]) > 0:
                bad.append((t, v))
    return bad


def naive_clusters(points: np.ndarray, radius: float) -> List[Set[int]]:
    """Connected components of the graph joining points at distance <= 2 radius."""
    n = points.shape[0]
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if np.hypot(*(points[i] - points[j])) <= 2.0 * radius:
                parent[find(i)] = find(j)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), set()).add(i)
    return sorted(groups.values(), key=min)


def flood_connected(supported: np.ndarray, start: Sequence[int], goal: Sequence[int]) -> bool:
    """Breadth-first search on the 8-neighbourhood of a boolean grid."""
    start, goal = tuple(start), tuple(goal)
    if not supported[start] or not supported[goal]:
        return False
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for x, y in frontier:
            if (x, y) == goal:
                return True
            for dx, dy in itertools.product((-1, 0, 1), repeat=2):
                u, v = x + dx, y + dy
                if (
                    0 <= u < supported.shape[0]
                    and 0 <= v < supported.shape[1]
                    and supported[u, v]
                    and (u, v) not in seen
                ):
                    seen.add((u, v))
                    nxt.append((u, v))
        frontier = nxt
    return False


def sampled_length_in_box(segments: np.ndarray, box: Tuple[float, float, float, float], samples: int = 20000) -> float:
    """Length of the segments inside a closed box, by uniform sampling along each segment."""
    x0, y0, x1, y1 = box
    total = 0.0
    t = (np.arange(samples) + 0.5) / samples
    for ax, ay, bx, by in np.asarray(segments, dtype=float).reshape(-1, 4):
        xs = ax + t * (bx - ax)
        ys = ay + t * (by - ay)
        inside = (xs >= x0) & (xs <= x1) & (ys >= y0) & (ys <= y1)
        total += np.hypot(bx - ax, by - ay) * inside.mean()
    return total
