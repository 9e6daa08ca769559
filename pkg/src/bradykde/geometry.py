"""Planar convex hull (monotone chain) and closed point-in-hull tests."""

from __future__ import annotations

import numpy as np

__all__ = ["convex_hull", "point_in_hull", "points_in_hull", "DEFAULT_TOL"]

DEFAULT_TOL = 1e-9


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points) -> np.ndarray:
    """Counterclockwise hull vertices, starting at the lexicographically smallest point.

    Collinear boundary points are dropped. Inputs with fewer than three distinct
    points, or all collinear, come back as the distinct points themselves (one
    point, or the two extremes of the segment).
    """
    P = np.asarray(points, dtype=float).reshape(-1, 2)
    if P.shape[0] == 0:
        return np.empty((0, 2))
    pts = sorted(set(map(tuple, P.tolist())))
    if len(pts) <= 2:
        return np.array(pts, dtype=float)

    lower: list = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    # All-collinear input collapses to the segment endpoints.
    if len(hull) == 2 or (len(hull) > 2 and all(_cross(hull[0], hull[1], q) == 0 for q in hull[2:])):
        return np.array([pts[0], pts[-1]], dtype=float)
    return np.array(hull, dtype=float)


def points_in_hull(hull, points, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Vectorised closed membership test for many points.

    A point counts as inside when its signed distance to every edge line is at
    least ``-tol``. Degenerate hulls use point/segment distance ``<= tol``; an
    empty hull contains nothing.
    """
    H = np.asarray(hull, dtype=float).reshape(-1, 2)
    Q = np.asarray(points, dtype=float).reshape(-1, 2)
    m = H.shape[0]
    if m == 0:
        return np.zeros(Q.shape[0], dtype=bool)
    if m == 1:
        return np.hypot(Q[:, 0] - H[0, 0], Q[:, 1] - H[0, 1]) <= tol
    if m == 2:
        a, b = H
        ab = b - a
        t = np.clip(((Q - a) @ ab) / float(ab @ ab), 0.0, 1.0)
        closest = a + t[:, None] * ab
        return np.hypot(*(Q - closest).T) <= tol
    inside = np.ones(Q.shape[0], dtype=bool)
    for i in range(m):
        a = H[i]
        e = H[(i + 1) % m] - a
        dist = (e[0] * (Q[:, 1] - a[1]) - e[1] * (Q[:, 0] - a[0])) / np.hypot(e[0], e[1])
        inside &= dist >= -tol
    return inside


def point_in_hull(hull, p, tol: float = DEFAULT_TOL) -> bool:
    return bool(points_in_hull(hull, np.asarray(p, dtype=float).reshape(1, 2), tol)[0])
