"""Spherical-obstacle avoidance by projecting violating trajectory samples
out of the obstacle and pinning them with via-points."""

from __future__ import annotations

import numpy as np

from ..errors import RadiusOutOfBounds
from .types import POS

MAX_RADIUS = 1.0
MARGIN = 0.02
N_SCAN = 500


def _perpendicular(v):
    """Deterministic unit vector perpendicular to v."""
    ref = np.array([0.0, 0.0, 1.0])
    if abs(np.dot(v, ref)) > 0.9 * np.linalg.norm(v):
        ref = np.array([0.0, 1.0, 0.0])
    p = np.cross(v, ref)
    return p / np.linalg.norm(p)


def repulsion_via_points(model, center, radius, margin=MARGIN,
                         source="language"):
    """Insert via-points pushing the mean trajectory out of the sphere.

    Samples the mean at N_SCAN times; every sample whose signed distance
    sd(x) = |x - center| - radius falls below margin gets a via-point.
    Scanning on the reference grid means each via-point shadow-replaces
    its reference point, so the detour is not fought by the original
    references inside the violating window.

    Each violating sample keeps its along-track coordinate and is pushed
    out of the sphere laterally (perpendicular to the local path tangent)
    until its distance to the center is radius + margin; pushing radially
    would be degenerate for paths passing near the sphere center.

    Returns the inserted via-point ids (possibly empty).
    """
    center = np.asarray(center, dtype=float)
    if not (0.0 < radius <= MAX_RADIUS):
        raise RadiusOutOfBounds(f"radius {radius} outside (0, {MAX_RADIUS}]")

    s_grid = np.linspace(0.0, 1.0, N_SCAN)
    poses = model.predict_mean_many(s_grid)
    pts = poses[:, POS]
    dist = np.linalg.norm(pts - center, axis=1)
    sd = dist - radius
    violating = sd < margin
    if not np.any(violating):
        return []

    tangents = np.gradient(pts, s_grid, axis=0)
    clearance = radius + margin
    ids = []
    i = 0
    while i < N_SCAN:
        if not violating[i]:
            i += 1
            continue
        j = i
        while j < N_SCAN and violating[j]:
            j += 1
        # one consistent lateral direction per run keeps the detour on one
        # side of the obstacle
        run_lateral = None
        for k in range(i, j):
            tan = tangents[k]
            tn = np.linalg.norm(tan)
            tan = tan / tn if tn > 1e-12 else np.array([1.0, 0.0, 0.0])
            rel = pts[k] - center
            along = float(np.dot(rel, tan))
            lateral = rel - along * tan
            ln = np.linalg.norm(lateral)
            if ln > 1e-9:
                lat_dir = lateral / ln
            elif run_lateral is not None:
                lat_dir = run_lateral
            else:
                lat_dir = _perpendicular(tan)
            run_lateral = lat_dir
            if abs(along) >= clearance:
                continue
            lift = np.sqrt(clearance**2 - along**2)
            pose = poses[k].copy()
            pose[POS] = center + along * tan + lift * lat_dir
            ids.append(model.add_via_point(s_grid[k], pose, source=source))
        i = j
    return ids
