"""Demonstration preprocessing: distance-based resampling and dynamic time
warping alignment."""

from __future__ import annotations

import numpy as np

from ..errors import TooFewSamples
from ..kmp.types import Demonstration, hemisphere_align

RESAMPLE_THRESHOLD = 0.001  # meters between consecutive kept samples


def record_demonstration(teleop_path, threshold=RESAMPLE_THRESHOLD
                         ) -> Demonstration:
    """Turn a raw timed pose recording into a Demonstration.

    teleop_path: iterable of (t, pos(3,), quat(4,)). Consecutive samples
    closer than the threshold are merged (first kept); time is renormalized
    to [0, 1] and quaternions hemisphere-aligned. The final sample is
    always kept so the demonstration ends at its true endpoint.
    """
    path = [(float(t), np.asarray(p, float), np.asarray(q, float))
            for t, p, q in teleop_path]
    if len(path) < 2:
        raise TooFewSamples("need at least 2 poses")

    kept = [path[0]]
    for entry in path[1:-1]:
        if np.linalg.norm(entry[1] - kept[-1][1]) >= threshold:
            kept.append(entry)
    last = path[-1]
    if np.linalg.norm(last[1] - kept[-1][1]) < threshold and len(kept) > 1:
        kept[-1] = last
    else:
        kept.append(last)
    if len(kept) < 2:
        raise TooFewSamples("path collapses to a single pose")

    t = np.array([e[0] for e in kept])
    t = (t - t[0]) / (t[-1] - t[0])
    # guard against duplicated timestamps after merging
    for i in range(1, len(t)):
        if t[i] <= t[i - 1]:
            t[i] = t[i - 1] + 1e-9
    t[-1] = 1.0
    pos = np.stack([e[1] for e in kept])
    quat = np.stack([e[2] for e in kept])
    return Demonstration.from_arrays(t, pos, quat)


def _dtw_path(ref_pos, other_pos):
    """Monotone, boundary-anchored warping path minimizing summed position
    distance. Returns a list of (i, j) index pairs."""
    n, m = len(ref_pos), len(other_pos)
    cost = np.linalg.norm(ref_pos[:, None, :] - other_pos[None, :, :],
                          axis=2)
    acc = np.full((n, m), np.inf)
    acc[0, 0] = cost[0, 0]
    for i in range(n):
        for j in range(m):
            if i == 0 and j == 0:
                continue
            best = np.inf
            if i > 0:
                best = min(best, acc[i - 1, j])
            if j > 0:
                best = min(best, acc[i, j - 1])
            if i > 0 and j > 0:
                best = min(best, acc[i - 1, j - 1])
            acc[i, j] = cost[i, j] + best
    path = [(n - 1, m - 1)]
    i, j = n - 1, m - 1
    while i > 0 or j > 0:
        candidates = []
        if i > 0 and j > 0:
            candidates.append((acc[i - 1, j - 1], i - 1, j - 1))
        if i > 0:
            candidates.append((acc[i - 1, j], i - 1, j))
        if j > 0:
            candidates.append((acc[i, j - 1], i, j - 1))
        _, i, j = min(candidates)
        path.append((i, j))
    path.reverse()
    return path


def dtw_align(demos: list[Demonstration]) -> list[Demonstration]:
    """Warp every demonstration onto the first one's time axis.

    Each output shares the reference's length and timestamps; a
    reference index matched to several samples keeps the closest one.
    """
    if len(demos) < 2:
        raise ValueError("need at least 2 demonstrations")
    ref = demos[0]
    ref_pos = ref.poses()[:, :3]
    ref_t = ref.times()
    out = [ref]
    for d in demos[1:]:
        other_pos = d.poses()[:, :3]
        path = _dtw_path(ref_pos, other_pos)
        match = {}
        for i, j in path:
            if i not in match or (
                    np.linalg.norm(other_pos[j] - ref_pos[i])
                    < np.linalg.norm(other_pos[match[i]] - ref_pos[i])):
                match[i] = j
        poses = d.poses()
        warped_pos = np.stack([poses[match[i], :3] for i in range(len(ref_t))])
        warped_quat = hemisphere_align(
            np.stack([poses[match[i], 3:7] for i in range(len(ref_t))]))
        out.append(Demonstration.from_arrays(ref_t, warped_pos, warped_quat))
    return out
