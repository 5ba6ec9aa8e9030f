"""Synthetic demonstration generators used by tests, scenarios and the CLI."""

from __future__ import annotations

import numpy as np

from .kmp import Demonstration


def _slerp_axis_angle(angle, axis):
    axis = np.asarray(axis, float)
    axis = axis / np.linalg.norm(axis)
    half = angle / 2.0
    return np.array([np.cos(half), *(np.sin(half) * axis)])


def line_demo(n=100, start=(0.0, 0.0, 0.0), end=(1.0, 0.0, 0.0)):
    """Straight-line demonstration with identity orientation."""
    t = np.linspace(0.0, 1.0, n)
    pos = np.outer(t, np.subtract(end, start)) + np.asarray(start, float)
    quat = np.tile([1.0, 0.0, 0.0, 0.0], (n, 1))
    return Demonstration.from_arrays(t, pos, quat)


def arc_demo(n=100, noise=0.0, seed=0, phase=0.0):
    """Planar arc with a gentle z bump and a slow rotation about z."""
    rng = np.random.default_rng(seed)
    t = np.linspace(0.0, 1.0, n)
    pos = np.column_stack([
        0.5 + 0.3 * np.cos(np.pi * t + phase),
        0.4 * np.sin(np.pi * t + phase),
        0.1 * np.sin(2 * np.pi * t) + 0.2,
    ])
    if noise > 0:
        pos = pos + rng.normal(scale=noise, size=pos.shape)
    quat = np.stack([_slerp_axis_angle(0.6 * ti, [0, 0, 1]) for ti in t])
    return Demonstration.from_arrays(t, pos, quat)


def arc_demo_set(k=3, n=100, noise=0.002, seed=0):
    return [arc_demo(n=n, noise=noise, seed=seed + i, phase=0.02 * i)
            for i in range(k)]
