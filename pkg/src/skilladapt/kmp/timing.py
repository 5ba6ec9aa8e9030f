"""Monotone wall-time -> normalized-time reparameterization.

A TimeProfile is piecewise linear in s: each segment [s_i, s_i+1] carries a
speed factor relative to the nominal rate 1/base_duration. Slowing a window
by p% multiplies its factor by (1 - p/100); speeding up by (1 + p/100).
Retimings compose multiplicatively, so iterative adaptations stack.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidRange


@dataclass
class TimeProfile:
    base_duration: float = 1.0
    knots: np.ndarray = field(default_factory=lambda: np.array([0.0, 1.0]))
    factors: np.ndarray = field(default_factory=lambda: np.array([1.0]))

    def __post_init__(self):
        self.knots = np.asarray(self.knots, dtype=float)
        self.factors = np.asarray(self.factors, dtype=float)
        if self.knots[0] != 0.0 or self.knots[-1] != 1.0:
            raise InvalidRange("knots must span [0, 1]")
        if not np.all(np.diff(self.knots) > 0):
            raise InvalidRange("knots must be strictly increasing")
        if np.any(self.factors <= 0):
            raise InvalidRange("speed factors must be positive")
        self._rebuild()

    def _rebuild(self):
        seg_dur = self.base_duration * np.diff(self.knots) / self.factors
        self._t_knots = np.concatenate([[0.0], np.cumsum(seg_dur)])

    def total_duration(self) -> float:
        return float(self._t_knots[-1])

    def t_of_s(self, s: float) -> float:
        s = float(np.clip(s, 0.0, 1.0))
        i = min(np.searchsorted(self.knots, s, side="right") - 1,
                len(self.factors) - 1)
        frac = (s - self.knots[i]) * self.base_duration / self.factors[i]
        return float(self._t_knots[i] + frac)

    def s_of_t(self, t: float) -> float:
        t = float(np.clip(t, 0.0, self.total_duration()))
        i = min(np.searchsorted(self._t_knots, t, side="right") - 1,
                len(self.factors) - 1)
        frac = (t - self._t_knots[i]) * self.factors[i] / self.base_duration
        return float(min(self.knots[i] + frac, 1.0))

    def segment_duration(self, s_lo: float, s_hi: float) -> float:
        return self.t_of_s(s_hi) - self.t_of_s(s_lo)


def time_scale(profile: TimeProfile, percentage: float, t_start: float,
               t_end: float, mode: str) -> TimeProfile:
    """Scale traversal speed of the s-window [t_start, t_end] by
    (1 -/+ percentage/100), leaving geometry untouched."""
    if mode not in ("slow", "fast"):
        raise InvalidRange(f"unknown mode {mode!r}")
    if not (1.0 <= percentage <= 100.0):
        raise InvalidRange(f"percentage {percentage} outside [1, 100]")
    if mode == "slow" and percentage >= 100.0:
        raise InvalidRange("slow by 100% means zero speed; max is 99")
    if not (0.0 <= t_start < t_end <= 1.0):
        raise InvalidRange(f"window [{t_start}, {t_end}] invalid")

    scale = 1.0 - percentage / 100.0 if mode == "slow" else 1.0 + percentage / 100.0

    knots = np.unique(np.concatenate([profile.knots, [t_start, t_end]]))
    factors = []
    for lo, hi in zip(knots[:-1], knots[1:]):
        i = min(np.searchsorted(profile.knots, lo, side="right") - 1,
                len(profile.factors) - 1)
        f = profile.factors[i]
        mid = 0.5 * (lo + hi)
        if t_start <= mid <= t_end:
            f = f * scale
        factors.append(f)
    return TimeProfile(profile.base_duration, knots, np.array(factors))
