"""Simplified position-space virtual fixtures for guided demonstration
recording.

Trajectory fixtures pull toward the nearest mean-path point with a
precision-scaled spring; velocity fixtures pull the effector velocity
toward an RBF-interpolated velocity field. Multiple trajectory fixtures
combine as a product of position-space Gaussian experts, whose pull is
the precision-weighted sum sum_i P_i (x_i - x).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import TooManyFixtures
from .impedance import EffectorState

MAX_ACTIVE_FIXTURES = 10
VELOCITY_KERNEL_SCALE = 0.03


@dataclass
class TrajectoryFixture:
    path: np.ndarray          # (M, 3) mean path positions
    precisions: np.ndarray    # (M, 3, 3) inverse position covariances
    gain: float = 1.0

    @classmethod
    def from_reference(cls, refs, gain=1.0, floor=1e-8):
        path = np.stack([r.mu[:3] for r in refs])
        precs = np.stack([
            np.linalg.inv(r.sigma[:3, :3] + floor * np.eye(3)) for r in refs])
        return cls(path, precs, gain)


@dataclass
class VelocityFixture:
    centers: np.ndarray       # (M, 3) positions
    velocities: np.ndarray    # (M, 3) desired velocities
    gain: float = 1.0
    length_scale: float = VELOCITY_KERNEL_SCALE
    regularization: float = 1e-6
    _weights: np.ndarray | None = field(default=None, repr=False)

    def _fit(self):
        d = self.centers[:, None, :] - self.centers[None, :, :]
        K = np.exp(-0.5 * np.sum(d**2, axis=2) / self.length_scale**2)
        K += self.regularization * np.eye(len(self.centers))
        self._weights = np.linalg.solve(K, self.velocities)

    def desired_velocity(self, x):
        if self._weights is None:
            self._fit()
        d = np.asarray(x, float)[None, :] - self.centers
        k = np.exp(-0.5 * np.sum(d**2, axis=1) / self.length_scale**2)
        return k @ self._weights


@dataclass
class FixtureSet:
    trajectory_fixtures: list = field(default_factory=list)
    velocity_fixtures: list = field(default_factory=list)
    max_active: int = MAX_ACTIVE_FIXTURES

    def count(self):
        return len(self.trajectory_fixtures) + len(self.velocity_fixtures)

    def add(self, fixture):
        if self.count() >= self.max_active:
            raise TooManyFixtures(f"at most {self.max_active} fixtures")
        if isinstance(fixture, TrajectoryFixture):
            self.trajectory_fixtures.append(fixture)
        else:
            self.velocity_fixtures.append(fixture)


def fixture_wrench(fixtures: FixtureSet, state: EffectorState) -> np.ndarray:
    """Guidance wrench (force only; torque block zero) for the current
    effector state."""
    if fixtures.count() > fixtures.max_active:
        raise TooManyFixtures(f"at most {fixtures.max_active} fixtures")
    force = np.zeros(3)
    for tf in fixtures.trajectory_fixtures:
        dist = np.linalg.norm(tf.path - state.pos, axis=1)
        i = int(np.argmin(dist))
        force += tf.gain * tf.precisions[i] @ (tf.path[i] - state.pos)
    for vf in fixtures.velocity_fixtures:
        force += vf.gain * (vf.desired_velocity(state.pos) - state.vel[:3])
    return np.concatenate([force, np.zeros(3)])
