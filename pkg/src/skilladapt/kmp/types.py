"""Core data types for the trajectory model: demonstrations, reference
points, kernels, via-points and sampled trajectories.

Pose convention throughout: 7-vector (x, y, z, qw, qx, qy, qz) with the
quaternion in (w, x, y, z) order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from ..errors import NonUnitQuaternion

POSE_DIM = 7
POS = slice(0, 3)
QUAT = slice(3, 7)

UNIT_NORM_TOL = 1e-9
QUAT_ACCEPT_TOL = 1e-3


def unit_quat(q, tol=QUAT_ACCEPT_TOL):
    """Renormalize q if it is within tol of unit length, else raise."""
    q = np.asarray(q, dtype=float)
    n = np.linalg.norm(q)
    if abs(n - 1.0) > tol:
        raise NonUnitQuaternion(f"|q| = {n:.6f}")
    return q / n


def hemisphere_align(quats):
    """Flip each quaternion to the hemisphere of its predecessor.

    Operates on an (M, 4) array; returns a new array. The first sample is
    flipped to qw >= 0 for a canonical start.
    """
    out = np.array(quats, dtype=float)
    if out[0, 0] < 0:
        out[0] = -out[0]
    for i in range(1, len(out)):
        if np.dot(out[i], out[i - 1]) < 0:
            out[i] = -out[i]
    return out


@dataclass
class DemoSample:
    t: float
    pos: np.ndarray
    quat: np.ndarray
    wrench: np.ndarray | None = None

    def pose(self):
        return np.concatenate([self.pos, self.quat])


@dataclass
class Demonstration:
    """One recorded demonstration, time-normalized to [0, 1]."""

    samples: list[DemoSample]

    def __post_init__(self):
        self.validate()

    def validate(self):
        if len(self.samples) < 2:
            raise ValueError("demonstration needs at least 2 samples")
        ts = np.array([s.t for s in self.samples])
        if ts[0] != 0.0 or ts[-1] != 1.0:
            raise ValueError("time must span [0, 1]")
        if not np.all(np.diff(ts) > 0):
            raise ValueError("time must be strictly increasing")
        for s in self.samples:
            if abs(np.linalg.norm(s.quat) - 1.0) > UNIT_NORM_TOL:
                raise NonUnitQuaternion("demonstration quaternion not unit")

    def times(self):
        return np.array([s.t for s in self.samples])

    def poses(self):
        return np.stack([s.pose() for s in self.samples])

    @classmethod
    def from_arrays(cls, t, pos, quat, wrench=None):
        t = np.asarray(t, dtype=float)
        pos = np.asarray(pos, dtype=float)
        quat = hemisphere_align(np.asarray(quat, dtype=float))
        quat = quat / np.linalg.norm(quat, axis=1, keepdims=True)
        samples = []
        for i in range(len(t)):
            w = None if wrench is None else np.asarray(wrench[i], dtype=float)
            samples.append(DemoSample(float(t[i]), pos[i].copy(), quat[i].copy(), w))
        return cls(samples)

    # line-delimited JSON, one sample per line
    def save(self, path):
        with open(path, "w") as f:
            for s in self.samples:
                rec = {"t": s.t, "pos": list(s.pos), "quat": list(s.quat)}
                if s.wrench is not None:
                    rec["wrench"] = list(s.wrench)
                f.write(json.dumps(rec) + "\n")

    @classmethod
    def load(cls, path):
        t, pos, quat, wrench = [], [], [], []
        have_wrench = False
        with open(path) as f:
            for line in f:
                line = line.strip()
                if not line:
                    continue
                rec = json.loads(line)
                t.append(rec["t"])
                pos.append(rec["pos"])
                quat.append(rec["quat"])
                if "wrench" in rec:
                    have_wrench = True
                    wrench.append(rec["wrench"])
                else:
                    wrench.append([0.0] * 6)
        return cls.from_arrays(t, pos, quat, wrench if have_wrench else None)


@dataclass
class ReferencePoint:
    """Conditional pose distribution at one normalized time."""

    s: float
    mu: np.ndarray        # (7,)
    sigma: np.ndarray     # (7, 7) symmetric PSD

    def validate(self):
        if not (0.0 <= self.s <= 1.0):
            raise ValueError("reference s outside [0, 1]")
        if np.max(np.abs(self.sigma - self.sigma.T)) > 1e-9:
            raise ValueError("reference covariance not symmetric")
        if np.min(np.linalg.eigvalsh(self.sigma)) < -1e-12:
            raise ValueError("reference covariance not PSD")


@dataclass
class KernelConfig:
    family: str = "matern52"
    length_scale: float = 0.1

    def __post_init__(self):
        if self.family != "matern52":
            raise ValueError(f"unsupported kernel family {self.family!r}")
        if self.length_scale <= 0:
            raise ValueError("length_scale must be positive")


@dataclass
class ViaPoint:
    """A desired pose at normalized time s_bar with precision gamma.

    The via-point's covariance is gamma * I; small gamma forces passage.
    """

    id: int
    s_bar: float
    mu_bar: np.ndarray
    gamma: float
    source: str  # physical | language | graphical

    def to_dict(self):
        return {
            "id": self.id,
            "s_bar": self.s_bar,
            "mu_bar": list(self.mu_bar),
            "gamma": self.gamma,
            "source": self.source,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(d["id"], d["s_bar"], np.asarray(d["mu_bar"], float),
                   d["gamma"], d["source"])


@dataclass
class TrajectoryPoint:
    t: float
    s: float
    pose: np.ndarray                 # (7,)
    covariance: np.ndarray | None = None


@dataclass
class Trajectory:
    points: list[TrajectoryPoint] = field(default_factory=list)

    def __len__(self):
        return len(self.points)

    def times(self):
        return np.array([p.t for p in self.points])

    def s_values(self):
        return np.array([p.s for p in self.points])

    def poses(self):
        return np.stack([p.pose for p in self.points])

    def positions(self):
        return self.poses()[:, POS]
