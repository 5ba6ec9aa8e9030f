"""Spectral multiscale coverage control on the unit square.

The controller keeps two sets of Fourier coefficients over a separable
cosine basis: phi_k for the target spatial distribution and c_k for the
time-averaged trajectory coverage. The ergodic metric is the Sobolev
weighted squared difference; the control action descends it greedily at
each step.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidTransition, NotRunning, OutOfBounds

K_MODES = 15
SOBOLEV_EXPONENT = 1.5  # (d + 1) / 2 for d = 2

VELOCITY_BOUNDS = (3.0, 16.0)
FORCE_BOUNDS = (5.0, 30.0)
STIFFNESS_BOUNDS = (500.0, 2000.0)
VELOCITY_DEFAULT = 6.0
FORCE_DEFAULT = 15.0
STIFFNESS_DEFAULT = 1000.0
STIFFNESS_NORMAL = 800.0
VELOCITY_SCALE = 0.01   # domain units per second per unit of setpoint


class FourierBasis:
    """Separable cosine basis f_k(x) = cos(k1 pi x1) cos(k2 pi x2) / h_k
    over [0,1]^2 with Sobolev weights."""

    def __init__(self, n_modes: int = K_MODES):
        self.n_modes = n_modes
        k1, k2 = np.meshgrid(np.arange(n_modes), np.arange(n_modes),
                             indexing="ij")
        self.k = np.column_stack([k1.ravel(), k2.ravel()])  # (M, 2)
        # normalizers: integral of cos^2(k pi x) over [0,1] is 1 (k=0) or 1/2
        h2 = np.where(self.k == 0, 1.0, 0.5)
        self.h = np.sqrt(h2[:, 0] * h2[:, 1])
        self.weights = (1.0 + np.sum(self.k**2, axis=1)) ** (-SOBOLEV_EXPONENT)

    @property
    def size(self):
        return self.k.shape[0]

    def evaluate(self, x):
        """f_k at a single point x (2,) -> (M,)."""
        x = np.asarray(x, dtype=float)
        return (np.cos(self.k[:, 0] * np.pi * x[0])
                * np.cos(self.k[:, 1] * np.pi * x[1])) / self.h

    def gradient(self, x):
        """grad f_k at x -> (M, 2)."""
        x = np.asarray(x, dtype=float)
        c1 = np.cos(self.k[:, 0] * np.pi * x[0])
        c2 = np.cos(self.k[:, 1] * np.pi * x[1])
        s1 = np.sin(self.k[:, 0] * np.pi * x[0])
        s2 = np.sin(self.k[:, 1] * np.pi * x[1])
        g1 = -self.k[:, 0] * np.pi * s1 * c2 / self.h
        g2 = -self.k[:, 1] * np.pi * c1 * s2 / self.h
        return np.column_stack([g1, g2])

    def evaluate_grid(self, g):
        """f_k on a g x g cell-center grid -> (M, g, g)."""
        x = (np.arange(g) + 0.5) / g
        c1 = np.cos(np.outer(self.k[:, 0] * np.pi, x))  # (M, g)
        c2 = np.cos(np.outer(self.k[:, 1] * np.pi, x))
        return c1[:, :, None] * c2[:, None, :] / self.h[:, None, None]


@dataclass
class TargetDistribution:
    grid: np.ndarray  # (G, G) non-negative, integrates to 1

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        if np.any(g < 0):
            raise ValueError("target distribution must be non-negative")
        total = g.sum() / g.size  # cell area = 1 / G^2
        if total <= 0:
            raise ValueError("target distribution must have positive mass")
        self.grid = g / total

    @classmethod
    def uniform(cls, g: int = 64):
        return cls(np.ones((g, g)))

    @classmethod
    def gaussian_bumps(cls, centers, sigmas, g: int = 64):
        x = (np.arange(g) + 0.5) / g
        xx, yy = np.meshgrid(x, x, indexing="ij")
        grid = np.zeros((g, g))
        for (cx, cy), s in zip(centers, sigmas):
            grid += np.exp(-((xx - cx) ** 2 + (yy - cy) ** 2) / (2 * s * s))
        return cls(grid + 1e-6)


def target_coefficients(dist: TargetDistribution,
                        basis: FourierBasis) -> np.ndarray:
    """phi_k = integral of phi(x) f_k(x) dx by midpoint quadrature."""
    g = dist.grid.shape[0]
    fk = basis.evaluate_grid(g)
    return np.tensordot(fk, dist.grid, axes=([1, 2], [0, 1])) / (g * g)


@dataclass
class ErgodicSetpoints:
    velocity: float = VELOCITY_DEFAULT
    force: float = FORCE_DEFAULT
    stiffness_tangential: float = STIFFNESS_DEFAULT
    stiffness_normal: float = STIFFNESS_NORMAL

    def to_dict(self):
        return {
            "velocity": self.velocity,
            "force": self.force,
            "stiffness_tangential": self.stiffness_tangential,
            "stiffness_normal": self.stiffness_normal,
        }


def _check_bounds(name, value, bounds):
    lo, hi = bounds
    if not (lo <= value <= hi):
        raise OutOfBounds(name, value, list(bounds))


def set_velocity(sp: ErgodicSetpoints, value: float) -> ErgodicSetpoints:
    _check_bounds("velocity", value, VELOCITY_BOUNDS)
    sp.velocity = float(value)
    return sp


def set_force(sp: ErgodicSetpoints, value: float) -> ErgodicSetpoints:
    _check_bounds("force", value, FORCE_BOUNDS)
    sp.force = float(value)
    return sp


def set_stiffness(sp: ErgodicSetpoints, value: float) -> ErgodicSetpoints:
    """Tangential stiffness only; the normal component stays fixed."""
    _check_bounds("stiffness", value, STIFFNESS_BOUNDS)
    sp.stiffness_tangential = float(value)
    return sp


@dataclass
class ErgodicState:
    basis: FourierBasis
    phi: np.ndarray
    c: np.ndarray = None
    t: float = 0.0
    x: np.ndarray = field(default_factory=lambda: np.array([0.5, 0.5]))
    exec_state: str = "idle"  # idle | running | paused
    visit_counts: np.ndarray = field(
        default_factory=lambda: np.zeros((64, 64)))

    def __post_init__(self):
        if self.c is None:
            self.c = np.zeros(self.basis.size)

    def metric(self) -> float:
        d = self.c - self.phi
        return float(np.sum(self.basis.weights * d * d))

    def start(self):
        if self.exec_state == "paused":
            raise InvalidTransition("paused; use resume")
        self.exec_state = "running"

    def status(self) -> dict:
        return {
            "exec": self.exec_state,
            "metric": self.metric(),
            "x": [float(self.x[0]), float(self.x[1])],
        }


def make_state(dist: TargetDistribution,
               basis: FourierBasis | None = None) -> ErgodicState:
    basis = basis or FourierBasis()
    return ErgodicState(basis, target_coefficients(dist, basis))


def update_coverage(state: ErgodicState, x_new, dt: float) -> ErgodicState:
    """Fold a new sample into the running time average of f_k."""
    if state.exec_state != "running":
        raise NotRunning(f"exec state is {state.exec_state}")
    if dt <= 0:
        raise ValueError("dt must be positive")
    x_new = np.asarray(x_new, dtype=float)
    fk = state.basis.evaluate(x_new)
    state.c = (state.t * state.c + fk * dt) / (state.t + dt)
    state.t += dt
    state.x = x_new
    g = state.visit_counts.shape[0]
    i = min(int(x_new[0] * g), g - 1)
    j = min(int(x_new[1] * g), g - 1)
    state.visit_counts[i, j] += 1
    return state


def ergodic_metric(state: ErgodicState, basis: FourierBasis | None = None
                   ) -> float:
    basis = basis or state.basis
    d = state.c - state.phi
    return float(np.sum(basis.weights * d * d))


def smc_control(state: ErgodicState, setpoints: ErgodicSetpoints,
                dt: float) -> np.ndarray:
    """Velocity command descending the ergodic metric.

    u = -v_max * B / |B| with B = sum_k w_k (c_k - phi_k) grad f_k(x);
    a degenerate gradient falls back to +x1. The command is trimmed so the
    integrated step stays inside [0, 1]^2 (reflection at the boundary).
    """
    if state.exec_state != "running":
        raise NotRunning(f"exec state is {state.exec_state}")
    v_max = setpoints.velocity * VELOCITY_SCALE
    d = state.c - state.phi
    B = (state.basis.weights * d) @ state.basis.gradient(state.x)
    nb = np.linalg.norm(B)
    if nb < 1e-12:
        u = np.array([v_max, 0.0])
    else:
        u = -v_max * B / nb
    return u


def advance(state: ErgodicState, setpoints: ErgodicSetpoints,
            dt: float) -> ErgodicState:
    """One closed-loop step: control, integrate with boundary reflection,
    fold the new position into the coverage average."""
    u = smc_control(state, setpoints, dt)
    x = state.x + u * dt
    for i in range(2):
        if x[i] < 0.0:
            x[i] = -x[i]
        if x[i] > 1.0:
            x[i] = 2.0 - x[i]
        x[i] = float(np.clip(x[i], 0.0, 1.0))
    return update_coverage(state, x, dt)


def set_exec_state(state: ErgodicState, cmd: str) -> ErgodicState:
    """pause/resume; coverage history (c, t, x) is preserved exactly."""
    if cmd == "pause":
        if state.exec_state == "idle":
            raise InvalidTransition("cannot pause while idle")
        state.exec_state = "paused"
    elif cmd == "resume":
        if state.exec_state == "idle":
            raise InvalidTransition("cannot resume from idle")
        state.exec_state = "running"
    else:
        raise ValueError(f"unknown exec command {cmd!r}")
    return state
