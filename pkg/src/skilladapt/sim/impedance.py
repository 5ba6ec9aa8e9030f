"""Unit-mass Cartesian impedance dynamics for the execution simulator."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..kmp.types import POS, QUAT


def quat_mul(a, b):
    w1, x1, y1, z1 = a
    w2, x2, y2, z2 = b
    return np.array([
        w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
        w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
        w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
        w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
    ])


def quat_conj(q):
    return np.array([q[0], -q[1], -q[2], -q[3]])


def quat_error_vector(q_des, q):
    """Axis-angle vector of q_des * q^-1 (shortest arc)."""
    qe = quat_mul(q_des, quat_conj(q))
    if qe[0] < 0:
        qe = -qe
    w = np.clip(qe[0], -1.0, 1.0)
    vec = qe[1:]
    n = np.linalg.norm(vec)
    if n < 1e-12:
        return np.zeros(3)
    angle = 2.0 * np.arctan2(n, w)
    return angle * vec / n


def quat_integrate(q, omega, dt):
    """Integrate body rate omega (world frame) over dt."""
    dq = quat_mul(np.concatenate([[0.0], omega]), q) * 0.5
    q = q + dq * dt
    return q / np.linalg.norm(q)


@dataclass
class EffectorState:
    pos: np.ndarray = field(default_factory=lambda: np.zeros(3))
    quat: np.ndarray = field(
        default_factory=lambda: np.array([1.0, 0.0, 0.0, 0.0]))
    vel: np.ndarray = field(default_factory=lambda: np.zeros(6))

    def pose(self):
        return np.concatenate([self.pos, self.quat])

    def copy(self):
        return EffectorState(self.pos.copy(), self.quat.copy(),
                             self.vel.copy())


@dataclass
class ImpedanceParams:
    K_f: np.ndarray = field(default_factory=lambda: np.full(3, 1000.0))
    K_t: np.ndarray = field(default_factory=lambda: np.full(3, 100.0))
    damping_ratio: float = 1.0

    def damping(self):
        d_f = 2.0 * self.damping_ratio * np.sqrt(self.K_f)
        d_t = 2.0 * self.damping_ratio * np.sqrt(self.K_t)
        return d_f, d_t


def step(state: EffectorState, target_pose, impedance: ImpedanceParams,
         external_wrench, dt: float, target_vel=None) -> EffectorState:
    """Advance the unit-mass spring-damper dynamics by one step.

    Translational: xdd = K_f*(x_d - x) + D*(xd_d - xd) + f_ext, with
    D = 2*sqrt(K_f) (critical damping); the rotational analogue acts on
    the axis-angle error of the target quaternion. Semi-implicit Euler;
    quaternion renormalized. target_vel (6,) enables reference velocity
    feedforward; without it damping acts on absolute velocity.
    """
    if not (0.0 < dt <= 0.01):
        raise ValueError("dt must be in (0, 0.01]")
    target_pose = np.asarray(target_pose, dtype=float)
    f_ext = np.asarray(external_wrench, dtype=float)
    v_ref = np.zeros(6) if target_vel is None else np.asarray(target_vel,
                                                              dtype=float)
    d_f, d_t = impedance.damping()

    acc_f = (impedance.K_f * (target_pose[POS] - state.pos)
             + d_f * (v_ref[:3] - state.vel[:3]) + f_ext[:3])
    e_rot = quat_error_vector(target_pose[QUAT], state.quat)
    acc_t = (impedance.K_t * e_rot
             + d_t * (v_ref[3:] - state.vel[3:]) + f_ext[3:])

    new = state.copy()
    new.vel[:3] = state.vel[:3] + acc_f * dt
    new.vel[3:] = state.vel[3:] + acc_t * dt
    new.pos = state.pos + new.vel[:3] * dt
    new.quat = quat_integrate(state.quat, new.vel[3:], dt)
    return new
