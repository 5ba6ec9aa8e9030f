"""Fixed-rate execution of model trajectories with live HID corrections.

The loop runs at CONTROL_RATE in simulated time (no wall-clock sleeps, so
tests are deterministic); status snapshots are decimated to STATUS_RATE.
When an energy-tank bank is attached, per-axis stiffness follows the
intention index each step and threshold crossings insert corrective
via-points into the live model, re-sampling the remaining trajectory.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

import numpy as np

from ..errors import Aborted, Busy
from ..intention import (REFRACTORY_S, EnergyTankBank, StiffnessCommand,
                         compose_via_point, reset_after_execution,
                         stiffness_from_intention, tank_step)
from ..kmp.model import KmpModel
from ..kmp.timing import TimeProfile
from ..kmp.types import POS, QUAT
from .impedance import EffectorState, ImpedanceParams, step

CONTROL_RATE = 400.0   # Hz
STATUS_RATE = 20.0     # Hz


@dataclass
class ExecutionStatus:
    state: str          # idle | executing | done | aborted
    index: int
    progress: float
    pose: np.ndarray

    def to_dict(self):
        return {
            "state": self.state,
            "index": self.index,
            "progress": self.progress,
            "pose": {
                "pos": [float(x) for x in self.pose[POS]],
                "quat": [float(x) for x in self.pose[QUAT]],
            },
        }


class WrenchInjector:
    """Test/demo hook: holds an external wrench for a simulated duration."""

    def __init__(self):
        self._wrench = np.zeros(6)
        self._start = 0.0
        self._until = 0.0

    def inject(self, wrench, duration_s, now=0.0):
        self._wrench = np.asarray(wrench, dtype=float)
        self._start = now
        self._until = now + duration_s

    def value(self, t):
        if self._start <= t < self._until:
            return self._wrench
        return np.zeros(6)


def pose_variance_profile(model: KmpModel, n: int = 50):
    """Per-axis (x, y, z, tx, ty, tz) predicted variance on a coarse s
    grid, for variance-adapted tank dissipation. Small-angle mapping
    var_theta ~= 4 * var_qvec for the rotational axes."""
    s = np.linspace(0.0, 1.0, n)
    var = np.zeros((n, 6))
    for i, si in enumerate(s):
        d = np.diag(model.predict_covariance(si))
        var[i, :3] = d[:3]
        var[i, 3:] = 4.0 * d[4:7]
    return s, np.maximum(var, 0.0)


@dataclass
class TrajectoryExecutor:
    model: KmpModel
    profile: TimeProfile = field(default_factory=TimeProfile)
    bank: EnergyTankBank | None = None
    injector: WrenchInjector = field(default_factory=WrenchInjector)
    stop_event: threading.Event = field(default_factory=threading.Event)
    _busy: bool = False

    def run(self, on_status=None):
        """Execute the model trajectory once; returns the list of emitted
        ExecutionStatus snapshots (also forwarded to on_status)."""
        if self._busy:
            raise Busy("execution already in progress")
        self._busy = True
        try:
            return self._run(on_status)
        finally:
            self._busy = False

    def _run(self, on_status):
        dt = 1.0 / CONTROL_RATE
        decim = int(CONTROL_RATE / STATUS_RATE)
        duration = self.profile.total_duration()
        n_steps = max(int(np.ceil(duration / dt)), 1)

        hid = self.bank is not None and self.bank.enabled
        if hid:
            var_s, var_grid = pose_variance_profile(self.model)
            self.bank.set_variance_reference(np.median(var_grid, axis=0))
            prev_h = np.zeros(6)
            last_via = np.full(6, -np.inf)

        start_pose = self.model.predict_mean(0.0)
        state = EffectorState(start_pose[POS].copy(), start_pose[QUAT].copy())
        imp = ImpedanceParams()
        base = StiffnessCommand()
        statuses = []

        def emit(st, idx, progress):
            status = ExecutionStatus(st, idx, progress, state.pose())
            statuses.append(status)
            if on_status is not None:
                on_status(status)

        prev_target = start_pose
        for k in range(n_steps + 1):
            if self.stop_event.is_set():
                reset_after_execution(self.bank or EnergyTankBank())
                emit("aborted", k, min(k / n_steps, 1.0))
                raise Aborted("stop requested")
            t = min(k * dt, duration)
            s = self.profile.s_of_t(t)
            target = self.model.predict_mean(s)
            target_vel = np.zeros(6)
            target_vel[:3] = (target[POS] - prev_target[POS]) / dt
            prev_target = target

            wrench = self.injector.value(t)
            if hid:
                from ..intention import apply_dead_zone
                w_dz = apply_dead_zone(wrench)
                var = np.array([np.interp(s, var_s, var_grid[:, a])
                                for a in range(6)])
                istate = tank_step(self.bank, w_dz, state.vel, var, dt)
                cmd = stiffness_from_intention(istate, base)
                imp = ImpedanceParams(cmd.K_f, cmd.K_t)
                rising = (istate.h >= self.bank.h_th) & (prev_h
                                                         < self.bank.h_th)
                ready = (t - last_via) >= REFRACTORY_S
                fire = np.flatnonzero(rising & ready)
                if len(fire):
                    s_bar, mu_bar, gamma, source = compose_via_point(
                        istate, state.pose(), target, s)
                    self.model.add_via_point(s_bar, mu_bar, gamma, source)
                    for a in istate.triggered_axes:
                        last_via[a] = t
                prev_h = istate.h

            state = step(state, target, imp, wrench, dt,
                         target_vel=target_vel)
            if k % decim == 0:
                emit("executing", k, t / duration)

        reset_after_execution(self.bank or EnergyTankBank())
        emit("done", n_steps, 1.0)
        return statuses
