"""Energy-tank based detection of intentional physical corrections.

Each Cartesian DoF owns a scalar energy tank. Dead-zoned external wrench
power fills the tank, a variance-adapted dissipation drains it, and the
fill ratio against the energy trigger yields an intention index in [0, 1].
Crossing the intention threshold lowers impedance stiffness on that axis
and composes a corrective via-point from the measured pose.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NoTriggeredAxis, NonPositiveDt
from .kmp.types import POS, QUAT

DEAD_ZONE_FORCE = 7.0      # N
DEAD_ZONE_TORQUE = 7.0     # Nm
H_THRESHOLD = 0.9
RESET_STIFFNESS_F = 1000.0  # N/m
RESET_STIFFNESS_T = 100.0   # Nm/rad
VIA_POINT_GAMMA = 1e-8
REFRACTORY_S = 0.5          # seconds per axis between composed via-points

# translational / rotational tank parameters
TANK_SIZE = (0.4, 1.0)
ENERGY_TRIGGER = (0.38, 0.7)
DISSIPATION = (0.04, 0.2)


@dataclass
class EnergyTank:
    E_max: float
    E_star: float
    P_d: float
    E: float = 0.0

    def __post_init__(self):
        if not (0.0 < self.E_star <= self.E_max):
            raise ValueError("need 0 < E_star <= E_max")
        if self.P_d <= 0:
            raise ValueError("P_d must be positive")
        self.E = float(np.clip(self.E, 0.0, self.E_max))


@dataclass
class IntentionState:
    h: np.ndarray                       # (6,), each in [0, 1]
    triggered_axes: set


@dataclass
class StiffnessCommand:
    K_f: np.ndarray = field(
        default_factory=lambda: np.full(3, RESET_STIFFNESS_F))
    K_t: np.ndarray = field(
        default_factory=lambda: np.full(3, RESET_STIFFNESS_T))

    def as_vector(self):
        return np.concatenate([self.K_f, self.K_t])


def default_tanks():
    tanks = []
    for axis in range(6):
        g = 0 if axis < 3 else 1
        tanks.append(EnergyTank(TANK_SIZE[g], ENERGY_TRIGGER[g],
                                DISSIPATION[g]))
    return tanks


@dataclass
class EnergyTankBank:
    tanks: list = field(default_factory=default_tanks)
    dead_zone_force: float = DEAD_ZONE_FORCE
    dead_zone_torque: float = DEAD_ZONE_TORQUE
    h_th: float = H_THRESHOLD
    enabled: bool = False
    kappa: float = 2.0
    sigma_ref: np.ndarray = field(default_factory=lambda: np.ones(6))

    def __post_init__(self):
        if len(self.tanks) != 6:
            raise ValueError("need exactly 6 tanks")
        if not (0.0 < self.h_th <= 1.0):
            raise ValueError("h_th must be in (0, 1]")

    def energies(self):
        return np.array([t.E for t in self.tanks])

    def set_variance_reference(self, sigma_ref):
        """Per-axis reference variance, refreshed on model mutation."""
        ref = np.asarray(sigma_ref, dtype=float)
        self.sigma_ref = np.where(ref > 0, ref, 1.0)

    def intention(self):
        h = np.array([min(t.E / t.E_star, 1.0) for t in self.tanks])
        return IntentionState(h, {i for i in range(6) if h[i] >= self.h_th})


def apply_dead_zone(wrench, dz_force=DEAD_ZONE_FORCE,
                    dz_torque=DEAD_ZONE_TORQUE):
    """Continuous dead-zone shrinkage: magnitudes below the threshold map
    to zero, above it the threshold is subtracted."""
    w = np.asarray(wrench, dtype=float)
    dz = np.array([dz_force] * 3 + [dz_torque] * 3)
    return np.sign(w) * np.maximum(np.abs(w) - dz, 0.0)


def tank_step(bank: EnergyTankBank, wrench, velocity, kmp_variance,
              dt: float) -> IntentionState:
    """Advance all tanks by one step.

    Per DoF: E <- clamp(E + |w*v|*dt - P_d*(1 + kappa*var/var_ref)*dt,
    0, E_max). The wrench is expected dead-zoned already. Higher model
    variance drains faster, shortening the compliant window.
    """
    if dt <= 0:
        raise NonPositiveDt(f"dt = {dt}")
    w = np.asarray(wrench, dtype=float)
    v = np.asarray(velocity, dtype=float)
    var = np.maximum(np.asarray(kmp_variance, dtype=float), 0.0)
    inject = np.abs(w * v)
    drain = np.array([t.P_d for t in bank.tanks]) * (
        1.0 + bank.kappa * var / bank.sigma_ref)
    for i, t in enumerate(bank.tanks):
        t.E = float(np.clip(t.E + (inject[i] - drain[i]) * dt, 0.0, t.E_max))
    return bank.intention()


def stiffness_from_intention(state: IntentionState,
                             base: StiffnessCommand | None = None
                             ) -> StiffnessCommand:
    """Linear law K_i = (1 - h_i) * K_base_i per axis."""
    if base is None:
        base = StiffnessCommand()
    scale = 1.0 - np.clip(state.h, 0.0, 1.0)
    return StiffnessCommand(scale[:3] * base.K_f, scale[3:] * base.K_t)


def compose_via_point(state: IntentionState, measured_pose, kmp_prediction,
                      s_now: float):
    """Blend measured and predicted pose per the triggered axes.

    Triggered translational axes take the measured position; the rest keep
    the prediction. Any triggered rotational axis overrides the whole
    orientation with the measured quaternion. Returns (s_bar, mu_bar,
    gamma, source) ready for model insertion.
    """
    if not state.triggered_axes:
        raise NoTriggeredAxis("no axis crossed the intention threshold")
    measured = np.asarray(measured_pose, dtype=float)
    predicted = np.asarray(kmp_prediction, dtype=float)
    mu = predicted.copy()
    for axis in state.triggered_axes:
        if axis < 3:
            mu[axis] = measured[axis]
    if any(a >= 3 for a in state.triggered_axes):
        mu[QUAT] = measured[QUAT]
    return float(s_now), mu, VIA_POINT_GAMMA, "physical"


def reset_after_execution(bank: EnergyTankBank) -> StiffnessCommand:
    """Drain all tanks and return the reset stiffness command."""
    for t in bank.tanks:
        t.E = 0.0
    return StiffnessCommand()


def hid_status(bank: EnergyTankBank, stiffness: StiffnessCommand) -> dict:
    """JSON payload for the intention status topic."""
    state = bank.intention()
    return {
        "h": [float(x) for x in state.h],
        "stiffness_f": [float(x) for x in stiffness.K_f],
        "stiffness_t": [float(x) for x in stiffness.K_t],
        "enabled": bool(bank.enabled),
    }
