from .types import (Demonstration, DemoSample, KernelConfig, ReferencePoint,
                    Trajectory, TrajectoryPoint, ViaPoint, POSE_DIM, POS, QUAT,
                    hemisphere_align, unit_quat)
from .gmm import GmmModel, fit_gmm, gmr_reference
from .model import KmpModel
from .timing import TimeProfile, time_scale
from .repulsion import repulsion_via_points, MARGIN

__all__ = [
    "Demonstration", "DemoSample", "KernelConfig", "ReferencePoint",
    "Trajectory", "TrajectoryPoint", "ViaPoint", "POSE_DIM", "POS", "QUAT",
    "hemisphere_align", "unit_quat", "GmmModel", "fit_gmm", "gmr_reference",
    "KmpModel", "TimeProfile", "time_scale", "repulsion_via_points", "MARGIN",
]
