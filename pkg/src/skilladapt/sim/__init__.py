from .impedance import (EffectorState, ImpedanceParams, step, quat_mul,
                        quat_conj, quat_error_vector, quat_integrate)
from .demos import record_demonstration, dtw_align, RESAMPLE_THRESHOLD
from .fixtures import (FixtureSet, TrajectoryFixture, VelocityFixture,
                       fixture_wrench, MAX_ACTIVE_FIXTURES)
from .executor import (ExecutionStatus, TrajectoryExecutor, WrenchInjector,
                       pose_variance_profile, CONTROL_RATE, STATUS_RATE)

__all__ = [
    "EffectorState", "ImpedanceParams", "step", "quat_mul", "quat_conj",
    "quat_error_vector", "quat_integrate", "record_demonstration",
    "dtw_align", "RESAMPLE_THRESHOLD", "FixtureSet", "TrajectoryFixture",
    "VelocityFixture", "fixture_wrench", "MAX_ACTIVE_FIXTURES",
    "ExecutionStatus", "TrajectoryExecutor", "WrenchInjector",
    "pose_variance_profile", "CONTROL_RATE", "STATUS_RATE",
]
