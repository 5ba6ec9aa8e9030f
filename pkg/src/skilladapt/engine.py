"""Central orchestrator: owns the skill models, intention detection,
coverage controller, chat session and execution loop, and serializes all
mutations behind one lock so bridge clients, the CLI and the simulator
never race."""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

import numpy as np

from . import ergodic
from .errors import Busy, NotSupported, SkillError, UnknownId
from .gateway import ChatSession, mock_backend, register_builtin_tools
from .intention import EnergyTankBank, StiffnessCommand, hid_status
from .kmp import (Demonstration, KmpModel, TimeProfile, fit_gmm,
                  gmr_reference, repulsion_via_points, time_scale)
from .kmp.types import POS, QUAT
from .sim import TrajectoryExecutor, WrenchInjector

N_REFERENCE_POINTS = 500
GMM_COMPONENTS = 12
DEFAULT_EXECUTION_SECONDS = 5.0


@dataclass
class EngineConfig:
    n_reference_points: int = N_REFERENCE_POINTS
    gmm_components: int = GMM_COMPONENTS
    execution_seconds: float = DEFAULT_EXECUTION_SECONDS
    coverage_grid: int = 64
    seed: int = 0


class Engine:
    def __init__(self, config: EngineConfig | None = None, backend=None):
        self.config = config or EngineConfig()
        self._lock = threading.RLock()
        self.demonstrations: dict[str, Demonstration] = {}
        self.model: KmpModel | None = None
        self.base_model: KmpModel | None = None
        self.profile = TimeProfile(
            base_duration=self.config.execution_seconds)
        self.bank = EnergyTankBank()
        self.injector = WrenchInjector()
        self.registry = register_builtin_tools()
        self.session = ChatSession(self.registry, self,
                                   backend or mock_backend,
                                   on_notification=self._chat_notification)
        self.ergodic_setpoints = ergodic.ErgodicSetpoints()
        self.ergodic_state = ergodic.make_state(
            ergodic.TargetDistribution.uniform(self.config.coverage_grid))
        self._exec_thread: threading.Thread | None = None
        self._stop_event = threading.Event()
        self._subscribers = []          # callables (topic, payload)
        self.last_statuses = []

    # ------------------------------------------------------------------
    # pub/sub hook (the bridge attaches here)

    def subscribe(self, callback):
        self._subscribers.append(callback)

    def publish(self, topic, payload):
        for cb in list(self._subscribers):
            cb(topic, payload)

    def _chat_notification(self, turn):
        self.publish("llm_notification", {"event": "answer_ready",
                                          "role": turn.role})

    # ------------------------------------------------------------------
    # demonstrations and fitting

    def add_demonstration(self, name: str, demo: Demonstration):
        with self._lock:
            self.demonstrations[name] = demo

    def list_demonstrations(self):
        with self._lock:
            return sorted(self.demonstrations)

    def get_demonstration(self, name: str) -> Demonstration:
        with self._lock:
            if name not in self.demonstrations:
                raise UnknownId(f"demonstration {name!r}")
            return self.demonstrations[name]

    def fit(self, names=None):
        """Fit GMM + GMR references from the named demonstrations and
        build a fresh model with the default kernel and regularizers."""
        with self._lock:
            names = names or self.list_demonstrations()
            demos = [self.get_demonstration(n) for n in names]
            gmm = fit_gmm(demos, self.config.gmm_components,
                          seed=self.config.seed)
            refs = gmr_reference(gmm, self.config.n_reference_points)
            self.model = KmpModel(refs)
            self.base_model = KmpModel([r for r in refs])
            self.profile = TimeProfile(
                base_duration=self.config.execution_seconds)
            return self.model

    def set_model(self, model: KmpModel):
        with self._lock:
            self.model = model
            self.base_model = KmpModel(list(model.refs), model.kernel,
                                       model.lambda1, model.lambda2)

    def _require_model(self) -> KmpModel:
        if self.model is None:
            raise SkillError("no model fitted")
        return self.model

    # ------------------------------------------------------------------
    # via-point services (all three modalities funnel through these)

    def add_via_point_at(self, s_bar, pos, source="language",
                         gamma=1e-8):
        """Via-point at normalized time with given position; orientation
        kept from the current prediction."""
        with self._lock:
            model = self._require_model()
            mu = model.predict_mean(float(s_bar)).copy()
            mu[POS] = np.asarray(pos, dtype=float)
            return model.add_via_point(float(s_bar), mu, gamma, source)

    def add_via_point_by_index(self, index: int, pos, source="graphical"):
        """GUI drag-and-drop entry: trajectory sample index + new (x,y,z)."""
        with self._lock:
            model = self._require_model()
            n = self.config.n_reference_points
            if not (0 <= index < n):
                raise UnknownId(f"trajectory index {index}")
            s_bar = index / (n - 1)
            return self.add_via_point_at(s_bar, pos, source=source)

    def adapt_via_point(self, via_id: int, pos):
        with self._lock:
            model = self._require_model()
            if via_id not in model.via_points:
                raise UnknownId(f"via-point {via_id}")
            mu = model.via_points[via_id].mu_bar.copy()
            mu[POS] = np.asarray(pos, dtype=float)
            model.adapt_via_point(via_id, mu)

    def delete_via_point(self, via_id: int):
        with self._lock:
            self._require_model().remove_via_point(via_id)

    def add_repulsion(self, pos, radius):
        with self._lock:
            return repulsion_via_points(self._require_model(), pos, radius)

    def apply_time_scale(self, percentage, t_start, t_end, mode):
        with self._lock:
            self.profile = time_scale(self.profile, percentage, t_start,
                                      t_end, mode)
            return self.profile

    # ------------------------------------------------------------------
    # model snapshots for clients

    def _model_payload(self, model: KmpModel):
        traj = model.sample_trajectory(self.config.n_reference_points,
                                       self.profile)
        return {
            "trajectory": {
                "t": [p.t for p in traj.points],
                "s": [p.s for p in traj.points],
                "pose": [[float(x) for x in p.pose] for p in traj.points],
            },
            "via_points": [vp.to_dict() for vp in
                           model.via_points.values()],
        }

    def get_model(self):
        with self._lock:
            if self.base_model is None:
                raise SkillError("no model fitted")
            return self._model_payload(self.base_model)

    def get_updated_model(self):
        with self._lock:
            return self._model_payload(self._require_model())

    # ------------------------------------------------------------------
    # execution

    def execute_blocking(self):
        """Run one execution synchronously (tests, scenarios)."""
        with self._lock:
            model = self._require_model()
            self._stop_event = threading.Event()
            executor = TrajectoryExecutor(
                model, self.profile, bank=self.bank, injector=self.injector,
                stop_event=self._stop_event)
        statuses = executor.run(
            on_status=lambda st: self.publish("execution_status",
                                              st.to_dict()))
        self.last_statuses = statuses
        return statuses

    def start_execution(self):
        with self._lock:
            if self._exec_thread is not None and self._exec_thread.is_alive():
                raise Busy("execution already running")
            self._require_model()
            thread = threading.Thread(target=self._exec_guarded,
                                      daemon=True)
            self._exec_thread = thread
            thread.start()

    def _exec_guarded(self):
        try:
            self.execute_blocking()
        except SkillError:
            pass  # aborted runs already emitted their terminal status

    def stop_execution(self):
        self._stop_event.set()
        thread = self._exec_thread
        if thread is not None:
            thread.join(timeout=10.0)

    def inject_wrench(self, wrench, duration_s, now=0.0):
        self.injector.inject(wrench, duration_s, now=now)

    # ------------------------------------------------------------------
    # intention detection

    def set_hid_enabled(self, enabled: bool):
        with self._lock:
            self.bank.enabled = bool(enabled)

    def get_hid_state(self):
        with self._lock:
            from .intention import stiffness_from_intention
            cmd = stiffness_from_intention(self.bank.intention())
            return hid_status(self.bank, cmd)

    # ------------------------------------------------------------------
    # ergodic coverage

    def set_coverage_target(self, dist: ergodic.TargetDistribution):
        with self._lock:
            self.ergodic_state = ergodic.make_state(dist)

    def start_coverage(self):
        with self._lock:
            self.ergodic_state.start()

    def run_coverage(self, steps: int, dt: float = 0.1):
        with self._lock:
            for _ in range(steps):
                ergodic.advance(self.ergodic_state, self.ergodic_setpoints,
                                dt)
            return self.ergodic_state.metric()

    def set_velocity(self, value):
        with self._lock:
            ergodic.set_velocity(self.ergodic_setpoints, value)

    def set_force(self, value):
        with self._lock:
            ergodic.set_force(self.ergodic_setpoints, value)

    def set_stiffness(self, value):
        with self._lock:
            ergodic.set_stiffness(self.ergodic_setpoints, value)

    def set_exec_state(self, cmd):
        with self._lock:
            ergodic.set_exec_state(self.ergodic_state, cmd)

    def coverage_status(self):
        with self._lock:
            status = self.ergodic_state.status()
            status["setpoints"] = self.ergodic_setpoints.to_dict()
            return status

    def coverage_heatmap(self):
        with self._lock:
            return [[float(v) for v in row]
                    for row in self.ergodic_state.visit_counts]

    # ------------------------------------------------------------------
    # language services

    def set_llm_input_query(self, text: str):
        turn = self.session.handle_query(text)
        return {"accepted": True, "tool_calls": len(turn.tool_calls)}

    def get_llm_answer(self):
        return {"answer": self.session.last_answer()}

    def transcribe_speech(self, *_args, **_kwargs):
        raise NotSupported("speech-to-text is not available in this build")
