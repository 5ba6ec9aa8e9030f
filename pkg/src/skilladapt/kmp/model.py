"""Kernel regression trajectory model with online via-point adaptation.

The model predicts a 7-D pose mean and covariance at any normalized time
s* from N reference points plus any registered via-points:

    mean(s*) = k* (K + lambda1 * Sigma)^-1 mu
    cov(s*)  = (M / lambda2) * (k(s*,s*) I - k* (K + lambda2 * Sigma)^-1 k*^T)

where K is the block kernel Gram over training times, Sigma the block
diagonal of training covariances and mu the stacked training means.

Via-points participate as extra training points with covariance gamma*I.
A via-point landing within half a grid step of a reference point shadows
(replaces) that reference point instead of being appended, which keeps the
Gram matrix well conditioned; deleting the via-point restores the
reference point.

For large models the base Gram factorization (references only) is cached
once and via-point mutations are applied through a low-rank correction
(rows/columns touched by shadowed points) plus a bordered Schur complement
(appended points). Small models just refactorize densely; both paths solve
the identical linear system.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from ..errors import InvalidTime, SolveFailure, UnknownId
from .kernel import kernel_matrix
from .types import (POSE_DIM, QUAT, KernelConfig, ReferencePoint, Trajectory,
                    TrajectoryPoint, ViaPoint, unit_quat)
from .timing import TimeProfile

# above this training-set size, mutations reuse the cached base factorization
_DENSE_LIMIT = 120


def _cho(a):
    try:
        return sla.cho_factor(a, lower=True, check_finite=False)
    except np.linalg.LinAlgError as e:
        raise SolveFailure(str(e)) from e


class _DenseSolver:
    """Factor the full regularized Gram of the current training set."""

    def __init__(self, s, sigmas, kernel, lam):
        m = len(s)
        d = POSE_DIM
        K = kernel_matrix(kernel, s, s)
        A = np.kron(K, np.eye(d))
        for i, sig in enumerate(sigmas):
            A[i * d:(i + 1) * d, i * d:(i + 1) * d] += lam * sig
        self._f = _cho(A)

    def solve(self, rhs):
        return sla.cho_solve(self._f, rhs, check_finite=False)


class _IncrementalSolver:
    """Solve (K + lam*Sigma) x = r for a mutated training set while reusing
    the cached factorization of the unmodified reference Gram.

    Shadowed reference points change rows/columns J of the scalar kernel
    matrix plus their diagonal covariance blocks; that difference is the
    symmetric low-rank term U W U^T with

        U = [E_J (x) I, R (x) I],   W = [[-S (x) I + G, I], [I, 0]]

    (R, S the touched kernel columns/corner, G the covariance block delta),
    and W has the closed-form inverse [[0, I], [I, S (x) I - G]].  Appended
    via-points are handled by a bordered block solve with Schur complement
    factored at build time.
    """

    def __init__(self, base_f, base_s, kernel, lam,
                 shadow_idx, shadow_s, shadow_sigma_old, shadow_sigma_new,
                 app_s, app_gamma):
        self.base_f = base_f
        self.n = len(base_s)
        self.d = POSE_DIM
        d = self.d

        self.shadow_idx = np.asarray(shadow_idx, dtype=int)
        self.app = len(app_s)
        mod_s = np.array(base_s, dtype=float)
        if len(shadow_idx):
            mod_s[self.shadow_idx] = shadow_s
        self.mod_s = mod_s

        self._lowrank = None
        if len(shadow_idx):
            J = self.shadow_idx
            m = len(J)
            K0 = kernel_matrix(kernel, base_s, base_s[J])
            K1 = kernel_matrix(kernel, mod_s, mod_s[J])
            dK = K1 - K0                      # (n, m) touched columns
            S = dK[J, :]                      # (m, m) corner, counted twice
            G = np.zeros((m * d, m * d))
            for a, j in enumerate(J):
                G[a * d:(a + 1) * d, a * d:(a + 1) * d] = lam * (
                    shadow_sigma_new[a] - shadow_sigma_old[a])
            U = np.zeros((self.n * d, 2 * m * d))
            for a, j in enumerate(J):
                U[j * d:(j + 1) * d, a * d:(a + 1) * d] = np.eye(d)
            U[:, m * d:] = np.kron(dK, np.eye(d))
            Winv = np.zeros((2 * m * d, 2 * m * d))
            Winv[:m * d, m * d:] = np.eye(m * d)
            Winv[m * d:, :m * d] = np.eye(m * d)
            Winv[m * d:, m * d:] = np.kron(S, np.eye(d)) - G
            Z = sla.cho_solve(base_f, U, check_finite=False)
            M = Winv + U.T @ Z
            self._lowrank = (U, Z, sla.lu_factor(M, check_finite=False))

        if self.app:
            app_s = np.asarray(app_s, dtype=float)
            Kb = kernel_matrix(kernel, mod_s, app_s)
            self.B = np.kron(Kb, np.eye(d))
            Ka = kernel_matrix(kernel, app_s, app_s)
            E = np.kron(Ka, np.eye(d))
            for a, g in enumerate(app_gamma):
                E[a * d:(a + 1) * d, a * d:(a + 1) * d] += lam * g * np.eye(d)
            Y = self._solve_core(self.B)
            S_app = E - self.B.T @ Y
            S_app = 0.5 * (S_app + S_app.T)
            self._schur = sla.lu_factor(S_app, check_finite=False)

    def _solve_core(self, rhs):
        """(A0 + U W U^T)^-1 rhs via the cached base factorization."""
        x = sla.cho_solve(self.base_f, rhs, check_finite=False)
        if self._lowrank is not None:
            U, Z, Mf = self._lowrank
            x = x - Z @ sla.lu_solve(Mf, U.T @ x, check_finite=False)
        return x

    def solve(self, rhs):
        rhs = np.asarray(rhs, dtype=float)
        squeeze = rhs.ndim == 1
        if squeeze:
            rhs = rhs[:, None]
        nb = self.n * self.d
        r0, r1 = rhs[:nb], rhs[nb:]
        y0 = self._solve_core(r0)
        if not self.app:
            return y0[:, 0] if squeeze else y0
        x1 = sla.lu_solve(self._schur, r1 - self.B.T @ y0, check_finite=False)
        x0 = y0 - self._solve_core(self.B @ x1)
        out = np.vstack([x0, x1])
        return out[:, 0] if squeeze else out


@dataclass
class KmpModel:
    refs: list[ReferencePoint]
    kernel: KernelConfig = field(default_factory=KernelConfig)
    lambda1: float = 0.1
    lambda2: float = 1.0
    via_points: dict = field(default_factory=dict)   # id -> ViaPoint
    _shadowed: dict = field(default_factory=dict)    # via id -> ref index
    _next_id: int = 1
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self.refs:
            raise ValueError("model needs at least one reference point")
        s = [r.s for r in self.refs]
        if not np.all(np.diff(s) > 0) and len(s) > 1:
            raise ValueError("reference s values must be strictly increasing")

    # ------------------------------------------------------------------
    # training-set assembly

    @property
    def n_refs(self):
        return len(self.refs)

    def _grid_halfstep(self):
        return 1.0 / (2.0 * self.n_refs)

    def _training_set(self):
        """Current (s, mu, sigma) lists: refs with shadows applied, then
        appended via-points in insertion order."""
        s, mu, sig = [], [], []
        shadow_by_ref = {idx: vid for vid, idx in self._shadowed.items()}
        for i, r in enumerate(self.refs):
            if i in shadow_by_ref:
                vp = self.via_points[shadow_by_ref[i]]
                s.append(vp.s_bar)
                mu.append(vp.mu_bar)
                sig.append(vp.gamma * np.eye(POSE_DIM))
            else:
                s.append(r.s)
                mu.append(r.mu)
                sig.append(r.sigma)
        for vp in self.via_points.values():
            if vp.id not in self._shadowed:
                s.append(vp.s_bar)
                mu.append(vp.mu_bar)
                sig.append(vp.gamma * np.eye(POSE_DIM))
        return np.array(s), np.stack(mu), sig

    def _invalidate(self):
        for key in ("solver1", "solver2", "weights", "train"):
            self._cache.pop(key, None)

    def _base_factor(self, lam):
        key = ("base", lam)
        if key not in self._cache:
            s = np.array([r.s for r in self.refs])
            K = kernel_matrix(self.kernel, s, s)
            A = np.kron(K, np.eye(POSE_DIM))
            d = POSE_DIM
            for i, r in enumerate(self.refs):
                A[i * d:(i + 1) * d, i * d:(i + 1) * d] += lam * r.sigma
            self._cache[key] = _cho(A)
        return self._cache[key]

    def _solver(self, lam, slot):
        if slot in self._cache:
            return self._cache[slot]
        s, mu, sig = self._train()
        if len(self.refs) <= _DENSE_LIMIT:
            solver = _DenseSolver(s, sig, self.kernel, lam)
        else:
            base_s = np.array([r.s for r in self.refs])
            sh_items = sorted(self._shadowed.items(), key=lambda kv: kv[1])
            shadow_idx = [idx for _, idx in sh_items]
            shadow_s = [self.via_points[vid].s_bar for vid, _ in sh_items]
            shadow_old = [self.refs[idx].sigma for _, idx in sh_items]
            shadow_new = [self.via_points[vid].gamma * np.eye(POSE_DIM)
                          for vid, _ in sh_items]
            appended = [vp for vp in self.via_points.values()
                        if vp.id not in self._shadowed]
            solver = _IncrementalSolver(
                self._base_factor(lam), base_s, self.kernel, lam,
                shadow_idx, shadow_s, shadow_old, shadow_new,
                [vp.s_bar for vp in appended],
                [vp.gamma for vp in appended])
        self._cache[slot] = solver
        return solver

    def _train(self):
        if "train" not in self._cache:
            self._cache["train"] = self._training_set()
        return self._cache["train"]

    def _mean_weights(self):
        if "weights" not in self._cache:
            s, mu, _ = self._train()
            solver = self._solver(self.lambda1, "solver1")
            w = solver.solve(mu.reshape(-1))
            self._cache["weights"] = w.reshape(len(s), POSE_DIM)
        return self._cache["weights"]

    # ------------------------------------------------------------------
    # prediction

    def predict_mean(self, s_star: float) -> np.ndarray:
        if not (0.0 <= s_star <= 1.0):
            raise InvalidTime(f"s_star = {s_star} outside [0, 1]")
        s, _, _ = self._train()
        k = kernel_matrix(self.kernel, [s_star], s)[0]
        out = k @ self._mean_weights()
        q = out[QUAT]
        nq = np.linalg.norm(q)
        if nq > 0:
            out = out.copy()
            out[QUAT] = q / nq
        return out

    def predict_mean_many(self, s_stars) -> np.ndarray:
        s, _, _ = self._train()
        K = kernel_matrix(self.kernel, s_stars, s)
        out = K @ self._mean_weights()
        nq = np.linalg.norm(out[:, QUAT], axis=1, keepdims=True)
        nz = nq[:, 0] > 0
        out[nz, QUAT] = out[nz, QUAT] / nq[nz]
        return out

    def predict_covariance(self, s_star: float) -> np.ndarray:
        if not (0.0 <= s_star <= 1.0):
            raise InvalidTime(f"s_star = {s_star} outside [0, 1]")
        s, _, _ = self._train()
        m = len(s)
        solver = self._solver(self.lambda2, "solver2")
        k = kernel_matrix(self.kernel, [s_star], s)[0]
        kself = kernel_matrix(self.kernel, [s_star], [s_star])[0, 0]
        rhs = np.kron(k[:, None], np.eye(POSE_DIM))      # (m*D, D)
        V = solver.solve(rhs)
        quad = np.kron(k[None, :], np.eye(POSE_DIM)) @ V  # (D, D)
        cov = (m / self.lambda2) * (kself * np.eye(POSE_DIM) - quad)
        return 0.5 * (cov + cov.T)

    # ------------------------------------------------------------------
    # via-point management

    def add_via_point(self, s_bar, mu_bar, gamma=1e-8,
                      source="graphical") -> int:
        if not (0.0 <= s_bar <= 1.0):
            raise InvalidTime(f"s_bar = {s_bar} outside [0, 1]")
        if gamma <= 0:
            raise ValueError("gamma must be positive")
        mu_bar = np.asarray(mu_bar, dtype=float).copy()
        mu_bar[QUAT] = unit_quat(mu_bar[QUAT])
        vid = self._next_id
        self._next_id += 1
        vp = ViaPoint(vid, float(s_bar), mu_bar, float(gamma), source)
        self.via_points[vid] = vp
        idx = self._nearest_free_ref(s_bar)
        if idx is not None:
            self._shadowed[vid] = idx
        self._invalidate()
        return vid

    def _nearest_free_ref(self, s_bar):
        taken = set(self._shadowed.values())
        s = np.array([r.s for r in self.refs])
        order = np.argsort(np.abs(s - s_bar))
        half = self._grid_halfstep()
        for idx in order[:4]:
            if abs(s[idx] - s_bar) >= half:
                break
            if idx not in taken:
                return int(idx)
        return None

    def remove_via_point(self, vid: int):
        if vid not in self.via_points:
            raise UnknownId(f"via-point {vid}")
        del self.via_points[vid]
        self._shadowed.pop(vid, None)
        self._invalidate()

    def adapt_via_point(self, vid: int, mu_new):
        if vid not in self.via_points:
            raise UnknownId(f"via-point {vid}")
        mu_new = np.asarray(mu_new, dtype=float).copy()
        mu_new[QUAT] = unit_quat(mu_new[QUAT])
        self.via_points[vid].mu_bar = mu_new
        self._invalidate()

    # ------------------------------------------------------------------
    # sampling

    def sample_trajectory(self, n: int, profile: TimeProfile | None = None,
                          with_covariance: bool = False) -> Trajectory:
        if n < 2:
            raise ValueError("n must be >= 2")
        if profile is None:
            profile = TimeProfile()
        t = np.linspace(0.0, profile.total_duration(), n)
        s = np.array([profile.s_of_t(ti) for ti in t])
        poses = self.predict_mean_many(s)
        pts = []
        for i in range(n):
            cov = self.predict_covariance(s[i]) if with_covariance else None
            pts.append(TrajectoryPoint(float(t[i]), float(s[i]),
                                       poses[i], cov))
        return Trajectory(pts)

    # ------------------------------------------------------------------
    # serialization (schema_version 1)

    def to_dict(self):
        return {
            "schema_version": 1,
            "refs": [{"s": r.s, "mu": list(r.mu),
                      "sigma": [list(row) for row in r.sigma]}
                     for r in self.refs],
            "kernel": {"family": self.kernel.family,
                       "length_scale": self.kernel.length_scale},
            "lambda1": self.lambda1,
            "lambda2": self.lambda2,
            "via_points": [vp.to_dict() for vp in self.via_points.values()],
        }

    @classmethod
    def from_dict(cls, d):
        if d.get("schema_version") != 1:
            raise ValueError("unsupported model schema version")
        refs = [ReferencePoint(r["s"], np.asarray(r["mu"], float),
                               np.asarray(r["sigma"], float))
                for r in d["refs"]]
        model = cls(refs,
                    KernelConfig(d["kernel"]["family"],
                                 d["kernel"]["length_scale"]),
                    d["lambda1"], d["lambda2"])
        for v in d.get("via_points", []):
            vp = ViaPoint.from_dict(v)
            model.add_via_point(vp.s_bar, vp.mu_bar, vp.gamma, vp.source)
        return model
