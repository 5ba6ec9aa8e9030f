"""Gaussian mixture fitting on time-augmented pose data and the regression
step that turns a fitted mixture into reference points.

Data layout: rows are (t, x, y, z, qw, qx, qy, qz) -- 8-D, time first.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.cluster.vq import kmeans2

from ..errors import DegenerateTimeMarginal, EmptyData, SingularComponent
from .types import POSE_DIM, Demonstration, ReferencePoint, hemisphere_align

COV_FLOOR = 1e-6
EM_TOL = 1e-6
EM_MAX_ITER = 200
_LOG2PI = np.log(2.0 * np.pi)


@dataclass
class GmmModel:
    priors: np.ndarray                 # (C,)
    means: np.ndarray                  # (C, 8)
    covariances: np.ndarray            # (C, 8, 8)
    log_likelihoods: list[float] = field(default_factory=list)

    @property
    def n_components(self):
        return len(self.priors)


def _stack_demos(demos):
    rows = []
    for d in demos:
        q = hemisphere_align(d.poses()[:, 3:7])
        poses = d.poses().copy()
        poses[:, 3:7] = q
        rows.append(np.column_stack([d.times(), poses]))
    return np.vstack(rows)


def _log_gauss(data, mean, cov):
    """Log N(data; mean, cov) for (M, D) data via Cholesky."""
    try:
        L = np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        raise SingularComponent("component covariance not positive definite")
    dev = data - mean
    sol = np.linalg.solve(L, dev.T)
    maha = np.sum(sol**2, axis=0)
    logdet = 2.0 * np.sum(np.log(np.diag(L)))
    return -0.5 * (maha + logdet + data.shape[1] * _LOG2PI)


def fit_gmm(demos: list[Demonstration], n_components: int = 12,
            seed: int = 0) -> GmmModel:
    """EM fit of a GMM over time-augmented demonstration data.

    k-means initialization with a fixed seed keeps the fit deterministic;
    covariances are floored at COV_FLOOR * I each M-step.
    """
    if not demos:
        raise EmptyData("no demonstrations")
    data = _stack_demos(demos)
    m, dim = data.shape
    if not (1 <= n_components <= m):
        raise ValueError("n_components must be in [1, total sample count]")

    rng = np.random.default_rng(seed)
    if n_components == 1:
        resp = np.ones((m, 1))
    else:
        _, labels = kmeans2(data, n_components, minit="++", seed=rng)
        resp = np.zeros((m, n_components))
        resp[np.arange(m), labels] = 1.0
        # guard against empty clusters from kmeans
        empty = resp.sum(axis=0) == 0
        for c in np.flatnonzero(empty):
            resp[rng.integers(0, m), :] = 0.0
            resp[rng.integers(0, m), c] = 1.0

    priors = np.full(n_components, 1.0 / n_components)
    means = np.zeros((n_components, dim))
    covs = np.tile(np.eye(dim), (n_components, 1, 1))
    lls = []

    for it in range(EM_MAX_ITER):
        # M-step from current responsibilities
        nk = resp.sum(axis=0) + 1e-300
        priors = nk / m
        means = (resp.T @ data) / nk[:, None]
        for c in range(n_components):
            dev = data - means[c]
            covs[c] = (resp[:, c][:, None] * dev).T @ dev / nk[c]
            covs[c] += COV_FLOOR * np.eye(dim)

        # E-step
        log_p = np.empty((m, n_components))
        for c in range(n_components):
            log_p[:, c] = np.log(priors[c] + 1e-300) + _log_gauss(
                data, means[c], covs[c])
        lmax = log_p.max(axis=1, keepdims=True)
        lse = lmax[:, 0] + np.log(np.exp(log_p - lmax).sum(axis=1))
        resp = np.exp(log_p - lse[:, None])
        ll = float(lse.mean())
        lls.append(ll)
        if it > 0 and abs(lls[-1] - lls[-2]) < EM_TOL:
            break

    return GmmModel(priors, means, covs, lls)


def gmr_reference(gmm: GmmModel, n_points: int = 500) -> list[ReferencePoint]:
    """Condition the mixture on time at n_points equispaced s in [0, 1].

    Returns moment-matched conditional mean and covariance of the 7-D pose
    per point.
    """
    if n_points < 2:
        raise ValueError("n_points must be >= 2")
    C = gmm.n_components
    mu_t = gmm.means[:, 0]
    mu_x = gmm.means[:, 1:]
    s_tt = gmm.covariances[:, 0, 0]
    s_xt = gmm.covariances[:, 1:, 0]
    s_xx = gmm.covariances[:, 1:, 1:]

    # precompute conditional covariance per component (independent of s)
    cond_cov = np.empty((C, POSE_DIM, POSE_DIM))
    for c in range(C):
        cond_cov[c] = s_xx[c] - np.outer(s_xt[c], s_xt[c]) / s_tt[c]

    refs = []
    grid = np.linspace(0.0, 1.0, n_points)
    for s in grid:
        logw = (np.log(gmm.priors + 1e-300)
                - 0.5 * ((s - mu_t) ** 2 / s_tt + np.log(2 * np.pi * s_tt)))
        w = np.exp(logw - logw.max())
        w /= w.sum()
        for c in range(C):
            if w[c] > 1e-12 and s_tt[c] < 1e-12:
                raise DegenerateTimeMarginal(
                    f"component {c} has zero time variance")
        cond_mu = mu_x + s_xt * ((s - mu_t) / s_tt)[:, None]
        mean = w @ cond_mu
        cov = np.zeros((POSE_DIM, POSE_DIM))
        for c in range(C):
            dm = cond_mu[c] - mean
            cov += w[c] * (cond_cov[c] + np.outer(dm, dm))
        cov = 0.5 * (cov + cov.T)
        refs.append(ReferencePoint(float(s), mean, cov))
    return refs
