"""Core predictor tests, checked against an independent dense solve."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from skilladapt.errors import UnknownId
from skilladapt.kmp import KmpModel, POSE_DIM
from skilladapt.kmp.kernel import matern52

from conftest import smooth_refs, toy_model


def oracle_mean_cov(refs, via_points, s_star, l=0.1, lam1=0.1, lam2=1.0):
    """Textbook block-matrix prediction, built from scratch each call.

    Training set: references not shadowed by a via-point, plus all
    via-points (mu, gamma*I).
    """
    shadowed = {vp._shadow for vp in via_points if vp._shadow is not None}
    items = [(r.s, r.mu, r.sigma) for i, r in enumerate(refs)
             if i not in shadowed]
    items += [(vp.s_bar, vp.mu_bar, vp.gamma * np.eye(POSE_DIM))
              for vp in via_points]
    s = np.array([it[0] for it in items])
    n = len(items)
    d = POSE_DIM
    K = np.kron(matern52(s, s, l), np.eye(d))
    Sigma = np.zeros((n * d, n * d))
    mu = np.zeros(n * d)
    for i, (_, m, sig) in enumerate(items):
        Sigma[i * d:(i + 1) * d, i * d:(i + 1) * d] = sig
        mu[i * d:(i + 1) * d] = m
    k_star = np.kron(matern52(np.array([s_star]), s, l), np.eye(d))
    mean = k_star @ np.linalg.solve(K + lam1 * Sigma, mu)
    quad = k_star @ np.linalg.solve(K + lam2 * Sigma, k_star.T)
    cov = (n / lam2) * (matern52(np.array([s_star]), np.array([s_star]),
                                 l)[0, 0] * np.eye(d) - quad)
    return mean, cov


class _Via:
    def __init__(self, s_bar, mu_bar, gamma, shadow):
        self.s_bar = s_bar
        self.mu_bar = mu_bar
        self.gamma = gamma
        self._shadow = shadow


def _oracle_for(model, s_star):
    vias = [_Via(vp.s_bar, vp.mu_bar, vp.gamma,
                 model._shadowed.get(vid))
            for vid, vp in model.via_points.items()]
    return oracle_mean_cov(model.refs, vias, s_star,
                           model.kernel.length_scale, model.lambda1,
                           model.lambda2)


def test_oracle_equivalence_randomized():
    rng = np.random.default_rng(7)
    for trial in range(20):
        n = int(rng.integers(5, 51))
        model = toy_model(n, seed=trial)
        for _ in range(int(rng.integers(0, 3))):
            s_bar = float(rng.uniform(0, 1))
            mu = model.predict_mean(s_bar).copy()
            mu[:3] += rng.uniform(-0.05, 0.05, 3)
            model.add_via_point(s_bar, mu)
        for s_star in rng.uniform(0, 1, 3):
            mean_o, cov_o = _oracle_for(model, float(s_star))
            mean = model.predict_mean(float(s_star))
            cov = model.predict_covariance(float(s_star))
            assert np.max(np.abs(cov - cov_o)) < 1e-10
            assert np.max(np.abs(mean[:3] - mean_o[:3])) < 1e-10
            q = mean_o[3:] / np.linalg.norm(mean_o[3:])
            assert np.max(np.abs(mean[3:] - q)) < 1e-10


def test_via_point_passage(small_model):
    mu = small_model.predict_mean(0.5).copy()
    mu[:3] += np.array([0.05, -0.03, 0.02])
    small_model.add_via_point(0.5, mu)
    pred = small_model.predict_mean(0.5)
    assert np.linalg.norm(pred[:3] - mu[:3]) < 1e-3


def test_via_point_locality(small_model):
    before = small_model.predict_mean(0.05).copy()
    mu = small_model.predict_mean(0.9).copy()
    mu[:3] += 0.05
    small_model.add_via_point(0.9, mu)
    after = small_model.predict_mean(0.05)
    assert np.linalg.norm(after - before) < 1e-4


def test_fixed_point_insertion(small_model):
    """Inserting the current prediction as a via-point keeps the mean
    there and barely perturbs the rest of the trajectory."""
    s_bar = 0.42
    mu = small_model.predict_mean(s_bar).copy()
    grid = np.linspace(0, 1, 101)
    before = small_model.predict_mean_many(grid).copy()
    small_model.add_via_point(s_bar, mu)
    assert np.linalg.norm(small_model.predict_mean(s_bar) - mu) < 1e-6
    after = small_model.predict_mean_many(grid)
    assert np.max(np.abs(after - before)) < 1e-3


def test_add_remove_round_trip(small_model):
    grid = np.linspace(0, 1, 500)
    before = small_model.predict_mean_many(grid).copy()
    mu = small_model.predict_mean(0.3).copy()
    mu[:3] += 0.04
    vid = small_model.add_via_point(0.3, mu)
    small_model.remove_via_point(vid)
    after = small_model.predict_mean_many(grid)
    assert np.max(np.abs(after - before)) < 1e-10


def test_remove_unknown_id(small_model):
    with pytest.raises(UnknownId):
        small_model.remove_via_point(99)


def test_adapt_via_point_moves_prediction(small_model):
    mu = small_model.predict_mean(0.6).copy()
    mu[:3] += 0.03
    vid = small_model.add_via_point(0.6, mu)
    mu2 = mu.copy()
    mu2[:3] += 0.02
    small_model.adapt_via_point(vid, mu2)
    pred = small_model.predict_mean(0.6)
    assert np.linalg.norm(pred[:3] - mu2[:3]) < 1e-3


def test_shadow_replacement(small_model):
    """A via-point close to a reference shadows it and restores on delete."""
    s_ref = small_model.refs[20].s
    mu = small_model.predict_mean(s_ref).copy()
    mu[:3] += 0.05
    vid = small_model.add_via_point(s_ref + 1e-4, mu)
    assert vid in small_model._shadowed
    small_model.remove_via_point(vid)
    assert vid not in small_model._shadowed


def test_covariance_collapses_at_via_point(small_model):
    mu = small_model.predict_mean(0.5).copy()
    mu[:3] += 0.05
    small_model.add_via_point(0.5, mu, gamma=1e-8)
    cov = small_model.predict_covariance(0.5)
    assert np.max(np.linalg.eigvalsh(cov)) < 1e-3


def test_covariance_psd_and_symmetric(small_model):
    for s in [0.0, 0.31, 0.77, 1.0]:
        cov = small_model.predict_covariance(s)
        assert np.allclose(cov, cov.T, atol=1e-12)
        assert np.min(np.linalg.eigvalsh(cov)) > -1e-10


def test_prediction_within_reference_envelope():
    model = toy_model(60, seed=3)
    for ref in model.refs[::7]:
        pred = model.predict_mean(ref.s)
        sd = np.sqrt(np.diag(ref.sigma)[:3])
        assert np.all(np.abs(pred[:3] - ref.mu[:3]) <= 2 * sd + 1e-9)


def test_serialization_round_trip(small_model):
    mu = small_model.predict_mean(0.4).copy()
    mu[:3] += 0.02
    small_model.add_via_point(0.4, mu)
    clone = KmpModel.from_dict(small_model.to_dict())
    grid = np.linspace(0, 1, 50)
    assert np.allclose(clone.predict_mean_many(grid),
                       small_model.predict_mean_many(grid), atol=1e-12)
    assert clone.via_points.keys() == small_model.via_points.keys()


def test_incremental_matches_dense_above_threshold():
    """Models larger than the dense cutoff use the incremental solver;
    predictions must agree with the from-scratch oracle regardless."""
    model = toy_model(150, seed=5)
    mu = model.predict_mean(0.5).copy()
    mu[:3] += 0.03
    model.add_via_point(0.5, mu)
    mean_o, cov_o = _oracle_for(model, 0.47)
    assert np.max(np.abs(model.predict_mean(0.47)[:3] - mean_o[:3])) < 1e-8
    assert np.max(np.abs(model.predict_covariance(0.47) - cov_o)) < 1e-8


@settings(max_examples=25, deadline=None)
@given(st.floats(0.02, 0.98), st.floats(-0.05, 0.05))
def test_property_passage_everywhere(s_bar, offset):
    model = toy_model(30, seed=11)
    mu = model.predict_mean(s_bar).copy()
    mu[:3] += offset
    model.add_via_point(s_bar, mu)
    assert np.linalg.norm(model.predict_mean(s_bar)[:3] - mu[:3]) < 1e-3


def test_quaternion_outputs_unit(small_model):
    grid = np.linspace(0, 1, 40)
    preds = small_model.predict_mean_many(grid)
    norms = np.linalg.norm(preds[:, 3:], axis=1)
    assert np.allclose(norms, 1.0, atol=1e-9)
