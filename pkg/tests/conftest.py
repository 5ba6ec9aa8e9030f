import numpy as np
import pytest

from skilladapt.demo_data import arc_demo_set
from skilladapt.engine import Engine
from skilladapt.kmp import KernelConfig, KmpModel, ReferencePoint


def smooth_refs(n=40, seed=0, sigma_scale=1e-4):
    """Smooth synthetic reference points on a uniform s-grid."""
    rng = np.random.default_rng(seed)
    s = np.linspace(0.0, 1.0, n)
    a, b, c = rng.uniform(-0.3, 0.3, 3)
    refs = []
    for si in s:
        pos = np.array([si + a * np.sin(2 * np.pi * si),
                        b * np.sin(np.pi * si),
                        c * (1 - np.cos(np.pi * si))])
        angle = 0.3 * si
        quat = np.array([np.cos(angle / 2), 0.0, 0.0, np.sin(angle / 2)])
        mu = np.concatenate([pos, quat])
        sigma = sigma_scale * (1.0 + 0.5 * np.sin(3 * si)) * np.eye(7)
        refs.append(ReferencePoint(float(si), mu, sigma))
    return refs


def toy_model(n=40, seed=0, **kwargs):
    return KmpModel(smooth_refs(n, seed), **kwargs)


@pytest.fixture
def small_model():
    return toy_model(40)


@pytest.fixture(scope="session")
def demo_set():
    return arc_demo_set()


@pytest.fixture
def engine(demo_set):
    eng = Engine()
    for i, d in enumerate(demo_set):
        eng.add_demonstration(f"demo_{i}", d)
    eng.fit()
    return eng
