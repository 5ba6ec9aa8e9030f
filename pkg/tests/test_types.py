import numpy as np
import pytest
from hypothesis import given, strategies as st

from skilladapt.errors import NonUnitQuaternion
from skilladapt.kmp import Demonstration, KernelConfig, hemisphere_align, unit_quat
from skilladapt.demo_data import arc_demo


def test_unit_quat_renormalizes_small_drift():
    q = np.array([1.0 + 5e-4, 0.0, 0.0, 0.0])
    out = unit_quat(q)
    assert np.isclose(np.linalg.norm(out), 1.0)


def test_unit_quat_rejects_large_drift():
    with pytest.raises(NonUnitQuaternion):
        unit_quat(np.array([1.1, 0.0, 0.0, 0.0]))


@given(st.lists(st.floats(-1, 1), min_size=4, max_size=4)
       .filter(lambda q: np.linalg.norm(q) > 1e-3))
def test_hemisphere_align_pairs_nonnegative_dot(q):
    q = np.asarray(q) / np.linalg.norm(q)
    quats = np.stack([q, -q, q])
    aligned = hemisphere_align(quats)
    for a, b in zip(aligned[:-1], aligned[1:]):
        assert np.dot(a, b) >= 0.0


def test_demonstration_validation():
    with pytest.raises(ValueError):
        Demonstration.from_arrays([0.0, 0.5, 0.9], np.zeros((3, 3)),
                                  np.tile([1.0, 0, 0, 0], (3, 1)))
    with pytest.raises(ValueError):
        Demonstration.from_arrays([0.0, 0.5, 0.5, 1.0], np.zeros((4, 3)),
                                  np.tile([1.0, 0, 0, 0], (4, 1)))


def test_demonstration_ndjson_round_trip(tmp_path):
    demo = arc_demo(n=30)
    path = tmp_path / "demo.ndjson"
    demo.save(path)
    loaded = Demonstration.load(path)
    assert np.allclose(loaded.times(), demo.times())
    assert np.allclose(loaded.poses(), demo.poses())


def test_kernel_config_rejects_bad_values():
    with pytest.raises(ValueError):
        KernelConfig(family="rbf")
    with pytest.raises(ValueError):
        KernelConfig(length_scale=0.0)
