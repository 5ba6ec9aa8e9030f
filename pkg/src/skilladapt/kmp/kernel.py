"""Scalar kernels over normalized time."""

import numpy as np

SQRT5 = np.sqrt(5.0)


def matern52(a, b, length_scale):
    """Matern nu=5/2 kernel between time arrays a (m,) and b (n,) -> (m, n)."""
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    r = np.abs(a[:, None] - b[None, :]) / length_scale
    sr = SQRT5 * r
    return (1.0 + sr + sr * sr / 3.0) * np.exp(-sr)


def kernel_matrix(config, a, b):
    if config.family == "matern52":
        return matern52(a, b, config.length_scale)
    raise ValueError(f"unsupported kernel family {config.family!r}")
