"""Multi-modal robot skill adaptation engine: probabilistic trajectory
encoding with online via-point adaptation, energy-tank intention detection,
a bounded tool-dispatch gateway, spectral coverage control, an impedance
execution simulator and a JSON service bridge."""

__version__ = "0.1.0"
