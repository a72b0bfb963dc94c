"""Cech nerves of epsilon-ball covers, their combinatorial Hodge Laplacians,
audits of the explicit coboundary bounds, and grid Whitney forms on the
flat 2-torus."""

__version__ = "0.1.0"

from .geometry import ChartError, FlatTorus, PointCloud, PointRef, RoundSphere
from .net import EpsilonNet, build_epsilon_net
from .nerve import Nerve, build_nerve, nerve_stats
from .cochains import Cochain, coboundary_matrix, laplacian_matrix
from .spectra import betti, laplacian_spectrum, torus_hodge_spectrum

__all__ = [
    "ChartError", "FlatTorus", "PointCloud", "PointRef", "RoundSphere",
    "EpsilonNet", "build_epsilon_net", "Nerve", "build_nerve", "nerve_stats",
    "Cochain", "coboundary_matrix", "laplacian_matrix",
    "betti", "laplacian_spectrum", "torus_hodge_spectrum",
]
