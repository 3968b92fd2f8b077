"""Exact verification toolkit for Markov chains on proper edge colorings of
trees: enumeration oracles, chain simulation, spectral computations, flip
couplings with canonical paths, and variance-factorization certificates."""

from . import (canonical, colorings, dynamics, oracle, spectral,
               tensorization, trees)

__all__ = ["canonical", "colorings", "dynamics", "oracle", "spectral",
           "tensorization", "trees"]

__version__ = "0.1.0"
