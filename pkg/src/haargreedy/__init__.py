"""Weak thresholding greedy approximation for the multivariate Haar system in L1."""

from .dyadic import DyadicCube, GeneralizedChain, CubeSetAnalysis, mgcr
from .haar import HaarExpansion, Region, Rational, evaluate, norm, analysis, synthesis
from .greedy import GreedyParams, GreedyTrace, run
from .errors import HypothesisError

__all__ = [
    "DyadicCube",
    "GeneralizedChain",
    "CubeSetAnalysis",
    "mgcr",
    "HaarExpansion",
    "Region",
    "Rational",
    "evaluate",
    "norm",
    "analysis",
    "synthesis",
    "GreedyParams",
    "GreedyTrace",
    "run",
    "HypothesisError",
]

__version__ = "0.1.0"
