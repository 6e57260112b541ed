"""displab: a convex-geometry oracle laboratory.

Membership/modified/entry query models over hidden convex bodies, the
random matrix ensembles D and D', dispersion and norm-variance statistics,
sketched query algorithms (length estimation, matrix recovery, volume
recovery) and adversarial brick constructions, plus a seeded Monte Carlo
experiment catalog exposed through the ``displab`` command.
"""
from .geom import Ball, HPolytope, Parallelopiped
from .kernels import BACKEND as KERNEL_BACKEND
from .oracle import ProductPart, QueryAnswer, Transcript
from .rng import RngStream
from .stats import DispersionEstimate, ScalarSampleSet, p_dispersion

__version__ = "0.1.0"

__all__ = [
    "Ball",
    "HPolytope",
    "Parallelopiped",
    "ProductPart",
    "QueryAnswer",
    "Transcript",
    "RngStream",
    "ScalarSampleSet",
    "DispersionEstimate",
    "p_dispersion",
    "KERNEL_BACKEND",
    "__version__",
]
