"""Exact verification of homological identities for hyperbolic difference
operators on finite causal lattices.

The package realizes ladder complexes of difference operators on a time
slab over a spatial torus, certifies causal solvability, builds solution
homotopies from witnesses, and checks every identity in the chain - from
the retarded-minus-advanced quasi-isomorphism and its explicit homotopies
to the covariant and fixed-time Poisson structures and their comparison -
by exact rational linear algebra.
"""

from . import dec, dgcat, green, homalg, lattice, models, poisson, rma
from .config import RunConfig, load_config, parse_config
from .report import Report

__version__ = "0.1.0"

__all__ = [
    "dec", "dgcat", "green", "homalg", "lattice", "models", "poisson", "rma",
    "RunConfig", "load_config", "parse_config", "Report", "__version__",
]
