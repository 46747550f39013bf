"""conelab: discrete spectral geometry of cone links.

Hodge-Laplacian spectra on simplicial link meshes, indicial-root and
exceptional-order analysis for p-form Laplacians on metric cones, weighted
Kahler-potential gluing with explicit constants, singularity hypothesis
checkers, and exact Artin local-algebra arithmetic.
"""

__version__ = "0.1.0"

from .mesh import (
    BettiVector,
    SimplicialComplex,
    betti,
    check_betti_hypothesis,
    load_mesh,
    save_mesh,
)

__all__ = [
    "BettiVector",
    "SimplicialComplex",
    "betti",
    "check_betti_hypothesis",
    "load_mesh",
    "save_mesh",
    "__version__",
]
