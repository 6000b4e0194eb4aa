"""bohrlab: desk-scale toolkit for principal algebraic Z^d-actions.

Exact Laurent-polynomial arithmetic, Mahler measure / entropy, p-adic root
escape, m-goodness certificates for lacunary divisibility, summable
homoclinic points with gap radii, exact Riesz-product Fourier coefficients,
and weighted ergodic-average experiments on companion-form toral models.
"""

__version__ = "0.1.0"

from .laurent import LaurentPoly, KroneckerForm, parse, divides, kronecker_factor

__all__ = [
    "__version__",
    "LaurentPoly",
    "KroneckerForm",
    "parse",
    "divides",
    "kronecker_factor",
]
