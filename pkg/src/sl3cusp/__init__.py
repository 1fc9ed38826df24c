"""Cuspidal cohomology of congruence subgroups of SL(3,Z).

Computes dimensions of the cuspidal space U at prime level p as kernels
of sparse relation systems over F_q, Hecke operator matrices acting
directly on U, exact eigenvalue lifts into Z[sqrt(D)], and local
L-factors.
"""

__version__ = "0.1.0"

from .projective import PrimeLevel

__all__ = ["PrimeLevel", "__version__"]
