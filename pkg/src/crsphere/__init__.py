"""Exact and numeric calculus for deformed CR structures on the unit 3-sphere.

The package computes the deformed pseudohermitian invariants (torsion,
connection, curvature, Cartan tensor, obstruction density) of a CR structure
obtained by deforming the standard sphere, together with the linear theory of
the obstruction operator and a partial-solution / Kuranishi-map solver.

Two backends share one pipeline: exact truncated t-jets over polynomial
functions, and a numeric coefficient-space backend over a Hopf-coordinate
grid.
"""

__version__ = "0.1.0"

from .scalars import QQi, Pi2Multiple, rational
from .polyfn import PolyFn
from .harmonic import HarmonicField, harmonic_basis, to_harmonic, project_pq

__all__ = [
    "QQi",
    "Pi2Multiple",
    "rational",
    "PolyFn",
    "HarmonicField",
    "harmonic_basis",
    "to_harmonic",
    "project_pq",
    "__version__",
]
