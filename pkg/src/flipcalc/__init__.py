"""Flip calculus for finite graphs and relational structures.

Subpackage map:

* ``core`` -- structures, quantifier-free formulas, type partitions,
  Gaifman/incidence graphs, distances.
* ``flips`` -- graph flips, syntactic flips, traces.
* ``independence`` -- flip independence, flip distance, separation balls.
* ``separation`` -- neighborhood definitions and separating-flip builds.
* ``discrepancy`` -- expected-edge graphs and component diagnostics.
* ``game`` -- the separation game and its rank recursion.
* ``flatness_sparsity`` -- scattered-set search and sparsity diagnostics.
* ``io`` -- file formats, DOT export, run reports.
* ``service`` -- the HTTP session server.
* ``cli`` -- command-line entry point.
"""

from .errors import BudgetExceeded, DomainError, FlipcalcError, FormatError

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "FlipcalcError",
    "DomainError",
    "BudgetExceeded",
    "FormatError",
]
