"""Littlewood-Paley / Besov analysis and Camassa-Holm type solvers on a periodic box."""

__version__ = "0.1.0"
