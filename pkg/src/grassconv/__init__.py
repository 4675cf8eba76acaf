"""Numerical geometry of the Grassmannian chart: Jordan angles, the canonical
metric, Hessian estimates of the v- and u-functions, and Gauss-map checks on
minimal graphs."""

__version__ = "0.1.0"

from .numerics import DomainError  # noqa: E402,F401
