"""Numerical toolkit for conformal surface invariants, osculating Dupin
cyclides, Dupin/Darboux line fields, surface–cyclide intersection tracing,
and prescribed curvature-line foliations."""

__version__ = "0.1.0"
