"""Exact computational geometry for theta maps of rank-2 bundles on
hyperelliptic curves: fields, forms, linear systems, Riemann-Roch spaces,
rational normal curves and the moduli-side rational maps, all over exact
coefficients with reproducible randomised certificates."""

from thetamap.exact_core import DEFAULT_PRIME, QQ, PrimeField, RationalField

__all__ = ["DEFAULT_PRIME", "QQ", "PrimeField", "RationalField"]
__version__ = "0.1.0"
