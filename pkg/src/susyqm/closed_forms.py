"""Explicit formulas for the worked examples, written out term by term.

These are transcriptions of the displayed potentials and wave functions for
the three reference families (oscillator seeds n = 0 and n = 1, CPRS seed
n = 3).  They deliberately avoid the machinery in :mod:`susyqm.susy` so the
two can be checked against each other.  All functions accept points or a
:class:`~susyqm.specfun.Jet` and return a jet.
"""

from __future__ import annotations

import math

import numpy as np

from .specfun import SQRT_PI, Jet, as_jet, erf, exp


def _var(x, order: int) -> Jet:
    return as_jet(x, order)


def ho0_potential(C: float, x, order: int = 0) -> Jet:
    """x^2 - 1 - 2 d/dx [exp(-x^2) / (C + sqrt(pi)/2 erf x)]."""
    t = _var(x, order + 1)
    inner = exp(-(t * t)) / (C + 0.5 * SQRT_PI * erf(t))
    return (t * t - 1.0).truncate(order) - 2.0 * inner.deriv()


def ho1_potential(C: float, x, order: int = 0) -> Jet:
    """x^2 - 3 - 8 d/dx [x^2 exp(-x^2) / (C - 2x exp(-x^2) + sqrt(pi) erf x)]."""
    t = _var(x, order + 1)
    g = exp(-(t * t))
    inner = t * t * g / (C - 2.0 * t * g + SQRT_PI * erf(t))
    return (t * t - 3.0).truncate(order) - 8.0 * inner.deriv()


def cprs3_potential(C: float, x, order: int = 0) -> Jet:
    """V_-^(3) + 2 d/dx [16x^2(2x^2+3)^2 / (8x(4x^4+8x^2+3) - e^{x^2}(2x^2+1)^2 (C + 12 sqrt(pi) erf x))]."""
    t = _var(x, order + 1)
    t2 = t * t
    q = 2.0 * t2 + 1.0
    base = t2 - 3.0 + 8.0 * (2.0 * t2 - 1.0) / (q * q)
    num = 16.0 * t2 * (2.0 * t2 + 3.0) * (2.0 * t2 + 3.0)
    den = 8.0 * t * (4.0 * t2 * t2 + 8.0 * t2 + 3.0) - exp(t2) * q * q * (C + 12.0 * SQRT_PI * erf(t))
    return base.truncate(order) + 2.0 * (num / den).deriv()


def ho0_ground(C: float, x, order: int = 2) -> Jet:
    """Zero-energy state of the n = 0 family."""
    t = _var(x, order)
    norm = math.sqrt((4.0 * C * C - math.pi) / (4.0 * SQRT_PI))
    return norm * exp(-0.5 * (t * t)) / (C + 0.5 * SQRT_PI * erf(t))


def ho0_first(C: float, x, order: int = 2) -> Jet:
    """Energy-2 state of the n = 0 family."""
    t = _var(x, order)
    g = exp(t * t)
    num = exp(-1.5 * (t * t)) * (1.0 + 2.0 * C * t * g + SQRT_PI * t * erf(t) * g)
    return (4.0 / math.pi) ** 0.25 * num / (2.0 * C + SQRT_PI * erf(t))


def ho1_ground(C: float, x, order: int = 2) -> Jet:
    """Energy -2 state of the n = 1 family."""
    t = _var(x, order)
    g = exp(t * t)
    num = exp(0.5 * (t * t)) * (C + SQRT_PI * erf(t))
    return (1.0 / math.pi) ** 0.25 * num / (C * g - 2.0 * t + SQRT_PI * erf(t) * g)


def ho1_first(C: float, x, order: int = 2) -> Jet:
    """Zero-energy state of the n = 1 family."""
    t = _var(x, order)
    norm = math.sqrt((C * C - math.pi) / (2.0 * SQRT_PI))
    g = exp(-(t * t))
    return norm * 2.0 * t * exp(-0.5 * (t * t)) / (C - 2.0 * t * g + SQRT_PI * erf(t))


def cprs3_first(C: float, x, order: int = 2) -> Jet:
    """Zero-energy state of the CPRS n = 3 family."""
    t = _var(x, order)
    t2 = t * t
    norm = math.sqrt((C * C - 144.0 * math.pi) / (24.0 * SQRT_PI))
    num = 4.0 * t * (2.0 * t2 + 3.0) * exp(0.5 * t2)
    den = exp(t2) * (2.0 * t2 + 1.0) * (C + 12.0 * SQRT_PI * erf(t)) - 8.0 * t * (2.0 * t2 + 3.0)
    return norm * num / den


# (model name, n, level k, energy, function)
PRINTED_STATES = (
    ("ho", 0, 0, 0.0, ho0_ground),
    ("ho", 0, 1, 2.0, ho0_first),
    ("ho", 1, 0, -2.0, ho1_ground),
    ("ho", 1, 1, 0.0, ho1_first),
    ("cprs", 3, 3, 0.0, cprs3_first),
)

PRINTED_POTENTIALS = {
    ("ho", 0): ho0_potential,
    ("ho", 1): ho1_potential,
    ("cprs", 3): cprs3_potential,
}


def printed_potential(model: str, n: int, C: float, x):
    """Values of the displayed partner potential, or KeyError if none is printed."""
    return PRINTED_POTENTIALS[(model, n)](C, np.asarray(x, dtype=float)).v
