"""Exactly solvable base systems with the oscillator spectrum E_k = 2k.

Two models are provided, both in units with hbar = 2m = 1 and omega = 2:

* the harmonic oscillator, psi_k = H_k(x) exp(-x^2/2), k = 0, 1, 2, ...
* the CPRS potential in its SUSY-shifted form
  V(x) = x^2 + 8 (2x^2 - 1)/(2x^2 + 1)^2 + 3, with
  psi_k = P_k(x) exp(-x^2/2) / (2x^2 + 1) for k = 0, 3, 4, 5, ...

All eigenfunctions are unnormalized.  The integral I_n(x) of psi_n^2 is
anchored at x0 = 0.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import specfun
from .errors import InvalidIndex, PolynomialZero
from .specfun import SQRT_PI, Jet, as_jet

# Polynomial coefficients are exact integers only this far.
MAX_DEGREE = 20


class Kind(enum.Enum):
    HARMONIC = "ho"
    CPRS = "cprs"


@dataclass(frozen=True)
class CprsPoly:
    """P_k = H_k + 4k H_{k-2} + 4k(k-3) H_{k-4}, ascending integer coefficients."""

    k: int
    coeffs: tuple[int, ...]

    def deriv_coeffs(self) -> tuple[int, ...]:
        return tuple(i * a for i, a in enumerate(self.coeffs))[1:] or (0,)


@lru_cache(maxsize=None)
def cprs_poly(k: int) -> CprsPoly:
    if k in (1, 2) or k < 0:
        raise InvalidIndex(f"CPRS has no level k={k}")
    out = [0] * (k + 1)
    for weight, deg in ((1, k), (4 * k, k - 2), (4 * k * (k - 3), k - 4)):
        if deg < 0 or weight == 0:
            continue
        for i, a in enumerate(specfun.hermite_coeffs(deg)):
            out[i] += weight * a
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return CprsPoly(k, tuple(out))


def _cprs_p_jet(k: int, x: Jet) -> Jet:
    out = specfun.hermite_jet(k, x)
    if k >= 2:
        out = out + 4 * k * specfun.hermite_jet(k - 2, x)
    if k >= 4:
        out = out + 4 * k * (k - 3) * specfun.hermite_jet(k - 4, x)
    return out


def _hyp_coeff(n: int, m: int) -> Fraction:
    return Fraction(
        (-1) ** m * 2 ** (n - m) * math.factorial(2 * m),
        math.factorial(n - m) * math.factorial(m) ** 3,
    )


@lru_cache(maxsize=None)
def _ho_tail_poly(n: int) -> tuple:
    """Coefficients in z = x^2 of the m >= 1 part of the 1F1 sum, times exp(z).

    After Kummer's transformation each 1F1(m + 1/2; 3/2; -z) with m >= 1 is
    exp(-z) times a terminating series.  Adding those series exactly avoids
    the heavy cancellation between the individual terms in floating point.
    """
    total = [Fraction(0)] * max(n, 1)
    for m in range(1, n + 1):
        c = _hyp_coeff(n, m)
        term = Fraction(1)
        total[0] += c
        for j in range(m - 1):
            term *= Fraction(1 - m + j) / ((Fraction(3, 2) + j) * (j + 1))
            total[j + 1] += c * term
    return tuple(float(t) for t in total)


def ho_tail(n: int, x):
    """Integral of exp(-s^2) H_n(s)^2 over [0, x] via the 1F1 sum."""
    x = np.asarray(x, dtype=float)
    z = x * x
    rest = np.exp(-z) * np.polynomial.polynomial.polyval(z, _ho_tail_poly(n))
    head = float(_hyp_coeff(n, 0)) * specfun.kummer_half(0, x)
    return x * math.factorial(n) ** 2 * (head + rest)


@dataclass(frozen=True)
class Model:
    kind: Kind

    @property
    def name(self) -> str:
        return self.kind.value

    @property
    def default_half_width(self) -> float:
        """Dirichlet box half-width used by the eigensolver."""
        return 10.0 if self.kind is Kind.HARMONIC else 12.0

    # -- index bookkeeping --------------------------------------------------

    def is_valid(self, k) -> bool:
        if not isinstance(k, (int, np.integer)) or k < 0 or k > MAX_DEGREE:
            return False
        return not (self.kind is Kind.CPRS and k in (1, 2))

    def check(self, k) -> int:
        if not self.is_valid(k):
            raise InvalidIndex(f"k={k!r} is not a level of the {self.name} model")
        return int(k)

    def indices(self, count: int) -> list[int]:
        """First ``count`` entries of the index set."""
        if self.kind is Kind.HARMONIC:
            return list(range(count))
        return [0] + list(range(3, 3 + count - 1)) if count > 0 else []

    def position(self, k: int) -> int:
        """Ordinal of k in the index set, which is also its node count."""
        k = self.check(k)
        if self.kind is Kind.HARMONIC or k == 0:
            return k
        return k - 2

    # -- eigenfunctions and potentials -------------------------------------

    def energy(self, k: int) -> float:
        return 2.0 * self.check(k)

    def psi_jet(self, k: int, x, order: int = 2) -> Jet:
        """Unnormalized psi_k as a jet; ``x`` may be points or a jet."""
        k = self.check(k)
        xj = as_jet(x, order)
        gauss = specfun.exp(-0.5 * (xj * xj))
        if self.kind is Kind.HARMONIC:
            return specfun.hermite_jet(k, xj) * gauss
        return _cprs_p_jet(k, xj) * gauss / (2.0 * (xj * xj) + 1.0)

    def psi(self, k: int, x):
        return self.psi_jet(k, x, order=0).v

    def norm_sq(self, k: int) -> float:
        """Integral of psi_k^2 over the whole line."""
        return 2.0 * self.half_line_norm(k)

    def base_potential(self, n: int, x):
        """V_-^(n) = V_-^(0) - E_n; works on points or jets."""
        n = self.check(n)
        if not isinstance(x, Jet):
            x = np.asarray(x, dtype=float)
        x2 = x * x
        shift = -2.0 * n
        if self.kind is Kind.HARMONIC:
            return x2 - 1.0 + shift
        return x2 + 8.0 * (2.0 * x2 - 1.0) / ((2.0 * x2 + 1.0) * (2.0 * x2 + 1.0)) + 3.0 + shift

    def tail_integral(self, n: int, x):
        """I_n(x): integral of psi_n^2 over [0, x] in closed form."""
        n = self.check(n)
        x = np.asarray(x, dtype=float)
        if self.kind is Kind.HARMONIC:
            return ho_tail(n, x)
        if n == 0:
            # no closed form is available for the CPRS ground state
            f = lambda s: self.psi(0, s) ** 2  # noqa: E731
            return np.vectorize(lambda b: specfun.integrate(f, 0.0, b, 1e-14))(x)
        p = _cprs_p_jet(n, Jet.constant(x, 0)).v
        boundary = -2.0 * p * specfun.hermite(n - 3, x) * np.exp(-x * x) / (2.0 * x * x + 1.0)
        return boundary + 8.0 * n * ho_tail(n - 3, x)

    @lru_cache(maxsize=None)
    def half_line_norm(self, n: int) -> float:
        """Integral of psi_n^2 over [0, inf): the singularity threshold for |C|."""
        n = self.check(n)
        if self.kind is Kind.HARMONIC:
            return 2.0 ** (n - 1) * math.factorial(n) * SQRT_PI
        if n >= 3:
            return math.factorial(n - 3) * 2.0 ** (n - 1) * n * SQRT_PI
        return specfun.integrate(lambda s: self.psi(0, s) ** 2, 0.0, math.inf, 1e-15)


HARMONIC = Model(Kind.HARMONIC)
CPRS = Model(Kind.CPRS)


def get_model(name: str) -> Model:
    try:
        return Model(Kind(name.lower()))
    except ValueError:
        raise ValueError(f"unknown model {name!r}; expected 'ho' or 'cprs'") from None


def cprs_ode_identity(n: int, x):
    """2x(2x^2+5)/(2x^2+1) P_n'/P_n - P_n''/P_n, which equals 2n."""
    poly = cprs_poly(n)
    if n < 3:
        raise InvalidIndex("identity holds for n >= 3")
    x = np.asarray(x, dtype=float)
    pj = _cprs_p_jet(n, Jet.variable(x, 2))
    scale = sum(abs(a) * np.abs(x) ** i for i, a in enumerate(poly.coeffs))
    if np.any(np.abs(pj.v) <= 1e-10 * scale):
        raise PolynomialZero(f"P_{n} vanishes near x={x}")
    x2 = x * x
    return 2.0 * x * (2.0 * x2 + 5.0) / (2.0 * x2 + 1.0) * pj.d1 / pj.v - pj.d2 / pj.v
