"""Special functions and pointwise derivative arithmetic.

The central type is :class:`Jet`, a truncated Taylor expansion
``f(x0 + t) = c0 + c1 t + c2 t^2 + ...`` carried through arithmetic.  Every
coefficient may be a scalar or a numpy array, so a single jet evaluates a
function and its derivatives on a whole grid at once.  ``Jet2`` builds the
order-2 case (value, first and second derivative) used by most callers;
higher orders are needed only where differential operators are composed.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy import special

from .errors import JetDivisionError, NonConvergence

SQRT_PI = math.sqrt(math.pi)

# Divisors smaller than this are treated as exact zeros.
TINY_DIVISOR = 1e-300


def _asarray(value):
    return np.asarray(value, dtype=float)


class Jet:
    """Truncated Taylor series in the displacement from an expansion point.

    ``c[j]`` holds ``f^(j)(x0) / j!``.  Binary operations between jets of
    different order truncate to the lower one.
    """

    __slots__ = ("c",)

    def __init__(self, coeffs):
        c = np.array(coeffs, dtype=float)
        if c.ndim == 0:
            c = c.reshape(1)
        c.setflags(write=False)
        self.c = c

    # -- construction -----------------------------------------------------

    @classmethod
    def constant(cls, value, order: int = 2) -> "Jet":
        v = _asarray(value)
        c = np.zeros((order + 1,) + v.shape)
        c[0] = v
        return cls(c)

    @classmethod
    def variable(cls, x, order: int = 2) -> "Jet":
        """The identity function expanded about ``x``."""
        v = _asarray(x)
        c = np.zeros((order + 1,) + v.shape)
        c[0] = v
        if order >= 1:
            c[1] = 1.0
        return cls(c)

    @classmethod
    def from_derivatives(cls, derivs: Sequence) -> "Jet":
        """Build from ``[f, f', f'', ...]``."""
        return cls([_asarray(d) / math.factorial(j) for j, d in enumerate(derivs)])

    # -- views --------------------------------------------------------------

    @property
    def order(self) -> int:
        return self.c.shape[0] - 1

    @property
    def v(self):
        return self.c[0]

    @property
    def d1(self):
        return self.c[1] if self.order >= 1 else np.zeros_like(self.c[0])

    @property
    def d2(self):
        return 2.0 * self.c[2] if self.order >= 2 else np.zeros_like(self.c[0])

    def derivative(self, j: int):
        if j > self.order:
            raise ValueError(f"jet of order {self.order} has no derivative {j}")
        return math.factorial(j) * self.c[j]

    def derivatives(self) -> list:
        return [self.derivative(j) for j in range(self.order + 1)]

    def __repr__(self) -> str:
        return f"Jet(order={self.order}, derivs={self.derivatives()!r})"

    # -- calculus -----------------------------------------------------------

    def deriv(self) -> "Jet":
        """Jet of the derivative; one order lower."""
        if self.order == 0:
            raise ValueError("cannot differentiate an order-0 jet")
        j = np.arange(1, self.order + 1).reshape((-1,) + (1,) * (self.c.ndim - 1))
        return Jet(self.c[1:] * j)

    def integ(self, value) -> "Jet":
        """Antiderivative jet whose value at the expansion point is ``value``."""
        j = np.arange(1, self.order + 2).reshape((-1,) + (1,) * (self.c.ndim - 1))
        head = np.broadcast_to(_asarray(value), self.c.shape[1:])[None]
        return Jet(np.concatenate([head, self.c / j]))

    def truncate(self, order: int) -> "Jet":
        if order > self.order:
            raise ValueError("cannot raise the order of a jet")
        return Jet(self.c[: order + 1])

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Jet):
            k = min(self.order, other.order)
            return self.c[: k + 1], other.c[: k + 1]
        o = _asarray(other)
        oc = np.zeros((self.order + 1,) + np.broadcast_shapes(o.shape, self.c.shape[1:]))
        oc[0] = o
        return self.c, oc

    def __add__(self, other) -> "Jet":
        a, b = self._coerce(other)
        return Jet(a + b)

    __radd__ = __add__

    def __sub__(self, other) -> "Jet":
        a, b = self._coerce(other)
        return Jet(a - b)

    def __rsub__(self, other) -> "Jet":
        a, b = self._coerce(other)
        return Jet(b - a)

    def __neg__(self) -> "Jet":
        return Jet(-self.c)

    def __pos__(self) -> "Jet":
        return self

    def __mul__(self, other) -> "Jet":
        if not isinstance(other, Jet):
            return Jet(self.c * _asarray(other))
        a, b = self._coerce(other)
        out = np.zeros(np.broadcast_shapes(a.shape, b.shape))
        for j in range(out.shape[0]):
            out[j] = sum(a[i] * b[j - i] for i in range(j + 1))
        return Jet(out)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Jet":
        if not isinstance(other, Jet):
            o = _asarray(other)
            if np.any(np.abs(o) < TINY_DIVISOR):
                raise JetDivisionError("division by a zero scalar")
            return Jet(self.c / o)
        a, b = self._coerce(other)
        return _divide(a, b)

    def __rtruediv__(self, other) -> "Jet":
        a, b = self._coerce(other)
        return _divide(b, a)

    def __pow__(self, p: int) -> "Jet":
        if not isinstance(p, (int, np.integer)) or p < 0:
            raise ValueError("only non-negative integer powers are supported")
        out = Jet.constant(np.ones(self.c.shape[1:]), self.order)
        base = self
        while p:
            if p & 1:
                out = out * base
            base = base * base
            p >>= 1
        return out


def _divide(a: np.ndarray, b: np.ndarray) -> Jet:
    if np.any(np.abs(b[0]) < TINY_DIVISOR):
        raise JetDivisionError("jet division by a value below 1e-300")
    q = np.zeros(np.broadcast_shapes(a.shape, b.shape))
    for j in range(q.shape[0]):
        acc = a[j] - sum(b[i] * q[j - i] for i in range(1, j + 1))
        q[j] = acc / b[0]
    return Jet(q)


def Jet2(v, d1=0.0, d2=0.0) -> Jet:
    """Order-2 jet from value, first and second derivative."""
    return Jet.from_derivatives([v, d1, d2])


def as_jet(x, order: int = 2) -> Jet:
    """Promote a point (or array of points) to the identity jet; jets pass through."""
    if isinstance(x, Jet):
        return x
    return Jet.variable(x, order)


def exp(u: Jet) -> Jet:
    if not isinstance(u, Jet):
        return np.exp(u)
    # e' = u' e, solved coefficientwise
    e = np.zeros_like(u.c)
    e[0] = np.exp(u.c[0])
    for j in range(1, u.order + 1):
        e[j] = sum(i * u.c[i] * e[j - i] for i in range(1, j + 1)) / j
    return Jet(e)


def erf(x):
    """Error function for floats, arrays or jets.

    Plain values go through ``scipy.special.erf`` (double-precision accurate
    over the whole real line).  Jets use erf' = 2/sqrt(pi) exp(-u^2) u'.
    """
    if not isinstance(x, Jet):
        return special.erf(x)
    if x.order == 0:
        return Jet(special.erf(x.c))
    dw = (2.0 / SQRT_PI) * exp(-(x * x)).truncate(x.order - 1) * x.deriv()
    return dw.integ(special.erf(x.c[0]))


def chain(u: Jet, derivs: Sequence) -> Jet:
    """Compose ``g(u)`` given ``[g(u0), g'(u0), ...]`` at the value of ``u``.

    Only the first ``u.order + 1`` entries of ``derivs`` are used.
    """
    du = Jet(np.concatenate([np.zeros_like(u.c[:1]), u.c[1:]]))
    out = Jet.constant(np.zeros(u.c.shape[1:]), u.order)
    power = Jet.constant(np.ones(u.c.shape[1:]), u.order)
    for j in range(u.order + 1):
        out = out + power * (_asarray(derivs[j]) / math.factorial(j))
        power = power * du
    return out


# -- Hermite polynomials ------------------------------------------------------


@lru_cache(maxsize=None)
def hermite_coeffs(n: int) -> tuple[int, ...]:
    """Exact integer coefficients of the physicists' H_n, ascending powers."""
    if n < 0:
        raise ValueError("degree must be non-negative")
    prev, cur = (1,), (0, 2)
    if n == 0:
        return prev
    for k in range(1, n):
        nxt = [0] * (k + 2)
        for i, a in enumerate(cur):
            nxt[i + 1] += 2 * a
        for i, a in enumerate(prev):
            nxt[i] -= 2 * k * a
        prev, cur = cur, tuple(nxt)
    return cur


def hermite(n: int, x):
    """H_n(x) by the three-term recurrence (stable; no monomial expansion).

    Overflows to inf for large n*|x| (roughly n > 60 at |x| ~ 10).
    """
    x = _asarray(x)
    if n < 0:
        return np.zeros_like(x)
    h0 = np.ones_like(x)
    if n == 0:
        return h0
    h1 = 2.0 * x
    for k in range(1, n):
        h0, h1 = h1, 2.0 * x * h1 - 2.0 * k * h0
    return h1


def hermite_jet(n: int, x, order: int = 2) -> Jet:
    """Jet of H_n at ``x`` (a point/array, or a jet to compose with).

    Uses H_n^(j) = 2^j n!/(n-j)! H_{n-j}, so the Taylor coefficient of order j
    is 2^j C(n, j) H_{n-j}(x).
    """
    if n < 0:
        raise ValueError("degree must be non-negative")
    if isinstance(x, Jet):
        derivs = [
            (2.0**j) * math.perm(n, j) * hermite(n - j, x.v) if j <= n else np.zeros_like(x.v)
            for j in range(x.order + 1)
        ]
        return chain(x, derivs)
    x = _asarray(x)
    c = [
        (2.0**j) * math.comb(n, j) * hermite(n - j, x) if j <= n else np.zeros_like(x)
        for j in range(order + 1)
    ]
    return Jet(c)


def poly_jet(coeffs: Sequence[float], x: Jet) -> Jet:
    """Evaluate an ascending-coefficient polynomial on a jet (Horner)."""
    out = Jet.constant(np.zeros(x.c.shape[1:]), x.order)
    for a in reversed(coeffs):
        out = out * x + float(a)
    return out


# -- confluent hypergeometric -------------------------------------------------


def kummer_half(m: int, x):
    """1F1(m + 1/2; 3/2; -x^2) for integer m >= 0.

    Kummer's transformation turns this into exp(-x^2) 1F1(1 - m; 3/2; x^2),
    whose series terminates after m terms for m >= 1.  For m = 0 it is
    sqrt(pi) erf(x) / (2x), with the removable point x = 0 mapped to 1.
    """
    if m < 0:
        raise ValueError("m must be non-negative")
    x = _asarray(x)
    if m == 0:
        safe = np.where(x == 0.0, 1.0, x)
        return np.where(x == 0.0, 1.0, SQRT_PI * special.erf(safe) / (2.0 * safe))
    z = x * x
    term = np.ones_like(x)
    total = np.ones_like(x)
    for j in range(m - 1):
        # ratio of consecutive terms of 1F1(1-m; 3/2; z)
        term = term * (1 - m + j) / ((1.5 + j) * (j + 1)) * z
        total = total + term
    return np.exp(-z) * total


# -- quadrature ---------------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(20)
MAX_PANELS = 20000
TAIL_LIMIT = 60.0


def _panel(f: Callable, a: float, b: float) -> float:
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    vals = np.asarray(f(mid + half * _GL_NODES), dtype=float)
    return half * float(np.dot(_GL_WEIGHTS, vals))


def _adaptive(f: Callable, a: float, b: float, tol: float, rtol: float) -> float:
    width = b - a
    if width == 0.0:
        return 0.0
    stack = [(a, b, _panel(f, a, b))]
    total = 0.0
    panels = 0
    while stack:
        lo, hi, whole = stack.pop()
        mid = 0.5 * (lo + hi)
        left = _panel(f, lo, mid)
        right = _panel(f, mid, hi)
        panels += 1
        err = abs(left + right - whole)
        local_tol = max(tol * (hi - lo) / width, rtol * abs(left + right))
        if err <= local_tol or (hi - lo) < 1e-12 * max(1.0, abs(width)):
            total += left + right
            continue
        if panels > MAX_PANELS:
            raise NonConvergence(f"subdivision limit reached on [{a}, {b}]")
        stack.append((lo, mid, left))
        stack.append((mid, hi, right))
    return total


def _tail_cutoff(f: Callable, start: float, tol: float) -> float:
    """First X >= start + 1 past which |f| stays below tol/10 on a unit window.

    Valid for integrands decaying at least like poly(x) exp(-x^2), where the
    neglected tail beyond X is bounded by the value at X.
    """
    x = start + 1.0
    while x <= start + TAIL_LIMIT:
        window = np.linspace(x - 1.0, x, 33)
        if np.max(np.abs(f(window))) < tol / 10.0:
            return x
        x += 1.0
    raise NonConvergence("integrand does not decay fast enough for tail truncation")


def integrate(
    f: Callable, a: float, b: float, tol: float = 1e-12, rtol: float = 1e-15
) -> float:
    """Adaptive 20-point Gauss-Legendre integral of ``f`` over [a, b].

    A panel is accepted when its error estimate is below its share of
    ``tol`` or below ``rtol`` times its own magnitude; the latter keeps
    large integrands from chasing rounding noise.  ``f`` must accept numpy
    arrays.  Either limit may be infinite; infinite
    ranges are truncated where the integrand (assumed Gaussian-decaying)
    falls below ``tol / 10``.  Raises NonConvergence when the subdivision
    limit is exceeded.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if a == b:
        return 0.0
    if a > b:
        return -integrate(f, b, a, tol, rtol)
    if math.isinf(a) and math.isinf(b):
        return integrate(f, -math.inf, 0.0, tol / 2, rtol) + integrate(
            f, 0.0, math.inf, tol / 2, rtol
        )
    if math.isinf(a):
        return integrate(lambda s: f(-np.asarray(s)), -b, math.inf, tol, rtol)
    if math.isinf(b):
        b = _tail_cutoff(f, a, tol)
        tol = 0.9 * tol
    return _adaptive(f, float(a), float(b), tol, rtol)
