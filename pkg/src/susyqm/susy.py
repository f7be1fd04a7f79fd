"""Second-order factorization chain and the isospectral partner family.

For a seed level n of a base model, the Bernoulli solution

    f_n(x) = psi_n(x)^2 / D(x),   D(x) = C + I_n(x),

gives the partner potential V~ = V_-^(n) - 2 f_n'.  The partner shares the
spectrum {E_k - E_n} of V_-^(n).  Level k != n is reached by B_n^+ A_n psi_k;
level n is the "missing" state psi_n / D.

Products such as f_n W_n are never formed from W_n = -psi_n'/psi_n, which is
singular at the nodes of psi_n.  Instead

    f_n W_n       = -psi_n psi_n' / D
    B^+ A psi_k   = (E_k - E_n) psi_k + f_n psi_k' + (f_n W_n) psi_k

are used, both finite everywhere once D is nodeless.

Sign convention: every normalized partner state is positive at the grid
point of largest modulus on the model's default box.  Ties resolve to the
leftmost such point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from . import specfun
from .errors import MissingState, NodeOfPsi, SingularFamily
from .models import Kind, Model
from .oracle import node_count
from .specfun import Jet

SIGN_GRID_POINTS = 4001


def superpotential_jet(model: Model, n: int, x, order: int = 1) -> Jet:
    """W_n = -psi_n'/psi_n; the returned jet holds W_n and W_n' for order 1.

    Raises NodeOfPsi when |psi_n(x)| <= 1e-12 |psi_n'(x)|.
    """
    psi = model.psi_jet(n, x, order + 1)
    if np.any(np.abs(psi.v) <= 1e-12 * np.abs(psi.d1)):
        raise NodeOfPsi(f"psi_{n} has a node at or near x={x}")
    return -psi.deriv() / psi.truncate(order)


@dataclass(frozen=True)
class IntertwinerCoeffs:
    """Coefficients of A = d^2/dx^2 + eta d/dx + gamma at one point."""

    eta: float
    gamma: float


@dataclass(frozen=True)
class TildeState:
    k: int
    energy: float
    norm_constant: float
    analytic_norm: float
    sign: int
    node_count: int


@dataclass(frozen=True)
class PartnerFamily:
    """One member of the isospectral family seeded by level ``n``.

    ``C`` must satisfy |C| > half_line_norm(n) so that D(x) is nodeless.
    The anchor ``x0`` of the running integral is fixed at 0.
    """

    model: Model
    n: int
    C: float
    x0: float = field(default=0.0)

    def __post_init__(self):
        self.model.check(self.n)
        if self.x0 != 0.0:
            raise ValueError("only the anchor x0 = 0 is supported")
        if not math.isfinite(self.C):
            raise SingularFamily("C must be finite")
        if abs(self.C) <= self.threshold:
            raise SingularFamily(
                f"|C| = {abs(self.C):.17g} must exceed the singularity threshold "
                f"{self.threshold:.17g} for {self.model.name} n={self.n}"
            )

    @property
    def threshold(self) -> float:
        return self.model.half_line_norm(self.n)

    def energy(self, k: int) -> float:
        return self.model.energy(k) - self.model.energy(self.n)

    # -- building blocks ----------------------------------------------------

    def denominator(self, x):
        """D(x) = C + integral of psi_n^2 from 0 to x."""
        return self.C + self.model.tail_integral(self.n, x)

    def _pieces(self, x, order: int):
        """Jets (psi_n, D, f, fw) at ``order``; fw is the regular product f_n W_n."""
        psi = self.model.psi_jet(self.n, x, order + 1)
        psi_k = psi.truncate(order)
        dval = self.denominator(x)
        if order == 0:
            d = Jet.constant(dval, 0)
        else:
            d = (psi_k * psi_k).truncate(order - 1).integ(dval)
        f = psi_k * psi_k / d
        fw = -(psi_k * psi.deriv()) / d
        return psi_k, d, f, fw

    def bernoulli_f(self, x, order: int = 2) -> Jet:
        """f_n as a jet: value, f_n', f_n'' (for the default order)."""
        return self._pieces(x, order)[2]

    def fw_jet(self, x, order: int = 2) -> Jet:
        return self._pieces(x, order)[3]

    def partner_potential(self, x):
        """V~_-^(n)(x) = V_-^(n)(x) - 2 f_n'(x)."""
        x = np.asarray(x, dtype=float)
        return self.model.base_potential(self.n, x) - 2.0 * self.bernoulli_f(x, 1).d1

    def intertwiner_coeffs(self, x) -> IntertwinerCoeffs:
        _, _, f, fw = self._pieces(x, 0)
        eta = -f.v
        gamma = -(self.model.base_potential(self.n, x) + fw.v)
        return IntertwinerCoeffs(eta, gamma)

    # -- operators ------------------------------------------------------------

    def apply_bdag_a(self, x, phi: Jet) -> Jet:
        """B^+ A phi = -phi'' + V_-^(n) phi + f phi' + (f W) phi; two orders lost."""
        order = phi.order - 2
        _, _, f, fw = self._pieces(x, order)
        xj = Jet.variable(x, order)
        v = self.model.base_potential(self.n, xj)
        p = phi.truncate(order)
        return -phi.deriv().deriv() + v * p + f * phi.deriv().truncate(order) + fw * p

    def apply_adag_b(self, x, phi: Jet) -> Jet:
        """A^+ B phi = -phi'' + (V_-^(n) - f') phi - f phi' + (f W) phi."""
        order = phi.order - 2
        _, _, f1, fw1 = self._pieces(x, order + 1)
        f, fw = f1.truncate(order), fw1.truncate(order)
        xj = Jet.variable(x, order)
        v = self.model.base_potential(self.n, xj)
        p = phi.truncate(order)
        return -phi.deriv().deriv() + (v - f1.deriv()) * p - f * phi.deriv().truncate(order) + fw * p

    def factorization_check(self, x, probe: Callable[[Jet], Jet]):
        """|A A^+ p - B B^+ p| at x; both products equal H_+^(n).

        Only meaningful away from the nodes of psi_n, where W_n is finite.
        """
        w = superpotential_jet(self.model, self.n, x, 1)
        f = self.bernoulli_f(x, 1)
        p = probe(Jet.variable(x, 2))
        q = -p.deriv() + w * p
        aa = q.deriv() + w * q
        s = f + w
        r = -p.deriv() + s * p
        bb = r.deriv() + s * r
        return np.abs(aa.v - bb.v)

    # -- partner eigenstates ---------------------------------------------------

    def _raw_mapped_jet(self, k: int, x, order: int) -> Jet:
        psi_k = self.model.psi_jet(k, x, order + 1)
        _, _, f, fw = self._pieces(x, order)
        p = psi_k.truncate(order)
        return self.energy(k) * p + f * psi_k.deriv() + fw * p

    def _raw_jet(self, k: int, x, order: int) -> Jet:
        if k == self.n:
            psi, d, _, _ = self._pieces(x, order)
            return psi / d
        return self._raw_mapped_jet(k, x, order)

    def _sign_grid(self):
        half = self.model.default_half_width
        return np.linspace(-half, half, SIGN_GRID_POINTS)

    @lru_cache(maxsize=None)
    def tilde_state(self, k: int) -> TildeState:
        """Normalization, sign and node count of the partner level k."""
        k = self.model.check(k)
        if k == self.n:
            t = self.threshold
            analytic = math.sqrt((self.C**2 - t**2) / (2.0 * t))
            norm = analytic
        else:
            analytic = 1.0 / (abs(self.energy(k)) * math.sqrt(self.model.norm_sq(k)))
            sq = specfun.integrate(
                lambda s: self._raw_mapped_jet(k, s, 0).v ** 2, -math.inf, math.inf, 1e-13, 1e-14
            )
            norm = 1.0 / math.sqrt(sq)
        grid = self._sign_grid()
        raw = self._raw_jet(k, grid, 0).v
        sign = 1 if raw[int(np.argmax(np.abs(raw)))] > 0 else -1
        nodes = node_count(sign * norm * raw)
        return TildeState(k, self.energy(k), norm, analytic, sign, nodes)

    def tilde_jet(self, k: int, x, order: int = 2) -> Jet:
        """Normalized psi~_k^(n) as a jet (missing state when k == n)."""
        st = self.tilde_state(k)
        return self._raw_jet(k, x, order) * (st.sign * st.norm_constant)

    def missing_state(self, x):
        """Normalized N(C) psi_n / D, the zero-energy level annihilated by B_n."""
        return self.tilde_jet(self.n, x, 0).v

    def mapped_state(self, k: int, x):
        """Normalized psi~_k^(n) proportional to B_n^+ A_n psi_k, for k != n."""
        if k == self.n:
            raise MissingState(f"k = n = {k} is the missing state; use missing_state")
        return self.tilde_jet(k, x, 0).v

    def unnormalized_state(self, k: int, x):
        """psi_n / D for k == n, else (E_k - E_n)^-1 B^+ A psi_k with the raw psi_k."""
        k = self.model.check(k)
        raw = self._raw_jet(k, x, 0).v
        return raw if k == self.n else raw / self.energy(k)

    def base_state_jet(self, k: int, x, order: int = 2) -> Jet:
        """Unit-norm psi_k of the base model (natural sign)."""
        return self.model.psi_jet(k, x, order) / math.sqrt(self.model.norm_sq(k))

    def inverse_map(self, k: int, x, phi: Jet) -> Jet:
        """Map partner values back: returns the unit-norm base psi_k.

        ``phi`` is a jet (order >= 2) of the normalized partner state; the
        result has two orders fewer.  The stored sign convention is undone so
        that inverse_map(mapped_state) reproduces base_state_jet exactly.
        """
        if k == self.n:
            raise MissingState(f"k = n = {k} has no preimage under A_n^+ B_n")
        st = self.tilde_state(k)
        return self.apply_adag_b(x, phi) * (st.sign / abs(self.energy(k)))

    def raise_state(self, k: int, x):
        """(B^+ A) a^+ (A^+ B) applied to psi~_k, with a^+ = -d/dx + x.

        Output is proportional to psi~_{k+1}.  Defined for harmonic
        oscillator families only: there a^+ = A_0^+ is the ladder operator.
        """
        if self.model.kind is not Kind.HARMONIC:
            raise ValueError("raising operator is only defined for harmonic oscillator families")
        k = self.model.check(k)
        if self.n in (k, k + 1):
            raise MissingState("raising to or from the missing state is undefined")
        phi = self.tilde_jet(k, x, 6)
        u = self.apply_adag_b(x, phi)
        h = -u.deriv() + Jet.variable(x, 3) * u.truncate(3)
        return self.apply_bdag_a(x, h).v
