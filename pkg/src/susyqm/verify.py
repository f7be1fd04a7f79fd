"""Self-checks grouped into named suites, as run by ``susyqm verify``."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import closed_forms, oracle, specfun
from .models import CPRS, HARMONIC, cprs_ode_identity, cprs_poly, ho_tail
from .specfun import SQRT_PI, Jet
from .susy import PartnerFamily, superpotential_jet

# (model, seed n, C) for the three worked examples
REFERENCE_FAMILIES = ((HARMONIC, 0, 1.0), (HARMONIC, 1, 3.0), (CPRS, 3, 21.5))


@dataclass
class Check:
    name: str
    measured: float
    tolerance: float
    passed: bool

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"

    def as_dict(self) -> dict:
        d = asdict(self)
        d["status"] = self.status
        return d


@dataclass
class VerifyReport:
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self) -> dict:
        return {"passed": self.passed, "checks": [c.as_dict() for c in self.checks]}


def _check(name: str, measured, tol: float) -> Check:
    m = float(measured)
    return Check(name, m, tol, bool(m <= tol))


def reference_families():
    return [PartnerFamily(m, n, c) for m, n, c in REFERENCE_FAMILIES]


def _label(fam: PartnerFamily) -> str:
    return f"{fam.model.name}/n={fam.n}/C={fam.C:g}"


def _erf_series(x: float) -> float:
    # exp(-x^2) * sum 2^j x^(2j+1) / (2j+1)!!, all terms positive
    term = x
    total = x
    j = 0
    while abs(term) > 1e-18 * abs(total):
        j += 1
        term *= 2.0 * x * x / (2 * j + 1)
        total += term
    return 2.0 / SQRT_PI * math.exp(-x * x) * total


def suite_specfun() -> list:
    out = []
    xs = [0.3, 1.0, 1.1, 2.0, 2.9]
    err = max(abs(float(specfun.erf(x)) - _erf_series(x)) for x in xs)
    out.append(_check("erf vs power series", err, 1e-14))

    x = np.random.default_rng(0).uniform(-3, 3, 50)
    worst = 0.0
    for n in range(11):
        h = specfun.hermite_jet(n, x)
        res = h.d2 - 2 * x * h.d1 + 2 * n * h.v
        scale = np.abs(h.d2) + np.abs(2 * x * h.d1) + np.abs(2 * n * h.v) + 1.0
        worst = max(worst, float(np.max(np.abs(res) / scale)))
    out.append(_check("Hermite ODE residual", worst, 1e-9))

    worst = 0.0
    for n in range(7):
        for b in (0.5, 1.0, 2.0, 4.0):
            q = specfun.integrate(lambda s: np.exp(-s * s) * specfun.hermite(n, s) ** 2, 0.0, b)
            worst = max(worst, abs(q - float(ho_tail(n, b))) / max(1.0, abs(q)))
    out.append(_check("1F1 sum vs quadrature", worst, 1e-10))
    return out


def suite_models() -> list:
    out = []
    x = np.linspace(-6, 6, 200)
    for model in (HARMONIC, CPRS):
        worst = 0.0
        for k in [k for k in model.indices(9) if k <= 8]:
            p = model.psi_jet(k, x)
            res = -p.d2 + (model.base_potential(0, x) - model.energy(k)) * p.v
            worst = max(worst, float(np.max(np.abs(res) / np.maximum(1.0, np.abs(p.v)))))
        out.append(_check(f"{model.name} Schrodinger residual", worst, 1e-9))

    worst = 0.0
    for n in range(7):
        q = specfun.integrate(lambda s: HARMONIC.psi(n, s) ** 2, 0.0, math.inf)
        worst = max(worst, abs(q / HARMONIC.half_line_norm(n) - 1.0))
    for n in (3, 4, 5):
        q = specfun.integrate(lambda s: CPRS.psi(n, s) ** 2, 0.0, math.inf)
        worst = max(worst, abs(q / CPRS.half_line_norm(n) - 1.0))
    out.append(_check("threshold formulas vs quadrature", worst, 1e-9))

    worst = 0.0
    for n in (3, 4, 5):
        for b in (0.5, 1.0, 2.0):
            q = specfun.integrate(lambda s: CPRS.psi(n, s) ** 2, 0.0, b)
            worst = max(worst, abs(q - float(CPRS.tail_integral(n, b))))
    out.append(_check("CPRS tail integral vs quadrature", worst, 1e-10))
    return out


def cprs_poly_jet(n: int, x: Jet) -> Jet:
    return specfun.poly_jet(cprs_poly(n).coeffs, x)


def suite_cprs_identities() -> list:
    out = []
    mismatch = 0
    for n in range(3, 11):
        lhs = cprs_poly(n).deriv_coeffs()
        # 4n (2x^2 + 1) H_{n-3}
        h = specfun.hermite_coeffs(n - 3)
        rhs = [0] * (len(h) + 2)
        for i, a in enumerate(h):
            rhs[i] += 4 * n * a
            rhs[i + 2] += 8 * n * a
        width = max(len(lhs), len(rhs))
        lhs = list(lhs) + [0] * (width - len(lhs))
        rhs = rhs + [0] * (width - len(rhs))
        mismatch = max(mismatch, max(abs(a - b) for a, b in zip(lhs, rhs)))
    out.append(_check("P_n' = 4n(2x^2+1)H_{n-3} coefficients", mismatch, 0.0))

    rng = np.random.default_rng(1)
    worst = 0.0
    for n in range(3, 11):
        x = rng.uniform(-3, 3, 20)
        worst = max(worst, float(np.max(np.abs(cprs_ode_identity(n, x) - 2 * n))))
    out.append(_check("CPRS ODE identity = 2n", worst, 1e-9))

    worst = 0.0
    for n in range(3, 11):
        x = Jet.variable(rng.uniform(-3, 3, 20), 1)
        q = 2.0 * (x * x) + 1.0
        g = specfun.exp(-(x * x))
        lhs = cprs_poly_jet(n, x) * g / (q * q)
        rhs = -2.0 * (specfun.hermite_jet(n - 3, x) * g / q).deriv()
        worst = max(worst, float(np.max(np.abs(lhs.v - rhs.v) / np.maximum(1.0, np.abs(lhs.v)))))
    out.append(_check("CPRS divergence identity", worst, 1e-9))
    return out


def suite_susy() -> list:
    out = []
    x = np.linspace(-5, 5, 401)
    for fam in reference_families():
        tag = _label(fam)
        psi = fam.model.psi_jet(fam.n, x, 1)
        away = np.abs(psi.v) > 1e-3 * np.max(np.abs(psi.v))
        xa = x[away]
        w = superpotential_jet(fam.model, fam.n, xa, 1)
        f = fam.bernoulli_f(xa, 1)
        res = f.d1 + 2 * w.v * f.v + f.v**2
        out.append(_check(f"{tag} Bernoulli residual", np.max(np.abs(res)), 1e-9))

        pa = fam.model.psi_jet(fam.n, xa, 1)
        out.append(_check(f"{tag} A_n psi_n", np.max(np.abs(pa.d1 + w.v * pa.v)), 1e-10))

        # B_n psi~_n with W psi~_n written as -N psi_n' / D (finite at nodes)
        st = fam.tilde_state(fam.n)
        m = fam.tilde_jet(fam.n, x, 1)
        psi_n, d, fj, _ = fam._pieces(x, 1)
        b_res = m.d1 + fj.v * m.v - st.sign * st.norm_constant * psi_n.d1 / d.v
        out.append(_check(f"{tag} B_n psi~_n", np.max(np.abs(b_res)), 1e-10))

        pts = np.linspace(-3, 3, 20)
        pts = pts[np.abs(fam.model.psi(fam.n, pts)) > 1e-6]
        fc = max(
            float(fam.factorization_check(p, lambda t: specfun.exp(-(t * t)))) for p in pts
        )
        out.append(_check(f"{tag} A A^+ = B B^+", fc, 1e-8))

        xs = np.linspace(-8, 8, 500)
        v = fam.partner_potential(xs)
        worst_res = 0.0
        gram = []
        node_failures = 0
        levels = fam.model.indices(6)
        for k in levels:
            j = fam.tilde_jet(k, xs)
            r = -j.d2 + v * j.v - fam.energy(k) * j.v
            worst_res = max(worst_res, float(np.max(np.abs(r) / np.maximum(1.0, np.abs(j.v)))))
            node_failures += int(fam.tilde_state(k).node_count != fam.model.position(k))
        out.append(_check(f"{tag} eigen-residuals", worst_res, 1e-8))
        out.append(_check(f"{tag} node preservation failures", node_failures, 0))

        low = levels[:4]
        for a in low:
            gram.append(
                [
                    specfun.integrate(
                        lambda s: fam.tilde_jet(a, s, 0).v * fam.tilde_jet(b, s, 0).v,
                        -math.inf,
                        math.inf,
                        1e-12,
                    )
                    for b in low
                ]
            )
        out.append(_check(f"{tag} Gram matrix", np.max(np.abs(np.array(gram) - np.eye(4))), 1e-6))

        worst_norm = max(
            abs(fam.tilde_state(k).norm_constant / fam.tilde_state(k).analytic_norm - 1.0)
            for k in levels
        )
        out.append(_check(f"{tag} quadrature vs analytic norm", worst_norm, 1e-8))
    return out


def suite_printed() -> list:
    out = []
    xs = np.linspace(-8, 8, 500)
    families = {(f.model.name, f.n): f for f in reference_families()}
    for model, n, k, energy, func in closed_forms.PRINTED_STATES:
        fam = families[(model, n)]
        j = func(fam.C, xs)
        r = -j.d2 + fam.partner_potential(xs) * j.v - energy * j.v
        err = np.max(np.abs(r) / np.maximum(1.0, np.abs(j.v)))
        out.append(_check(f"printed psi~_{k}^({n}) {model} residual", err, 1e-8))

    pts = np.array([0.0, 1.0, -1.0, 2.0, -2.0])
    for fam in reference_families():
        printed = closed_forms.printed_potential(fam.model.name, fam.n, fam.C, pts)
        diff = np.max(np.abs(printed - fam.partner_potential(pts)))
        out.append(_check(f"{_label(fam)} printed potential", diff, 1e-10))
    return out


def suite_oracle() -> list:
    out = []
    for fam in reference_families():
        tag = _label(fam)
        grid = oracle.Grid(fam.model.default_half_width, 4000)
        got = oracle.richardson_spectrum(fam.partner_potential, grid, 4)
        want = np.array([fam.energy(k) for k in fam.model.indices(4)])
        out.append(_check(f"{tag} spectrum", np.max(np.abs(got - want)), 1e-3))
        if fam.model is CPRS:
            gap = min(abs(e - 2.0 * (k - fam.n)) for e in got for k in (1, 2))
            # passes when every eigenvalue stays at least 0.5 away
            out.append(Check(f"{tag} absent levels distance", gap, 0.5, bool(gap > 0.5)))
    return out


SUITES = {
    "specfun": suite_specfun,
    "models": suite_models,
    "cprs-identities": suite_cprs_identities,
    "susy": suite_susy,
    "printed": suite_printed,
    "oracle": suite_oracle,
}


def run(suites=None) -> VerifyReport:
    names = list(SUITES) if not suites else list(suites)
    report = VerifyReport()
    for name in names:
        if name not in SUITES:
            raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
        report.checks.extend(SUITES[name]())
    return report
