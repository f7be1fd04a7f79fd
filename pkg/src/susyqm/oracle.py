"""Independent finite-difference check of 1D Schrodinger spectra.

-d^2/dx^2 + V on [-L, L] with Dirichlet walls is discretized by the
three-point stencil into a symmetric tridiagonal matrix.  The lowest
eigenvalues are bracketed by Sturm-sequence counts and bisected; the
eigenvectors then come from shifted inverse iteration.  Nothing in here
knows about the closed forms it is used to check.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import solve_banded

from .errors import ConvergenceFailure, GridMismatch, NonFinitePotential

BISECTION_TOL = 1e-10
INVERSE_SHIFT = 1e-8
MAX_SWEEPS = 50
NOISE_FLOOR = 1e-9


@dataclass(frozen=True)
class Grid:
    """``N`` interior points of [-L, L], spacing h = 2L/(N+1)."""

    L: float
    N: int

    def __post_init__(self):
        if self.N < 3:
            raise ValueError("grid needs at least 3 interior points")
        if not self.L > 0:
            raise ValueError("half-width must be positive")

    @property
    def h(self) -> float:
        return 2.0 * self.L / (self.N + 1)

    @property
    def points(self) -> np.ndarray:
        return -self.L + self.h * np.arange(1, self.N + 1)

    def refined(self) -> "Grid":
        """Same box, half the spacing (2N + 1 interior points)."""
        return Grid(self.L, 2 * self.N + 1)


@dataclass(frozen=True)
class Tridiagonal:
    diag: np.ndarray
    off: np.ndarray
    grid: Grid


@dataclass(frozen=True)
class Spectrum:
    energies: np.ndarray
    node_counts: list
    grid: Grid
    vectors: np.ndarray  # shape (m, N); each sum(v**2) * h == 1


def discretize(potential: Callable, grid: Grid) -> Tridiagonal:
    v = np.asarray(potential(grid.points), dtype=float)
    if v.shape != (grid.N,):
        v = np.broadcast_to(v, (grid.N,)).astype(float)
    if not np.all(np.isfinite(v)):
        bad = grid.points[~np.isfinite(v)][0]
        raise NonFinitePotential(f"potential is not finite at x={bad}")
    h2 = grid.h**2
    return Tridiagonal(2.0 / h2 + v, np.full(grid.N - 1, -1.0 / h2), grid)


def sturm_count(diag, off_sq, lam: float) -> int:
    """Number of eigenvalues strictly below ``lam`` (LDL^T inertia)."""
    count = 0
    q = diag[0] - lam
    if q < 0:
        count += 1
    for i in range(1, len(diag)):
        if q == 0.0:
            q = 1e-300
        q = diag[i] - lam - off_sq[i - 1] / q
        if q < 0:
            count += 1
    return count


def eigenvalues_lowest(op: Tridiagonal, m: int, tol: float = BISECTION_TOL) -> np.ndarray:
    """The ``m`` lowest eigenvalues by bisection on Sturm counts."""
    n = len(op.diag)
    if not 1 <= m <= n:
        raise ValueError(f"cannot extract {m} eigenvalues from an order-{n} matrix")
    diag = op.diag.tolist()
    off_sq = (op.off**2).tolist()
    radius = 2.0 * float(np.max(np.abs(op.off))) if n > 1 else 0.0
    lo = float(np.min(op.diag)) - radius
    step = 1.0
    hi = lo + step
    while sturm_count(diag, off_sq, hi) < m:
        step *= 2.0
        hi = lo + step
        if step > 1e300:
            raise ConvergenceFailure("could not bracket the requested eigenvalues")

    out = np.empty(m)
    # lower[j] < lambda_j <= upper[j], tightened by every count evaluated
    lower = [lo] * m
    upper = [hi] * m
    for j in range(m):
        a, b = lower[j], upper[j]
        iters = 0
        while b - a > tol:
            mid = 0.5 * (a + b)
            c = sturm_count(diag, off_sq, mid)
            if c > j:
                b = mid
            else:
                a = mid
            for i in range(j + 1, m):
                if c > i:
                    upper[i] = min(upper[i], mid)
                else:
                    lower[i] = max(lower[i], mid)
            iters += 1
            if iters > 200:
                raise ConvergenceFailure(f"bisection stalled on eigenvalue {j}")
        out[j] = 0.5 * (a + b)
    return out


def inverse_iteration(op: Tridiagonal, lam: float) -> np.ndarray:
    """Unit-norm (sum v^2 h = 1) eigenvector for the eigenvalue near ``lam``."""
    n = len(op.diag)
    h = op.grid.h
    ab = np.zeros((3, n))
    ab[0, 1:] = op.off
    ab[1] = op.diag - (lam + INVERSE_SHIFT)
    ab[2, :-1] = op.off
    # deterministic start with no symmetry, so no eigenvector is missed
    v = np.linspace(1.0, 2.0, n)
    v /= np.sqrt(np.sum(v * v) * h)
    for _ in range(MAX_SWEEPS):
        w = solve_banded((1, 1), ab, v)
        w /= np.sqrt(np.sum(w * w) * h)
        w *= _sign(w)
        if np.max(np.abs(w - v)) < 1e-11:
            return w
        v = w
    raise ConvergenceFailure(f"inverse iteration did not converge near {lam}")


def _sign(v: np.ndarray) -> float:
    return 1.0 if v[int(np.argmax(np.abs(v)))] > 0 else -1.0


def node_count(samples) -> int:
    """Strict sign changes, ignoring samples below 1e-9 of the peak modulus."""
    s = np.asarray(samples, dtype=float)
    peak = np.max(np.abs(s)) if s.size else 0.0
    kept = s[np.abs(s) > NOISE_FLOOR * peak]
    if kept.size < 2:
        return 0
    signs = np.sign(kept)
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


def eigen_lowest(op: Tridiagonal, m: int) -> Spectrum:
    energies = eigenvalues_lowest(op, m)
    vectors = np.array([inverse_iteration(op, e) for e in energies])
    nodes = [node_count(v) for v in vectors]
    return Spectrum(energies, nodes, op.grid, vectors)


def solve(potential: Callable, grid: Grid, m: int) -> Spectrum:
    return eigen_lowest(discretize(potential, grid), m)


def overlap(f, g, grid: Grid) -> float:
    """Inner product of two sampled functions (trapezoid; walls are zero)."""
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    if f.shape != (grid.N,) or g.shape != (grid.N,):
        raise GridMismatch(f"expected {grid.N} samples, got {f.shape} and {g.shape}")
    return float(np.dot(f, g) * grid.h)


def richardson(coarse, fine):
    """(4 E_{h/2} - E_h) / 3: cancels the O(h^2) term of the stencil."""
    return (4.0 * np.asarray(fine) - np.asarray(coarse)) / 3.0


def richardson_spectrum(potential: Callable, grid: Grid, m: int) -> np.ndarray:
    coarse = eigenvalues_lowest(discretize(potential, grid), m)
    fine = eigenvalues_lowest(discretize(potential, grid.refined()), m)
    return richardson(coarse, fine)
