"""Constant-mass solvable base problems.

Convention: H = -d^2/dx^2 + V (mass 1/2), so the 1D oscillator has
energies (2n+1)*omega and the 2D anisotropic oscillator
(2*n1+1)*omega1 + (2*n2+1)*omega2.

The 1D finite-difference eigensolver is dependency-free: Sturm-sequence
bisection for eigenvalues of the symmetric tridiagonal discretization,
inverse iteration for eigenvectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import CapacityError, CountError, DomainError

HERMITE_N_MAX = 200
OSC_QUANTUM_MAX = 60


def hermite_eval(n: int, u):
    """Physicists' Hermite polynomial H_n(u) by the three-term
    recurrence H_{n+1} = 2u H_n - 2n H_{n-1}."""
    if n < 0:
        raise ValueError("hermite_eval: n must be >= 0")
    if n > HERMITE_N_MAX:
        raise CapacityError("hermite_eval: n = %d exceeds cap %d" % (n, HERMITE_N_MAX))
    u = np.asarray(u, dtype=float)
    h_prev = np.ones_like(u)
    if n == 0:
        return h_prev
    h = 2.0 * u
    for m in range(1, n):
        h, h_prev = 2.0 * u * h - 2.0 * m * h_prev, h
    return h


# ---------------------------------------------------------------------------
# 1D potentials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Morse:
    """V(x) = C*(exp(-2*lam*x) - 2*exp(-lam*x)) on the full line."""

    C: float
    lam: float

    def __post_init__(self):
        if self.C <= 0 or self.lam <= 0:
            raise ValueError("Morse: C and lam must be positive")

    def v(self, x):
        e = np.exp(-self.lam * np.asarray(x, dtype=float))
        return self.C * (e * e - 2.0 * e)

    interval = (-math.inf, math.inf)
    continuum_threshold = 0.0


@dataclass(frozen=True)
class RosenMorseTrig:
    """V(x) = A*cot(lam*x)**2 + B*cot(lam*x) on (0, pi/lam)."""

    A: float
    B: float
    lam: float

    def __post_init__(self):
        if self.A <= 0 or self.B <= 0 or self.lam <= 0:
            raise ValueError("RosenMorseTrig: A, B, lam must be positive")

    @property
    def interval(self):
        return (0.0, math.pi / self.lam)

    continuum_threshold = math.inf

    def v(self, x):
        x = np.asarray(x, dtype=float)
        t = self.lam * x
        if np.any((t <= 0.0) | (t >= math.pi)):
            raise DomainError("RosenMorseTrig: x outside (0, pi/lam)")
        c = 1.0 / np.tan(t)
        return self.A * c * c + self.B * c


@dataclass(frozen=True)
class Oscillator1D:
    """V(x) = omega^2 * x^2."""

    omega: float

    def __post_init__(self):
        if self.omega <= 0:
            raise ValueError("Oscillator1D: omega must be positive")

    def v(self, x):
        x = np.asarray(x, dtype=float)
        return self.omega**2 * x * x

    interval = (-math.inf, math.inf)
    continuum_threshold = math.inf


ONE_DIM_POTENTIALS = {
    "morse": Morse,
    "rosen_morse_trig": RosenMorseTrig,
    "oscillator1d": Oscillator1D,
}


# ---------------------------------------------------------------------------
# 2D potentials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AnisotropicOscillator:
    """V(x) = omega1^2*x1^2 + omega2^2*x2^2."""

    omega1: float
    omega2: float

    def __post_init__(self):
        if self.omega1 <= 0 or self.omega2 <= 0:
            raise ValueError("AnisotropicOscillator: frequencies must be positive")

    def v(self, x):
        x1 = np.asarray(x[0], dtype=float)
        x2 = np.asarray(x[1], dtype=float)
        return self.omega1**2 * x1 * x1 + self.omega2**2 * x2 * x2


@dataclass(frozen=True)
class Separable:
    """V(x) = V1(x1) + V2(x2)."""

    v1: object
    v2: object

    def v(self, x):
        return self.v1.v(x[0]) + self.v2.v(x[1])


def potential_eval(pot, x):
    """Pointwise base-potential value at the point pair x."""
    return pot.v(x)


# ---------------------------------------------------------------------------
# 1D finite-difference eigensolver
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Grid1D:
    x0: float
    h: float
    n: int  # number of nodes, endpoints included

    def __post_init__(self):
        if self.h <= 0 or self.n < 8:
            raise ValueError("Grid1D: need h > 0 and n >= 8")

    @property
    def nodes(self):
        return self.x0 + self.h * np.arange(self.n)


@dataclass(frozen=True)
class Eigenpair1D:
    """A bound state on a uniform grid (endpoint samples are zero)."""

    energy: float
    samples: np.ndarray
    grid: Grid1D

    @property
    def norm(self):
        return math.sqrt(float(np.trapezoid(self.samples**2, dx=self.grid.h)))


def _sturm_count(d, off2, sigma):
    """Number of eigenvalues of tridiag(off, d, off) below sigma."""
    count = 0
    q = 1.0
    tiny = 1e-300
    for i in range(d.size):
        q = d[i] - sigma - (off2 / q if i > 0 else 0.0)
        if q == 0.0:
            q = -tiny
        if q < 0.0:
            count += 1
    return count


def _tridiag_solve(d, e, rhs):
    """Solve (tridiag with const off-diagonal e, diagonal d) x = rhs by
    LU with partial pivoting (stable for nearly singular shifts)."""
    m = d.size
    dl = np.full(m - 1, e)
    du = np.full(m - 1, e)
    du2 = np.zeros(max(m - 2, 0))
    dd = d.copy()
    x = rhs.copy()
    for i in range(m - 1):
        if abs(dd[i]) >= abs(dl[i]):
            if dd[i] == 0.0:
                dd[i] = 1e-300
            fac = dl[i] / dd[i]
            dd[i + 1] -= fac * du[i]
            x[i + 1] -= fac * x[i]
            if i < m - 2:
                du2[i] = 0.0
        else:
            fac = dd[i] / dl[i]
            dd[i], dl[i] = dl[i], fac
            tmp = dd[i + 1]
            dd[i + 1] = du[i] - fac * tmp
            du[i] = tmp
            if i < m - 2:
                du2[i] = du[i + 1]
                du[i + 1] = -fac * du[i + 1]
            x[i], x[i + 1] = x[i + 1], x[i] - fac * x[i + 1]
    # back substitution
    if dd[m - 1] == 0.0:
        dd[m - 1] = 1e-300
    x[m - 1] /= dd[m - 1]
    if m > 1:
        x[m - 2] = (x[m - 2] - du[m - 2] * x[m - 1]) / dd[m - 2]
    for i in range(m - 3, -1, -1):
        x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / dd[i]
    return x


def solve_1d(pot, grid: Grid1D, k: int):
    """Lowest k bound states of -d^2/dx^2 + V with Dirichlet ends.

    Eigenvalues by bisection on Sturm sequences, eigenvectors by inverse
    iteration; each pair trapezoid-normalized with the first nonzero
    sample positive.
    """
    if k < 1:
        raise ValueError("solve_1d: k must be >= 1")
    lo_x, hi_x = pot.interval
    nodes = grid.nodes
    if nodes[0] < lo_x or nodes[-1] > hi_x:
        raise DomainError("solve_1d: grid extends outside the potential domain")
    x_int = nodes[1:-1]
    h = grid.h
    d = 2.0 / h**2 + pot.v(x_int)
    e = -1.0 / h**2
    off2 = e * e
    m = d.size

    threshold = pot.continuum_threshold
    if math.isfinite(threshold):
        n_bound = _sturm_count(d, off2, threshold)
        if n_bound < k:
            raise CountError(
                "solve_1d: only %d bound state(s) below the continuum "
                "threshold, %d requested" % (n_bound, k), available=n_bound)
    elif k > m:
        raise CountError("solve_1d: matrix has only %d levels" % m, available=m)

    lo = float(np.min(d)) - 2.0 * abs(e)
    hi = float(np.max(d)) + 2.0 * abs(e)
    scale = max(abs(lo), abs(hi), 1.0)

    energies = []
    for level in range(1, k + 1):
        a, b = lo, hi
        while b - a > 1e-14 * scale:
            mid = 0.5 * (a + b)
            if _sturm_count(d, off2, mid) >= level:
                b = mid
            else:
                a = mid
        energies.append(0.5 * (a + b))

    pairs = []
    vectors = []
    rng = np.random.default_rng(12345)
    for level, lam in enumerate(energies):
        shift = lam + 1e-11 * scale
        near = [j for j in range(level) if abs(energies[j] - lam) < 1e-8 * scale]
        v = rng.standard_normal(m)
        for _ in range(4):
            for j in near:
                v -= np.dot(vectors[j], v) * vectors[j]
            v = _tridiag_solve(d - shift, e, v)
            v /= np.linalg.norm(v)
        for j in near:
            v -= np.dot(vectors[j], v) * vectors[j]
        v /= np.linalg.norm(v)
        vectors.append(v.copy())

        samples = np.zeros(grid.n)
        samples[1:-1] = v
        samples /= math.sqrt(float(np.trapezoid(samples**2, dx=h)))
        nz = np.flatnonzero(np.abs(samples) > 1e-8 * np.max(np.abs(samples)))
        if samples[nz[0]] < 0:
            samples = -samples
        pairs.append(Eigenpair1D(energy=lam, samples=samples, grid=grid))
    return pairs


# ---------------------------------------------------------------------------
# base eigenstates
# ---------------------------------------------------------------------------


def _osc1d_lognorm(n: int, omega: float) -> float:
    # (omega/pi)^(1/4) / sqrt(2^n n!)
    return 0.25 * math.log(omega / math.pi) - 0.5 * (
        n * math.log(2.0) + math.lgamma(n + 1.0))


def osc1d_eval(n: int, omega: float, x):
    """Normalized 1D oscillator eigenfunction psi_n for V = omega^2 x^2."""
    x = np.asarray(x, dtype=float)
    u = math.sqrt(omega) * x
    return math.exp(_osc1d_lognorm(n, omega)) * hermite_eval(n, u) * np.exp(-0.5 * u * u)


@dataclass(frozen=True)
class OscillatorState:
    """Analytic product Hermite-Gaussian state of the 2D anisotropic
    oscillator."""

    n1: int
    n2: int
    omega1: float
    omega2: float

    def __post_init__(self):
        if self.n1 < 0 or self.n2 < 0:
            raise ValueError("OscillatorState: quantum numbers must be >= 0")
        if max(self.n1, self.n2) > OSC_QUANTUM_MAX:
            raise CapacityError("OscillatorState: quantum number cap is %d"
                                % OSC_QUANTUM_MAX)

    @property
    def energy(self):
        return (2 * self.n1 + 1) * self.omega1 + (2 * self.n2 + 1) * self.omega2

    def eval(self, x):
        return (osc1d_eval(self.n1, self.omega1, x[0])
                * osc1d_eval(self.n2, self.omega2, x[1]))


def oscillator_state(omega1, omega2, n1, n2) -> OscillatorState:
    return OscillatorState(n1=n1, n2=n2, omega1=omega1, omega2=omega2)


class SeparableState:
    """Product of two numerically solved 1D bound states; off-grid
    evaluation by cubic interpolation (zero outside the grids)."""

    def __init__(self, e1: Eigenpair1D, e2: Eigenpair1D):
        self.e1 = e1
        self.e2 = e2
        self._s1 = CubicSpline(e1.grid.nodes, e1.samples)
        self._s2 = CubicSpline(e2.grid.nodes, e2.samples)

    @property
    def energy(self):
        return self.e1.energy + self.e2.energy

    def _eval1(self, spline, grid, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        inside = (x >= grid.nodes[0]) & (x <= grid.nodes[-1])
        out[inside] = spline(x[inside])
        return out

    def eval(self, x):
        x1 = np.asarray(x[0], dtype=float)
        x2 = np.asarray(x[1], dtype=float)
        return (self._eval1(self._s1, self.e1.grid, x1)
                * self._eval1(self._s2, self.e2.grid, x2))


def base_state_eval(state, x):
    """Evaluate a base eigenstate at the point pair x."""
    return state.eval(x)
