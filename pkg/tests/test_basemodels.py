"""Base constant-mass models and the dependency-free 1D eigensolver."""

import math

import numpy as np
import pytest
from scipy.linalg import eigh_tridiagonal

from pdmmap.basemodels import (Grid1D, Morse, Oscillator1D, RosenMorseTrig,
                               hermite_eval, oscillator_state, osc1d_eval,
                               solve_1d)
from pdmmap.errors import CountError


# -- Hermite polynomials ----------------------------------------------------


def test_hermite_small_values():
    assert hermite_eval(0, 0.7) == 1.0
    assert hermite_eval(1, 0.7) == pytest.approx(1.4)
    assert hermite_eval(2, 0.5) == pytest.approx(4 * 0.25 - 2)
    assert hermite_eval(3, 1.0) == pytest.approx(-4.0)  # 8 - 12


def test_hermite_recurrence_consistency():
    rng = np.random.default_rng(2)
    u = rng.uniform(-3, 3, 50)
    for n in range(2, 12):
        lhs = hermite_eval(n + 1, u)
        rhs = 2 * u * hermite_eval(n, u) - 2 * n * hermite_eval(n - 1, u)
        assert np.allclose(lhs, rhs, rtol=1e-12, atol=1e-9)


def test_oscillator_1d_state_normalized():
    x = np.linspace(-12, 12, 20001)
    for n in (0, 1, 5, 20):
        vals = osc1d_eval(n, 1.3, x)
        integral = np.trapezoid(vals**2, x)
        assert integral == pytest.approx(1.0, abs=1e-8)


# -- 1D eigensolver ---------------------------------------------------------


def _morse_energy(C, lam, n):
    return -((math.sqrt(C) - lam * (n + 0.5)) ** 2)


def test_morse_spectrum_converges_second_order():
    pot = Morse(C=25.0, lam=1.0)
    exact = [_morse_energy(25.0, 1.0, n) for n in (0, 1)]
    errs = []
    for h in (0.02, 0.01):
        n = int(round(18.0 / h)) + 1
        pairs = solve_1d(pot, Grid1D(x0=-3.0, h=h, n=n), 2)
        errs.append(max(abs(pairs[k].energy - exact[k]) for k in range(2)))
    assert errs[1] < 1e-3
    order = math.log(errs[0] / errs[1]) / math.log(2.0)
    assert 1.8 <= order <= 2.2


def test_oscillator_spectrum_converges_second_order():
    pot = Oscillator1D(omega=1.0)
    errs = []
    for h in (0.02, 0.01):
        n = int(round(16.0 / h)) + 1
        pairs = solve_1d(pot, Grid1D(x0=-8.0, h=h, n=n), 3)
        errs.append(max(abs(pairs[k].energy - (2 * k + 1)) for k in range(3)))
    order = math.log(errs[0] / errs[1]) / math.log(2.0)
    assert errs[1] < 1e-3
    assert 1.8 <= order <= 2.2


def test_rosen_morse_trig_solves_on_interval():
    pot = RosenMorseTrig(A=2.0, B=1.5, lam=1.0)
    h = math.pi / 2000
    pairs = solve_1d(pot, Grid1D(x0=h, h=h, n=1999), 2)
    assert pairs[0].energy < pairs[1].energy
    for p in pairs:
        assert p.norm == pytest.approx(1.0, abs=1e-10)


def test_eigensolver_against_scipy_oracle():
    pot = Morse(C=25.0, lam=1.0)
    h = 0.02
    n = int(round(18.0 / h)) + 1
    grid = Grid1D(x0=-3.0, h=h, n=n)
    pairs = solve_1d(pot, grid, 2)
    x = grid.nodes[1:-1]
    d = 2.0 / h**2 + pot.v(x)
    e = np.full(x.size - 1, -1.0 / h**2)
    ref = eigh_tridiagonal(d, e, select="i", select_range=(0, 1),
                           eigvals_only=True)
    for k in range(2):
        assert pairs[k].energy == pytest.approx(ref[k], abs=1e-9)


def test_eigenvectors_orthonormal():
    pot = Oscillator1D(omega=1.0)
    grid = Grid1D(x0=-8.0, h=0.01, n=1601)
    pairs = solve_1d(pot, grid, 4)
    for i in range(4):
        assert pairs[i].norm == pytest.approx(1.0, abs=1e-10)
        for j in range(i):
            ip = np.trapezoid(pairs[i].samples * pairs[j].samples, dx=grid.h)
            assert abs(ip) < 1e-8


def test_numeric_oscillator_state_matches_analytic():
    grid = Grid1D(x0=-8.0, h=0.005, n=3201)
    pairs = solve_1d(Oscillator1D(omega=1.0), grid, 2)
    x = np.linspace(-3, 3, 101)
    for k in range(2):
        num = np.interp(x, grid.nodes, pairs[k].samples)
        ana = osc1d_eval(k, 1.0, x)
        s = 1.0 if float(np.dot(num, ana)) >= 0 else -1.0
        assert np.max(np.abs(s * num - ana)) < 1e-4


def test_sign_convention_first_nonzero_positive():
    grid = Grid1D(x0=-8.0, h=0.01, n=1601)
    pairs = solve_1d(Oscillator1D(omega=1.0), grid, 3)
    for p in pairs:
        nz = p.samples[np.abs(p.samples) > 1e-12]
        assert nz[0] > 0


def test_too_many_bound_states_requested():
    # Morse C=25, lam=1 has bound states only for n <= 4
    pot = Morse(C=25.0, lam=1.0)
    grid = Grid1D(x0=-3.0, h=0.02, n=901)
    with pytest.raises(CountError):
        solve_1d(pot, grid, 12)


def test_oscillator_state_energy():
    st = oscillator_state(1.0, math.sqrt(2.0), 0, 0)
    assert st.energy == pytest.approx(1.0 + math.sqrt(2.0))
    st2 = oscillator_state(1.0, math.sqrt(2.0), 1, 0)
    assert st2.energy == pytest.approx(3.0 + math.sqrt(2.0))
