"""Discretization and check machinery."""

import math
import os

import numpy as np
import pytest

from pdmmap.basemodels import AnisotropicOscillator, oscillator_state
from pdmmap.errors import ExtentError
from pdmmap.maps import make_family
from pdmmap.pdm import PDMModel, TransformedState, potential_U
from pdmmap.verify import (Field2D, Grid2D, VerificationReport,
                           annulus_region, apply_pdm_hamiltonian,
                           convergence_study, default_mask_eps,
                           eigen_residual, eval_on_grid, field_from_csv,
                           grid_for_model, hermiticity_decay,
                           normalization_check, symmetry_check)

W2 = math.sqrt(2.0)


def strip_model():
    fam = make_family("log", alpha=1.0, gamma=1.0, delta=0.0)
    return PDMModel(fam, AnisotropicOscillator(omega1=1.0, omega2=W2))


def radial_model():
    fam = make_family("quadratic", a=0.125)
    return PDMModel(fam, AnisotropicOscillator(omega1=1.0, omega2=W2))


def test_default_mask_eps():
    assert default_mask_eps(0.01) == pytest.approx(0.03)
    assert default_mask_eps(1e-5) == pytest.approx(1e-3)


def test_grid_requires_interior():
    with pytest.raises(ValueError):
        Grid2D(origin=(0, 0), h=0.1, nx=8, ny=8,
               mask=np.ones((8, 8), dtype=bool))


def test_annulus_mask():
    model = radial_model()
    g = grid_for_model(model, (-3, -3), 0.1, 61, 61,
                       region=annulus_region(0.5, 2.5))
    g1, g2 = g.mesh()
    rho = np.hypot(g1, g2)
    ok = ~g.mask
    assert np.all(rho[ok] >= 0.5)
    assert np.all(rho[ok] <= 2.5)


def test_hamiltonian_on_constant_field_gives_potential():
    # flux terms cancel exactly on a constant field
    model = strip_model()
    g = grid_for_model(model, (-1.0, -1.0), 0.05, 41, 41)
    f = eval_on_grid(g, lambda a, b: np.ones_like(a))
    hf = apply_pdm_hamiltonian(model, f)
    g1, g2 = g.mesh()
    u = potential_U(model, (g1[hf.valid], g2[hf.valid]))
    assert np.max(np.abs(hf.values[hf.valid] - u)) < 1e-11


def test_hamiltonian_quadratic_field_exact():
    # with constant mass (gamma=1, alpha->0 is outside the catalog, so
    # synthesize: use the log family at tiny alpha and a quadratic
    # field; the second difference of y1^2 is exactly 2)
    fam = make_family("log", alpha=1e-8, gamma=0.5, delta=0.0)
    model = PDMModel(fam, AnisotropicOscillator(omega1=1.0, omega2=1.0))
    g = grid_for_model(model, (-1.0, -1.0), 0.05, 41, 41)
    f = eval_on_grid(g, lambda a, b: a**2)
    hf = apply_pdm_hamiltonian(model, f)
    g1, g2 = g.mesh()
    u = potential_U(model, (g1[hf.valid], g2[hf.valid]))
    # 1/M = 4|f'|^2 = 1/gamma^2 = 4, so -d(1/M)d(y1^2) = -8
    expect = -8.0 + u * g1[hf.valid] ** 2
    assert np.max(np.abs(hf.values[hf.valid] - expect)) < 1e-9


def test_symmetry_conservative_vs_control():
    model = strip_model()
    g = grid_for_model(model, (-2.0, -2.0), 0.1, 41, 41)
    assert symmetry_check(model, g, conservative=True) < 1e-12
    # the non-symmetric control sits many orders above the tolerance
    assert symmetry_check(model, g, conservative=False) > 1e-6


def test_eigen_residual_and_convergence_study():
    model = strip_model()
    ts = TransformedState(model, oscillator_state(1.0, W2, 0, 0))
    res = convergence_study(model, ts, [0.08, 0.04, 0.02],
                            (-3.0, 2.0, -3.0, 3.0))
    assert res[0]["order"] is None
    for entry in res[1:]:
        assert 1.8 <= entry["order"] <= 2.2
    assert res[-1]["residual"] <= 5e-3


def test_convergence_study_rejects_bad_h_list():
    model = strip_model()
    ts = TransformedState(model, oscillator_state(1.0, W2, 0, 0))
    with pytest.raises(ValueError):
        convergence_study(model, ts, [0.04, 0.08, 0.02],
                          (-3.0, 2.0, -3.0, 3.0))


def test_normalization_strip_state():
    model = strip_model()
    ts = TransformedState(model, oscillator_state(1.0, W2, 0, 0))
    h = 4.0 * math.pi / 280
    nx = int(round(18.0 / h)) + 1
    g = grid_for_model(model, (-14.0, -2.0 * math.pi), h, nx, 280)
    val = normalization_check(model, ts, g, periodic_y2=True)
    assert val == pytest.approx(1.0, abs=1e-3)


def test_normalization_scaling_quadratic():
    model = strip_model()
    ts = TransformedState(model, oscillator_state(1.0, W2, 0, 0))

    class Scaled:
        energy = ts.energy

        def eval(self, y):
            return 3.0 * ts.eval(y)

    h = 4.0 * math.pi / 280
    nx = int(round(18.0 / h)) + 1
    g = grid_for_model(model, (-14.0, -2.0 * math.pi), h, nx, 280)
    base = normalization_check(model, ts, g, periodic_y2=True)
    scaled = normalization_check(model, Scaled(), g, periodic_y2=True,
                                 extent_tol=1e-5)
    assert scaled == pytest.approx(9.0 * base, rel=1e-12)


def test_normalization_extent_error():
    model = strip_model()
    ts = TransformedState(model, oscillator_state(1.0, W2, 0, 0))
    g = grid_for_model(model, (-2.0, -2.0), 0.1, 21, 21)
    with pytest.raises(ExtentError):
        normalization_check(model, ts, g)


def test_hermiticity_decay_ratio():
    model = strip_model()
    ts = TransformedState(model, oscillator_state(1.0, W2, 0, 0))
    boundary = [(-35.0, t) for t in np.linspace(-6.0, 6.0, 25)]
    interior = [(t, 0.0) for t in np.linspace(-6.0, 2.0, 40)]
    assert hermiticity_decay(model, ts, boundary, interior) < 1e-6


def test_field_csv_roundtrip_bit_exact(tmp_path):
    model = strip_model()
    g = grid_for_model(model, (-1.0, -1.0), 0.1, 21, 21)
    rng = np.random.default_rng(8)
    f = Field2D(grid=g, values=rng.standard_normal((21, 21)))
    path = os.path.join(tmp_path, "f.csv")
    f.to_csv(path)
    y1, y2, vals = field_from_csv(path)
    g1, g2 = g.mesh()
    assert np.array_equal(vals, f.values.ravel())
    assert np.array_equal(y1, g1.ravel())
    assert np.array_equal(y2, g2.ravel())


def test_report_pass_fail_and_json():
    rep = VerificationReport(model="m", grid={"h": 0.1})
    rep.add_check("a", 1e-13, 1e-12)
    assert rep.all_passed
    rep.add_check("b", 2.0, 1.0, notes="deliberate")
    assert not rep.all_passed
    lines = rep.summary_lines()
    assert any("PASS" in ln for ln in lines)
    assert any("FAIL" in ln for ln in lines)
    data = rep.to_json()
    assert '"pass": false' in data
