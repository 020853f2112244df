"""Map families: inversion, conformality, derivative oracles, domains."""

import math

import numpy as np
import pytest

from pdmmap.errors import SingularityError
from pdmmap.jets import oracle_derivs
from pdmmap.maps import FAMILY_CLASSES, make_family
from pdmmap.verify import Grid2D, cauchy_riemann_residual, metric_residual

FAMILIES = {
    "log": dict(alpha=1.3, gamma=0.7, delta=0.0),
    "asinh": dict(lam=0.9, A=1.1),
    "power": dict(lam=1.5, beta=2.0, alpha_shift=0.0),
    "exp_radial": dict(beta=1.7, gamma=0.6),
    "inverse": dict(b=1.2),
    "quadratic": dict(a=0.125),
    "logistic": dict(a=0.8, b=0.5, lam=1.1),
}


def all_families():
    return [make_family(name, **params) for name, params in FAMILIES.items()]


@pytest.mark.parametrize("name", sorted(FAMILIES))
def test_roundtrip_x_of_y_of_x(name):
    fam = make_family(name, **FAMILIES[name])
    rng = np.random.default_rng(3)
    z = fam.sample_z(500, rng)
    y = fam.y_of_x((z.real, z.imag))
    x1, x2 = fam.x_of_y(y)
    err = np.hypot(x1 - z.real, x2 - z.imag) / np.maximum(1.0, np.abs(z))
    assert np.max(err) < 1e-10


@pytest.mark.parametrize("name", sorted(FAMILIES))
def test_derivatives_match_jet_oracle(name):
    fam = make_family(name, **FAMILIES[name])
    rng = np.random.default_rng(5)
    z = fam.sample_z(200, rng)
    fp, fpp = fam.f_derivs(z)
    for k in range(len(z)):
        fo, fpo, fppo = oracle_derivs(fam, complex(z[k]))
        assert abs(fp[k] - fpo) <= 1e-12 * max(1.0, abs(fpo))
        assert abs(fpp[k] - fppo) <= 1e-12 * max(1.0, abs(fppo))
        fv = fam.f_of_z(np.asarray([z[k]]))[0]
        assert abs(fv - fo) <= 1e-12 * max(1.0, abs(fo))


# box centers chosen away from each family's singular sets
_Z0 = {"log": 1.0 + 0.5j, "asinh": 0.8 + 0.4j, "power": 1.2 + 0.6j,
       "exp_radial": 0.5 + 0.3j, "inverse": 1.5 + 0.7j,
       "quadratic": 1.0 + 0.8j, "logistic": 0.5 + 0.5j}


def _x_grid_around(z0, h, half=0.4):
    n = int(round(2.0 * half / h)) + 1
    origin = (z0.real - half, z0.imag - half)
    mask = np.zeros((n, n), dtype=bool)
    return Grid2D(origin=origin, h=h, nx=n, ny=n, mask=mask)


@pytest.mark.parametrize("name", sorted(FAMILIES))
def test_metric_identity_analytic(name):
    fam = make_family(name, **FAMILIES[name])
    rng = np.random.default_rng(7)
    z = fam.sample_z(400, rng)

    class Pts:
        def mesh(self):
            return (np.resize(z.real, 400).reshape(20, 20),
                    np.resize(z.imag, 400).reshape(20, 20))
        mask = np.zeros((20, 20), dtype=bool)

    assert metric_residual(fam, Pts(), mode="analytic") < 1e-12


@pytest.mark.parametrize("name", sorted(FAMILIES))
def test_cr_and_harmonicity_convergence(name):
    fam = make_family(name, **FAMILIES[name])
    z0 = _Z0[name]
    res = []
    for h in (0.04, 0.02, 0.01):
        cr, lap = cauchy_riemann_residual(fam, _x_grid_around(z0, h))
        res.append(max(cr, lap))
    if res[-1] < 1e-10:
        return  # polynomial map: central differences exact
    o1 = math.log(res[0] / res[1]) / math.log(2.0)
    o2 = math.log(res[1] / res[2]) / math.log(2.0)
    assert 1.8 <= o1 <= 2.2
    assert 1.8 <= o2 <= 2.2


def test_metric_identity_fd_converges():
    fam = make_family("log", **FAMILIES["log"])
    res = [metric_residual(fam, _x_grid_around(1.0 + 0.5j, h), mode="fd")
           for h in (0.04, 0.02)]
    order = math.log(res[0] / res[1]) / math.log(2.0)
    assert 1.8 <= order <= 2.2


def test_strip_domain_enforced():
    fam = make_family("log", alpha=1.0, gamma=1.0, delta=0.0)
    dom = fam.domain()
    assert dom.y2_range == (-2.0 * math.pi, 2.0 * math.pi)
    with pytest.raises(Exception):
        fam.x_of_y((0.0, 7.0))  # outside the strip


def test_quadratic_excluded_axis():
    fam = make_family("quadratic", a=0.125)
    with pytest.raises(SingularityError):
        fam.z_of_y((1.0, 0.0))  # on the branch cut
    # negative y1 axis is interior
    x1, x2 = fam.x_of_y((-1.0, 0.0))
    assert np.isfinite(x1) and np.isfinite(x2)


def test_quadratic_inverse_upper_half_plane():
    fam = make_family("quadratic", a=0.125)
    rng = np.random.default_rng(13)
    y1 = rng.uniform(-3, 3, 300)
    y2 = rng.uniform(-3, 3, 300)
    keep = np.hypot(y1, y2) > 0.1
    keep &= ~((y1 > -0.05) & (np.abs(y2) < 0.05))
    z = fam.z_of_y((y1[keep], y2[keep]))
    assert np.all(z.imag >= -1e-12)


def test_logistic_derivative_identities():
    fam = make_family("logistic", a=0.8, b=0.5, lam=1.1)
    rng = np.random.default_rng(17)
    z = fam.sample_z(300, rng)
    f = fam.f_of_z(z)
    fp, fpp = fam.f_derivs(z)
    r1 = np.abs(fp + fam.lam * f * (1.0 - fam.b * f))
    r2 = np.abs(fpp + fam.lam * (1.0 - 2.0 * fam.b * f) * fp)
    assert np.max(r1 / np.maximum(1.0, np.abs(fp))) < 1e-12
    assert np.max(r2 / np.maximum(1.0, np.abs(fpp))) < 1e-12


def test_power_lam_minus_one_rejected():
    with pytest.raises(ValueError, match="exp_radial"):
        make_family("power", lam=-1.0, beta=1.0, alpha_shift=0.0)


def test_unknown_family_names_catalog():
    with pytest.raises(ValueError, match="log"):
        make_family("nope")


def test_unknown_parameter_rejected():
    with pytest.raises(ValueError, match="unknown parameter"):
        make_family("inverse", b=1.0, q=2.0)


def test_family_catalog_complete():
    assert set(FAMILY_CLASSES) == set(FAMILIES)
