"""Grid-based numerical verification of PDM model identities.

The PDM Hamiltonian -d_i (1/M) d_i + U is discretized in conservative
(flux) form with 1/M evaluated at cell-face midpoints, which keeps the
operator second-order accurate and exactly symmetric on zero-padded
interiors.  Residual norms exclude cells whose stencil touches a masked
or boundary cell, so interior convergence is not contaminated by
boundary truncation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import DomainError, ExtentError
from .pdm import PDMModel, TransformedState, mass_of, potential_U


def default_mask_eps(h: float) -> float:
    """Mask radius around singular sets: max(3h, 1e-3)."""
    return max(3.0 * h, 1.0e-3)


# ---------------------------------------------------------------------------
# grids and fields
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Grid2D:
    """Uniform rectangular lattice with an excluded-cell mask
    (mask True = cell excluded)."""

    origin: Tuple[float, float]
    h: float
    nx: int
    ny: int
    mask: np.ndarray

    def __post_init__(self):
        if self.h <= 0:
            raise ValueError("Grid2D: h must be positive")
        if self.nx < 8 or self.ny < 8:
            raise ValueError("Grid2D: need nx, ny >= 8")
        if self.mask.shape != (self.nx, self.ny):
            raise ValueError("Grid2D: mask shape mismatch")
        if int(np.sum(~self.mask[1:-1, 1:-1])) < 16:
            raise ValueError("Grid2D: fewer than 16 unmasked interior cells")

    @property
    def y1(self):
        return self.origin[0] + self.h * np.arange(self.nx)

    @property
    def y2(self):
        return self.origin[1] + self.h * np.arange(self.ny)

    def mesh(self):
        return np.meshgrid(self.y1, self.y2, indexing="ij")

    def describe(self):
        return {"origin": list(self.origin), "h": self.h,
                "nx": self.nx, "ny": self.ny,
                "masked_cells": int(np.sum(self.mask))}


def build_grid(domain, origin, h, nx, ny, eps=None,
               region: Optional[Callable] = None) -> Grid2D:
    """Grid with the domain's excluded sets (dilated by eps) masked and,
    optionally, everything outside a region predicate."""
    if eps is None:
        eps = default_mask_eps(h)
    y1 = origin[0] + h * np.arange(nx)
    y2 = origin[1] + h * np.arange(ny)
    g1, g2 = np.meshgrid(y1, y2, indexing="ij")
    mask = domain.excluded_distance(g1, g2) <= eps
    if domain.y2_range is not None:
        lo, hi = domain.y2_range
        if y2[0] < lo or y2[-1] >= hi:
            raise DomainError("build_grid: grid leaves the strip [%g, %g)" % (lo, hi))
    if region is not None:
        mask |= ~region(g1, g2)
    return Grid2D(origin=tuple(origin), h=h, nx=nx, ny=ny, mask=mask)


def grid_for_model(model: PDMModel, origin, h, nx, ny, eps=None, region=None):
    return build_grid(model.domain, origin, h, nx, ny, eps=eps, region=region)


def annulus_region(rho_min: float, rho_max: float):
    def region(y1, y2):
        rho = np.hypot(y1, y2)
        return (rho >= rho_min) & (rho <= rho_max)
    return region


@dataclass
class Field2D:
    """Scalar samples aligned to a grid; `valid` marks cells carrying a
    meaningful value."""

    grid: Grid2D
    values: np.ndarray
    valid: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.values.shape != (self.grid.nx, self.grid.ny):
            raise ValueError("Field2D: values shape mismatch")
        ok = self.valid if self.valid is not None else ~self.grid.mask
        if not np.all(np.isfinite(self.values[ok])):
            raise ValueError("Field2D: non-finite values on unmasked cells")

    def to_csv(self, path):
        g1, g2 = self.grid.mesh()
        rows = np.column_stack([g1.ravel(), g2.ravel(), self.values.ravel()])
        np.savetxt(path, rows, fmt="%.17g", delimiter=",",
                   header="y1,y2,value", comments="")


def field_from_csv(path):
    """Load a CSV written by Field2D.to_csv: (y1, y2, value) columns."""
    rows = np.loadtxt(path, delimiter=",", skiprows=1)
    return rows[:, 0], rows[:, 1], rows[:, 2]


def eval_on_grid(grid: Grid2D, func) -> Field2D:
    """Evaluate func(y1, y2) on unmasked cells (0 on masked)."""
    g1, g2 = grid.mesh()
    values = np.zeros((grid.nx, grid.ny))
    ok = ~grid.mask
    if ok.any():
        values[ok] = func(g1[ok], g2[ok])
    return Field2D(grid=grid, values=values)


# ---------------------------------------------------------------------------
# conservative stencil
# ---------------------------------------------------------------------------


def _valid_cells(grid: Grid2D) -> np.ndarray:
    """Cells whose full 5-point stencil stays on unmasked cells."""
    ok = ~grid.mask
    valid = np.zeros_like(ok)
    valid[1:-1, 1:-1] = (ok[1:-1, 1:-1] & ok[:-2, 1:-1] & ok[2:, 1:-1]
                         & ok[1:-1, :-2] & ok[1:-1, 2:])
    return valid


def _face_inv_mass(model: PDMModel, grid: Grid2D, axis: int,
                   needed: np.ndarray) -> np.ndarray:
    """1/M at face midpoints along `axis`, evaluated only where needed."""
    h = grid.h
    if axis == 0:
        y1 = grid.y1[:-1] + 0.5 * h
        g1, g2 = np.meshgrid(y1, grid.y2, indexing="ij")
    else:
        y2 = grid.y2[:-1] + 0.5 * h
        g1, g2 = np.meshgrid(grid.y1, y2, indexing="ij")
    w = np.full(g1.shape, np.nan)
    if needed.any():
        z = model.family.z_of_y((g1[needed], g2[needed]))
        fp, _ = model.family.f_derivs(z)
        w[needed] = 4.0 * np.abs(fp) ** 2
    return w


def _needed_faces(valid: np.ndarray, axis: int) -> np.ndarray:
    """Faces adjacent to at least one valid cell."""
    if axis == 0:
        need = np.zeros((valid.shape[0] - 1, valid.shape[1]), dtype=bool)
        need |= valid[:-1, :]
        need |= valid[1:, :]
    else:
        need = np.zeros((valid.shape[0], valid.shape[1] - 1), dtype=bool)
        need |= valid[:, :-1]
        need |= valid[:, 1:]
    return need


def apply_pdm_hamiltonian(model: PDMModel, psi: Field2D,
                          conservative: bool = True) -> Field2D:
    """Apply the flux-form PDM Hamiltonian to psi.

    Output is valid only on cells whose stencil avoids masked and
    boundary cells.  `conservative=False` switches to the expanded
    non-symmetric form -(1/M) Lap psi - grad(1/M).grad psi with node
    weights, a deliberate negative control for the symmetry check.
    """
    grid = psi.grid
    h = grid.h
    valid = _valid_cells(grid)
    if not valid.any():
        raise DomainError("apply_pdm_hamiltonian: no valid interior cells")

    v = psi.values
    out = np.zeros_like(v)
    g1, g2 = grid.mesh()
    if conservative:
        need1 = _needed_faces(valid, 0)
        need2 = _needed_faces(valid, 1)
        w1 = _face_inv_mass(model, grid, 0, need1)
        w2 = _face_inv_mass(model, grid, 1, need2)
        flux = np.zeros_like(v)
        # axis 0
        flux[1:-1, :] += (w1[1:, :] * (v[2:, :] - v[1:-1, :])
                          - w1[:-1, :] * (v[1:-1, :] - v[:-2, :]))
        # axis 1
        flux[:, 1:-1] += (w2[:, 1:] * (v[:, 2:] - v[:, 1:-1])
                          - w2[:, :-1] * (v[:, 1:-1] - v[:, :-2]))
        kin = np.zeros_like(v)
        kin[valid] = -flux[valid] / h**2
    else:
        nodes = np.full((grid.nx, grid.ny), np.nan)
        ok = ~grid.mask
        z = model.family.z_of_y((g1[ok], g2[ok]))
        fp, _ = model.family.f_derivs(z)
        nodes[ok] = 4.0 * np.abs(fp) ** 2
        lap = np.zeros_like(v)
        adv = np.zeros_like(v)
        lap[1:-1, 1:-1] = (v[2:, 1:-1] + v[:-2, 1:-1] + v[1:-1, 2:]
                           + v[1:-1, :-2] - 4.0 * v[1:-1, 1:-1]) / h**2
        adv[1:-1, 1:-1] = (
            (nodes[2:, 1:-1] - nodes[:-2, 1:-1])
            * (v[2:, 1:-1] - v[:-2, 1:-1])
            + (nodes[1:-1, 2:] - nodes[1:-1, :-2])
            * (v[1:-1, 2:] - v[1:-1, :-2])) / (4.0 * h**2)
        kin = np.zeros_like(v)
        kin[valid] = -(nodes[valid] * lap[valid] + adv[valid])

    u = np.zeros_like(v)
    u[valid] = potential_U(model, (g1[valid], g2[valid]))
    out[valid] = kin[valid] + u[valid] * v[valid]
    return Field2D(grid=grid, values=out, valid=valid)


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------


def eigen_residual(model: PDMModel, ts: TransformedState, grid: Grid2D) -> float:
    """Relative discrete L2 residual ||H psi~ - E psi~|| / ||psi~|| over
    valid interior cells."""
    psi = eval_on_grid(grid, lambda a, b: ts.eval((a, b)))
    hpsi = apply_pdm_hamiltonian(model, psi)
    valid = hpsi.valid
    r = hpsi.values[valid] - ts.energy * psi.values[valid]
    denom = math.sqrt(float(np.sum(psi.values[valid] ** 2)))
    if denom == 0.0:
        raise ValueError("eigen_residual: state vanishes on the grid")
    return math.sqrt(float(np.sum(r**2))) / denom


def metric_residual(family, grid_x: Grid2D, mode: str = "analytic") -> float:
    """Max residual of M * (d_i y_k)(d_i y_n) - delta_kn on an x-grid.

    `analytic` assembles the Jacobian from f'; `fd` uses central
    differences of y(x) (then the residual is O(h^2))."""
    g1, g2 = grid_x.mesh()
    ok = ~grid_x.mask
    if mode == "analytic":
        z = g1[ok] + 1j * g2[ok]
        fp, _ = family.f_derivs(z)
        a11 = 2.0 * fp.real          # d1 y1
        a12 = -2.0 * fp.imag         # d2 y1
        a21 = -2.0 * fp.imag         # d1 y2
        a22 = -2.0 * fp.real         # d2 y2
        m = 1.0 / (4.0 * np.abs(fp) ** 2)
    elif mode == "fd":
        h = grid_x.h
        y1, y2 = family.y_of_x((g1, g2))
        a11 = (y1[2:, 1:-1] - y1[:-2, 1:-1]) / (2 * h)
        a12 = (y1[1:-1, 2:] - y1[1:-1, :-2]) / (2 * h)
        a21 = (y2[2:, 1:-1] - y2[:-2, 1:-1]) / (2 * h)
        a22 = (y2[1:-1, 2:] - y2[1:-1, :-2]) / (2 * h)
        z = g1[1:-1, 1:-1] + 1j * g2[1:-1, 1:-1]
        fp, _ = family.f_derivs(z)
        m = 1.0 / (4.0 * np.abs(fp) ** 2)
        inner = ok[1:-1, 1:-1] & ok[2:, 1:-1] & ok[:-2, 1:-1] \
            & ok[1:-1, 2:] & ok[1:-1, :-2]
        a11, a12, a21, a22, m = (arr[inner] for arr in (a11, a12, a21, a22, m))
    else:
        raise ValueError("metric_residual: mode must be 'analytic' or 'fd'")
    r11 = m * (a11 * a11 + a12 * a12) - 1.0
    r22 = m * (a21 * a21 + a22 * a22) - 1.0
    r12 = m * (a11 * a21 + a12 * a22)
    return float(max(np.max(np.abs(r11)), np.max(np.abs(r22)),
                     np.max(np.abs(r12))))


def cauchy_riemann_residual(family, grid_x: Grid2D) -> Tuple[float, float]:
    """(max CR residual, max discrete-Laplacian residual) of y(x) by
    central differences on the interior of an x-grid."""
    g1, g2 = grid_x.mesh()
    h = grid_x.h
    y1, y2 = family.y_of_x((g1, g2))
    ok = ~grid_x.mask
    inner = ok[1:-1, 1:-1] & ok[2:, 1:-1] & ok[:-2, 1:-1] \
        & ok[1:-1, 2:] & ok[1:-1, :-2]
    d1y1 = (y1[2:, 1:-1] - y1[:-2, 1:-1]) / (2 * h)
    d2y1 = (y1[1:-1, 2:] - y1[1:-1, :-2]) / (2 * h)
    d1y2 = (y2[2:, 1:-1] - y2[:-2, 1:-1]) / (2 * h)
    d2y2 = (y2[1:-1, 2:] - y2[1:-1, :-2]) / (2 * h)
    cr = np.maximum(np.abs(d1y1 + d2y2), np.abs(d2y1 - d1y2))
    lap1 = (y1[2:, 1:-1] + y1[:-2, 1:-1] + y1[1:-1, 2:] + y1[1:-1, :-2]
            - 4.0 * y1[1:-1, 1:-1]) / h**2
    lap2 = (y2[2:, 1:-1] + y2[:-2, 1:-1] + y2[1:-1, 2:] + y2[1:-1, :-2]
            - 4.0 * y2[1:-1, 1:-1]) / h**2
    lap = np.maximum(np.abs(lap1), np.abs(lap2))
    return float(np.max(cr[inner])), float(np.max(lap[inner]))


def normalization_check(model: PDMModel, ts: TransformedState, grid: Grid2D,
                        periodic_y2: bool = False,
                        extent_tol: float = 1.0e-6) -> float:
    """Trapezoid value of the integral of |psi~|^2 over the grid.

    With `periodic_y2` the y2 direction is summed with full weight (the
    grid must span one period minus one step).  Raises ExtentError when
    the boundary-tail estimate exceeds `extent_tol`.
    """
    psi = eval_on_grid(grid, lambda a, b: ts.eval((a, b)))
    dens = psi.values**2
    dens[grid.mask] = 0.0
    w = np.ones_like(dens)
    w[0, :] *= 0.5
    w[-1, :] *= 0.5
    if not periodic_y2:
        w[:, 0] *= 0.5
        w[:, -1] *= 0.5
    tail = (np.sum(dens[0, :]) + np.sum(dens[-1, :])) * grid.h**2
    if not periodic_y2:
        tail += (np.sum(dens[:, 0]) + np.sum(dens[:, -1])) * grid.h**2
    if tail > extent_tol:
        raise ExtentError(
            "normalization_check: boundary tail %.3g exceeds budget %.3g; "
            "enlarge the grid" % (tail, extent_tol))
    return float(np.sum(w * dens) * grid.h**2)


def hermiticity_decay(model: PDMModel, ts: TransformedState,
                      boundary_samples: Sequence[Tuple[float, float]],
                      interior_samples: Sequence[Tuple[float, float]]) -> float:
    """Decay ratio max_boundary q / max_interior q with
    q = |psi~|^2 / sqrt(M)."""

    def q(points):
        y1 = np.asarray([p[0] for p in points], dtype=float)
        y2 = np.asarray([p[1] for p in points], dtype=float)
        val = ts.eval((y1, y2))
        m = mass_of(model, (y1, y2))
        return float(np.max(np.abs(val) ** 2 / np.sqrt(m)))

    qb = q(boundary_samples)
    qi = q(interior_samples)
    if qi == 0.0:
        return 0.0 if qb == 0.0 else math.inf
    return qb / qi


def symmetry_check(model: PDMModel, grid: Grid2D, rng=None,
                   conservative: bool = True) -> float:
    """Normalized symmetry defect |<phi,H psi> - <H phi,psi>| of the
    discretized operator on zero-padded interior fields."""
    if rng is None:
        rng = np.random.default_rng(2024)
    valid = _valid_cells(grid)
    phi = np.zeros((grid.nx, grid.ny))
    psi = np.zeros((grid.nx, grid.ny))
    phi[valid] = rng.standard_normal(int(np.sum(valid)))
    psi[valid] = rng.standard_normal(int(np.sum(valid)))
    fphi = Field2D(grid=grid, values=phi, valid=valid)
    fpsi = Field2D(grid=grid, values=psi, valid=valid)
    hphi = apply_pdm_hamiltonian(model, fphi, conservative=conservative)
    hpsi = apply_pdm_hamiltonian(model, fpsi, conservative=conservative)
    a = float(np.sum(phi[valid] * hpsi.values[valid]))
    b = float(np.sum(hphi.values[valid] * psi[valid]))
    nphi = math.sqrt(float(np.sum(phi**2)))
    npsi = math.sqrt(float(np.sum(psi**2)))
    hnorm = max(float(np.max(np.abs(hpsi.values[valid]))) / npsi, 1e-300)
    return abs(a - b) / (nphi * npsi * hnorm)


def convergence_study(model: PDMModel, ts: TransformedState,
                      h_list: Sequence[float], box, eps=None, region=None):
    """Eigen-residuals across strictly decreasing grid spacings, with
    pairwise observed orders.

    Returns a list of dicts {h, residual, order, note}; order is None
    for the first entry.  Non-monotone residuals yield a warning note.
    """
    if len(h_list) < 3 or any(b >= a for a, b in zip(h_list, h_list[1:])):
        raise ValueError("convergence_study: need >= 3 strictly decreasing h")
    y1_lo, y1_hi, y2_lo, y2_hi = box
    results = []
    prev = None
    for h in h_list:
        nx = int(round((y1_hi - y1_lo) / h)) + 1
        ny = int(round((y2_hi - y2_lo) / h)) + 1
        grid = grid_for_model(model, (y1_lo, y2_lo), h, nx, ny,
                              eps=eps, region=region)
        r = eigen_residual(model, ts, grid)
        entry = {"h": h, "residual": r, "order": None, "note": ""}
        if prev is not None:
            h0, r0 = prev
            if r >= r0:
                entry["note"] = "non-monotone residual"
            entry["order"] = math.log(r0 / r) / math.log(h0 / h) if r > 0 else None
        results.append(entry)
        prev = (h, r)
    return results


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------


@dataclass
class CheckEntry:
    check_name: str
    measured: float
    tolerance: float
    passed: bool
    notes: str = ""

    def to_dict(self):
        return {"check_name": self.check_name, "measured": self.measured,
                "tolerance": self.tolerance, "pass": self.passed,
                "notes": self.notes}


@dataclass
class VerificationReport:
    model: str
    grid: dict
    entries: List[CheckEntry] = field(default_factory=list)

    def add_check(self, name, measured, tolerance, notes=""):
        entry = CheckEntry(check_name=name, measured=float(measured),
                           tolerance=float(tolerance),
                           passed=bool(measured <= tolerance), notes=notes)
        self.entries.append(entry)
        return entry

    def add_info(self, name, measured, notes=""):
        """Informational entry: recorded, never failing."""
        entry = CheckEntry(check_name=name, measured=float(measured),
                           tolerance=math.inf, passed=True, notes=notes)
        self.entries.append(entry)
        return entry

    @property
    def all_passed(self):
        return all(e.passed for e in self.entries)

    def to_json(self, indent=2):
        return json.dumps({"model": self.model, "grid": self.grid,
                           "entries": [e.to_dict() for e in self.entries]},
                          indent=indent)

    def summary_lines(self):
        out = []
        for e in self.entries:
            out.append("%-42s measured=%-12.4g tol=%-10.4g %s"
                       % (e.check_name, e.measured, e.tolerance,
                          "PASS" if e.passed else "FAIL"))
        return out
