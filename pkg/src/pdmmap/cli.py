"""Command-line front end: declarative TOML model configs, grid/field
export, verification runs, and the built-in figure presets.

Exit codes: 0 all checks pass, 1 check failure, 2 config error,
3 numerical/domain error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile

import numpy as np
import tomli

from .basemodels import (ONE_DIM_POTENTIALS, AnisotropicOscillator, Grid1D,
                         Separable, SeparableState, oscillator_state,
                         solve_1d)
from .errors import ConfigError, PdmError
from .maps import _PARAM_KEYS, make_family
from .pdm import (PDMModel, TransformedState, mass_of, potential_U)
from .presets import PRESETS, preset
from .verify import (VerificationReport, annulus_region, eigen_residual,
                     eval_on_grid, grid_for_model, hermiticity_decay,
                     metric_residual, normalization_check, symmetry_check)

# ---------------------------------------------------------------------------
# TOML writing (stdlib has no writer on this interpreter; the subset
# needed here -- nested tables, scalars, flat lists -- is small)
# ---------------------------------------------------------------------------


def _toml_scalar(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if not math.isfinite(v):
            raise ValueError("toml_dumps: non-finite float")
        return repr(v)
    if isinstance(v, str):
        return json.dumps(v)  # TOML basic strings share JSON escaping
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_toml_scalar(x) for x in v) + "]"
    raise TypeError("toml_dumps: unsupported value %r" % (v,))


def toml_dumps(data: dict) -> str:
    """Serialize a dict of scalars/lists/nested dicts to TOML."""
    lines = []

    def emit(table, prefix):
        scalars = {k: v for k, v in table.items() if not isinstance(v, dict)}
        subs = {k: v for k, v in table.items() if isinstance(v, dict)}
        if prefix and (scalars or not subs):
            lines.append("[%s]" % prefix)
        for k, v in scalars.items():
            lines.append("%s = %s" % (k, _toml_scalar(v)))
        if scalars:
            lines.append("")
        for k, v in subs.items():
            emit(v, prefix + "." + k if prefix else k)

    emit(data, "")
    return "\n".join(lines).rstrip() + "\n"


def toml_loads(text: str) -> dict:
    try:
        return tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise ConfigError("TOML parse error: %s" % exc)


# ---------------------------------------------------------------------------
# config schema
# ---------------------------------------------------------------------------

CHECK_NAMES = ("metric", "eigen_residual", "normalization",
               "hermiticity", "symmetry")

# numeric defaults only; physical parameters have none
DEFAULT_TOLS = {"metric": 1.0e-12, "eigen_residual": 5.0e-3,
                "normalization": 1.0e-3, "hermiticity": 1.0e-6,
                "symmetry": 1.0e-12}


def _require(table, key, section):
    if key not in table:
        raise ConfigError("[%s] missing required key %r" % (section, key))
    return table[key]


def _no_extras(table, allowed, section):
    extra = set(table) - set(allowed)
    if extra:
        raise ConfigError("[%s] unknown key(s): %s"
                          % (section, ", ".join(sorted(extra))))


class ModelConfig:
    """Validated single-model configuration."""

    TOP_KEYS = ("family", "base", "state", "grid", "checks", "outputs")

    def __init__(self, data: dict):
        if not isinstance(data, dict):
            raise ConfigError("config root must be a table")
        _no_extras(data, self.TOP_KEYS, "")
        self.family_spec = self._family(_require(data, "family", ""))
        self.base_spec = self._base(_require(data, "base", ""))
        self.state_spec = self._state(data.get("state"))
        self.grid_spec = self._grid(data.get("grid"))
        self.checks_spec = self._checks(data.get("checks"))
        self.outputs_spec = self._outputs(data.get("outputs"))

    # -- sections ----------------------------------------------------------

    def _family(self, t):
        name = _require(t, "name", "family")
        if name not in _PARAM_KEYS:
            raise ConfigError("[family] unknown family %r; catalog: %s"
                              % (name, ", ".join(sorted(_PARAM_KEYS))))
        _no_extras(t, ("name",) + _PARAM_KEYS[name], "family")
        params = {k: v for k, v in t.items() if k != "name"}
        for k in _PARAM_KEYS[name]:
            if k not in params:
                raise ConfigError("[family] %r requires parameter %r"
                                  % (name, k))
        return {"name": name, **params}

    def _base(self, t):
        name = _require(t, "name", "base")
        if name == "oscillator":
            _no_extras(t, ("name", "omega1", "omega2"), "base")
            return {"name": name,
                    "omega1": float(_require(t, "omega1", "base")),
                    "omega2": float(_require(t, "omega2", "base"))}
        if name == "separable":
            _no_extras(t, ("name", "axis1", "axis2"), "base")
            return {"name": name,
                    "axis1": self._axis(_require(t, "axis1", "base"), "axis1"),
                    "axis2": self._axis(_require(t, "axis2", "base"), "axis2")}
        raise ConfigError("[base] unknown base %r; catalog: oscillator, "
                          "separable" % name)

    def _axis(self, t, section):
        pot = _require(t, "potential", "base." + section)
        if pot not in ONE_DIM_POTENTIALS:
            raise ConfigError("[base.%s] unknown potential %r; catalog: %s"
                              % (section, pot,
                                 ", ".join(sorted(ONE_DIM_POTENTIALS))))
        cls = ONE_DIM_POTENTIALS[pot]
        keys = tuple(cls.__dataclass_fields__)
        _no_extras(t, ("potential", "grid") + keys, "base." + section)
        params = {k: float(_require(t, k, "base." + section)) for k in keys}
        g = _require(t, "grid", "base." + section)
        _no_extras(g, ("x0", "h", "n"), "base.%s.grid" % section)
        grid = Grid1D(x0=float(_require(g, "x0", section + ".grid")),
                      h=float(_require(g, "h", section + ".grid")),
                      n=int(_require(g, "n", section + ".grid")))
        return {"potential": pot, "params": params, "grid": grid}

    def _state(self, t):
        if t is None:
            return None
        _no_extras(t, ("n1", "n2"), "state")
        return {"n1": int(_require(t, "n1", "state")),
                "n2": int(_require(t, "n2", "state"))}

    def _grid(self, t):
        if t is None:
            return None
        _no_extras(t, ("origin", "h", "nx", "ny", "mask_eps", "annulus",
                       "periodic_y2"), "grid")
        origin = _require(t, "origin", "grid")
        if (not isinstance(origin, list) or len(origin) != 2):
            raise ConfigError("[grid] origin must be a two-element list")
        spec = {"origin": (float(origin[0]), float(origin[1])),
                "h": float(_require(t, "h", "grid")),
                "nx": int(_require(t, "nx", "grid")),
                "ny": int(_require(t, "ny", "grid")),
                "mask_eps": float(t["mask_eps"]) if "mask_eps" in t else None,
                "periodic_y2": bool(t.get("periodic_y2", False)),
                "annulus": None}
        if "annulus" in t:
            a = t["annulus"]
            if not isinstance(a, list) or len(a) != 2:
                raise ConfigError("[grid] annulus must be [rho_min, rho_max]")
            spec["annulus"] = (float(a[0]), float(a[1]))
        return spec

    def _checks(self, t):
        if t is None:
            return None
        _no_extras(t, ("names",), "checks")
        names = _require(t, "names", "checks")
        bad = set(names) - set(CHECK_NAMES)
        if bad:
            raise ConfigError("[checks] unknown check(s): %s; catalog: %s"
                              % (", ".join(sorted(bad)),
                                 ", ".join(CHECK_NAMES)))
        return list(names)

    def _outputs(self, t):
        if t is None:
            return None
        _no_extras(t, ("fields",), "outputs")
        fields = _require(t, "fields", "outputs")
        bad = set(fields) - {"M", "U", "psi"}
        if bad:
            raise ConfigError("[outputs] unknown field(s): %s; catalog: "
                              "M, U, psi" % ", ".join(sorted(bad)))
        return list(fields)

    # -- construction ------------------------------------------------------

    def to_dict(self):
        d = {"family": dict(self.family_spec), "base": self._base_dict()}
        if self.state_spec is not None:
            d["state"] = dict(self.state_spec)
        if self.grid_spec is not None:
            g = self.grid_spec
            gd = {"origin": list(g["origin"]), "h": g["h"],
                  "nx": g["nx"], "ny": g["ny"]}
            if g["mask_eps"] is not None:
                gd["mask_eps"] = g["mask_eps"]
            if g["periodic_y2"]:
                gd["periodic_y2"] = True
            if g["annulus"] is not None:
                gd["annulus"] = list(g["annulus"])
            d["grid"] = gd
        if self.checks_spec is not None:
            d["checks"] = {"names": list(self.checks_spec)}
        if self.outputs_spec is not None:
            d["outputs"] = {"fields": list(self.outputs_spec)}
        return d

    def _base_dict(self):
        b = self.base_spec
        if b["name"] == "oscillator":
            return dict(b)
        out = {"name": "separable"}
        for ax in ("axis1", "axis2"):
            spec = b[ax]
            out[ax] = {"potential": spec["potential"], **spec["params"],
                       "grid": {"x0": spec["grid"].x0, "h": spec["grid"].h,
                                "n": spec["grid"].n}}
        return out

    def family(self):
        spec = dict(self.family_spec)
        return make_family(spec.pop("name"), **spec)

    def base(self):
        b = self.base_spec
        if b["name"] == "oscillator":
            return AnisotropicOscillator(omega1=b["omega1"],
                                         omega2=b["omega2"])
        p1 = ONE_DIM_POTENTIALS[b["axis1"]["potential"]](**b["axis1"]["params"])
        p2 = ONE_DIM_POTENTIALS[b["axis2"]["potential"]](**b["axis2"]["params"])
        return Separable(v1=p1, v2=p2)

    def model(self, mask_eps=None):
        eps = mask_eps
        if eps is None and self.grid_spec is not None:
            eps = self.grid_spec["mask_eps"]
        if eps is None:
            return PDMModel(self.family(), self.base())
        return PDMModel(self.family(), self.base(), mask_eps=eps)

    def transformed_state(self, model=None):
        if self.state_spec is None:
            raise ConfigError("config has no [state] section")
        if model is None:
            model = self.model()
        n1, n2 = self.state_spec["n1"], self.state_spec["n2"]
        b = self.base_spec
        if b["name"] == "oscillator":
            base_state = oscillator_state(b["omega1"], b["omega2"], n1, n2)
        else:
            e1 = solve_1d(model.base.v1, b["axis1"]["grid"], n1 + 1)[n1]
            e2 = solve_1d(model.base.v2, b["axis2"]["grid"], n2 + 1)[n2]
            base_state = SeparableState(e1, e2)
        return TransformedState(model, base_state)

    def grid(self, model, h=None, mask_eps=None):
        if self.grid_spec is None:
            raise ConfigError("config has no [grid] section")
        g = self.grid_spec
        h0 = g["h"]
        h = h0 if h is None else h
        nx = int(round((g["nx"] - 1) * h0 / h)) + 1
        ny = int(round((g["ny"] - 1) * h0 / h)) + 1
        eps = mask_eps if mask_eps is not None else g["mask_eps"]
        region = None
        if g["annulus"] is not None:
            region = annulus_region(*g["annulus"])
        return grid_for_model(model, g["origin"], h, nx, ny,
                              eps=eps, region=region)


def load_config(path) -> ModelConfig:
    try:
        with open(path, "rb") as fh:
            data = tomli.load(fh)
    except OSError as exc:
        raise ConfigError("cannot read config %s: %s" % (path, exc))
    except tomli.TOMLDecodeError as exc:
        raise ConfigError("%s: TOML parse error: %s" % (path, exc))
    return ModelConfig(data)


# ---------------------------------------------------------------------------
# file output
# ---------------------------------------------------------------------------


def atomic_write_text(path, text):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_field_csv(field, path):
    g1, g2 = field.grid.mesh()
    lines = ["y1,y2,value"]
    for a, b, v in zip(g1.ravel(), g2.ravel(), field.values.ravel()):
        lines.append("%.17g,%.17g,%.17g" % (a, b, v))
    atomic_write_text(path, "\n".join(lines) + "\n")


def maybe_write_png(field, path, title):
    """Linear-scale heatmap; bounds go in a JSON sidecar."""
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        return False
    vals = np.where(field.grid.mask, np.nan, field.values)
    vmin = float(np.nanmin(vals))
    vmax = float(np.nanmax(vals))
    g = field.grid
    fig, ax = plt.subplots(figsize=(6, 5))
    im = ax.imshow(vals.T, origin="lower", aspect="auto",
                   extent=[g.y1[0], g.y1[-1], g.y2[0], g.y2[-1]],
                   vmin=vmin, vmax=vmax)
    ax.set_xlabel("y1")
    ax.set_ylabel("y2")
    ax.set_title(title)
    fig.colorbar(im, ax=ax)
    fig.savefig(path, dpi=130)
    plt.close(fig)
    atomic_write_text(path + ".json", json.dumps(
        {"title": title, "vmin": vmin, "vmax": vmax,
         "grid": g.describe()}, indent=2) + "\n")
    return True


# ---------------------------------------------------------------------------
# field evaluation
# ---------------------------------------------------------------------------

_FORMULAS = {
    "log": ("M = gamma^2*exp(alpha*y1)",
            "U - V = -(alpha^2/(4*gamma^2))*exp(-alpha*y1)"),
    "asinh": ("M = (2*A^2/lam^2)*(cosh(lam*y1)+cos(lam*y2))",
              "U - V = -lam^4*(cosh(lam*y1)-cos(lam*y2))"
              "/(8*A^2*(cosh(lam*y1)+cos(lam*y2))^2)"),
    "power": ("M = beta^2/4^(lam+1)*rho^(2*lam)",
              "U - V = -lam^2*4^(lam+1)/(beta^2*rho^(2*lam+2))"),
    "exp_radial": ("M = beta^2/rho^2", "U - V = -1/beta^2"),
    "inverse": ("M = 4*b^2/rho^4", "U - V = -rho^2/b^2"),
    "quadratic": ("M = 1/(8*|a|*rho)", "U - V = -2*|a|/rho"),
    "logistic": ("M = 4/(lam^2*rho^2*(b^2*rho^2-4*b*rho*cos(phi)+4))",
                 "U - V = -lam^2*(b^2*rho^2-2*b*rho*cos(phi)+1)"),
}


def field_on_grid(cfg_or_model, grid, which, state=None):
    model = cfg_or_model
    if which == "M":
        return eval_on_grid(grid, lambda a, b: mass_of(model, (a, b)))
    if which == "U":
        return eval_on_grid(grid, lambda a, b: potential_U(model, (a, b)))
    if which == "psi":
        return eval_on_grid(grid, lambda a, b: state.eval((a, b)))
    raise ValueError("unknown field %r" % which)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_model_show(args):
    cfg = load_config(args.config)
    model = cfg.model(mask_eps=args.mask_eps)
    fam = model.family
    name = cfg.family_spec["name"]
    print("family: %s  params: %s" % (name, fam.params()))
    print("domain: %s" % model.domain.describe())
    mf, uf = _FORMULAS[name]
    print("closed forms: %s; %s" % (mf, uf))
    if cfg.state_spec is not None:
        ts = cfg.transformed_state(model)
        print("state (n1=%d, n2=%d): energy = %.12g"
              % (cfg.state_spec["n1"], cfg.state_spec["n2"], ts.energy))
    return 0


def _export_fields(cfg, args):
    model = cfg.model(mask_eps=args.mask_eps)
    grid = cfg.grid(model, h=args.grid_h, mask_eps=args.mask_eps)
    outdir = args.out or "."
    os.makedirs(outdir, exist_ok=True)
    fields = cfg.outputs_spec or ["M", "U"]
    written = []
    for which in fields:
        if which == "psi":
            state = cfg.transformed_state(model)
            n1, n2 = cfg.state_spec["n1"], cfg.state_spec["n2"]
            stem = "psi_%d_%d" % (n1, n2)
            f = field_on_grid(model, grid, "psi", state)
        else:
            stem = which
            f = field_on_grid(model, grid, which)
        path = os.path.join(outdir, stem + ".csv")
        write_field_csv(f, path)
        written.append(path)
        if args.png:
            maybe_write_png(f, os.path.join(outdir, stem + ".png"), stem)
    for p in written:
        print("wrote %s" % p)
    return 0


def cmd_export(args):
    return _export_fields(load_config(args.config), args)


def cmd_verify(args):
    cfg = load_config(args.config)
    model = cfg.model(mask_eps=args.mask_eps)
    grid = cfg.grid(model, h=args.grid_h, mask_eps=args.mask_eps)
    checks = cfg.checks_spec or list(CHECK_NAMES)
    tols = {k: v * args.tol_scale for k, v in DEFAULT_TOLS.items()}
    report = VerificationReport(model=cfg.family_spec["name"],
                                grid=grid.describe())

    state = None
    if cfg.state_spec is not None:
        state = cfg.transformed_state(model)

    for name in checks:
        if name == "metric":
            rng = np.random.default_rng(7)
            zs = model.family.sample_z(2000, rng)
            xg = _points_grid(zs)
            report.add_check("metric", metric_residual(model.family, xg),
                             tols["metric"])
        elif name == "symmetry":
            report.add_check("symmetry", symmetry_check(model, grid),
                             tols["symmetry"])
        elif name == "eigen_residual":
            _need_state(state, name)
            report.add_check("eigen_residual",
                             eigen_residual(model, state, grid),
                             tols["eigen_residual"])
        elif name == "normalization":
            _need_state(state, name)
            val = normalization_check(
                model, state, grid,
                periodic_y2=cfg.grid_spec["periodic_y2"])
            report.add_check("normalization", abs(val - 1.0),
                             tols["normalization"],
                             notes="integral = %.6g" % val)
        elif name == "hermiticity":
            _need_state(state, name)
            bnd, inner = _decay_boundary_samples(model, grid)
            report.add_check("hermiticity",
                             hermiticity_decay(model, state, bnd, inner),
                             tols["hermiticity"])

    for line in report.summary_lines():
        print(line)
    outdir = args.out or "."
    os.makedirs(outdir, exist_ok=True)
    path = os.path.join(outdir, "report.json")
    atomic_write_text(path, report.to_json() + "\n")
    print("wrote %s" % path)
    return 0 if report.all_passed else 1


def _need_state(state, check):
    if state is None:
        raise ConfigError("check %r needs a [state] section" % check)


def _points_grid(zs):
    # wrap scattered sample points into a 1-cell-thin grid surrogate:
    # metric_residual(analytic) only needs mesh() and mask
    n = len(zs)
    side = int(math.ceil(math.sqrt(n)))

    class _Pts:
        def mesh(self_inner):
            g1 = np.resize(zs.real, side * side).reshape(side, side)
            g2 = np.resize(zs.imag, side * side).reshape(side, side)
            return g1, g2
        mask = np.zeros((side, side), dtype=bool)
    return _Pts()


def _decay_boundary_samples(model, grid):
    """Boundary = where the decay condition applies: the extreme y1
    rows on a strip (y2 is periodic there), the outermost radius ring
    otherwise (inner singular rings are excluded by construction)."""
    ok = ~grid.mask
    g1, g2 = grid.mesh()
    if model.domain.y2_range is not None:
        edge = np.zeros_like(ok)
        edge[0, :] = edge[-1, :] = True
    else:
        rho = np.hypot(g1, g2)
        rmax = float(np.max(rho[ok]))
        edge = rho >= rmax - 2.0 * grid.h
    bnd = list(zip(g1[ok & edge], g2[ok & edge]))
    inner = list(zip(g1[ok & ~edge], g2[ok & ~edge]))
    if not bnd or not inner:
        raise ConfigError("hermiticity check: grid has no usable "
                          "boundary/interior split")
    return bnd, inner


def cmd_figures(args):
    p = preset(args.preset)
    model = p.model()
    grid = p.grid(h=args.grid_h, eps=args.mask_eps)
    outdir = args.out or "."
    os.makedirs(outdir, exist_ok=True)
    if p.field == "psi":
        state = p.transformed_state()
        stem = "%s_psi_%d_%d" % (p.name, p.state[0], p.state[1])
        f = field_on_grid(model, grid, "psi", state)
    else:
        stem = "%s_%s" % (p.name, p.field)
        f = field_on_grid(model, grid, p.field)
    path = os.path.join(outdir, stem + ".csv")
    write_field_csv(f, path)
    print("wrote %s" % path)
    if args.png:
        if maybe_write_png(f, os.path.join(outdir, stem + ".png"),
                           p.description):
            print("wrote %s" % os.path.join(outdir, stem + ".png"))
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _add_common(sp):
    sp.add_argument("--grid-h", type=float, default=None,
                    help="override grid spacing (box preserved)")
    sp.add_argument("--mask-eps", type=float, default=None,
                    help="override mask radius around excluded sets")
    sp.add_argument("--out", default=None, help="output directory")
    png = sp.add_mutually_exclusive_group()
    png.add_argument("--png", dest="png", action="store_true")
    png.add_argument("--no-png", dest="png", action="store_false")
    sp.set_defaults(png=False)


def build_parser():
    ap = argparse.ArgumentParser(
        prog="pdmmap",
        description="Position-dependent-mass models from holomorphic maps")
    sub = ap.add_subparsers(dest="command", required=True)

    model = sub.add_parser("model", help="model inspection")
    msub = model.add_subparsers(dest="subcommand", required=True)
    show = msub.add_parser("show", help="summarize a model config")
    show.add_argument("config")
    _add_common(show)
    show.set_defaults(func=cmd_model_show)

    export = sub.add_parser("export", help="export configured fields to CSV")
    export.add_argument("config")
    _add_common(export)
    export.set_defaults(func=cmd_export)

    verify = sub.add_parser("verify", help="run configured checks")
    verify.add_argument("config")
    verify.add_argument("--tol-scale", type=float, default=1.0,
                        help="multiply all default tolerances")
    _add_common(verify)
    verify.set_defaults(func=cmd_verify)

    figures = sub.add_parser("figures", help="export a built-in preset")
    figures.add_argument("preset", choices=sorted(PRESETS,
                                                  key=lambda s: int(s[3:])))
    _add_common(figures)
    figures.set_defaults(func=cmd_figures)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 2
    except PdmError as exc:
        print("numerical error: %s" % exc, file=sys.stderr)
        return 3
    except (ValueError, KeyError) as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
