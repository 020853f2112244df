"""Catalog of holomorphic maps f(z) generating PDM models.

Each family provides the analytic map f, its hand-derived first and
second derivatives, the coordinate transform

    y1 = 2 Re f(z),   y2 = -2 Im f(z)      (z = x1 + i x2),

its analytic inverse x(y), a valid-domain descriptor and a random
in-domain sampler.  Principal branches are used throughout unless a
family documents otherwise.

The same defining expressions are exposed through jet arithmetic
(:meth:`MapFamily.f_jet`) so the analytic derivatives can be checked
against an independent oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from . import jets
from .errors import DomainError, SingularityError

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# excluded sets / domain descriptor
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PointExclusion:
    """A single singular point in y-coordinates."""

    y1: float
    y2: float

    def distance(self, y1, y2):
        return np.hypot(y1 - self.y1, y2 - self.y2)

    def describe(self):
        return "point (%g, %g)" % (self.y1, self.y2)


@dataclass(frozen=True)
class AxisIntervalExclusion:
    """The set {y2 = 0, lo <= y1 <= hi}; lo/hi may be infinite.

    Used for branch-cut images, which lie on the y1-axis for every
    family in the catalog.
    """

    lo: float
    hi: float

    def distance(self, y1, y2):
        d1 = np.maximum(np.maximum(self.lo - y1, y1 - self.hi), 0.0)
        return np.hypot(d1, y2)

    def describe(self):
        return "cut {y2=0, %g <= y1 <= %g}" % (self.lo, self.hi)


@dataclass(frozen=True)
class DomainSpec:
    """Region of the y-plane on which a family's model is defined."""

    kind: str  # "full_plane" | "strip" | "punctured_plane" | "half_plane_image"
    y2_period: Optional[float] = None
    y2_range: Optional[Tuple[float, float]] = None
    excluded: List[object] = field(default_factory=list)

    def excluded_distance(self, y1, y2):
        """Pointwise distance to the nearest excluded set (inf if none)."""
        y1 = np.asarray(y1, dtype=float)
        y2 = np.asarray(y2, dtype=float)
        d = np.full(np.broadcast(y1, y2).shape, np.inf)
        for exc in self.excluded:
            d = np.minimum(d, exc.distance(y1, y2))
        return d

    def describe(self):
        parts = [self.kind]
        if self.y2_period is not None:
            parts.append("y2 period %g" % self.y2_period)
        if self.y2_range is not None:
            parts.append("y2 in [%g, %g)" % self.y2_range)
        for exc in self.excluded:
            parts.append("excluding " + exc.describe())
        return ", ".join(parts)


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


def _as_z(x):
    """Pack a point-pair into complex z = x1 + i x2."""
    x1, x2 = x
    return np.asarray(x1, dtype=float) + 1j * np.asarray(x2, dtype=float)


def _first_bad(z, bad):
    idx = np.argmax(bad)
    return np.asarray(z).ravel()[idx] if np.asarray(z).ndim else complex(z)

def _check(ok, z, message, cls=DomainError):
    bad = ~np.asarray(ok)
    if bad.any():
        raise cls(message, point=_first_bad(z, bad))


def _off_negative_axis(w):
    w = np.asarray(w)
    return ~((w.imag == 0.0) & (w.real <= 0.0))


def _principal_log(w, what, z=None):
    _check(_off_negative_axis(w) & (np.abs(w) > 0.0), w if z is None else z,
           "%s: argument on branch cut or zero" % what)
    return np.log(np.asarray(w, dtype=complex))


def _sqrt_upper(w):
    """Square root with argument taken in [0, 2*pi): maps onto the
    closed upper half plane (positive real axis included)."""
    w = np.asarray(w, dtype=complex)
    theta = np.mod(np.angle(w), TWO_PI)
    return np.sqrt(np.abs(w)) * np.exp(0.5j * theta)


# ---------------------------------------------------------------------------
# family base class
# ---------------------------------------------------------------------------


class MapFamily:
    """Common interface of all holomorphic map families."""

    name: str = ""

    # subclasses implement _f, _fp_fpp, _inv, f_jet, domain, sample_z

    def f_of_z(self, z):
        """Value of the holomorphic map at z (principal branch)."""
        z = np.asarray(z, dtype=complex)
        self._check_z(z)
        return self._f(z)

    def f_derivs(self, z):
        """Analytic (f', f'') at z."""
        z = np.asarray(z, dtype=complex)
        self._check_z(z)
        return self._fp_fpp(z)

    def y_of_x(self, x):
        """Transformed coordinates (y1, y2) = (2 Re f, -2 Im f)."""
        z = _as_z(x)
        w = self.f_of_z(z)
        return 2.0 * w.real, -2.0 * w.imag

    def x_of_y(self, y):
        """Analytic inverse of y_of_x."""
        y1 = np.asarray(y[0], dtype=float)
        y2 = np.asarray(y[1], dtype=float)
        self._check_y(y1, y2)
        fv = 0.5 * (y1 - 1j * y2)
        z = self._inv(fv)
        return z.real, z.imag

    def z_of_y(self, y):
        y1 = np.asarray(y[0], dtype=float)
        y2 = np.asarray(y[1], dtype=float)
        self._check_y(y1, y2)
        return self._inv(0.5 * (y1 - 1j * y2))

    # hooks ------------------------------------------------------------

    def _check_z(self, z):
        """Raise DomainError for z outside the family's z-domain."""

    def _check_y(self, y1, y2):
        dom = self.domain()
        if dom.y2_range is not None:
            lo, hi = dom.y2_range
            _check((y2 >= lo) & (y2 < hi), y1 + 1j * y2,
                   "%s: y2 outside strip [%g, %g)" % (self.name, lo, hi))
        d = dom.excluded_distance(y1, y2)
        _check(d > 0.0, y1 + 1j * y2,
               "%s: point lies on an excluded set" % self.name,
               cls=SingularityError)

    def domain(self) -> DomainSpec:
        raise NotImplementedError

    def params(self) -> dict:
        raise NotImplementedError

    def describe(self):
        p = ", ".join("%s=%g" % kv for kv in self.params().items())
        return "%s{%s}" % (self.name, p)


def _validate(cond, message):
    if not cond:
        raise ValueError(message)


# ---------------------------------------------------------------------------
# concrete families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LogMap(MapFamily):
    """f(z) = ln(alpha*z/(2*gamma) + delta) / alpha.

    Exponential mass profile M = gamma^2 exp(alpha*y1); the y-domain is
    a strip of width 4*pi/|alpha| in y2.
    """

    alpha: float
    gamma: float
    delta: float = 0.0
    name = "log"

    def __post_init__(self):
        _validate(self.alpha != 0.0, "log map: alpha must be nonzero")
        _validate(self.gamma != 0.0, "log map: gamma must be nonzero")

    def _w(self, z):
        return self.alpha * z / (2.0 * self.gamma) + self.delta

    def _f(self, z):
        return _principal_log(self._w(z), "log map", z) / self.alpha

    def _fp_fpp(self, z):
        w = self._w(z)
        fp = 1.0 / (2.0 * self.gamma * w)
        fpp = -self.alpha / (4.0 * self.gamma**2 * w * w)
        return fp, fpp

    def _check_z(self, z):
        _check(_off_negative_axis(self._w(z)) & (np.abs(self._w(z)) > 0), z,
               "log map: z maps onto the branch cut")

    def _inv(self, fv):
        return (2.0 * self.gamma / self.alpha) * (np.exp(self.alpha * fv) - self.delta)

    def f_jet(self, jet):
        w = jet * (self.alpha / (2.0 * self.gamma)) + self.delta
        return jets.jet_ln(w) * (1.0 / self.alpha)

    def domain(self):
        half = TWO_PI / abs(self.alpha)
        return DomainSpec(kind="strip", y2_period=2 * half, y2_range=(-half, half))

    def params(self):
        return {"alpha": self.alpha, "gamma": self.gamma, "delta": self.delta}

    def sample_z(self, n, rng):
        r = rng.uniform(0.3, 3.0, n)
        th = rng.uniform(-0.9 * math.pi, 0.9 * math.pi, n)
        w = r * np.exp(1j * th)
        return (2.0 * self.gamma / self.alpha) * (w - self.delta)


@dataclass(frozen=True)
class AsinhMap(MapFamily):
    """f(z) = asinh(lam^2*z/(4*A)) / lam.

    Mass is a sum of a y1-term and a y2-term:
    M = (2*A^2/lam^2)(cosh(lam*y1) + cos(lam*y2)).
    """

    A: float
    lam: float
    name = "asinh"

    def __post_init__(self):
        _validate(self.A != 0.0, "asinh map: A must be nonzero")
        _validate(self.lam != 0.0, "asinh map: lambda must be nonzero")

    def _u(self, z):
        return self.lam**2 * z / (4.0 * self.A)

    def _f(self, z):
        return np.arcsinh(self._u(z)) / self.lam

    def _fp_fpp(self, z):
        u = self._u(z)
        w = 1.0 + u * u
        r = np.sqrt(w)
        c = self.lam / (4.0 * self.A)
        fp = c / r
        fpp = -c * u / (r * w) * (self.lam**2 / (4.0 * self.A))
        return fp, fpp

    def _check_z(self, z):
        w = 1.0 + self._u(z) ** 2
        _check(_off_negative_axis(w) & (np.abs(w) > 0), z,
               "asinh map: z maps onto the branch cut")

    def _inv(self, fv):
        return (4.0 * self.A / self.lam**2) * np.sinh(self.lam * fv)

    def f_jet(self, jet):
        u = jet * (self.lam**2 / (4.0 * self.A))
        return jets.jet_asinh(u) * (1.0 / self.lam)

    def domain(self):
        half = math.pi / abs(self.lam)
        # f' diverges at the branch points u = +-i, i.e. y = (0, -+pi/lam)
        return DomainSpec(
            kind="strip",
            y2_period=2 * half,
            y2_range=(-half, half + 0.0),
            excluded=[PointExclusion(0.0, -half), PointExclusion(0.0, half)],
        )

    def _check_y(self, y1, y2):
        dom = self.domain()
        lo, hi = dom.y2_range
        _check((y2 >= lo) & (y2 <= hi), y1 + 1j * y2,
               "asinh map: y2 outside strip")
        d = dom.excluded_distance(y1, y2)
        _check(d > 0.0, y1 + 1j * y2, "asinh map: singular point",
               cls=SingularityError)

    def params(self):
        return {"A": self.A, "lam": self.lam}

    def sample_z(self, n, rng):
        out = np.empty(n, dtype=complex)
        have = 0
        while have < n:
            u = rng.uniform(-2, 2, 2 * n) + 1j * rng.uniform(-2, 2, 2 * n)
            ok = ~((np.abs(u.real) < 0.1) & (np.abs(u.imag) > 0.8))
            good = u[ok][: n - have]
            out[have : have + good.size] = good
            have += good.size
        return 4.0 * self.A * out / self.lam**2


@dataclass(frozen=True)
class PowerMap(MapFamily):
    """f(z) = ((lam+1)*(z/beta + alpha_shift))**(1/(lam+1)), lam != -1.

    Radial mass profile M = beta^2/4**(lam+1) * rho**(2*lam).
    """

    lam: float
    beta: float
    alpha_shift: float = 0.0
    name = "power"

    def __post_init__(self):
        _validate(self.lam != -1.0, "power map: lambda = -1 is the exp_radial family")
        _validate(self.beta != 0.0, "power map: beta must be nonzero")

    def _w(self, z):
        return (self.lam + 1.0) * (z / self.beta + self.alpha_shift)

    def _f(self, z):
        p = 1.0 / (self.lam + 1.0)
        return np.asarray(self._w(z), dtype=complex) ** p

    def _fp_fpp(self, z):
        w = np.asarray(self._w(z), dtype=complex)
        q = self.lam + 1.0
        fp = w ** (-self.lam / q) / self.beta
        fpp = -self.lam * w ** (-(2.0 * self.lam + 1.0) / q) / self.beta**2
        return fp, fpp

    def _check_z(self, z):
        w = self._w(z)
        _check(_off_negative_axis(w) & (np.abs(w) > 0), z,
               "power map: z maps onto the branch cut")

    def _inv(self, fv):
        q = self.lam + 1.0
        fv = np.asarray(fv, dtype=complex)
        return self.beta * (fv**q / q - self.alpha_shift)

    def f_jet(self, jet):
        q = self.lam + 1.0
        w = jet * (q / self.beta) + q * self.alpha_shift
        return jets.jet_pow(w, 1.0 / q)

    def domain(self):
        excluded = [PointExclusion(0.0, 0.0)]
        q = self.lam + 1.0
        if q != round(q):
            # image of the principal cut: f negative real <=> negative y1 axis
            excluded.append(AxisIntervalExclusion(-math.inf, 0.0))
        return DomainSpec(kind="punctured_plane", excluded=excluded)

    def params(self):
        return {"lam": self.lam, "beta": self.beta, "alpha_shift": self.alpha_shift}

    def sample_z(self, n, rng):
        r = rng.uniform(0.3, 3.0, n)
        th = rng.uniform(-0.9 * math.pi, 0.9 * math.pi, n)
        w = r * np.exp(1j * th)
        return self.beta * (w / (self.lam + 1.0) - self.alpha_shift)


@dataclass(frozen=True)
class ExpRadialMap(MapFamily):
    """f(z) = gamma * exp(z/beta): the lam = -1 radial branch, with
    mass M = beta^2 / rho^2."""

    gamma: float
    beta: float
    name = "exp_radial"

    def __post_init__(self):
        _validate(self.gamma != 0.0, "exp_radial map: gamma must be nonzero")
        _validate(self.beta != 0.0, "exp_radial map: beta must be nonzero")

    def _f(self, z):
        return self.gamma * np.exp(z / self.beta)

    def _fp_fpp(self, z):
        f = self._f(z)
        return f / self.beta, f / self.beta**2

    def _check_z(self, z):
        # single-valued inverse restricts z to the principal strip
        t = np.asarray(z / self.beta).imag
        _check((t > -math.pi) & (t <= math.pi), z,
               "exp_radial map: z outside the principal strip")

    def _inv(self, fv):
        return self.beta * _principal_log(np.asarray(fv) / self.gamma, "exp_radial inverse")

    def f_jet(self, jet):
        return jets.jet_exp(jet * (1.0 / self.beta)) * self.gamma

    def domain(self):
        cut = (AxisIntervalExclusion(-math.inf, 0.0) if self.gamma > 0
               else AxisIntervalExclusion(0.0, math.inf))
        return DomainSpec(kind="punctured_plane",
                          excluded=[PointExclusion(0.0, 0.0), cut])

    def params(self):
        return {"gamma": self.gamma, "beta": self.beta}

    def sample_z(self, n, rng):
        s = rng.uniform(-1.5, 1.5, n)
        th = rng.uniform(-0.9 * math.pi, 0.9 * math.pi, n)
        return self.beta * (s + 1j * th)


@dataclass(frozen=True)
class InverseMap(MapFamily):
    """f(z) = b/z, with mass M = 4*b^2/rho^4."""

    b: float
    name = "inverse"

    def __post_init__(self):
        _validate(self.b != 0.0, "inverse map: b must be nonzero")

    def _f(self, z):
        return self.b / z

    def _fp_fpp(self, z):
        return -self.b / z**2, 2.0 * self.b / z**3

    def _check_z(self, z):
        _check(np.abs(z) > 0.0, z, "inverse map: pole at z = 0",
               cls=SingularityError)

    def _inv(self, fv):
        fv = np.asarray(fv, dtype=complex)
        _check(np.abs(fv) > 0.0, fv, "inverse map: rho = 0",
               cls=SingularityError)
        return self.b / fv

    def f_jet(self, jet):
        return jets.Jet2.constant(self.b) / jet

    def domain(self):
        return DomainSpec(kind="punctured_plane",
                          excluded=[PointExclusion(0.0, 0.0)])

    def params(self):
        return {"b": self.b}

    def sample_z(self, n, rng):
        r = rng.uniform(0.3, 3.0, n)
        th = rng.uniform(-math.pi, math.pi, n)
        return r * np.exp(1j * th)


@dataclass(frozen=True)
class QuadraticMap(MapFamily):
    """f(z) = a*z^2, with mass M = 1/(8*|a|*rho).

    The inverse square root takes its argument in [0, 2*pi), so x(y)
    covers the closed upper half x-plane and the cut image is the
    positive y1 axis.
    """

    a: float
    name = "quadratic"

    def __post_init__(self):
        _validate(self.a != 0.0, "quadratic map: a must be nonzero")

    def _f(self, z):
        return self.a * z * z

    def _fp_fpp(self, z):
        return 2.0 * self.a * z, np.full_like(np.asarray(z, dtype=complex), 2.0 * self.a)

    def _check_z(self, z):
        _check(np.abs(z) > 0.0, z, "quadratic map: f' vanishes at z = 0",
               cls=SingularityError)

    def _inv(self, fv):
        fv = np.asarray(fv, dtype=complex)
        _check(np.abs(fv) > 0.0, fv, "quadratic map: rho = 0",
               cls=SingularityError)
        return _sqrt_upper(fv / self.a)

    def f_jet(self, jet):
        return jet * jet * self.a

    def domain(self):
        return DomainSpec(
            kind="half_plane_image",
            excluded=[PointExclusion(0.0, 0.0),
                      AxisIntervalExclusion(0.0, math.inf)],
        )

    def params(self):
        return {"a": self.a}

    def sample_z(self, n, rng):
        # upper half plane: the image of x_of_y with arg in [0, 2*pi)
        r = rng.uniform(0.3, 3.0, n)
        th = rng.uniform(0.05 * math.pi, 0.95 * math.pi, n)
        return r * np.exp(1j * th)


@dataclass(frozen=True)
class LogisticMap(MapFamily):
    """f(z) = 1/(a*exp(lam*z) + b), lam > 0.

    Satisfies f' = -lam*f*(1 - b*f) and f'' = -lam*(1 - 2*b*f)*f'.
    The sign of the exponent is fixed so that these identities hold
    exactly; the mass and potential-shift closed forms in polar
    y-coordinates are unaffected by the choice.
    """

    a: float
    b: float
    lam: float
    name = "logistic"

    def __post_init__(self):
        _validate(self.a != 0.0, "logistic map: a must be nonzero")
        _validate(self.lam > 0.0, "logistic map: lambda must be positive")

    def _den(self, z):
        return self.a * np.exp(self.lam * np.asarray(z, dtype=complex)) + self.b

    def _f(self, z):
        return 1.0 / self._den(z)

    def _fp_fpp(self, z):
        f = self._f(z)
        fp = -self.lam * f * (1.0 - self.b * f)
        fpp = -self.lam * (1.0 - 2.0 * self.b * f) * fp
        return fp, fpp

    def _check_z(self, z):
        t = np.asarray(z).imag * self.lam
        _check((t > -math.pi) & (t <= math.pi), z,
               "logistic map: z outside the principal strip")
        den = self._den(z)
        _check(np.abs(den) > 0.0, z, "logistic map: pole of f",
               cls=SingularityError)

    def _inv(self, fv):
        fv = np.asarray(fv, dtype=complex)
        _check(np.abs(fv) > 0.0, fv, "logistic map: rho = 0",
               cls=SingularityError)
        w = (1.0 / fv - self.b) / self.a
        return _principal_log(w, "logistic inverse") / self.lam

    def f_jet(self, jet):
        den = jets.jet_exp(jet * self.lam) * self.a + self.b
        return jets.Jet2.constant(1.0) / den

    def _cut_intervals(self):
        """Intervals of the y1 axis where (2/y1 - b)/a <= 0, i.e. the
        image of the inverse-log branch cut (origin included)."""
        a, b = self.a, self.b
        if b == 0.0:
            return [(-math.inf, 0.0)] if a > 0 else [(0.0, math.inf)]
        if a > 0:
            if b > 0:
                return [(-math.inf, 0.0), (2.0 / b, math.inf)]
            return [(2.0 / b, 0.0)]
        if b > 0:
            return [(0.0, 2.0 / b)]
        return [(-math.inf, 2.0 / b), (0.0, math.inf)]

    def domain(self):
        excluded = [PointExclusion(0.0, 0.0)]
        if self.b != 0.0:
            excluded.append(PointExclusion(2.0 / self.b, 0.0))
        excluded.extend(AxisIntervalExclusion(lo, hi)
                        for lo, hi in self._cut_intervals())
        return DomainSpec(kind="punctured_plane", excluded=excluded)

    def params(self):
        return {"a": self.a, "b": self.b, "lam": self.lam}

    def sample_z(self, n, rng):
        out = np.empty(n, dtype=complex)
        have = 0
        while have < n:
            s = rng.uniform(-2.0, 2.0, 2 * n)
            th = rng.uniform(-0.9 * math.pi, 0.9 * math.pi, 2 * n)
            z = (s + 1j * th) / self.lam
            den = self._den(z)
            scale = np.abs(self.a * np.exp(self.lam * z)) + abs(self.b)
            good = z[np.abs(den) > 0.1 * scale][: n - have]
            out[have : have + good.size] = good
            have += good.size
        return out


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------

FAMILY_CLASSES = {
    "log": LogMap,
    "asinh": AsinhMap,
    "power": PowerMap,
    "exp_radial": ExpRadialMap,
    "inverse": InverseMap,
    "quadratic": QuadraticMap,
    "logistic": LogisticMap,
}

_PARAM_KEYS = {
    "log": ("alpha", "gamma", "delta"),
    "asinh": ("A", "lam"),
    "power": ("lam", "beta", "alpha_shift"),
    "exp_radial": ("gamma", "beta"),
    "inverse": ("b",),
    "quadratic": ("a",),
    "logistic": ("a", "b", "lam"),
}


def make_family(name: str, **params) -> MapFamily:
    """Construct a family by catalog name, validating parameter keys."""
    if name == "power" and params.get("lam") == -1.0:
        raise ValueError(
            "power map with lam = -1 is a separate branch: use exp_radial")
    try:
        cls = FAMILY_CLASSES[name]
    except KeyError:
        raise ValueError(
            "unknown map family %r; catalog: %s"
            % (name, ", ".join(sorted(FAMILY_CLASSES)))) from None
    allowed = set(_PARAM_KEYS[name])
    unknown = set(params) - allowed
    if unknown:
        raise ValueError("unknown parameter(s) %s for family %r"
                         % (sorted(unknown), name))
    return cls(**params)
