"""Second-order complex Taylor jets (forward-mode differentiation).

A :class:`Jet2` carries a value together with its first and second
derivative with respect to a single complex variable.  The map catalog
uses jets as an independent oracle for its hand-derived f', f''; nothing
here knows about any specific map.

All elementary functions use the principal branch, cut along the
negative real axis.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import BranchCutError, SingularityError

_SINGULAR_EPS = 0.0  # |val| must be strictly positive for division


@dataclass(frozen=True)
class Jet2:
    """Value plus first and second complex derivative."""

    val: complex
    d1: complex
    d2: complex

    def __post_init__(self):
        for c in (self.val, self.d1, self.d2):
            z = complex(c)
            if not (math.isfinite(z.real) and math.isfinite(z.imag)):
                raise ValueError("non-finite jet component: %r" % (c,))

    @staticmethod
    def variable(z: complex) -> "Jet2":
        """The identity map evaluated at z: val=z, d1=1, d2=0."""
        return Jet2(complex(z), 1.0 + 0.0j, 0.0 + 0.0j)

    @staticmethod
    def constant(c: complex) -> "Jet2":
        return Jet2(complex(c), 0.0 + 0.0j, 0.0 + 0.0j)

    # -- arithmetic --------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        return Jet2(self.val + other.val, self.d1 + other.d1, self.d2 + other.d2)

    __radd__ = __add__

    def __neg__(self):
        return Jet2(-self.val, -self.d1, -self.d2)

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        return Jet2(
            self.val * other.val,
            self.d1 * other.val + self.val * other.d1,
            self.d2 * other.val + 2.0 * self.d1 * other.d1 + self.val * other.d2,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if abs(other.val) <= _SINGULAR_EPS:
            raise SingularityError("jet division by zero value", point=other.val)
        q = self.val / other.val
        d1 = (self.d1 - q * other.d1) / other.val
        d2 = (self.d2 - 2.0 * d1 * other.d1 - q * other.d2) / other.val
        return Jet2(q, d1, d2)

    def __rtruediv__(self, other):
        return _coerce(other) / self


def _coerce(x) -> Jet2:
    if isinstance(x, Jet2):
        return x
    return Jet2.constant(x)


def _chain(a: Jet2, g: complex, gp: complex, gpp: complex) -> Jet2:
    """Compose an outer elementary function (value g, derivatives gp,
    gpp at a.val) with the inner jet a."""
    return Jet2(g, gp * a.d1, gpp * a.d1 * a.d1 + gp * a.d2)


def _check_off_cut(val: complex, what: str):
    if val.imag == 0.0 and val.real <= 0.0:
        raise BranchCutError("%s on branch cut (negative real axis)" % what, point=val)


# -- elementary functions --------------------------------------------


def jet_exp(a: Jet2) -> Jet2:
    e = cmath.exp(a.val)
    return _chain(a, e, e, e)


def jet_ln(a: Jet2) -> Jet2:
    _check_off_cut(complex(a.val), "ln")
    v = complex(a.val)
    return _chain(a, cmath.log(v), 1.0 / v, -1.0 / (v * v))


def jet_sinh(a: Jet2) -> Jet2:
    v = complex(a.val)
    s, c = cmath.sinh(v), cmath.cosh(v)
    return _chain(a, s, c, s)


def jet_asinh(a: Jet2) -> Jet2:
    v = complex(a.val)
    w = 1.0 + v * v
    # principal asinh = ln(v + sqrt(1+v^2)); cut where 1+v^2 <= 0
    if w.imag == 0.0 and w.real <= 0.0:
        raise BranchCutError("asinh on branch cut", point=v)
    r = cmath.sqrt(w)
    return _chain(a, cmath.asinh(v), 1.0 / r, -v / (r * w))


def jet_pow(a: Jet2, p: float) -> Jet2:
    """a**p for real exponent p; principal branch for non-integer p."""
    v = complex(a.val)
    if p != round(p):
        _check_off_cut(v, "pow")
    if abs(v) == 0.0:
        if p >= 2:
            return _chain(a, 0.0, 0.0, 0.0)
        raise SingularityError("pow of zero base with exponent < 2", point=v)
    g = v**p
    gp = p * v ** (p - 1.0)
    gpp = p * (p - 1.0) * v ** (p - 2.0)
    return _chain(a, g, gp, gpp)


# spec-facing aliases for the arithmetic operations
def jet_add(a: Jet2, b: Jet2) -> Jet2:
    return a + b


def jet_mul(a: Jet2, b: Jet2) -> Jet2:
    return a * b


def jet_div(a: Jet2, b: Jet2) -> Jet2:
    return a / b


def jet_neg(a: Jet2) -> Jet2:
    return -a


def oracle_derivs(family, z: complex):
    """Evaluate a map family's defining expression through jet
    arithmetic, returning (f, f', f'') independently of the family's
    hand-derived formulas."""
    jet = family.f_jet(Jet2.variable(z))
    return jet.val, jet.d1, jet.d2
