"""Built-in figure presets.

Two model setups, five fields each: the exponential-mass strip model
(log map, alpha = gamma = 1, oscillator omega = (1, sqrt 2)) and the
inverse-radial-mass model (quadratic map, a = 1/8, same oscillator).
Axis ranges are a choice of this package: they cover the visible
structure of each field and are recorded in the preset description.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

from .basemodels import AnisotropicOscillator, oscillator_state
from .maps import make_family
from .pdm import PDMModel, TransformedState
from .verify import annulus_region, grid_for_model

OMEGA1 = 1.0
OMEGA2 = math.sqrt(2.0)


@dataclass(frozen=True)
class Preset:
    """A ready-to-export field: model + grid + which quantity."""

    name: str
    description: str
    field: str                      # "M" | "U" | "psi"
    state: Optional[Tuple[int, int]]
    origin: Tuple[float, float]
    h: float
    nx: int
    ny: int
    region: Optional[Callable] = None
    periodic_y2: bool = False

    def model(self) -> PDMModel:
        if self.name in _STRIP:
            family = make_family("log", alpha=1.0, gamma=1.0, delta=0.0)
        else:
            family = make_family("quadratic", a=0.125)
        base = AnisotropicOscillator(omega1=OMEGA1, omega2=OMEGA2)
        return PDMModel(family, base)

    def transformed_state(self) -> TransformedState:
        if self.state is None:
            raise ValueError("preset %r exports %s, not a state"
                             % (self.name, self.field))
        n1, n2 = self.state
        return TransformedState(self.model(),
                                oscillator_state(OMEGA1, OMEGA2, n1, n2))

    def grid(self, h=None, eps=None):
        h = self.h if h is None else h
        nx = int(round((self.nx - 1) * self.h / h)) + 1
        ny = int(round((self.ny - 1) * self.h / h)) + 1
        return grid_for_model(self.model(), self.origin, h, nx, ny,
                              eps=eps, region=self.region)


_STRIP = {"fig1", "fig2", "fig3", "fig4", "fig5"}

# strip presets: y1 in [-3, 2.5], y2 in [-6.2, 6.2] (inside one
# injectivity strip y2 in [-2*pi, 2*pi))
_S = dict(origin=(-3.0, -6.2), h=0.05, nx=111, ny=249)
# radial presets: square [-6.5, 6.5]^2 restricted to the annulus
# rho in [0.3, 6]
_R = dict(origin=(-6.5, -6.5), h=0.05, nx=261, ny=261,
          region=annulus_region(0.3, 6.0))

PRESETS = {
    "fig1": Preset("fig1", "mass of the strip model; "
                   "y1 in [-3,2.5], y2 in [-6.2,6.2]", "M", None, **_S),
    "fig2": Preset("fig2", "effective potential of the strip model",
                   "U", None, **_S),
    "fig3": Preset("fig3", "strip-model ground state (0,0)",
                   "psi", (0, 0), **_S),
    "fig4": Preset("fig4", "strip-model first excited state (1,0)",
                   "psi", (1, 0), **_S),
    "fig5": Preset("fig5", "strip-model second excited state (0,1)",
                   "psi", (0, 1), **_S),
    "fig6": Preset("fig6", "mass of the radial model; annulus "
                   "rho in [0.3,6]", "M", None, **_R),
    "fig7": Preset("fig7", "effective potential of the radial model",
                   "U", None, **_R),
    "fig8": Preset("fig8", "radial-model ground state (0,0)",
                   "psi", (0, 0), **_R),
    "fig9": Preset("fig9", "radial-model first excited state (1,0)",
                   "psi", (1, 0), **_R),
    "fig10": Preset("fig10", "radial-model second excited state (0,1)",
                    "psi", (0, 1), **_R),
}


def preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError("unknown preset %r; available: %s"
                       % (name, ", ".join(sorted(PRESETS, key=_fignum))))


def _fignum(name):
    return int(name[3:])
