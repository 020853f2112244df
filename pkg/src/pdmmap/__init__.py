"""pdmmap: 2D position-dependent-mass Schrodinger models from
holomorphic point transformations, with grid-based verification."""

from .basemodels import (AnisotropicOscillator, Eigenpair1D, Grid1D, Morse,
                         Oscillator1D, OscillatorState, RosenMorseTrig,
                         Separable, SeparableState, hermite_eval,
                         oscillator_state, solve_1d)
from .maps import DomainSpec, MapFamily, make_family
from .pdm import (PDMModel, TransformedState, mass_closed_form, mass_of,
                  potential_U, potential_shift_closed_form,
                  potential_shift_generic, potential_shift_printed, weight_g)
from .verify import (Field2D, Grid2D, VerificationReport, convergence_study,
                     eigen_residual, grid_for_model, hermiticity_decay,
                     metric_residual, normalization_check, symmetry_check)

__version__ = "0.1.0"
