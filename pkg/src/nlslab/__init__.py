"""Pseudospectral laboratory for the 1D cubic NLS with general cubic nonlinearity.

Simulation (integrating-factor RK4 on the profile spectrum), diagnostics
(weighted norms, decay fits, amplitude ODE), and frequency-space verification
tools (phases, cutoffs, trilinear multipliers, empirical estimate constants).
"""

__version__ = "0.1.0"

from .grids import ComplexField, GridSpec, forward_transform, inverse_transform, tail_mass
from .solver import NLSParams, SolveConfig, Trajectory, solve
from .states import WaveState, apply_J, free_propagate, profile_of

__all__ = [
    "__version__",
    "ComplexField",
    "GridSpec",
    "forward_transform",
    "inverse_transform",
    "tail_mass",
    "NLSParams",
    "SolveConfig",
    "Trajectory",
    "solve",
    "WaveState",
    "apply_J",
    "free_propagate",
    "profile_of",
]
