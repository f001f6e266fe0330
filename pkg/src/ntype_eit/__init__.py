"""Detuned EIT in an N-type four-level atom.

Rotating-frame Hamiltonian and dark-state structure (:mod:`ntype_eit.atom`),
Lindblad steady states (:mod:`ntype_eit.bloch`), closed-form susceptibility
expressions (:mod:`ntype_eit.analytic`), parameter sweeps and window
detection (:mod:`ntype_eit.spectra`), figures (:mod:`ntype_eit.plotting`)
and the command line runner (:mod:`ntype_eit.cli`).

All quantities are expressed in units of a reference damping rate gamma,
with hbar = 1.
"""

from ntype_eit.atom import (
    DarkState,
    DarkStateReport,
    DressedStates,
    Eigensystem,
    ParameterError,
    SystemParams,
    build_hamiltonian,
    dark_detunings,
    dark_state_report,
    detuned_dark_state,
    dressed_states,
    lambda_dark_state,
    resonant_eigensystem,
)
from ntype_eit.bloch import (
    DensityMatrix,
    DegenerateSteadyStateError,
    Liouvillian,
    build_liouvillian,
    evolve_to_steady,
    steady_state,
)

__version__ = "0.1.0"

__all__ = [
    "DarkState",
    "DarkStateReport",
    "DegenerateSteadyStateError",
    "DensityMatrix",
    "DressedStates",
    "Eigensystem",
    "Liouvillian",
    "ParameterError",
    "SystemParams",
    "build_hamiltonian",
    "build_liouvillian",
    "dark_detunings",
    "dark_state_report",
    "detuned_dark_state",
    "dressed_states",
    "evolve_to_steady",
    "lambda_dark_state",
    "resonant_eigensystem",
    "steady_state",
    "__version__",
]
