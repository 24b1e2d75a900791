"""Second-order quantum decoherence of a two-mode boson system.

Two bosonic atoms share a ground mode ``g`` and an excited mode ``e`` and
exchange quanta with a reservoir of one or many boson modes. The package
computes the decoherence factor that sets the fringe contrast of the
two-time correlation function, by exact subspace propagation, by resolvent
methods and by a brute-force Fock-space reference.
"""
__version__ = "0.1.0"

from .model import (CombSpec, MeasurementCoeffs, ModelParams, ReservoirMode, SpectralDensity,
                    ValidationError, build_comb, flat_density, validate)
from .subspace import build_multi_mode, build_single_mode
from .evolve import (DecoherenceCurve, Method, decoherence_factor, eigendecompose, propagate,
                     reduced_density)
from .resolvent import (exponential_law, invert_fourier, multi_mode_resolvent,
                        resonant_closed_form, single_mode_resolvent, wigner_weisskopf)
from .correlate import TwoAtomState, g2_compact, g2_first_principles, g2_grid
from .oracle import build_full_hamiltonian, oracle_factor

__all__ = [
    "CombSpec", "MeasurementCoeffs", "ModelParams", "ReservoirMode", "SpectralDensity",
    "ValidationError", "build_comb", "flat_density", "validate",
    "build_single_mode", "build_multi_mode",
    "DecoherenceCurve", "Method", "decoherence_factor", "eigendecompose", "propagate",
    "reduced_density",
    "single_mode_resolvent", "multi_mode_resolvent", "resonant_closed_form", "invert_fourier",
    "wigner_weisskopf", "exponential_law",
    "TwoAtomState", "g2_first_principles", "g2_compact", "g2_grid",
    "build_full_hamiltonian", "oracle_factor",
]
