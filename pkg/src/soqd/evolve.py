"""Exact propagation inside an invariant subspace.

The propagator is assembled from a full Hermitian eigendecomposition,
``U(T) = V exp(-i diag(lam) T) V^+``, which is exact to rounding at every
time and needs no step-size control.
"""
from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field

import numpy as np

from .subspace import HERMITIAN_TOL, SubspaceSystem

__all__ = [
    "Method",
    "Spectrum",
    "PropagatorRow",
    "ReducedDensityWeights",
    "DecoherenceCurve",
    "UndersampledWarning",
    "eigendecompose",
    "propagate",
    "decoherence_factor",
    "reduced_density",
    "reduced_density_series",
    "default_times",
    "check_sampling",
    "DEFAULT_SAMPLES",
]

DEFAULT_SAMPLES = 2048
SAMPLES_PER_PERIOD = 20


class Method(str, enum.Enum):
    EVOLUTION = "evolution"
    RESOLVENT_INVERSION = "resolvent-inversion"
    CLOSED_FORM_RESONANT = "closed-form-resonant"
    WIGNER_WEISSKOPF = "wigner-weisskopf"
    ORACLE = "oracle"


class UndersampledWarning(UserWarning):
    """Time grid has fewer than 20 samples per shortest oscillation period."""


@dataclass(frozen=True, eq=False)
class Spectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def span(self) -> float:
        return float(self.eigenvalues[-1] - self.eigenvalues[0])


@dataclass(frozen=True, eq=False)
class PropagatorRow:
    """Amplitudes ``(M|U(T)|initial)``; rows are times, columns basis labels."""

    times: np.ndarray
    initial: object
    basis: tuple
    amplitudes: np.ndarray

    def column(self, label) -> np.ndarray:
        return self.amplitudes[:, self.basis.index(label)]

    @property
    def diagonal(self) -> np.ndarray:
        return self.column(self.initial)

    @property
    def norms(self) -> np.ndarray:
        return np.sum(np.abs(self.amplitudes) ** 2, axis=1)


@dataclass(frozen=True)
class ReducedDensityWeights:
    """Diagonal of the two-atom reduced density.

    Order: ``|0_g,2_e>``, ``|1_g,1_e>``, ``|2_g,0_e>``.
    """

    p_upper: float
    p_mid: float
    p_lower: float

    def as_array(self) -> np.ndarray:
        return np.array([self.p_upper, self.p_mid, self.p_lower])


@dataclass(eq=False)
class DecoherenceCurve:
    times: np.ndarray
    factor: np.ndarray
    method: Method
    params_digest: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.factor = np.asarray(self.factor, dtype=float)
        self.method = Method(self.method)
        if self.times.shape != self.factor.shape:
            raise ValueError("times and factor must have the same shape")

    def clipped(self) -> np.ndarray:
        """Factor limited to [0, 1]; meant for display only."""
        return np.clip(self.factor, 0.0, 1.0)


def _as_matrix(system) -> np.ndarray:
    h = system.hamiltonian if isinstance(system, SubspaceSystem) else system
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError("Hamiltonian must be a square matrix")
    return h


def eigendecompose(system) -> Spectrum:
    """Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix.

    Accepts a :class:`SubspaceSystem` or a bare square array.
    """
    h = _as_matrix(system)
    scale = max(np.max(np.abs(h), initial=0.0), 1.0)
    if np.max(np.abs(h - h.conj().T), initial=0.0) >= HERMITIAN_TOL * scale:
        raise ValueError("matrix is not Hermitian")
    if np.isrealobj(h) or not np.any(h.imag):
        lam, vec = np.linalg.eigh(h.real)
    else:
        lam, vec = np.linalg.eigh(h)
    return Spectrum(lam, vec)


def _diag_amplitudes(spectrum: Spectrum, idx: int, times: np.ndarray) -> np.ndarray:
    weights = np.abs(spectrum.eigenvectors[idx]) ** 2
    return np.exp(-1j * np.outer(times, spectrum.eigenvalues)) @ weights


def _times(times, allow_negative=False) -> np.ndarray:
    t = np.atleast_1d(np.asarray(times, dtype=float))
    if t.ndim != 1:
        raise ValueError("times must be one-dimensional")
    if not np.all(np.isfinite(t)):
        raise ValueError("times must be finite")
    if not allow_negative and np.any(t < 0):
        raise ValueError("times must be non-negative")
    return t


def propagate(system: SubspaceSystem, initial, times, spectrum: Spectrum | None = None,
              allow_negative: bool = False) -> PropagatorRow:
    """Amplitudes ``(M|U(T)|initial)`` for every basis label ``M``."""
    idx = system.index(initial)
    t = _times(times, allow_negative)
    spec = spectrum or eigendecompose(system)
    vec = spec.eigenvectors
    phases = np.exp(-1j * np.outer(t, spec.eigenvalues))
    # (M|U|n) = sum_k V[M,k] e^{-i lam_k T} conj(V[n,k])
    amps = (phases * vec[idx].conj()) @ vec.T
    amps[t == 0] = np.eye(system.dim)[idx]
    return PropagatorRow(t, initial, system.basis, amps)


def default_times(t_max: float, samples: int = DEFAULT_SAMPLES) -> np.ndarray:
    if t_max <= 0 or samples < 2:
        raise ValueError("need t_max > 0 and at least two samples")
    return np.linspace(0.0, float(t_max), int(samples))


def check_sampling(spectrum: Spectrum, times) -> bool:
    """Warn and return False when the grid under-resolves the fastest beat."""
    t = np.asarray(times, dtype=float)
    if t.size < 2 or spectrum.span == 0:
        return True
    period = 2 * np.pi / spectrum.span
    step = np.max(np.diff(np.sort(t)))
    if step > period / SAMPLES_PER_PERIOD:
        warnings.warn(
            f"time step {step:.4g} exceeds 1/{SAMPLES_PER_PERIOD} of the shortest "
            f"period {period:.4g}", UndersampledWarning, stacklevel=3)
        return False
    return True


def decoherence_factor(system: SubspaceSystem, times, spectrum: Spectrum | None = None,
                       digest: str = "", allow_negative: bool = False) -> DecoherenceCurve:
    """``|(N|U(T)|N)|^2`` (or ``|(0|U(T)|0)|^2``) sampled on ``times``."""
    t = _times(times, allow_negative)
    spec = spectrum or eigendecompose(system)
    check_sampling(spec, t)
    amp = _diag_amplitudes(spec, system.index(system.initial), t)
    factor = np.abs(amp) ** 2
    factor[t == 0] = 1.0
    return DecoherenceCurve(t, factor, Method.EVOLUTION, digest)


def _weights_from_row(system: SubspaceSystem, probs: np.ndarray):
    """Split populations of a propagated row into (upper, mid, lower)."""
    if system.is_single_mode:
        by_k = {label.k: probs[..., i] for i, label in enumerate(system.basis)}
        zero = np.zeros_like(probs[..., 0])
        return by_k.get(-1, zero), by_k[0], by_k[1]
    return np.zeros_like(probs[..., 0]), probs[..., 0], probs[..., 1:].sum(axis=-1)


def reduced_density(system: SubspaceSystem, T: float) -> ReducedDensityWeights:
    row = propagate(system, system.initial, [T])
    upper, mid, lower = _weights_from_row(system, np.abs(row.amplitudes[0]) ** 2)
    return ReducedDensityWeights(float(upper), float(mid), float(lower))


def reduced_density_series(system: SubspaceSystem, times) -> np.ndarray:
    """Array of shape (len(times), 3) with columns p_upper, p_mid, p_lower."""
    row = propagate(system, system.initial, times)
    return np.column_stack(_weights_from_row(system, np.abs(row.amplitudes) ** 2))
