"""Second-order correlation function of the two-atom system.

``G(t, t') = Tr(rho B^+(t) B^+(t') B(t') B(t))`` with the Heisenberg-picture
field ``B(t) = c1 b_g + c2 b_e exp(-i omega_e t)``. The first-principles route
builds the ladder operators on the two-mode Fock space; the compact route
uses ``G = (1 + p_mid cos(omega_e (t - t'))) / 2`` valid for ``c1 = c2 = 1/sqrt2``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .evolve import ReducedDensityWeights
from .model import MeasurementCoeffs

__all__ = [
    "TwoAtomState",
    "CorrelationGrid",
    "g2_first_principles",
    "g2_compact",
    "g2_grid",
    "g2_compact_grid",
    "visibility",
]

_MAX_OCC = 2  # two atoms in total


@dataclass(frozen=True)
class TwoAtomState:
    """Diagonal two-atom density over ``|0_g,2_e>, |1_g,1_e>, |2_g,0_e>``."""

    p_upper: float
    p_mid: float
    p_lower: float

    def __post_init__(self):
        w = self.weights
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite and non-negative")
        if abs(w.sum() - 1) > 1e-10:
            raise ValueError(f"weights must sum to 1, got {w.sum()!r}")

    @property
    def weights(self) -> np.ndarray:
        return np.array([self.p_upper, self.p_mid, self.p_lower], dtype=float)

    @classmethod
    def from_weights(cls, w: ReducedDensityWeights) -> "TwoAtomState":
        # rounding in a propagated row can leave tiny negative values
        p = np.clip(w.as_array(), 0.0, None)
        return cls(*(p / p.sum()))

    @classmethod
    def pure(cls, which: str) -> "TwoAtomState":
        table = {"0g2e": (1, 0, 0), "1g1e": (0, 1, 0), "2g0e": (0, 0, 1)}
        return cls(*table[which])


@dataclass(frozen=True, eq=False)
class CorrelationGrid:
    t_values: np.ndarray
    tprime_values: np.ndarray
    g: np.ndarray


def _ladder():
    """``b_g`` and ``b_e`` on the product space with occupations 0..2 each."""
    a = np.diag(np.sqrt(np.arange(1, _MAX_OCC + 1)), k=1)
    eye = np.eye(_MAX_OCC + 1)
    # index = n_g * 3 + n_e
    return np.kron(a, eye), np.kron(eye, a)


_B_G, _B_E = _ladder()


def _fock_index(n_g, n_e):
    return n_g * (_MAX_OCC + 1) + n_e


_STATE_INDEX = [_fock_index(0, 2), _fock_index(1, 1), _fock_index(2, 0)]


def _pair_terms(coeffs: MeasurementCoeffs):
    """Columns of the four time-independent pieces of ``B(t') B(t)``.

    ``B(t') B(t) = c1^2 bg bg + c1 c2 (e^{-iwt} bg be + e^{-iwt'} be bg)
    + c2^2 e^{-iw(t+t')} be be``; each piece is applied to the three basis
    states.
    """
    c1, c2 = complex(coeffs.c1), complex(coeffs.c2)
    cols = _STATE_INDEX
    gg = (c1 * c1 * (_B_G @ _B_G))[:, cols]
    ge = (c1 * c2 * (_B_G @ _B_E))[:, cols]   # carries e^{-iwt}
    eg = (c1 * c2 * (_B_E @ _B_G))[:, cols]   # carries e^{-iwt'}
    ee = (c2 * c2 * (_B_E @ _B_E))[:, cols]   # carries e^{-iw(t+t')}
    return gg, ge, eg, ee


def _g2(weights, coeffs, omega_e, t, tp):
    t = np.asarray(t, dtype=float)[..., None, None]
    tp = np.asarray(tp, dtype=float)[..., None, None]
    gg, ge, eg, ee = _pair_terms(coeffs)
    out = (gg + ge * np.exp(-1j * omega_e * t) + eg * np.exp(-1j * omega_e * tp)
           + ee * np.exp(-1j * omega_e * (t + tp)))
    # diagonal rho: G = sum_i rho_i || B(t')B(t) |i> ||^2
    norms = np.sum(np.abs(out) ** 2, axis=-2)
    return norms @ weights


def g2_first_principles(state: TwoAtomState, coeffs: MeasurementCoeffs, omega_e: float,
                        t: float, tprime: float) -> float:
    return float(_g2(state.weights, coeffs, omega_e, t, tprime))


def g2_compact(p_mid: float, omega_e: float, t, tprime):
    """Balanced-measurement correlation ``(1 + p_mid cos(omega_e (t - t'))) / 2``."""
    if not 0.0 <= p_mid <= 1.0:
        raise ValueError(f"p_mid must lie in [0, 1], got {p_mid!r}")
    return 0.5 * (1 + p_mid * np.cos(omega_e * (np.asarray(t) - np.asarray(tprime))))


def g2_grid(state: TwoAtomState, coeffs: MeasurementCoeffs, omega_e: float,
            t_values, tprime_values) -> CorrelationGrid:
    t = np.atleast_1d(np.asarray(t_values, dtype=float))
    tp = np.atleast_1d(np.asarray(tprime_values, dtype=float))
    if t.size == 0 or tp.size == 0:
        raise ValueError("grids must be non-empty")
    g = _g2(state.weights, coeffs, omega_e, t[:, None], tp[None, :])
    return CorrelationGrid(t, tp, g)


def g2_compact_grid(p_mid: float, omega_e: float, t_values, tprime_values) -> CorrelationGrid:
    t = np.atleast_1d(np.asarray(t_values, dtype=float))
    tp = np.atleast_1d(np.asarray(tprime_values, dtype=float))
    return CorrelationGrid(t, tp, g2_compact(p_mid, omega_e, t[:, None], tp[None, :]))


def visibility(values) -> float:
    """Fringe contrast ``(max - min) / (max + min)``."""
    v = np.asarray(values, dtype=float)
    hi, lo = v.max(), v.min()
    return 0.0 if hi + lo == 0 else float((hi - lo) / (hi + lo))
