"""Invariant subspaces of the Hamiltonian and their dense matrices.

Single-mode reservoir, starting from ``|1_g, 1_e, N>``::

    k = -1 : |0_g, 2_e, N-1>
    k =  0 : |1_g, 1_e, N>
    k = +1 : |2_g, 0_e, N+1>

Many-mode reservoir in the vacuum, starting from ``|1_g, 1_e, {0}>``::

    Zero   : |1_g, 1_e, {0_j}>
    One(j) : |2_g, 0_e, 1_j>

Matrix elements follow from the ladder operator action of
``V = sum_j d_j (a_j b_e^+ b_g + a_j^+ b_g^+ b_e)``: the ``|N>`` state couples
to ``k = -1`` with ``d sqrt(2N)`` and to ``k = +1`` with ``d sqrt(2(N+1))``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .model import ModelParams

__all__ = [
    "SingleModeLabel",
    "ZeroLabel",
    "OneQuantumLabel",
    "BasisLabel",
    "SubspaceSystem",
    "build_single_mode",
    "build_multi_mode",
    "HERMITIAN_TOL",
]

HERMITIAN_TOL = 1e-14


@dataclass(frozen=True)
class SingleModeLabel:
    """``|N+k)`` for ``k`` in {-1, 0, +1}."""

    k: int

    def __post_init__(self):
        if self.k not in (-1, 0, 1):
            raise ValueError(f"offset k must be -1, 0 or +1, got {self.k}")

    def __str__(self):
        return {-1: "|N-1)", 0: "|N)", 1: "|N+1)"}[self.k]


@dataclass(frozen=True)
class ZeroLabel:
    """``|0) = |1_g, 1_e, {0_j}>``."""

    def __str__(self):
        return "|0)"


@dataclass(frozen=True)
class OneQuantumLabel:
    """``|1_j) = |2_g, 0_e, 1_j>``."""

    j: int

    def __str__(self):
        return f"|1_{self.j})"


BasisLabel = Union[SingleModeLabel, ZeroLabel, OneQuantumLabel]


@dataclass(frozen=True, eq=False)
class SubspaceSystem:
    basis: tuple
    hamiltonian: np.ndarray
    photon_number: Optional[int] = None

    def __post_init__(self):
        h = np.array(self.hamiltonian, dtype=complex)
        if h.ndim != 2 or h.shape != (len(self.basis), len(self.basis)):
            raise ValueError("hamiltonian shape does not match basis length")
        if np.max(np.abs(h - h.conj().T), initial=0.0) >= HERMITIAN_TOL:
            raise ValueError("hamiltonian is not Hermitian")
        h.setflags(write=False)
        object.__setattr__(self, "hamiltonian", h)
        object.__setattr__(self, "basis", tuple(self.basis))

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def initial(self) -> BasisLabel:
        """The ``|1_g, 1_e, ...>`` label the dynamics starts from."""
        return SingleModeLabel(0) if self.photon_number is not None else ZeroLabel()

    @property
    def is_single_mode(self) -> bool:
        return self.photon_number is not None

    def index(self, label: BasisLabel) -> int:
        try:
            return self.basis.index(label)
        except ValueError:
            raise KeyError(f"{label} is not in this subspace") from None


def build_single_mode(params: ModelParams, N: int) -> SubspaceSystem:
    if len(params.modes) != 1:
        raise ValueError(f"single-mode subspace needs exactly one reservoir mode, got {len(params.modes)}")
    if int(N) != N or N < 0:
        raise ValueError(f"photon number N must be a non-negative integer, got {N!r}")
    N = int(N)
    mode = params.modes[0]
    w_e, w_j, d = params.omega_e, mode.omega_j, mode.d_j

    ks = (0, 1) if N == 0 else (-1, 0, 1)
    basis = tuple(SingleModeLabel(k) for k in ks)
    h = np.zeros((len(ks), len(ks)))
    for i, k in enumerate(ks):
        h[i, i] = (1 - k) * w_e + (N + k) * w_j
    mid = ks.index(0)
    if N > 0:
        h[0, mid] = h[mid, 0] = d * math.sqrt(2 * N)
    h[-1, mid] = h[mid, -1] = d * math.sqrt(2 * (N + 1))
    return SubspaceSystem(basis, h, photon_number=N)


def build_multi_mode(params: ModelParams) -> SubspaceSystem:
    M = len(params.modes)
    if M < 1:
        raise ValueError("multi-mode subspace needs at least one reservoir mode")
    h = np.zeros((M + 1, M + 1))
    h[0, 0] = params.omega_e
    h[np.arange(1, M + 1), np.arange(1, M + 1)] = params.frequencies
    h[0, 1:] = h[1:, 0] = math.sqrt(2) * params.couplings
    basis = (ZeroLabel(),) + tuple(OneQuantumLabel(j) for j in range(M))
    return SubspaceSystem(basis, h)
