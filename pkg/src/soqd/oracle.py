"""Brute-force reference: the full Fock-space Hamiltonian.

Nothing here uses the invariant-subspace bases of :mod:`soqd.subspace`.
The Hamiltonian is assembled term by term from ladder-operator action on
occupation tuples ``(n_g, n_e, n_1, ..., n_M)``. By default the basis is
restricted to the sector with the same atom number ``n_g + n_e`` and
excitation number ``n_e + sum_j n_j`` as the initial state; both commute with
``H``, so the restriction is exact, and any matrix element that would leave
the sector raises instead of being dropped.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .evolve import DecoherenceCurve, Method, _times, eigendecompose
from .model import ModelParams
from .subspace import OneQuantumLabel, SingleModeLabel, SubspaceSystem, ZeroLabel

__all__ = [
    "FockSpace",
    "SectorError",
    "initial_occupation",
    "build_fock_space",
    "build_full_hamiltonian",
    "oracle_propagate",
    "oracle_factor",
    "excitation_number",
    "label_occupation",
    "MAX_STATES",
]

MAX_STATES = 20_000


class SectorError(RuntimeError):
    """The Hamiltonian connected a basis state to one outside the sector."""


@dataclass(frozen=True, eq=False)
class FockSpace:
    cutoffs: tuple
    basis: tuple
    filtered: bool

    def __post_init__(self):
        object.__setattr__(self, "_index", {occ: i for i, occ in enumerate(self.basis)})

    @property
    def dimension(self) -> int:
        return len(self.basis)

    @property
    def product_dimension(self) -> int:
        return math.prod(c + 1 for c in self.cutoffs)

    def index(self, occ) -> int:
        return self._index[tuple(occ)]

    def get(self, occ):
        return self._index.get(occ)


def initial_occupation(params: ModelParams, N: int = 0) -> tuple:
    """``|1_g, 1_e, N, 0, ..., 0>``; ``N`` is placed in the first reservoir mode."""
    M = len(params.modes)
    if M == 0 and N:
        raise ValueError("no reservoir mode to hold photons")
    return (1, 1) + ((N,) + (0,) * (M - 1) if M else ())


def _sector_enumerate(cutoffs, atoms, excitations):
    """All tuples within ``cutoffs`` with the given atom and excitation numbers."""
    n_res = len(cutoffs) - 2
    out = []

    def fill(prefix, j, budget):
        if j == n_res:
            if budget == 0:
                out.append(prefix)
            return
        for n in range(min(budget, cutoffs[2 + j]) + 1):
            fill(prefix + (n,), j + 1, budget - n)

    for n_e in range(min(atoms, cutoffs[1]) + 1):
        n_g = atoms - n_e
        if n_g > cutoffs[0] or n_e > excitations:
            continue
        fill((n_g, n_e), 0, excitations - n_e)
    return sorted(out)


def build_fock_space(params: ModelParams, initial, cutoffs=None, filter_sector: bool = True,
                     max_states: int = MAX_STATES) -> FockSpace:
    initial = tuple(int(n) for n in initial)
    M = len(params.modes)
    if len(initial) != M + 2:
        raise ValueError(f"initial occupation needs {M + 2} entries, got {len(initial)}")
    if any(n < 0 for n in initial):
        raise ValueError("occupations must be non-negative")
    atoms = initial[0] + initial[1]
    excitations = initial[1] + sum(initial[2:])
    if cutoffs is None:
        cutoffs = (atoms, atoms) + (excitations,) * M
    cutoffs = tuple(int(c) for c in cutoffs)
    if len(cutoffs) != M + 2 or any(n > c for n, c in zip(initial, cutoffs)):
        raise ValueError("initial occupation exceeds the cutoffs")

    if filter_sector:
        basis = _sector_enumerate(cutoffs, atoms, excitations)
    else:
        total = math.prod(c + 1 for c in cutoffs)
        if total > max_states:
            raise ValueError(f"product space of {total} states exceeds the cap of {max_states}")
        basis = list(itertools.product(*(range(c + 1) for c in cutoffs)))
    if len(basis) > max_states:
        raise ValueError(f"basis of {len(basis)} states exceeds the cap of {max_states}")
    return FockSpace(cutoffs, tuple(basis), filter_sector)


def build_full_hamiltonian(params: ModelParams, initial, cutoffs=None, filter_sector: bool = True,
                           max_states: int = MAX_STATES):
    """Return ``(space, H)`` with ``H = H_0 + V`` on the chosen Fock basis.

    ``H_0 = omega_e n_e + sum_j omega_j n_j`` and
    ``V = sum_j d_j (a_j b_e^+ b_g + a_j^+ b_g^+ b_e)``. On an unfiltered
    basis, elements that would exceed a cutoff are truncated.
    """
    space = build_fock_space(params, initial, cutoffs, filter_sector, max_states)
    freqs, couplings = params.frequencies, params.couplings
    cut = space.cutoffs
    H = np.zeros((space.dimension, space.dimension))

    def put(col, occ, amp):
        row = space.get(occ)
        if row is None:
            if space.filtered and all(n <= c for n, c in zip(occ, cut)):
                raise SectorError(f"{occ} is outside the excitation sector")
            return
        H[row, col] += amp

    for col, occ in enumerate(space.basis):
        n_g, n_e = occ[0], occ[1]
        H[col, col] += params.omega_e * n_e + float(np.dot(freqs, occ[2:]))
        for j, d in enumerate(couplings):
            n_j = occ[2 + j]
            # a_j b_e^+ b_g
            if n_j > 0 and n_g > 0:
                new = list(occ)
                new[0], new[1], new[2 + j] = n_g - 1, n_e + 1, n_j - 1
                put(col, tuple(new), d * math.sqrt(n_j * (n_e + 1) * n_g))
            # a_j^+ b_g^+ b_e
            if n_e > 0:
                new = list(occ)
                new[0], new[1], new[2 + j] = n_g + 1, n_e - 1, n_j + 1
                put(col, tuple(new), d * math.sqrt((n_j + 1) * (n_g + 1) * n_e))
    if np.max(np.abs(H - H.T), initial=0.0) >= 1e-14:
        raise RuntimeError("assembled Hamiltonian is not Hermitian")
    return space, H


def oracle_propagate(params: ModelParams, initial, times, **kwargs):
    """Full state vectors ``U(T)|initial>``; returns ``(space, states)``."""
    t = _times(times)
    space, H = build_full_hamiltonian(params, initial, **kwargs)
    spec = eigendecompose(H)
    idx = space.index(tuple(initial))
    vec = spec.eigenvectors
    states = (np.exp(-1j * np.outer(t, spec.eigenvalues)) * vec[idx].conj()) @ vec.T
    states[t == 0] = np.eye(space.dimension)[idx]
    return space, states


def oracle_factor(params: ModelParams, initial, times, **kwargs) -> DecoherenceCurve:
    """``|<initial|U(T)|initial>|^2`` from the full Fock-space propagation."""
    initial = tuple(initial)
    space, states = oracle_propagate(params, initial, times, **kwargs)
    amp = states[:, space.index(initial)]
    return DecoherenceCurve(_times(times), np.abs(amp) ** 2, Method.ORACLE, params.digest(),
                            meta={"dimension": space.dimension,
                                  "product_dimension": space.product_dimension,
                                  "amplitudes": amp})


def excitation_number(space: FockSpace, states) -> np.ndarray:
    """``<psi|n_e + sum_j n_j|psi>`` for each row of ``states``."""
    counts = np.array([occ[1] + sum(occ[2:]) for occ in space.basis], dtype=float)
    return np.abs(np.atleast_2d(states)) ** 2 @ counts


def label_occupation(system: SubspaceSystem, label, n_modes: int) -> tuple:
    """Occupation tuple of a subspace basis label, for cross-checking."""
    if isinstance(label, SingleModeLabel):
        N = system.photon_number
        return (1 + label.k, 1 - label.k, N + label.k) + (0,) * (n_modes - 1)
    if isinstance(label, ZeroLabel):
        return (1, 1) + (0,) * n_modes
    if isinstance(label, OneQuantumLabel):
        res = [0] * n_modes
        res[label.j] = 1
        return (2, 0) + tuple(res)
    raise TypeError(f"unknown label {label!r}")
