import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from soqd.evolve import decoherence_factor, propagate
from soqd import oracle
from soqd.experiments import comb_params, fit_decay
from soqd.model import ModelParams, ReservoirMode
from soqd.oracle import (SectorError, build_fock_space, build_full_hamiltonian, excitation_number,
                         initial_occupation, label_occupation, oracle_factor, oracle_propagate)
from soqd.subspace import build_multi_mode, build_single_mode


def test_single_mode_sector_sizes():
    p = ModelParams.single_mode(1.0, 1.2, 0.07)
    assert build_fock_space(p, initial_occupation(p, 0)).dimension == 2
    for N in (1, 2, 7, 40):
        assert build_fock_space(p, initial_occupation(p, N)).dimension == 3


@pytest.mark.parametrize("M", [1, 3, 9, 20])
def test_multi_mode_vacuum_sector_size(M):
    p = comb_params(M, 0.17, 0.4) if M > 1 else ModelParams.single_mode(1.0, 1.0, 0.17)
    assert build_fock_space(p, initial_occupation(p)).dimension == M + 1


def test_unfiltered_space_dimension():
    p = ModelParams.single_mode(1.0, 1.2, 0.07)
    space = build_fock_space(p, (1, 1, 2), filter_sector=False)
    assert space.dimension == space.product_dimension == 3 * 3 * 4


def test_unfiltered_matches_filtered_dynamics():
    p = ModelParams(1.0, (ReservoirMode(1.1, 0.1), ReservoirMode(0.9, 0.05)))
    T = np.linspace(0, 60, 31)
    a = oracle_factor(p, (1, 1, 1, 0), T).factor
    b = oracle_factor(p, (1, 1, 1, 0), T, filter_sector=False).factor
    np.testing.assert_allclose(a, b, atol=1e-10)


def test_zero_coupling_diagonal():
    p = ModelParams.single_mode(1.0, 1.2, 0.0)
    _, H = build_full_hamiltonian(p, (1, 1, 3), filter_sector=False)
    assert np.count_nonzero(H - np.diag(np.diag(H))) == 0


def test_sector_error_when_basis_misses_a_partner(monkeypatch):
    # a basis that drops a reachable state must be reported, not silently truncated
    p = ModelParams.single_mode(1.0, 1.2, 0.1)
    space, _ = build_full_hamiltonian(p, (1, 1, 1))
    assert space.dimension == 3
    monkeypatch.setattr(oracle, "_sector_enumerate", lambda *a: [(1, 1, 1), (2, 0, 2)])
    with pytest.raises(SectorError):
        build_full_hamiltonian(p, (1, 1, 1))


def test_size_cap_and_bad_initial():
    p = comb_params(9, 0.1, 0.4)
    with pytest.raises(ValueError):
        build_fock_space(p, initial_occupation(p), filter_sector=False, max_states=100)
    with pytest.raises(ValueError):
        build_fock_space(p, (1, 1))
    with pytest.raises(ValueError):
        initial_occupation(ModelParams(1.0, ()), 2)


@pytest.mark.parametrize("N", [0, 1, 2, 7])
def test_fig1_equivalence(N):
    p = ModelParams.single_mode(1.0, 1.2, 0.07)
    T = np.linspace(0, 800, 4096)
    ora = oracle_factor(p, initial_occupation(p, N), T)
    s = build_single_mode(p, N)
    amp = propagate(s, s.initial, T).diagonal
    np.testing.assert_allclose(ora.meta["amplitudes"], amp, atol=1e-10)
    np.testing.assert_allclose(ora.factor, decoherence_factor(s, T).factor, atol=1e-10)
    assert ora.factor[0] == 1.0


@pytest.mark.parametrize("M", [3, 5, 7, 9])
def test_fig2_equivalence(M):
    p = comb_params(M, 0.17, 0.4)
    T = np.linspace(0, 200, 2048)
    ora = oracle_factor(p, initial_occupation(p), T)
    np.testing.assert_allclose(ora.factor, decoherence_factor(build_multi_mode(p), T).factor, atol=1e-10)


def test_full_row_projects_onto_subspace_row():
    p = ModelParams.single_mode(1.0, 1.2, 0.07)
    N = 2
    s = build_single_mode(p, N)
    T = np.linspace(0, 300, 50)
    space, states = oracle_propagate(p, initial_occupation(p, N), T)
    idx = [space.index(label_occupation(s, b, 1)) for b in s.basis]
    np.testing.assert_allclose(states[:, idx], propagate(s, s.initial, T).amplitudes, atol=1e-10)


@settings(max_examples=15, deadline=None)
@given(st.lists(st.tuples(st.floats(0.5, 1.5), st.floats(0, 0.3)), min_size=1, max_size=3),
       st.integers(0, 2))
def test_excitation_number_conserved(modes, N):
    p = ModelParams(1.0, tuple(ReservoirMode(w, d) for w, d in modes))
    init = initial_occupation(p, N)
    space, states = oracle_propagate(p, init, np.linspace(0, 100, 17))
    np.testing.assert_allclose(excitation_number(space, states), 1 + N, atol=1e-10)


def test_comb_oracle_follows_exponential_rate():
    p = comb_params(41, 0.02, 1.0)
    T = np.linspace(0, 0.5 * 2 * np.pi / 0.05, 801)
    fit = fit_decay(T, oracle_factor(p, initial_occupation(p), T).factor)
    assert fit.rate == pytest.approx(4 * np.pi * 0.02 ** 2 / 0.05, rel=0.05)
