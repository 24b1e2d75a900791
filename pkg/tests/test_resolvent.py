import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import brentq

from soqd.evolve import Method, UndersampledWarning, decoherence_factor, propagate
from soqd.experiments import comb_params, fit_decay
from soqd.model import CombSpec, ModelParams, SpectralDensity, flat_density
from soqd.resolvent import (QuadratureError, WignerWeisskopfResult, comb_density, exponential_law,
                            invert_fourier, multi_mode_resolvent, resonant_candidates,
                            resonant_closed_form, single_mode_resolvent, wigner_weisskopf)
from soqd.subspace import build_multi_mode, build_single_mode

rng = np.random.default_rng(20240611)
# sparse grids are fine for pointwise comparisons
sparse = pytest.mark.filterwarnings("ignore", category=UndersampledWarning)


def _random_off_axis(n, scale=3.0):
    z = rng.uniform(-scale, scale, n) + 1j * rng.uniform(0.1, scale, n)
    flip = rng.random(n) < 0.5
    z[flip] = z[flip].conj()
    return z


def _dense_diag(system, z):
    """Oracle: diagonal entry of (z - H)^-1 from a direct linear solve."""
    h = system.hamiltonian
    i = system.index(system.initial)
    e = np.zeros(system.dim)
    e[i] = 1.0
    return np.array([np.linalg.solve(zz * np.eye(system.dim) - h, e)[i] for zz in z])


def test_free_resolvent():
    p = ModelParams.single_mode(1.0, 1.3, 0.0)
    res = single_mode_resolvent(p, 4)
    z = _random_off_axis(20) + 6
    np.testing.assert_allclose(res(z), 1 / (z - (1.0 + 4 * 1.3)), rtol=1e-14)


@pytest.mark.parametrize("N", [0, 1, 2, 7])
@pytest.mark.parametrize("wj", [1.0, 1.2, 0.7])
def test_single_mode_resolvent_matches_dense_solve(N, wj):
    p = ModelParams.single_mode(1.0, wj, 0.07)
    system = build_single_mode(p, N)
    res = single_mode_resolvent(p, N)
    z = _random_off_axis(100) + res.center
    np.testing.assert_allclose(res(z), _dense_diag(system, z), rtol=1e-10)


@pytest.mark.parametrize("N", [0, 1, 2, 7, 25])
def test_resonant_poles(N):
    d = 0.07
    p = ModelParams.single_mode(1.0, 1.0, d)
    res = single_mode_resolvent(p, N)
    E = 1.0 + N
    np.testing.assert_allclose(res.poles_hint, [E - d * math.sqrt(4 * N + 2), E + d * math.sqrt(4 * N + 2)],
                               rtol=1e-14)
    for pole in res.poles_hint:
        # 1/G vanishes at a pole; approach from just above the axis
        assert abs(1 / res(pole + 1e-13j)) < 1e-11


def test_detuned_has_no_pole_hint(fig1_params):
    assert single_mode_resolvent(fig1_params, 2).poles_hint is None


def test_multi_mode_single_resonant_mode_equals_vacuum_single_mode():
    p = ModelParams.single_mode(1.0, 1.0, 0.07)
    z = _random_off_axis(30) + 1
    np.testing.assert_allclose(multi_mode_resolvent(p)(z), single_mode_resolvent(p, 0)(z), rtol=1e-14)


def test_multi_mode_resolvent_matches_dense_solve():
    p = comb_params(9, 0.17, 0.4)
    z = _random_off_axis(100) + 1
    np.testing.assert_allclose(multi_mode_resolvent(p)(z), _dense_diag(build_multi_mode(p), z), rtol=1e-10)


def test_herglotz_at_fixed_point():
    p = comb_params(5, 0.17, 0.4)
    assert multi_mode_resolvent(p)(1.0 + 0.5j).imag < 0


@settings(max_examples=50)
@given(st.floats(-3, 3), st.floats(1e-3, 3), st.integers(0, 10))
def test_herglotz_sign(x, y, N):
    res = single_mode_resolvent(ModelParams.single_mode(1.0, 1.2, 0.07), N)
    assert res(complex(x + res.center, y)).imag < 0
    assert res(complex(x + res.center, -y)).imag > 0


def test_resolvent_errors():
    with pytest.raises(ValueError):
        single_mode_resolvent(comb_params(3, 0.1, 0.4), 0)
    with pytest.raises(ValueError):
        multi_mode_resolvent(ModelParams(1.0, ()))


def test_closed_form_basics(resonant_params):
    curve = resonant_closed_form(resonant_params, 0, [0.0, 1.0])
    assert curve.factor[0] == 1.0
    assert curve.method is Method.CLOSED_FORM_RESONANT
    with pytest.raises(ValueError):
        resonant_closed_form(ModelParams.single_mode(1.0, 1.2, 0.07), 0, [0.0])


def test_closed_form_first_zero_matches_evolution(resonant_params):
    expected = math.pi / (2 * 0.07 * math.sqrt(2))
    s = build_single_mode(resonant_params, 0)
    amp = lambda T: (propagate(s, s.initial, [T]).diagonal[0] * np.exp(1j * T)).real  # noqa: E731
    zero_evolution = brentq(amp, 10, 20, xtol=1e-14)
    omega = resonant_closed_form(resonant_params, 0, [0.0]).meta["half_splitting"]
    zero_closed = math.pi / (2 * omega)
    assert zero_closed == pytest.approx(expected, abs=1e-12)
    assert zero_closed == pytest.approx(zero_evolution, abs=1e-6)


@pytest.mark.parametrize("N", [0, 1, 2, 7])
def test_closed_form_equals_evolution(resonant_params, N):
    T = np.linspace(0, 200, 4001)
    closed = resonant_closed_form(resonant_params, N, T).factor
    evolved = decoherence_factor(build_single_mode(resonant_params, N), T).factor
    np.testing.assert_allclose(closed, evolved, atol=1e-10)


def test_only_sqrt_4n_plus_2_candidate_survives(resonant_params):
    T = np.linspace(0, 200, 4001)
    for N in (0, 1, 2, 7):
        exact = decoherence_factor(build_single_mode(resonant_params, N), T).factor
        cands = resonant_candidates(0.07, N, T)
        ok = {name for name, f in cands.items() if np.max(np.abs(f - exact)) < 1e-8}
        assert ok == {"d*sqrt(4N+2)"}


def test_inversion_free_pole():
    p = ModelParams.single_mode(1.0, 1.2, 0.0)
    inv = invert_fourier(single_mode_resolvent(p, 3), np.linspace(0, 400, 21))
    np.testing.assert_allclose(inv.factor, 1.0, atol=1e-4)


@sparse
@pytest.mark.parametrize("N", [0, 7])
def test_inversion_matches_evolution(fig1_params, N):
    T = np.linspace(0, 400, 41)
    inv = invert_fourier(single_mode_resolvent(fig1_params, N), T)
    evolved = decoherence_factor(build_single_mode(fig1_params, N), T).factor
    assert inv.method is Method.RESOLVENT_INVERSION
    np.testing.assert_allclose(inv.factor, evolved, atol=1e-4)
    # the amplitude itself, not only its modulus
    amp = propagate(build_single_mode(fig1_params, N), build_single_mode(fig1_params, N).initial, T).diagonal
    np.testing.assert_allclose(inv.meta["amplitudes"], amp, atol=1e-6)


def test_inversion_matches_closed_form(resonant_params):
    T = np.linspace(0, 200, 21)
    inv = invert_fourier(single_mode_resolvent(resonant_params, 2), T)
    np.testing.assert_allclose(inv.factor, resonant_closed_form(resonant_params, 2, T).factor, atol=1e-4)


@sparse
def test_inversion_multi_mode():
    p = comb_params(5, 0.17, 0.4)
    T = np.linspace(0, 100, 11)
    inv = invert_fourier(multi_mode_resolvent(p), T)
    np.testing.assert_allclose(inv.factor, decoherence_factor(build_multi_mode(p), T).factor, atol=1e-4)


def test_inversion_reports_unreachable_tolerance(fig1_params):
    with pytest.raises(QuadratureError) as info:
        invert_fourier(single_mode_resolvent(fig1_params, 1), [50.0], tol=1e-30)
    assert info.value.error_estimate > 1e-30


def test_decay_rate_flat():
    ww = wigner_weisskopf(flat_density(10.0, 0.02, 0.0, 2.0), 1.0)
    assert ww.gamma_e == pytest.approx(4 * math.pi * 10 * 0.0004, rel=1e-14)
    assert ww.gamma_e == pytest.approx(0.050265, abs=1e-6)


def test_shift_vanishes_on_symmetric_support():
    ww = wigner_weisskopf(flat_density(10.0, 0.02, 0.3, 1.7), 1.0)
    assert abs(ww.delta_e) < 1e-8


@pytest.mark.parametrize("a,b", [(0.5, 0.3), (0.2, 0.9), (1.0, 0.01)])
def test_shift_asymmetric_flat(a, b):
    rho, d, we = 10.0, 0.02, 1.0
    ww = wigner_weisskopf(flat_density(rho, d, we - a, we + b), we)
    # P int_{-a}^{b} du / (-u) = ln(a/b)
    assert ww.delta_e == pytest.approx(2 * rho * d * d * math.log(a / b), abs=1e-6)


def test_richardson_removes_linear_density_error():
    # rho(w) = 1 + s (w - we) on [we - a, we + a]: P int (1 + s u)/(-u) du = -2 s a
    s, a, d, we = 3.0, 0.4, 0.1, 1.0
    sd = SpectralDensity(lambda w: 1 + s * (w - we), lambda w: d, (we - a, we + a))
    ww = wigner_weisskopf(sd, we)
    assert ww.delta_e == pytest.approx(2 * d * d * (-2 * s * a), abs=1e-10)


def test_shift_antisymmetric_under_reflection():
    we = 1.0
    left = wigner_weisskopf(flat_density(5.0, 0.03, we - 0.2, we + 0.7), we).delta_e
    right = wigner_weisskopf(flat_density(5.0, 0.03, we - 0.7, we + 0.2), we).delta_e
    assert left == pytest.approx(-right, abs=1e-10)


def test_wigner_weisskopf_rejects_outside_support():
    with pytest.raises(ValueError):
        wigner_weisskopf(flat_density(1.0, 0.1, 1.5, 2.0), 1.0)


def test_exponential_law():
    T = np.linspace(0, 50, 11)
    assert np.all(exponential_law(WignerWeisskopfResult(0.0, 0.0), T).factor == 1.0)
    gamma = 0.1005
    curve = exponential_law(WignerWeisskopfResult(gamma, 0.0), [1 / gamma])
    assert curve.factor[0] == pytest.approx(math.exp(-1))
    assert curve.method is Method.WIGNER_WEISSKOPF


def test_comb_evolution_follows_exponential_rate():
    spacing, d = 0.05, 0.02
    spec = CombSpec(1.0, 1.0, 41, d)
    ww = wigner_weisskopf(comb_density(spec), 1.0)
    assert ww.gamma_e == pytest.approx(4 * math.pi * d * d / spacing)
    assert ww.gamma_e == pytest.approx(0.1005, abs=1e-4)
    T = np.linspace(0, 0.5 * 2 * math.pi / spacing, 1001)
    factor = decoherence_factor(build_multi_mode(comb_params(41, d, 1.0)), T).factor
    fit = fit_decay(T, factor)
    assert fit.rate == pytest.approx(ww.gamma_e, rel=0.05)
    assert abs(ww.delta_e) < 1e-8


def test_inversion_error_estimate_bounds_actual_error():
    # late times once tripped a single long oscillatory tail panel; T = 0 the
    # non-oscillatory tail
    p = comb_params(9, 0.17, 0.4)
    s = build_multi_mode(p)
    T = np.array([0.0, 2.75, 152.0, 336.0, 368.0])
    inv = invert_fourier(multi_mode_resolvent(p), T)
    dev = np.abs(inv.meta["amplitudes"] - propagate(s, s.initial, T).diagonal)
    assert dev.max() < 1e-11
    assert dev.max() <= 2 * inv.meta["error_estimate"] + 1e-15
