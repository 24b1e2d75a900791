"""Resolvent diagonal elements and the quantities derived from them.

The diagonal element ``(N|(z - H)^-1|N)`` is a rational function of ``z``.
Its Fourier inversion along a line just above the real axis gives back the
propagator diagonal; in the resonant single-mode case the two poles give a
closed form; in the continuum limit the self-energy turns into a constant
shift and width (Wigner-Weisskopf).

The numeric inversion here is a verification route. The production
propagator lives in :mod:`soqd.evolve`.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from .evolve import DecoherenceCurve, Method, _times
from .model import CombSpec, ModelParams, SpectralDensity, flat_density

__all__ = [
    "ResolventDiagonal",
    "WignerWeisskopfResult",
    "QuadratureError",
    "single_mode_resolvent",
    "multi_mode_resolvent",
    "resonant_closed_form",
    "resonant_candidates",
    "invert_fourier",
    "wigner_weisskopf",
    "exponential_law",
    "comb_density",
    "RESONANCE_TOL",
]

RESONANCE_TOL = 1e-12
_GL_FINE = np.polynomial.legendre.leggauss(24)
_GL_COARSE = np.polynomial.legendre.leggauss(16)


class QuadratureError(RuntimeError):
    """A quadrature did not reach its tolerance; ``error_estimate`` is what it got."""

    def __init__(self, message, error_estimate):
        super().__init__(f"{message} (achieved error estimate {error_estimate:.3g})")
        self.error_estimate = error_estimate


@dataclass(frozen=True)
class ResolventDiagonal:
    """A resolvent diagonal element together with the data needed to invert it.

    Attributes
    ----------
    evaluate : callable
        Vectorised ``z -> (n|G(z)|n)``.
    center, variance : float
        First moment ``<n|H|n>`` and variance ``<n|H^2|n> - center**2``; they
        fix the large-``z`` behaviour ``1/z + center/z**2 + ...``.
    support : (float, float)
        Interval guaranteed to contain every pole (Gershgorin bound).
    poles_hint : list of float, optional
        Exact real poles when known in closed form.
    """

    evaluate: Callable
    center: float
    variance: float
    support: tuple[float, float]
    poles_hint: Optional[list] = None

    def __call__(self, z):
        return self.evaluate(np.asarray(z, dtype=complex))


@dataclass(frozen=True)
class WignerWeisskopfResult:
    gamma_e: float
    delta_e: float
    error_estimate: float = 0.0


def _gershgorin(diag, rows):
    lo = min(c - r for c, r in zip(diag, rows))
    hi = max(c + r for c, r in zip(diag, rows))
    return float(lo), float(hi)


def single_mode_resolvent(params: ModelParams, N: int) -> ResolventDiagonal:
    """``(N|G(z)|N)`` for one reservoir mode holding ``N`` photons.

    ``1 / (z - E - 2N d^2/(z - E + Delta) - 2(N+1) d^2/(z - E - Delta))``
    with ``E = omega_e + N omega_j`` and ``Delta = omega_j - omega_e``.
    """
    if len(params.modes) != 1:
        raise ValueError(f"expected exactly one reservoir mode, got {len(params.modes)}")
    if int(N) != N or N < 0:
        raise ValueError(f"N must be a non-negative integer, got {N!r}")
    N = int(N)
    w_j, d = params.modes[0].omega_j, params.modes[0].d_j
    E = params.omega_e + N * w_j
    delta = w_j - params.omega_e
    lower_w, upper_w = 2 * N * d * d, 2 * (N + 1) * d * d

    if N == 0:
        def evaluate(z):
            return 1 / (z - E - upper_w / (z - E - delta))
    else:
        def evaluate(z):
            return 1 / (z - E - lower_w / (z - E + delta) - upper_w / (z - E - delta))

    g_lo, g_up = math.sqrt(lower_w), math.sqrt(upper_w)
    diag, rows = [E, E + delta], [g_lo + g_up, g_up]
    if N > 0:
        diag.append(E - delta)
        rows.append(g_lo)
    hint = None
    if abs(delta) <= RESONANCE_TOL:
        # at Delta = 0: (z - E)^2 = 2N d^2 + 2(N+1) d^2
        half = math.sqrt(lower_w + upper_w)
        hint = [E - half, E + half]
    return ResolventDiagonal(evaluate, E, lower_w + upper_w, _gershgorin(diag, rows), hint)


def multi_mode_resolvent(params: ModelParams) -> ResolventDiagonal:
    """``(0|G(z)|0) = 1 / (z - omega_e - sum_j 2 d_j^2 / (z - omega_j))``."""
    if not params.modes:
        raise ValueError("multi-mode resolvent needs at least one reservoir mode")
    w = params.frequencies
    weights = 2 * params.couplings ** 2
    w_e = params.omega_e

    def evaluate(z):
        z = np.asarray(z, dtype=complex)
        self_energy = np.sum(weights / (z[..., None] - w), axis=-1)
        return 1 / (z - w_e - self_energy)

    g = np.sqrt(weights)
    diag = [w_e, *w]
    rows = [float(np.sum(g)), *g]
    return ResolventDiagonal(evaluate, w_e, float(np.sum(weights)), _gershgorin(diag, rows))


def resonant_candidates(d: float, N: int, times) -> dict:
    """The three resonant closed forms that are in circulation.

    Keys name the oscillation frequency: ``"d*sqrt(4N+1)"``, ``"d*sqrt(4N+2)"``
    and ``"(4N+1)*d^2"``; values are ``cos^2(freq * T)``.
    """
    t = np.asarray(times, dtype=float)
    freqs = {
        "d*sqrt(4N+1)": abs(d) * math.sqrt(4 * N + 1),
        "d*sqrt(4N+2)": abs(d) * math.sqrt(4 * N + 2),
        "(4N+1)*d^2": (4 * N + 1) * d * d,
    }
    return {name: np.cos(f * t) ** 2 for name, f in freqs.items()}


def resonant_closed_form(params: ModelParams, N: int, times) -> DecoherenceCurve:
    """``cos^2(Omega T)`` with ``Omega`` half the splitting of the two resonant poles.

    The poles of the single-mode resolvent at ``Delta = 0`` sit at
    ``E +- d sqrt(4N+2)``; the residue at ``z = E`` vanishes, so the diagonal
    amplitude is a pure cosine.
    """
    if abs(params.detuning) > RESONANCE_TOL:
        raise ValueError(f"closed form needs omega_j == omega_e, detuning is {params.detuning!r}")
    res = single_mode_resolvent(params, N)
    lo, hi = res.poles_hint
    omega = (hi - lo) / 2
    t = _times(times)
    factor = np.cos(omega * t) ** 2
    return DecoherenceCurve(t, factor, Method.CLOSED_FORM_RESONANT, params.digest(),
                            meta={"N": N, "half_splitting": omega})


def _panel_nodes(a, b, width, rule):
    n = max(1, int(math.ceil((b - a) / width)))
    edges = np.linspace(a, b, n + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    x, w = rule
    return (mid[:, None] + half[:, None] * x).ravel(), (half[:, None] * w).ravel()


_TAIL_NEGLECT = 1e-15
_EPS = float(np.finfo(float).eps)


def _tail(fun, start, T, sign, center):
    """``int_start^inf exp(-i sign u T) fun(sign u) du`` for ``fun ~ K / (x - center)^4``.

    Far from the poles the subtracted remainder falls below the rounding
    noise of the resolvent itself, which only decays like ``1/|x|``, so the
    integral is cut where the ``|x|^-4`` envelope bounds the rest by
    ``_TAIL_NEGLECT``. That bound is added to the returned error.
    """
    dist = abs(start - sign * center)
    probe = dist * np.geomspace(1.0, 8.0, 7)
    env = float(np.max(np.abs(fun(sign * (probe + sign * center))) * probe ** 4))
    cut = max(dist, (env / (3 * _TAIL_NEGLECT)) ** (1 / 3))
    stop = sign * center + cut
    err = env / (3 * cut ** 3)
    if stop <= start:
        return 0j, err
    re = lambda u: fun(sign * u).real  # noqa: E731
    im = lambda u: fun(sign * u).imag  # noqa: E731
    # one panel per octave of distance from the centre keeps the smooth
    # factor well resolved by each (weighted) Clenshaw-Curtis panel
    n_oct = max(1, int(math.ceil(math.log2(cut / dist))))
    edges = sign * center + dist * np.geomspace(1.0, cut / dist, n_oct + 1)
    weights = ("cos", "sin") if T > 0 else (None,)
    parts = {(name, wt): 0.0 for name in ("re", "im") for wt in ("cos", "sin")}
    # roundoff warnings near the noise floor are expected; the reported
    # error estimates feed the caller's tolerance check instead
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        for name, f in (("re", re), ("im", im)):
            for lo_, hi_ in zip(edges[:-1], edges[1:]):
                for wt in weights:
                    if wt is None:
                        val, e = integrate.quad(f, lo_, hi_, epsabs=1e-16, limit=200)
                    else:
                        val, e = integrate.quad(f, lo_, hi_, weight=wt, wvar=T,
                                                epsabs=1e-16, limit=200)
                    parts[name, wt or "cos"] += val
                    err += e
    if not math.isfinite(err):
        raise QuadratureError(f"tail quadrature failed at T={T}", math.inf)
    real = parts["re", "cos"] + sign * parts["im", "sin"]
    imag = parts["im", "cos"] - sign * parts["re", "sin"]
    return complex(real, imag), err


def invert_fourier(res: ResolventDiagonal, times, eta: float | None = None,
                   tol: float = 1e-7, digest: str = "") -> DecoherenceCurve:
    """Propagator diagonal from ``(i/2pi) int dz exp(-izT) G(z)`` on ``Im z = eta``.

    The contour sits above every pole, so the integral is exact for any
    ``eta > 0`` once ``exp(-izT)`` is taken with complex ``z``. To make the
    integrand absolutely integrable, a three-term pole expansion around
    ``center - i*gamma`` (``gamma`` = spectral span) is subtracted and
    transformed analytically; the remainder decays like ``|x|^-4``. The
    remainder is integrated with Gauss-Legendre panels of width
    ``~2 eta`` over the pole region and with semi-infinite Fourier
    quadrature outside it.

    Raises :class:`QuadratureError` when the estimated amplitude error
    exceeds ``tol``.
    """
    t = _times(times)
    lo, hi = res.support
    span = max(hi - lo, 1e-2 * max(1.0, abs(res.center)))
    eta = 1e-3 * span if eta is None else float(eta)
    if eta <= 0:
        raise ValueError("eta must be positive")
    c, var, gamma = res.center, res.variance, span
    w = c - 1j * gamma
    beta = var - gamma ** 2  # chosen so the 1/z^3 terms cancel

    def remainder(x):
        z = np.asarray(x, dtype=float) + 1j * eta
        u = z - w
        return res(z) - (1 / u + 1j * gamma / u ** 2 + beta / u ** 3)

    a, b = lo - 0.5 * span, hi + 0.5 * span
    amps = np.empty(t.size, dtype=complex)
    errs = np.empty(t.size)
    for i, T in enumerate(t):
        width = min(2 * eta, math.pi / T) if T > 0 else 2 * eta
        xf, wf = _panel_nodes(a, b, width, _GL_FINE)
        xc, wc = _panel_nodes(a, b, width, _GL_COARSE)
        terms = wf * np.exp(-1j * xf * T) * remainder(xf)
        core = np.sum(terms)
        core_err = abs(core - np.sum(wc * np.exp(-1j * xc * T) * remainder(xc)))
        # rounding in the sum grows like sqrt(n) times the largest magnitudes
        core_err += _EPS * math.sqrt(terms.size) * float(np.sum(np.abs(terms)))
        right, e_r = _tail(remainder, b, T, 1, c)
        left, e_l = _tail(remainder, -a, T, -1, c)
        subtracted = np.exp(-1j * w * T) * (1 + gamma * T - beta * T * T / 2)
        scale = math.exp(eta * T) / (2 * math.pi)
        amps[i] = subtracted + 1j * scale * (core + right + left)
        errs[i] = scale * (core_err + e_r + e_l)
    worst = float(errs.max(initial=0.0))
    if worst > tol:
        raise QuadratureError("Fourier inversion did not converge", worst)
    factor = np.abs(amps) ** 2
    return DecoherenceCurve(t, factor, Method.RESOLVENT_INVERSION, digest,
                            meta={"eta": eta, "error_estimate": worst, "amplitudes": amps})


def _side_integral(fun, a, b):
    if b <= a:
        return 0.0, 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            return integrate.quad(fun, a, b, epsabs=1e-14, epsrel=1e-13, limit=400)
        except integrate.IntegrationWarning as exc:
            raise QuadratureError(f"principal-value side integral failed: {exc}", math.inf) from None


def wigner_weisskopf(sd: SpectralDensity, omega_e: float, eps0: float | None = None,
                     tol: float = 1e-8) -> WignerWeisskopfResult:
    """Decay rate and frequency shift of the continuum limit.

    ``gamma_e = 4 pi rho(omega_e) d(omega_e)^2`` and
    ``delta_e = 2 P int rho(w) d(w)^2 / (omega_e - w) dw``.

    The principal value excises ``(omega_e - eps, omega_e + eps)``
    symmetrically. The excision error is odd in ``eps``, so Richardson
    extrapolation over ``eps0, eps0/2, eps0/4`` removes the ``eps`` and
    ``eps**3`` terms.
    """
    lo, hi = sd.support
    if not lo < omega_e < hi:
        raise ValueError(f"omega_e={omega_e} must lie strictly inside the support [{lo}, {hi}]")
    gamma = 4 * math.pi * sd.rho(omega_e) * sd.d(omega_e) ** 2

    edge = min(omega_e - lo, hi - omega_e)
    eps0 = 0.25 * edge if eps0 is None else float(eps0)
    if not 0 < eps0 <= edge:
        raise ValueError("eps0 must be positive and no larger than the distance to the support edge")

    def integrand(w):
        return 2 * sd.weight(w) / (omega_e - w)

    levels, quad_err = [], 0.0
    for eps in (eps0, eps0 / 2, eps0 / 4):
        left, e1 = _side_integral(integrand, lo, omega_e - eps)
        right, e2 = _side_integral(integrand, omega_e + eps, hi)
        levels.append(left + right)
        quad_err += e1 + e2
    p0, p1, p2 = levels
    r1 = [(2 * p1 - p0), (2 * p2 - p1)]       # eps term removed
    delta = (8 * r1[1] - r1[0]) / 7           # eps**3 term removed
    err = abs(delta - r1[1]) + quad_err
    if not math.isfinite(delta) or quad_err > tol:
        raise QuadratureError("principal-value quadrature did not converge", err)
    return WignerWeisskopfResult(float(gamma), float(delta), float(err))


def exponential_law(ww: WignerWeisskopfResult, times) -> DecoherenceCurve:
    if ww.gamma_e < 0:
        raise ValueError("decay rate must be non-negative")
    t = _times(times)
    return DecoherenceCurve(t, np.exp(-ww.gamma_e * t), Method.WIGNER_WEISSKOPF,
                            meta={"gamma_e": ww.gamma_e, "delta_e": ww.delta_e})


def comb_density(spec: CombSpec) -> SpectralDensity:
    """Flat continuum equivalent of an equally spaced comb.

    Density ``1/spacing`` over the comb's footprint, each tooth owning one
    spacing of bandwidth.
    """
    if spec.count < 2:
        raise ValueError("a comb needs at least two modes to define a density")
    half = spec.half_bandwidth + spec.spacing / 2
    center = spec.center + spec.offset * spec.spacing
    return flat_density(spec.density, spec.coupling, center - half, center + half)
