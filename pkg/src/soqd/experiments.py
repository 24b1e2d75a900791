"""Canned parameter scans and curve feature extraction.

Defaults use ``omega_e = 1`` as the unit of frequency.

* Single mode (``figure1_scan``): detuning 0.20, coupling 0.07, photon
  numbers 0, 1, 2, 7.
* Finite comb (``figure2_scan``): coupling 0.17, 3/5/7/9 modes spread over a
  fixed half-bandwidth of 0.4 centred on ``omega_e``.
* Continuum (``continuum_check``): weak-coupling combs of growing density
  compared against the exponential law.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import optimize

from .evolve import DecoherenceCurve, decoherence_factor, default_times
from .model import CombSpec, ModelParams, build_comb, validate
from .subspace import build_multi_mode, build_single_mode

__all__ = [
    "Features",
    "DecayFit",
    "CosineFit",
    "ScanResult",
    "ContinuumPoint",
    "extract_features",
    "dominant_frequency",
    "fit_decay",
    "fit_single_cosine",
    "figure1_scan",
    "figure2_scan",
    "continuum_check",
    "comb_params",
    "single_comb_decay",
    "COLLAPSE_THRESHOLD",
    "REVIVAL_THRESHOLD",
    "FIG1_DETUNING",
    "FIG1_COUPLING",
    "FIG1_PHOTONS",
    "FIG2_COUPLING",
    "FIG2_COUNTS",
    "FIG2_HALF_BANDWIDTH",
]

COLLAPSE_THRESHOLD = 0.1
REVIVAL_THRESHOLD = 0.5

FIG1_DETUNING = 0.20
FIG1_COUPLING = 0.07
FIG1_PHOTONS = (0, 1, 2, 7)
FIG1_T_MAX = 800.0
FIG1_SAMPLES = 4096

FIG2_COUPLING = 0.17
FIG2_COUNTS = (3, 5, 7, 9)
FIG2_HALF_BANDWIDTH = 0.4
FIG2_T_MAX = 200.0

CONTINUUM_COUPLING = 0.02
CONTINUUM_SPACING = 0.05
CONTINUUM_HALF_BANDWIDTH = 1.0
CONTINUUM_SPACINGS = (0.1, 0.05, 0.025, 0.0125)
DECAY_FLOOR = 1e-3


@dataclass(frozen=True)
class DecayFit:
    """Least-squares line ``-ln(factor) = intercept + rate * T``."""

    rate: float
    intercept: float
    r_squared: float
    rms_residual: float
    window: tuple


@dataclass(frozen=True)
class CosineFit:
    """``offset + amplitude * cos(frequency * T + phase)``."""

    offset: float
    amplitude: float
    frequency: float
    phase: float
    rms_residual: float


@dataclass
class Features:
    """Per-curve features; ``None`` marks a feature that is not defined."""

    dominant_frequency: Optional[float] = None
    first_minimum_time: Optional[float] = None
    collapse_time: Optional[float] = None
    revival_time: Optional[float] = None
    decay: Optional[DecayFit] = None

    def to_dict(self) -> dict:
        out = asdict(self)
        if self.decay is not None:
            out["decay"]["window"] = list(self.decay.window)
        return out


@dataclass
class ScanResult:
    label: str
    curves: list
    params: list
    features: list
    settings: dict = field(default_factory=dict)


def _uniform_step(t: np.ndarray) -> float:
    if t.size < 3:
        raise ValueError("need at least three samples")
    steps = np.diff(t)
    if np.ptp(steps) > 1e-9 * max(abs(steps.mean()), 1e-300):
        raise ValueError("feature extraction needs a uniform time grid")
    return float(steps.mean())


def _parabolic(y0, y1, y2):
    """Vertex offset in samples of the parabola through three points."""
    denom = y0 - 2 * y1 + y2
    return 0.0 if denom == 0 else 0.5 * (y0 - y2) / denom


def dominant_frequency(times, values) -> Optional[float]:
    """Angular frequency of the largest peak in the spectrum of ``values - mean``."""
    t = np.asarray(times, dtype=float)
    y = np.asarray(values, dtype=float)
    dt = _uniform_step(t)
    y = y - y.mean()
    if np.max(np.abs(y)) < 1e-12:
        return None
    spec = np.abs(np.fft.rfft(y))
    spec[0] = 0.0
    k = int(np.argmax(spec))
    shift = _parabolic(spec[k - 1], spec[k], spec[k + 1]) if 0 < k < spec.size - 1 else 0.0
    return float(2 * math.pi * (k + shift) / (y.size * dt))


def _first_local_min(t, y):
    for i in range(1, y.size - 1):
        if y[i] < y[i - 1] and y[i] <= y[i + 1]:
            return float(t[i] + _parabolic(y[i - 1], y[i], y[i + 1]) * (t[1] - t[0]))
    return None


def _first_crossing_below(t, y, level):
    below = np.nonzero(y < level)[0]
    if below.size == 0:
        return None, None
    i = int(below[0])
    if i == 0:
        return float(t[0]), 0
    # linear interpolation between the bracketing samples
    frac = (y[i - 1] - level) / (y[i - 1] - y[i])
    return float(t[i - 1] + frac * (t[i] - t[i - 1])), i


def _first_max_above(t, y, start, level):
    for i in range(max(start, 1), y.size - 1):
        if y[i] > level and y[i] > y[i - 1] and y[i] >= y[i + 1]:
            return float(t[i] + _parabolic(y[i - 1], y[i], y[i + 1]) * (t[1] - t[0]))
    return None


def fit_decay(times, factor, window=None) -> Optional[DecayFit]:
    """Fit ``-ln(factor)`` linearly in ``T`` over ``window`` (default: all samples).

    Samples with a non-positive factor are skipped; fewer than three usable
    samples means no fit.
    """
    t = np.asarray(times, dtype=float)
    f = np.asarray(factor, dtype=float)
    lo, hi = (t[0], t[-1]) if window is None else window
    keep = (t >= lo) & (t <= hi) & (f > 0)
    if keep.sum() < 3:
        return None
    x, y = t[keep], -np.log(f[keep])
    A = np.column_stack([np.ones_like(x), x])
    (intercept, rate), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ np.array([intercept, rate])
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return DecayFit(float(rate), float(intercept), r2,
                    float(np.sqrt(np.mean(resid ** 2))), (float(lo), float(hi)))


def fit_single_cosine(times, values) -> CosineFit:
    """Nonlinear least-squares fit of one cosine plus offset."""
    t = np.asarray(times, dtype=float)
    y = np.asarray(values, dtype=float)
    w0 = dominant_frequency(t, y)
    if w0 is None:
        return CosineFit(float(y.mean()), 0.0, 0.0, 0.0, float(np.sqrt(np.mean((y - y.mean()) ** 2))))
    # linear solve for offset and quadratures at the trial frequency
    A = np.column_stack([np.ones_like(t), np.cos(w0 * t), np.sin(w0 * t)])
    c0, a0, b0 = np.linalg.lstsq(A, y, rcond=None)[0]

    def resid(p):
        off, amp, w, ph = p
        return off + amp * np.cos(w * t + ph) - y

    start = [c0, math.hypot(a0, b0), w0, math.atan2(-b0, a0)]
    sol = optimize.least_squares(resid, start, xtol=1e-15, ftol=1e-15, gtol=1e-15,
                                 method="lm", max_nfev=20000)
    off, amp, w, ph = sol.x
    return CosineFit(float(off), float(amp), float(w), float(ph),
                     float(np.sqrt(np.mean(sol.fun ** 2))))


def extract_features(curve: DecoherenceCurve, collapse_threshold: float = COLLAPSE_THRESHOLD,
                     revival_threshold: float = REVIVAL_THRESHOLD, fit_window=None,
                     fit: bool = True) -> Features:
    """Dominant frequency, first minimum, collapse, revival and decay fit.

    The collapse time is the first crossing below ``collapse_threshold``;
    the revival time is the first later local maximum above
    ``revival_threshold``. Either is ``None`` when it does not occur.
    """
    t, y = curve.times, curve.factor
    _uniform_step(t)
    feats = Features(dominant_frequency=dominant_frequency(t, y))
    if feats.dominant_frequency is None:
        return feats
    feats.first_minimum_time = _first_local_min(t, y)
    feats.collapse_time, idx = _first_crossing_below(t, y, collapse_threshold)
    if idx is not None:
        feats.revival_time = _first_max_above(t, y, idx, revival_threshold)
    if fit:
        feats.decay = fit_decay(t, y, fit_window)
    return feats


def _digest_curve(params: ModelParams, curve: DecoherenceCurve, **meta):
    curve.params_digest = params.digest()
    curve.meta.update(meta)
    return curve


def figure1_scan(times=None, detuning: float = FIG1_DETUNING, coupling: float = FIG1_COUPLING,
                 photons: Sequence[int] = FIG1_PHOTONS, omega_e: float = 1.0) -> ScanResult:
    """Single-mode decoherence factor for several reservoir photon numbers."""
    t = default_times(FIG1_T_MAX, FIG1_SAMPLES) if times is None else np.asarray(times, dtype=float)
    params = validate(ModelParams.single_mode(omega_e, omega_e + detuning, coupling))
    curves, feats = [], []
    for N in photons:
        curve = decoherence_factor(build_single_mode(params, N), t)
        curves.append(_digest_curve(params, curve, N=N, label=f"N={N}"))
        feats.append(extract_features(curve, fit=False))
    return ScanResult("fig1", curves, [params] * len(curves), feats,
                      {"detuning": detuning, "coupling": coupling, "photons": list(photons),
                       "omega_e": omega_e})


def comb_params(count: int, coupling: float, half_bandwidth: float, omega_e: float = 1.0,
                offset: float = 0.0) -> ModelParams:
    spec = CombSpec(omega_e, half_bandwidth, count, coupling, offset)
    return validate(ModelParams(omega_e, tuple(build_comb(spec))))


def figure2_scan(times=None, coupling: float = FIG2_COUPLING, counts: Sequence[int] = FIG2_COUNTS,
                 half_bandwidth: float = FIG2_HALF_BANDWIDTH, omega_e: float = 1.0,
                 offset: float = 0.0, collapse_threshold: float = COLLAPSE_THRESHOLD,
                 revival_threshold: float = REVIVAL_THRESHOLD) -> ScanResult:
    """Vacuum-reservoir decoherence factor for combs with a growing number of modes.

    ``offset = 0.5`` moves every comb by half a spacing so that ``omega_e``
    falls between two teeth instead of on one.
    """
    t = default_times(FIG2_T_MAX) if times is None else np.asarray(times, dtype=float)
    curves, feats, plist = [], [], []
    for M in counts:
        params = comb_params(M, coupling, half_bandwidth, omega_e, offset)
        curve = decoherence_factor(build_multi_mode(params), t)
        spacing = 2 * half_bandwidth / (M - 1) if M > 1 else math.inf
        curves.append(_digest_curve(params, curve, N_mod=M, spacing=spacing, label=f"N_mod={M}"))
        feats.append(extract_features(curve, collapse_threshold, revival_threshold, fit=False))
        plist.append(params)
    return ScanResult("fig2", curves, plist, feats,
                      {"coupling": coupling, "counts": list(counts), "half_bandwidth": half_bandwidth,
                       "omega_e": omega_e, "offset": offset,
                       "collapse_threshold": collapse_threshold,
                       "revival_threshold": revival_threshold})


@dataclass(frozen=True)
class ContinuumPoint:
    spacing: float
    half_bandwidth: float
    count: int
    coupling: float
    predicted_rate: float
    fit: Optional[DecayFit]
    relative_error: Optional[float]
    reduced_fit: Optional[DecayFit] = None

    @property
    def stimulation_ratio(self) -> Optional[float]:
        """Fitted rate over the rate of the same comb with couplings / sqrt(2)."""
        if self.fit is None or self.reduced_fit is None:
            return None
        return self.fit.rate / self.reduced_fit.rate


def _continuum_point(spacing, half_bandwidth, coupling, omega_e, samples, floor, offset):
    count = 2 * int(round(half_bandwidth / spacing)) + 1
    width = (count - 1) * spacing / 2
    params = comb_params(count, coupling, width, omega_e, offset)
    predicted = 4 * math.pi * coupling ** 2 / spacing
    # pre-revival window, cut where the factor would fall under the floor
    t_end = min(0.5 * 2 * math.pi / spacing, math.log(1 / floor) / predicted)
    t = np.linspace(0.0, t_end, samples)
    curve = decoherence_factor(build_multi_mode(params), t)
    fit = fit_decay(t, curve.factor)
    reduced = decoherence_factor(build_multi_mode(params.scaled_couplings(1 / math.sqrt(2))), t)
    rfit = fit_decay(t, reduced.factor)
    rel = None if fit is None else abs(fit.rate - predicted) / predicted
    point = ContinuumPoint(spacing, width, count, coupling, predicted, fit, rel, rfit)
    return point, _digest_curve(params, curve, spacing=spacing, label=f"spacing={spacing:g}"), params


def continuum_check(spacings: Sequence[float] = CONTINUUM_SPACINGS, rate: float | None = None,
                    half_bandwidths: Sequence[float] | None = None, omega_e: float = 1.0,
                    samples: int = 1001, floor: float = DECAY_FLOOR, offset: float = 0.0):
    """Fit exponential decay to combs of increasing density at a fixed target rate.

    The coupling of each comb is set so that ``4 pi d^2 / spacing`` equals
    ``rate`` (default: coupling 0.02 at spacing 0.05). The bandwidth grows
    like ``spacing**-0.5`` (half-bandwidth 1 at spacing 0.025) so that the
    finite-band correction, of order ``rate / bandwidth``, shrinks along
    with the level spacing.

    Returns ``(ScanResult, points)``.
    """
    rate = 4 * math.pi * CONTINUUM_COUPLING ** 2 / CONTINUUM_SPACING if rate is None else rate
    if half_bandwidths is None:
        half_bandwidths = [math.sqrt(0.025 / s) for s in spacings]
    points, curves, plist, feats = [], [], [], []
    for spacing, width in zip(spacings, half_bandwidths):
        coupling = math.sqrt(rate * spacing / (4 * math.pi))
        point, curve, params = _continuum_point(spacing, width, coupling, omega_e, samples,
                                                floor, offset)
        points.append(point)
        curves.append(curve)
        plist.append(params)
        feats.append(Features(decay=point.fit))
    scan = ScanResult("continuum", curves, plist, feats,
                      {"rate": rate, "spacings": list(spacings),
                       "half_bandwidths": list(half_bandwidths), "omega_e": omega_e,
                       "floor": floor})
    return scan, points


def single_comb_decay(spacing: float = CONTINUUM_SPACING, coupling: float = CONTINUUM_COUPLING,
                      half_bandwidth: float = CONTINUUM_HALF_BANDWIDTH, omega_e: float = 1.0,
                      samples: int = 1001, floor: float = DECAY_FLOOR,
                      offset: float = 0.0) -> ContinuumPoint:
    """Exponential-law comparison for one flat comb centred on ``omega_e``."""
    point, _, _ = _continuum_point(spacing, half_bandwidth, coupling, omega_e, samples, floor, offset)
    return point
