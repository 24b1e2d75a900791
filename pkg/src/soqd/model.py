"""Physical parameters of the two-mode boson system and its reservoir.

Frequencies are angular with hbar = 1. The ground mode frequency is fixed at
zero, the excited mode sits at ``omega_e`` and each reservoir mode ``j`` has a
frequency ``omega_j`` and a real, non-negative coupling ``d_j``.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

NORM_TOL = 1e-12

__all__ = [
    "ReservoirMode",
    "MeasurementCoeffs",
    "ModelParams",
    "CombSpec",
    "SpectralDensity",
    "ValidationError",
    "DegenerateModesWarning",
    "build_comb",
    "flat_density",
    "validate",
    "params_from_config",
    "load_config",
]


class ValidationError(ValueError):
    """Raised when a configuration violates one or more invariants.

    ``problems`` holds one ``{"field": ..., "message": ...}`` record per
    violated invariant, so callers can report all of them at once.
    """

    def __init__(self, problems):
        self.problems = list(problems)
        text = "; ".join(f"{p['field']}: {p['message']}" for p in self.problems)
        super().__init__(text or "invalid parameters")

    def to_dict(self):
        return {"error": "validation", "problems": self.problems}


class DegenerateModesWarning(UserWarning):
    """Two or more reservoir modes share a frequency."""


@dataclass(frozen=True)
class ReservoirMode:
    omega_j: float
    d_j: float


@dataclass(frozen=True)
class MeasurementCoeffs:
    """Amplitudes of the measured superposition, ``B = c1 b_g + c2 b_e``."""

    c1: complex = 1 / math.sqrt(2)
    c2: complex = 1 / math.sqrt(2)

    @property
    def norm(self) -> float:
        return abs(self.c1) ** 2 + abs(self.c2) ** 2

    @property
    def balanced(self) -> bool:
        return (abs(self.c1 - 1 / math.sqrt(2)) < NORM_TOL
                and abs(self.c2 - 1 / math.sqrt(2)) < NORM_TOL)


@dataclass(frozen=True)
class ModelParams:
    omega_e: float
    modes: tuple[ReservoirMode, ...] = ()
    measurement: MeasurementCoeffs = field(default_factory=MeasurementCoeffs)

    def __post_init__(self):
        object.__setattr__(self, "modes", tuple(self.modes))

    @classmethod
    def single_mode(cls, omega_e, omega_j, d, measurement=None):
        return cls(omega_e, (ReservoirMode(omega_j, d),),
                   measurement or MeasurementCoeffs())

    @property
    def frequencies(self) -> np.ndarray:
        return np.array([m.omega_j for m in self.modes], dtype=float)

    @property
    def couplings(self) -> np.ndarray:
        return np.array([m.d_j for m in self.modes], dtype=float)

    @property
    def detuning(self) -> float:
        """``omega_j - omega_e`` for a single-mode reservoir."""
        if len(self.modes) != 1:
            raise ValueError("detuning is defined for a single reservoir mode")
        return self.modes[0].omega_j - self.omega_e

    def scaled_couplings(self, factor: float) -> "ModelParams":
        modes = tuple(ReservoirMode(m.omega_j, m.d_j * factor) for m in self.modes)
        return ModelParams(self.omega_e, modes, self.measurement)

    def to_dict(self) -> dict:
        c1, c2 = complex(self.measurement.c1), complex(self.measurement.c2)
        return {
            "omega_e": self.omega_e,
            "modes": [{"omega": m.omega_j, "d": m.d_j} for m in self.modes],
            "measurement": {"c1_re": c1.real, "c1_im": c1.imag,
                            "c2_re": c2.real, "c2_im": c2.imag},
        }

    def digest(self) -> str:
        import hashlib
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass(frozen=True)
class CombSpec:
    """Equally spaced reservoir with uniform coupling.

    ``count`` modes are laid out on ``[center - half_bandwidth,
    center + half_bandwidth]``; ``offset`` shifts the whole comb by that
    fraction of the spacing (0.5 puts ``center`` between two teeth).
    """

    center: float
    half_bandwidth: float
    count: int
    coupling: float
    offset: float = 0.0

    @property
    def spacing(self) -> float:
        if self.count < 2:
            return math.inf
        return 2 * self.half_bandwidth / (self.count - 1)

    @property
    def density(self) -> float:
        return 1 / self.spacing


def build_comb(spec: CombSpec) -> list[ReservoirMode]:
    values = (spec.center, spec.half_bandwidth, spec.coupling, spec.offset)
    if not all(math.isfinite(v) for v in values):
        raise ValueError("comb parameters must be finite")
    if int(spec.count) != spec.count or spec.count < 1:
        raise ValueError(f"comb count must be a positive integer, got {spec.count!r}")
    if spec.count > 1 and spec.half_bandwidth <= 0:
        raise ValueError("half_bandwidth must be positive for more than one mode")
    if spec.coupling < 0:
        raise ValueError("coupling must be non-negative")
    if spec.count == 1:
        return [ReservoirMode(float(spec.center), float(spec.coupling))]
    # symmetric construction keeps the comb centred to rounding error
    k = np.arange(spec.count) - (spec.count - 1) / 2
    omegas = spec.center + (k + spec.offset) * spec.spacing
    return [ReservoirMode(float(w), float(spec.coupling)) for w in omegas]


@dataclass(frozen=True)
class SpectralDensity:
    """Continuum reservoir: mode density ``rho`` and coupling profile ``d``."""

    rho: Callable[[float], float]
    d: Callable[[float], float]
    support: tuple[float, float]

    def weight(self, omega):
        """``rho(omega) * d(omega)**2``."""
        return self.rho(omega) * self.d(omega) ** 2


def flat_density(rho: float, d: float, lo: float, hi: float) -> SpectralDensity:
    if not lo < hi:
        raise ValueError("support must satisfy lo < hi")
    return SpectralDensity(lambda w: rho, lambda w: d, (float(lo), float(hi)))


def _problems(params: ModelParams):
    out = []
    if not (isinstance(params.omega_e, (int, float)) and math.isfinite(params.omega_e)):
        out.append({"field": "omega_e", "message": "must be a finite number"})
    elif params.omega_e <= 0:
        out.append({"field": "omega_e", "message": f"must be positive, got {params.omega_e}"})
    for i, m in enumerate(params.modes):
        if not (math.isfinite(m.omega_j) and math.isfinite(m.d_j)):
            out.append({"field": f"modes[{i}]", "message": "frequency and coupling must be finite"})
        elif m.d_j < 0:
            out.append({"field": f"modes[{i}].d", "message": f"coupling must be non-negative, got {m.d_j}"})
    norm = params.measurement.norm
    if not abs(norm - 1) <= NORM_TOL:
        out.append({"field": "measurement",
                    "message": f"|c1|^2 + |c2|^2 = {norm!r}, expected 1"})
    return out


def validate(params: ModelParams) -> ModelParams:
    """Return ``params`` unchanged or raise :class:`ValidationError`.

    Every violated invariant is collected before raising. Repeated mode
    frequencies are allowed and only trigger a :class:`DegenerateModesWarning`.
    """
    problems = _problems(params)
    if problems:
        raise ValidationError(problems)
    freqs = params.frequencies
    if len(freqs) != len(np.unique(freqs)):
        warnings.warn("reservoir contains degenerate mode frequencies",
                      DegenerateModesWarning, stacklevel=2)
    return params


def _number(cfg, key, problems, where=""):
    value = cfg.get(key)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        problems.append({"field": where + key, "message": "must be a number"})
        return None
    return float(value)


def params_from_config(cfg: dict, require_reservoir: bool = True) -> ModelParams:
    """Build validated :class:`ModelParams` from a decoded JSON config.

    Recognised keys are ``omega_e``, exactly one of ``modes`` (list of
    ``{"omega", "d"}``) or ``comb`` (``center``, ``half_bandwidth``,
    ``count``, ``coupling`` and optional ``offset``), and an optional
    ``measurement`` block with ``c1_re``, ``c1_im``, ``c2_re``, ``c2_im``.
    """
    if not isinstance(cfg, dict):
        raise ValidationError([{"field": "<root>", "message": "config must be a JSON object"}])
    problems = []
    omega_e = _number(cfg, "omega_e", problems)

    has_modes, has_comb = "modes" in cfg, "comb" in cfg
    modes = []
    if has_modes and has_comb:
        problems.append({"field": "modes/comb", "message": "give exactly one of 'modes' or 'comb'"})
    elif has_modes:
        if not isinstance(cfg["modes"], list):
            problems.append({"field": "modes", "message": "must be an array"})
        else:
            for i, m in enumerate(cfg["modes"]):
                where = f"modes[{i}]."
                if not isinstance(m, dict):
                    problems.append({"field": f"modes[{i}]", "message": "must be an object"})
                    continue
                w, d = _number(m, "omega", problems, where), _number(m, "d", problems, where)
                if w is not None and d is not None:
                    modes.append(ReservoirMode(w, d))
    elif has_comb:
        comb = cfg["comb"]
        if not isinstance(comb, dict):
            problems.append({"field": "comb", "message": "must be an object"})
        else:
            vals = {k: _number(comb, k, problems, "comb.")
                    for k in ("center", "half_bandwidth", "count", "coupling")}
            offset = float(comb.get("offset", 0.0))
            count = vals["count"]
            if count is not None and (not math.isfinite(count) or count != int(count)):
                problems.append({"field": "comb.count", "message": "must be an integer"})
            elif None not in vals.values():
                try:
                    modes = build_comb(CombSpec(vals["center"], vals["half_bandwidth"],
                                                int(count), vals["coupling"], offset))
                except ValueError as exc:
                    problems.append({"field": "comb", "message": str(exc)})
    elif require_reservoir:
        problems.append({"field": "modes/comb", "message": "a reservoir ('modes' or 'comb') is required"})

    meas = MeasurementCoeffs()
    if "measurement" in cfg:
        m = cfg["measurement"]
        if not isinstance(m, dict):
            problems.append({"field": "measurement", "message": "must be an object"})
        else:
            parts = {k: float(m.get(k, 0.0)) for k in ("c1_re", "c1_im", "c2_re", "c2_im")}
            meas = MeasurementCoeffs(complex(parts["c1_re"], parts["c1_im"]),
                                     complex(parts["c2_re"], parts["c2_im"]))
    if problems:
        raise ValidationError(problems)
    return validate(ModelParams(omega_e, tuple(modes), meas))


def load_config(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError([{"field": "<config>", "message": str(exc)}]) from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError([{"field": "<config>", "message": f"invalid JSON: {exc}"}]) from None
