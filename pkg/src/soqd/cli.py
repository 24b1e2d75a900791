"""Command-line front end.

Every subcommand writes plain CSV data files plus a ``manifest.json`` into
the output directory (``--out``, else ``$SOQD_OUTPUT_DIR``, else
``./soqd-output``). Values given as flags override those from ``--config``.

Exit codes: 0 success, 2 invalid input, 3 numeric failure. Errors are
reported as a single JSON line on stderr.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
import warnings
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from . import experiments as exp
from .correlate import (TwoAtomState, g2_compact_grid, g2_grid, visibility)
from .evolve import (DEFAULT_SAMPLES, decoherence_factor, default_times, reduced_density,
                     reduced_density_series)
from .io import digest_bytes, write_curve, write_grid, write_json, write_matrix
from .model import (MeasurementCoeffs, ModelParams, ValidationError, flat_density, load_config,
                    params_from_config, validate)
from .oracle import SectorError, initial_occupation, oracle_factor
from .resolvent import (QuadratureError, exponential_law, invert_fourier, multi_mode_resolvent,
                        resonant_closed_form, single_mode_resolvent, wigner_weisskopf)
from .subspace import build_multi_mode, build_single_mode

ENV_OUTPUT = "SOQD_OUTPUT_DIR"
ORACLE_TOL = 1e-10


class UsageError(Exception):
    pass


class NumericError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _emit_error(kind, message, problems=None, code=2):
    payload = {"error": kind, "message": message}
    if problems:
        payload["problems"] = problems
    sys.stderr.write(json.dumps(payload, sort_keys=True) + "\n")
    return code


class Run:
    """Collects outputs and writes the manifest at the end of a command."""

    def __init__(self, args, command):
        self.command = command
        self.out = Path(args.out or os.environ.get(ENV_OUTPUT) or "soqd-output")
        self.out.mkdir(parents=True, exist_ok=True)
        self.files = []
        self.started = time.perf_counter()
        self.config_digest = None
        if getattr(args, "config", None):
            self.config_digest = digest_bytes(Path(args.config).read_bytes())

    def path(self, name):
        p = self.out / name
        self.files.append(p.name)
        return p

    def finish(self, parameters, **extra):
        manifest = {
            "command": self.command,
            "parameters": parameters,
            "config_digest": self.config_digest,
            "outputs": sorted(self.files),
            "wall_time_s": time.perf_counter() - self.started,
            "version": __version__,
            "created": datetime.now(timezone.utc).isoformat(),
            "seed": None,
        }
        manifest.update(extra)
        write_json(self.out / "manifest.json", manifest)
        return manifest


def _config(args) -> dict:
    return load_config(args.config) if getattr(args, "config", None) else {}


def _pick(flag, cfg, key, default=None):
    return flag if flag is not None else cfg.get(key, default)


def _measurement(args, cfg):
    if args.c1 is None and args.c2 is None:
        if "measurement" not in cfg:
            return MeasurementCoeffs()
        stub = {"omega_e": 1.0, "measurement": cfg["measurement"]}
        return params_from_config(stub, require_reservoir=False).measurement
    c1 = complex(*args.c1) if args.c1 else complex(1 / math.sqrt(2))
    c2 = complex(*args.c2) if args.c2 else complex(1 / math.sqrt(2))
    return MeasurementCoeffs(c1, c2)


def _times(args, cfg, default_t_max):
    t_max = float(_pick(args.t_max, cfg, "t_max", default_t_max))
    samples = int(_pick(args.samples, cfg, "samples", DEFAULT_SAMPLES))
    if not (math.isfinite(t_max) and t_max > 0) or samples < 2:
        raise ValidationError([{"field": "t_max/samples", "message": "need t_max > 0 and samples >= 2"}])
    return default_times(t_max, samples)


def _single_params(args, cfg) -> ModelParams:
    merged = dict(cfg)
    merged["omega_e"] = _pick(args.omega_e, cfg, "omega_e", 1.0)
    mode = (cfg.get("modes") or [{}])[0] if "modes" in cfg else {}
    omega_j = _pick(args.omega_j, mode, "omega", None)
    d = _pick(args.d, mode, "d", None)
    missing = [n for n, v in (("omega_j", omega_j), ("d", d)) if v is None]
    if missing:
        raise ValidationError([{"field": m, "message": "required"} for m in missing])
    merged.pop("comb", None)
    merged["modes"] = [{"omega": omega_j, "d": d}]
    params = params_from_config(merged)
    return ModelParams(params.omega_e, params.modes, _measurement(args, cfg))


def _multi_params(args, cfg) -> ModelParams:
    merged = dict(cfg)
    merged["omega_e"] = _pick(args.omega_e, cfg, "omega_e", 1.0)
    if args.mode:
        merged.pop("comb", None)
        merged["modes"] = [{"omega": w, "d": d} for w, d in args.mode]
    elif any(v is not None for v in (args.count, args.coupling, args.half_bandwidth)) or "comb" in cfg:
        comb = dict(cfg.get("comb", {}))
        for key, val in (("center", args.comb_center), ("half_bandwidth", args.half_bandwidth),
                         ("count", args.count), ("coupling", args.coupling), ("offset", args.offset)):
            if val is not None:
                comb[key] = val
        comb.setdefault("center", merged["omega_e"])
        merged.pop("modes", None)
        merged["comb"] = comb
    params = params_from_config(merged)
    return ModelParams(params.omega_e, params.modes, _measurement(args, cfg))


def _photon_number(args, cfg):
    N = _pick(args.n, cfg, "N", 0)
    if isinstance(N, bool) or not isinstance(N, (int, float)) or N != int(N) or N < 0:
        raise ValidationError([{"field": "N", "message": f"must be a non-negative integer, got {N!r}"}])
    return int(N)


def _density_columns(system, times):
    w = reduced_density_series(system, times)
    return {"p_upper": w[:, 0], "p_mid": w[:, 1], "p_lower": w[:, 2]}


def _oracle_check(params, initial, times, reference):
    curve = oracle_factor(params, initial, times)
    dev = float(np.max(np.abs(curve.factor - reference)))
    if dev > ORACLE_TOL:
        raise NumericError(f"oracle deviation {dev:.3g} exceeds {ORACLE_TOL:g}")
    return curve, dev


def cmd_single_mode(args):
    cfg = _config(args)
    params = _single_params(args, cfg)
    N = _photon_number(args, cfg)
    times = _times(args, cfg, 800.0)
    run = Run(args, "single-mode")
    system = build_single_mode(params, N)
    curve = decoherence_factor(system, times, digest=params.digest())
    write_curve(run.path("single_mode_evolution.csv"), curve, _density_columns(system, times))
    report = {}
    if args.closed_form:
        closed = resonant_closed_form(params, N, times)
        write_curve(run.path("single_mode_closed_form.csv"), closed)
        report["closed_form_max_deviation"] = float(np.max(np.abs(closed.factor - curve.factor)))
    if args.resolvent_inversion:
        inv = invert_fourier(single_mode_resolvent(params, N), times, digest=params.digest())
        write_curve(run.path("single_mode_resolvent_inversion.csv"), inv)
        report["resolvent_inversion_max_deviation"] = float(np.max(np.abs(inv.factor - curve.factor)))
        report["resolvent_inversion_error_estimate"] = inv.meta["error_estimate"]
    if args.oracle:
        oc, dev = _oracle_check(params, initial_occupation(params, N), times, curve.factor)
        write_curve(run.path("single_mode_oracle.csv"), oc)
        report["oracle_max_deviation"] = dev
        report["oracle_dimension"] = oc.meta["dimension"]
    run.finish({**params.to_dict(), "N": N, "t_max": float(times[-1]), "samples": times.size},
               report=report)
    return 0


def cmd_multi_mode(args):
    cfg = _config(args)
    params = _multi_params(args, cfg)
    if not params.modes:
        raise ValidationError([{"field": "modes/comb", "message": "a reservoir is required"}])
    times = _times(args, cfg, 200.0)
    run = Run(args, "multi-mode")
    system = build_multi_mode(params)
    curve = decoherence_factor(system, times, digest=params.digest())
    write_curve(run.path("multi_mode_evolution.csv"), curve, _density_columns(system, times))
    report = {}
    if args.resolvent_inversion:
        inv = invert_fourier(multi_mode_resolvent(params), times, digest=params.digest())
        write_curve(run.path("multi_mode_resolvent_inversion.csv"), inv)
        report["resolvent_inversion_max_deviation"] = float(np.max(np.abs(inv.factor - curve.factor)))
    if args.oracle:
        oc, dev = _oracle_check(params, initial_occupation(params), times, curve.factor)
        write_curve(run.path("multi_mode_oracle.csv"), oc)
        report["oracle_max_deviation"] = dev
        report["oracle_dimension"] = oc.meta["dimension"]
    feats = exp.extract_features(curve, args.collapse_threshold, args.revival_threshold, fit=False)
    run.finish({**params.to_dict(), "t_max": float(times[-1]), "samples": times.size},
               report=report, features=feats.to_dict())
    return 0


def cmd_continuum(args):
    cfg = _config(args)
    omega_e = float(_pick(args.omega_e, cfg, "omega_e", 1.0))
    rho = _pick(args.rho, cfg, "rho", None)
    d = _pick(args.d, cfg, "d", None)
    problems = [{"field": k, "message": "required"} for k, v in (("rho", rho), ("d", d)) if v is None]
    if problems:
        raise ValidationError(problems)
    rho, d = float(rho), float(d)
    lo, hi = args.support if args.support else cfg.get("support", (omega_e - 1.0, omega_e + 1.0))
    if not lo < omega_e < hi or rho < 0 or d < 0 or omega_e <= 0:
        raise ValidationError([{"field": "support", "message": "need rho, d >= 0 and lo < omega_e < hi"}])
    ww = wigner_weisskopf(flat_density(rho, d, lo, hi), omega_e)
    gamma = ww.gamma_e
    t_max = args.t_max or cfg.get("t_max") or (8.0 / gamma if gamma > 0 else 100.0)
    times = default_times(float(t_max), int(_pick(args.samples, cfg, "samples", 1001)))
    run = Run(args, "continuum")
    write_curve(run.path("continuum_exponential.csv"), exponential_law(ww, times))
    extra = {"gamma_e": gamma, "delta_e": ww.delta_e, "delta_e_error_estimate": ww.error_estimate}
    if args.comb_spacing:
        point = exp.single_comb_decay(spacing=args.comb_spacing, coupling=d,
                                      half_bandwidth=args.comb_half_bandwidth, omega_e=omega_e)
        params = exp.comb_params(point.count, d, point.half_bandwidth, omega_e)
        t = np.linspace(0.0, point.fit.window[1], 1001) if point.fit else times
        write_curve(run.path("continuum_comb.csv"), decoherence_factor(build_multi_mode(params), t))
        extra["comb_fit"] = {
            "spacing": point.spacing, "count": point.count, "predicted_rate": point.predicted_rate,
            "fitted_rate": None if point.fit is None else point.fit.rate,
            "relative_error": point.relative_error,
            "r_squared": None if point.fit is None else point.fit.r_squared,
        }
    run.finish({"omega_e": omega_e, "rho": rho, "d": d, "support": [lo, hi],
                "t_max": float(times[-1]), "samples": times.size}, **extra)
    return 0


def cmd_correlation(args):
    cfg = _config(args)
    omega_e = float(_pick(args.omega_e, cfg, "omega_e", 1.0))
    coeffs = _measurement(args, cfg)
    validate(ModelParams(omega_e, (), coeffs))
    source = {}
    if args.weights:
        try:
            state = TwoAtomState(*args.weights)
        except ValueError as exc:
            raise ValidationError([{"field": "weights", "message": str(exc)}]) from None
        source["weights"] = list(args.weights)
    else:
        if args.T is None:
            raise ValidationError([{"field": "weights/T", "message": "give --weights or a model with --T"}])
        params = _single_params(args, cfg)
        N = _photon_number(args, cfg)
        state = TwoAtomState.from_weights(reduced_density(build_single_mode(params, N), args.T))
        source.update(params.to_dict(), N=N, T=args.T)
    t = np.linspace(args.t_min, args.t_max, args.t_samples)
    run = Run(args, "correlation")
    grid = g2_grid(state, coeffs, omega_e, t, t)
    write_grid(run.path("correlation_grid.csv"), grid)
    # G depends on t - t' only; scan one fringe period, hitting its extremes exactly
    tau = np.linspace(0.0, 2 * math.pi / omega_e, 2001)
    period = g2_grid(state, coeffs, omega_e, tau, [0.0]).g[:, 0]
    report = {"p_mid": state.p_mid, "visibility": visibility(period),
              "grid_visibility": visibility(grid.g)}
    if coeffs.balanced:
        compact = g2_compact_grid(min(max(state.p_mid, 0.0), 1.0), omega_e, t, t)
        report["compact_max_deviation"] = float(np.max(np.abs(compact.g - grid.g)))
    run.finish({"omega_e": omega_e, "t_min": args.t_min, "t_max": args.t_max,
                "t_samples": args.t_samples, **source}, report=report)
    return 0


def cmd_reproduce(args):
    run = Run(args, f"reproduce {args.figure}")
    if args.figure == "fig1":
        scan = exp.figure1_scan()
        for curve in scan.curves:
            write_curve(run.path(f"fig1_N{curve.meta['N']}.csv"), curve)
        feats = {c.meta["label"]: f.to_dict() for c, f in zip(scan.curves, scan.features)}
        write_json(run.path("fig1_features.json"), feats)
        run.finish(scan.settings, features=feats)
    elif args.figure == "fig2":
        scan = exp.figure2_scan(offset=args.offset, collapse_threshold=args.collapse_threshold,
                                revival_threshold=args.revival_threshold)
        for curve in scan.curves:
            write_curve(run.path(f"fig2_Nmod{curve.meta['N_mod']}.csv"), curve)
        feats = {c.meta["label"]: {**f.to_dict(), "spacing": c.meta["spacing"],
                                   "rephasing_time": 2 * math.pi / c.meta["spacing"]}
                 for c, f in zip(scan.curves, scan.features)}
        write_json(run.path("fig2_features.json"), feats)
        run.finish(scan.settings, features=feats)
    else:
        scan, points = exp.continuum_check()
        for curve, point in zip(scan.curves, points):
            write_curve(run.path(f"continuum_spacing{point.spacing:g}.csv"), curve)
        single = exp.single_comb_decay()
        report = [{"spacing": p.spacing, "count": p.count, "half_bandwidth": p.half_bandwidth,
                   "coupling": p.coupling, "predicted_rate": p.predicted_rate,
                   "fitted_rate": None if p.fit is None else p.fit.rate,
                   "r_squared": None if p.fit is None else p.fit.r_squared,
                   "relative_error": p.relative_error, "stimulation_ratio": p.stimulation_ratio}
                  for p in points + [single]]
        write_json(run.path("continuum_report.json"), report)
        run.finish(scan.settings, report=report)
    return 0


def cmd_dump_hamiltonian(args):
    cfg = _config(args)
    single = args.n is not None or (args.omega_j is not None) or (
        "N" in cfg and "comb" not in cfg and len(cfg.get("modes", [])) == 1)
    if single:
        params = _single_params(args, cfg)
        system = build_single_mode(params, _photon_number(args, cfg))
    else:
        params = _multi_params(args, cfg)
        system = build_multi_mode(params)
    run = Run(args, "dump-hamiltonian")
    write_matrix(run.path("hamiltonian.csv"), system.hamiltonian)
    run.finish(params.to_dict(), basis=[str(b) for b in system.basis],
               photon_number=system.photon_number)
    return 0


def _model_flags(p, single=True):
    p.add_argument("--config", help="JSON configuration file")
    p.add_argument("--omega-e", type=float, dest="omega_e")
    if single:
        p.add_argument("--omega-j", type=float, dest="omega_j")
        p.add_argument("--d", type=float)
        p.add_argument("--n", type=int, help="reservoir photon number N")
    p.add_argument("--c1", type=float, nargs=2, metavar=("RE", "IM"))
    p.add_argument("--c2", type=float, nargs=2, metavar=("RE", "IM"))


def _comb_flags(p):
    p.add_argument("--mode", type=float, nargs=2, action="append", metavar=("OMEGA", "D"),
                   help="explicit reservoir mode; repeatable")
    p.add_argument("--comb-center", type=float, dest="comb_center")
    p.add_argument("--half-bandwidth", type=float, dest="half_bandwidth")
    p.add_argument("--count", type=int)
    p.add_argument("--coupling", type=float)
    p.add_argument("--offset", type=float, help="comb shift in units of the spacing")


def _time_flags(p):
    p.add_argument("--t-max", type=float, dest="t_max")
    p.add_argument("--samples", type=int)


def _threshold_flags(p):
    p.add_argument("--collapse-threshold", type=float, default=exp.COLLAPSE_THRESHOLD)
    p.add_argument("--revival-threshold", type=float, default=exp.REVIVAL_THRESHOLD)


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--out", help=f"output directory (default: ${ENV_OUTPUT} or ./soqd-output)")
    common.add_argument("--seed", type=int, help="reserved; all computations are deterministic")

    parser = _Parser(prog="soqd", description="Second-order decoherence of a two-mode boson system.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("single-mode", parents=[common], help="one reservoir mode in a Fock state")
    _model_flags(p)
    _time_flags(p)
    p.add_argument("--closed-form", action="store_true", dest="closed_form")
    p.add_argument("--resolvent-inversion", action="store_true", dest="resolvent_inversion")
    p.add_argument("--oracle", action="store_true")
    p.set_defaults(func=cmd_single_mode)

    p = sub.add_parser("multi-mode", parents=[common], help="many reservoir modes in the vacuum")
    _model_flags(p, single=False)
    _comb_flags(p)
    _time_flags(p)
    _threshold_flags(p)
    p.add_argument("--resolvent-inversion", action="store_true", dest="resolvent_inversion")
    p.add_argument("--oracle", action="store_true")
    p.set_defaults(func=cmd_multi_mode)

    p = sub.add_parser("continuum", parents=[common], help="Wigner-Weisskopf decay rate and shift")
    p.add_argument("--config")
    p.add_argument("--omega-e", type=float, dest="omega_e")
    p.add_argument("--rho", type=float)
    p.add_argument("--d", type=float)
    p.add_argument("--support", type=float, nargs=2, metavar=("LO", "HI"))
    _time_flags(p)
    p.add_argument("--comb-spacing", type=float, dest="comb_spacing")
    p.add_argument("--comb-half-bandwidth", type=float, dest="comb_half_bandwidth",
                   default=exp.CONTINUUM_HALF_BANDWIDTH)
    p.set_defaults(func=cmd_continuum)

    p = sub.add_parser("correlation", parents=[common], help="G(t, t') on a square grid")
    _model_flags(p)
    p.add_argument("--weights", type=float, nargs=3, metavar=("P_UPPER", "P_MID", "P_LOWER"))
    p.add_argument("--T", type=float, help="interaction time for the model-driven state")
    p.add_argument("--t-min", type=float, dest="t_min", default=0.0)
    p.add_argument("--t-max", type=float, dest="t_max", default=4 * math.pi)
    p.add_argument("--t-samples", type=int, dest="t_samples", default=64)
    p.set_defaults(func=cmd_correlation)

    p = sub.add_parser("reproduce", parents=[common], help="canned figure scans")
    p.add_argument("figure", choices=["fig1", "fig2", "continuum"])
    _threshold_flags(p)
    p.add_argument("--offset", type=float, default=0.0,
                   help="fig2 comb shift in units of the spacing (0.5 = omega_e between teeth)")
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("dump-hamiltonian", parents=[common], help="write the subspace matrix")
    _model_flags(p)
    _comb_flags(p)
    p.set_defaults(func=cmd_dump_hamiltonian)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if not getattr(args, "command", None):
            raise UsageError("a subcommand is required")
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return args.func(args)
    except UsageError as exc:
        return _emit_error("usage", str(exc))
    except ValidationError as exc:
        return _emit_error("validation", str(exc), exc.problems)
    except (QuadratureError, SectorError, NumericError, np.linalg.LinAlgError) as exc:
        return _emit_error("numeric", str(exc), code=3)
    except ValueError as exc:
        return _emit_error("validation", str(exc))


if __name__ == "__main__":
    sys.exit(main())
