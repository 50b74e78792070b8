"""Command-line interface: outcome probabilities, Fisher-information sweeps,
Monte Carlo campaigns, strategy ranking and the validation suite.

Delays are given as omega_p * tau and Fisher information is printed as
F / omega_p**2.  Frequencies (``--sigma-minus``, ``--sigma-plus``,
``--omega-p``, ``--omega``) are in rad/s; frequency-dependent noise is given
as eta_eps * omega_p.

HOM likelihoods are even in tau, so ``simulate`` estimates |tau| on a
window starting at zero.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import models, simulation, strategy, validation
from .types import (ChannelParams, ConfigError, Detection, ExperimentConfig, Interferometer,
                    NoiseParams, SpectralParams, qcrb, validate)

FLOAT_FMT = "{:.12g}"

DEFAULTS = {
    "gamma": 0.0,
    "visibility": 1.0,
    "sigma_minus": 0.01,
    "sigma_plus": 0.01,
    "omega_p": 1.0,
    "eta_eps_wp": 0.0,
    "eta_theta": 0.0,
    "interferometer": "hom",
    "detection": "nonresolved",
}

# Noise levels are (eta_eps * omega_p, eta_theta) pairs.
PRESETS = {
    "fig1a": {"interferometer": "hom", "gamma": 0.0, "visibility": 1.0, "sigma_minus": 0.01,
              "noise_levels": [(0.0, 0.0), (1.0, 0.0), (3.0, 0.0)]},
    "fig1b": {"interferometer": "hom", "gamma": 0.0, "visibility": 0.9, "sigma_minus": 0.01,
              "noise_levels": [(0.0, 0.0), (1.0, 0.0), (3.0, 0.0)]},
    "fig1c": {"interferometer": "hom", "gamma": 0.4, "visibility": 0.9, "sigma_minus": 0.01,
              "noise_levels": [(0.0, 0.0), (1.0, 0.0), (3.0, 0.0)]},
    "fig2": {"interferometer": "noon", "gamma": 0.0, "visibility": 1.0, "sigma_plus": 0.01,
             "noise_levels": [(0.0, 0.0), (1.0, 0.0), (3.0, 0.0), (0.0, 1.0)]},
}

FLOAT_KEYS = ("gamma", "visibility", "sigma_minus", "sigma_plus", "omega_p", "eta_eps_wp",
              "eta_theta")


class UsageError(Exception):
    pass


def fmt(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return FLOAT_FMT.format(x)


def _json_number(x):
    x = float(x)
    return float(fmt(x)) if math.isfinite(x) else None


def _json_clean(obj):
    if isinstance(obj, dict):
        return {k: _json_clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_clean(v) for v in obj]
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, (float, np.floating)):
        return _json_number(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def dumps_json(obj) -> str:
    return json.dumps(_json_clean(obj), indent=2, sort_keys=False, allow_nan=False) + "\n"


def read_config_file(path: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc.strerror}") from None
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key in FLOAT_KEYS:
            try:
                values[key] = float(value)
            except ValueError:
                raise UsageError(f"{path}:{lineno}: {key} needs a number, got {value!r}") from None
        elif key in ("interferometer", "detection", "preset"):
            values[key] = value
        else:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
    return values


@dataclass(frozen=True)
class Settings:
    config: ExperimentConfig
    noise_levels: list  # (eta_eps * omega_p, eta_theta) pairs
    detection_given: bool


def resolve_settings(args) -> Settings:
    """Merge defaults, preset, config file and flags, in increasing priority."""
    file_values = read_config_file(args.config) if args.config else {}
    preset_name = args.preset or file_values.pop("preset", None)
    file_values.pop("preset", None)
    merged = dict(DEFAULTS)
    noise_levels = None
    if preset_name:
        if preset_name not in PRESETS:
            raise UsageError(f"unknown preset {preset_name!r}")
        preset = dict(PRESETS[preset_name])
        noise_levels = preset.pop("noise_levels")
        merged.update(preset)
    merged.update(file_values)
    flag_values = {k: getattr(args, k) for k in DEFAULTS if getattr(args, k, None) is not None}
    merged.update(flag_values)
    detection_given = "detection" in flag_values or "detection" in file_values
    if "eta_eps_wp" in flag_values or "eta_theta" in flag_values or "eta_eps_wp" in file_values \
            or "eta_theta" in file_values:
        noise_levels = None
    if getattr(args, "noise_levels", None):
        noise_levels = parse_noise_levels(args.noise_levels)
    if noise_levels is None:
        noise_levels = [(merged["eta_eps_wp"], merged["eta_theta"])]
    try:
        ifo = Interferometer(merged["interferometer"])
        det = Detection(merged["detection"])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    wp = merged["omega_p"]
    if not (math.isfinite(wp) and wp > 0):
        raise UsageError("omega_p must be > 0")
    config = ExperimentConfig(
        spectral=SpectralParams(merged["sigma_minus"], merged["sigma_plus"], wp),
        channel=ChannelParams(merged["gamma"], merged["visibility"]),
        noise=NoiseParams(merged["eta_eps_wp"] / wp, merged["eta_theta"]),
        interferometer=ifo,
        detection=det,
    )
    validate(config)
    for eps_wp, theta in noise_levels:
        validate(config.with_noise(eta_eps=eps_wp / wp, eta_theta=theta))
    return Settings(config, noise_levels, detection_given)


def parse_noise_levels(text: str) -> list:
    """``"0,1,3"`` or ``"0:0,1:0,0:1"`` (eta_eps * omega_p[:eta_theta])."""
    levels = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        parts = item.split(":")
        try:
            eps = float(parts[0])
            theta = float(parts[1]) if len(parts) > 1 else 0.0
        except (ValueError, IndexError):
            raise UsageError(f"bad noise level {item!r}") from None
        if len(parts) > 2:
            raise UsageError(f"bad noise level {item!r}")
        levels.append((eps, theta))
    if not levels:
        raise UsageError("no noise levels given")
    return levels


def tau_axis(args, omega_p: float) -> np.ndarray:
    if args.tau_points < 2:
        raise UsageError("--tau-points must be >= 2")
    if not args.tau_stop > args.tau_start:
        raise UsageError("--tau-stop must exceed --tau-start")
    return np.linspace(args.tau_start, args.tau_stop, args.tau_points) / omega_p


def _level_tag(eps_wp: float, theta: float) -> str:
    return f"eps{eps_wp:g}_theta{theta:g}"


def write_output(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from None


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def config_dict(config: ExperimentConfig) -> dict:
    sp, ch, nz = config.spectral, config.channel, config.noise
    return {
        "interferometer": Interferometer(config.interferometer).value,
        "detection": Detection(config.detection).value,
        "gamma": ch.gamma,
        "visibility": ch.visibility,
        "sigma_minus": sp.sigma_minus,
        "sigma_plus": sp.sigma_plus,
        "omega_p": sp.omega_p,
        "eta_eps_wp": nz.eta_eps * sp.omega_p,
        "eta_theta": nz.eta_theta,
    }


def cmd_probs(args, out) -> int:
    cfg = resolve_settings(args).config
    wp = cfg.spectral.omega_p
    tau = args.omega_p_tau / wp
    p = models.outcome_probs(cfg, tau)
    result = {"omega_p_tau": args.omega_p_tau, "p2": p.p2, "p1": p.p1, "p0": p.p0}
    if args.omega is not None:
        d = models.spectral_density(cfg, tau, args.omega, normalized=False)
        result.update({"omega": args.omega, "d2": d.d2, "d1": d.d1, "d0": d.d0})
    if args.format == "json":
        write_output(dumps_json({"config": config_dict(cfg), **result}), args.out)
    else:
        keys = ["p2", "p1", "p0"] + (["d2", "d1", "d0"] if args.omega is not None else [])
        write_output(" ".join(f"{k}={fmt(result[k])}" for k in keys) + "\n", args.out)
    return 0


def sweep_table(settings: Settings, taus: np.ndarray, detections=None):
    """Columns and rows of a Fisher-information sweep, plus a convergence flag."""
    cfg = settings.config
    wp = cfg.spectral.omega_p
    if detections is None:
        detections = ([Detection(cfg.detection)] if settings.detection_given
                      else [Detection.NON_RESOLVED, Detection.RESOLVED])
    columns = {"omega_p_tau": taus * wp}
    converged = True
    for det in detections:
        for eps_wp, theta in settings.noise_levels:
            level_cfg = cfg.with_noise(eta_eps=eps_wp / wp, eta_theta=theta)
            res = models.fisher_information(level_cfg, taus, det)
            tag = f"{det.value}_{_level_tag(eps_wp, theta)}"
            columns[f"fi_{tag}"] = np.asarray(res.value) / wp**2
            if res.method.value != "closed_form":
                columns[f"err_{tag}"] = np.asarray(res.err_estimate) / wp**2
            converged = converged and bool(res.converged)
    columns["qcrb"] = np.full(taus.size, qcrb(cfg.interferometer, cfg.spectral) / wp**2)
    return columns, converged


def cmd_sweep(args, out) -> int:
    settings = resolve_settings(args)
    taus = tau_axis(args, settings.config.spectral.omega_p)
    columns, converged = sweep_table(settings, taus)
    header = list(columns)
    if args.format == "json":
        payload = {"config": config_dict(settings.config),
                   "noise_levels": [{"eta_eps_wp": e, "eta_theta": t}
                                    for e, t in settings.noise_levels],
                   "converged": converged,
                   "columns": header,
                   "data": {k: list(map(float, v)) for k, v in columns.items()}}
        write_output(dumps_json(payload), args.out)
    else:
        rows = zip(*(columns[k] for k in header))
        write_output(_csv_text(header, rows), args.out)
    if not converged:
        print("warning: quadrature did not converge for some rows", file=sys.stderr)
    return 0 if converged else 1


def cmd_simulate(args, out) -> int:
    settings = resolve_settings(args)
    cfg = settings.config
    wp = cfg.spectral.omega_p
    if args.tau_true is not None:
        tau_true = args.tau_true / wp
    else:
        taus = tau_axis(args, wp)
        fi = np.asarray(models.fisher_information(cfg, taus).value)
        tau_true = float(taus[int(np.argmax(fi))])
    window = None
    if args.multistart:
        window = simulation.envelope_window(cfg, tau_true)
        if models.is_hom(cfg):
            window = (0.0, window[1])
    report = simulation.run_campaign(cfg, tau_true, args.n_trials, args.n_pairs, args.seed,
                                     window=window, workers=args.workers)
    payload = {"config": config_dict(cfg), "report": report.to_dict(),
               "omega_p_tau_true": tau_true * wp}
    write_output(dumps_json(payload), args.out)
    if report.n_boundary:
        print(f"warning: {report.n_boundary} trials peaked on the search window edge",
              file=sys.stderr)
        return 1
    return 0


def cmd_recommend(args, out) -> int:
    settings = resolve_settings(args)
    cfg = settings.config
    wp = cfg.spectral.omega_p
    taus = tau_axis(args, wp)
    ranking = strategy.rank_strategies(cfg.channel, cfg.spectral, cfg.noise, taus)
    rows = [{"rank": i + 1, "strategy": e.strategy, "peak_fi": e.peak_fi / wp**2,
             "argmax_omega_p_tau": e.argmax_tau * wp}
            for i, e in enumerate(ranking.entries)]
    if args.format == "json":
        write_output(dumps_json({"config": config_dict(cfg),
                                 "no_information": ranking.no_information,
                                 "ranking": rows}), args.out)
    else:
        lines = []
        if ranking.no_information:
            lines.append("no information: every strategy has zero Fisher information; "
                         "fixed order shown")
        lines.append(f"{'rank':<5}{'strategy':<18}{'peak_fi':>20}{'argmax_omega_p_tau':>22}")
        for r in rows:
            lines.append(f"{r['rank']:<5}{r['strategy']:<18}{fmt(r['peak_fi']):>20}"
                         f"{fmt(r['argmax_omega_p_tau']):>22}")
        write_output("\n".join(lines) + "\n", args.out)
    return 0 if ranking.converged else 1


def cmd_validate(args, out) -> int:
    results = validation.run_all(quick=args.quick)
    write_output("".join(r.line() + "\n" for r in results), args.out)
    return 0 if all(r.passed for r in results) else 1


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("scenario")
    g.add_argument("--config", help="key = value file; flags override it")
    g.add_argument("--preset", choices=sorted(PRESETS))
    g.add_argument("--gamma", type=float, help="photon loss probability, [0, 1)")
    g.add_argument("--visibility", type=float, help="fringe visibility, [0, 1]")
    g.add_argument("--sigma-minus", dest="sigma_minus", type=float, help="rad/s")
    g.add_argument("--sigma-plus", dest="sigma_plus", type=float, help="rad/s")
    g.add_argument("--omega-p", dest="omega_p", type=float, help="pump frequency, rad/s")
    g.add_argument("--eta-eps-wp", dest="eta_eps_wp", type=float,
                   help="frequency-dependent noise strength times omega_p")
    g.add_argument("--eta-theta", dest="eta_theta", type=float,
                   help="frequency-independent phase noise strength, rad")
    g.add_argument("--interferometer", choices=[i.value for i in Interferometer])
    g.add_argument("--detection", choices=[d.value for d in Detection])
    g.add_argument("--out", help="output file (default stdout)")


def _add_axis_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tau-start", type=float, default=0.0, help="first omega_p * tau")
    p.add_argument("--tau-stop", type=float, default=400.0, help="last omega_p * tau")
    p.add_argument("--tau-points", type=int, default=2001)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="twophoton", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("probs", help="outcome probabilities at one delay")
    _add_config_flags(p)
    p.add_argument("--omega-p-tau", type=float, default=0.0)
    p.add_argument("--omega", type=float, help="also print resolved densities at this frequency")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_probs)

    p = sub.add_parser("sweep", help="Fisher information over a delay axis")
    _add_config_flags(p)
    _add_axis_flags(p)
    p.add_argument("--noise-levels", help="comma list of eta_eps*omega_p[:eta_theta]")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("simulate", help="Monte Carlo maximum-likelihood campaign")
    _add_config_flags(p)
    _add_axis_flags(p)
    p.add_argument("--tau-true", type=float,
                   help="true omega_p * tau (default: Fisher-information argmax on the axis)")
    p.add_argument("--n-trials", type=int, default=200)
    p.add_argument("--n-pairs", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=2025)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--multistart", action="store_true",
                   help="search over the envelope width instead of one fringe")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("recommend", help="rank interferometer and detection choices")
    _add_config_flags(p)
    _add_axis_flags(p)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_recommend)

    p = sub.add_parser("validate", help="run the oracle-equivalence suite")
    p.add_argument("--quick", action="store_true", help="fewer random draws")
    p.add_argument("--out")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, sys.stdout)
    except (ConfigError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
