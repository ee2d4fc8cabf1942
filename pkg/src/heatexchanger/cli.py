"""Batch front-end: ``heatexchanger <verb> [--config FILE] [--out DIR] [--key value ...]``.

Verbs: ``linear``, ``semilinear``, ``sweep``, ``symbols``, ``phaseplane``,
``certificate``.  Each verb has a flat set of keys with defaults; a JSON
config file and then ``--key value`` flags override them in that order.

Exit codes: 0 success, 2 invalid configuration, 3 numerical guard
(box contamination, underflow, overflow), 4 search failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import certificates, linear, phase, semilinear
from .data import GaussianDataSpec, ShapedDataSpec
from .errors import (BoxContaminated, CertificateUnavailable, GeometryDegenerate,
                     GridMismatch, HeatExchangerError, Overflow, ParameterError,
                     RegimeViolation, SearchFailed, Underflow, UnsupportedDataFamily)
from .spectral import ExchangerParams, ReactionParams, SpectralGrid, symbols_from_k2

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_SEARCH = 4

#: one soft-transition baseline, one soft and two sharp transition cases
PROFILE_COMBINATIONS = [[1.0, 1.0, 1.0, 1.0], [1.0, 2.0, 1.0, 2.0],
                        [0.1, 10.0, 1.0, 1.0], [0.1, 10.0, 2.0, 0.5]]

_COMMON = {"c": 1.0, "d": 1.0, "mu": 1.0, "nu": 1.0, "dim": 1, "points": 4096,
           "half_length": 64.0}
_GAUSSIAN = {"amp_u": 1.0, "amp_v": 0.0, "width_u": 1.0, "width_v": 1.0}

DEFAULTS = {
    "linear": {**_COMMON, **_GAUSSIAN, "t_end": 40.0, "samples": 41, "fit_start": 10.0,
               "fit_end": 40.0, "evanescent_start": 2.0, "evanescent_end": 6.0},
    "semilinear": {**_COMMON, **_GAUSSIAN, "data": "shaped", "eta": 0.5, "radius": 4.0,
                   "p": 1.0, "q": 1.0, "kappa": 0, "t_end": 100.0, "dt_init": 0.05,
                   "dt_min": 1e-10, "decay_margin": 0.5, "blowup_factor": 1e6},
    "sweep": {**_COMMON, **_GAUSSIAN, "data": "shaped", "eta": 1.0, "radius": 4.0,
              "p_values": [0.5, 1.0, 1.5], "amplitudes": [0.25, 0.5, 1.0], "kappa": 0,
              "q": None, "t_end": 100.0, "dt_init": 0.05, "decay_margin": 0.5},
    "symbols": {"combinations": PROFILE_COMBINATIONS, "radius": 10.0, "samples": 512},
    "phaseplane": {"c": 1.0, "d": 1.0, "mu": 1.0, "nu": 1.0, "dim": 1, "p": 1.0,
                   "eta": 1.0, "radius": 1.0, "U0": None, "V0": None, "lambda": None,
                   "t_max": 200.0, "alpha_samples": 101},
    "certificate": {"c": 1.0, "d": 1.0, "mu": 1.0, "nu": 1.0, "dim": 1, "p": 4.0, "q": 4.0,
                    "kappa": 0, **_GAUSSIAN},
}


class ConfigError(HeatExchangerError):
    """Invalid configuration; maps to exit code 2."""


# --- serialization ---------------------------------------------------------

def fmt(x):
    """Deterministic text for a scalar: floats with 17 significant digits."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "NaN"
        if math.isinf(x):
            return "Infinity" if x > 0 else "-Infinity"
        return "%.17g" % x
    return str(x)


def to_json(obj):
    """JSON text with fixed key order and ``%.17g`` floats."""
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {to_json(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(to_json(v) for v in obj) + "]"
    return fmt(obj)


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(x) for x in row])


def write_jsonl(path, records):
    with open(path, "w", newline="") as fh:
        for record in records:
            fh.write(to_json(record) + "\n")


# --- configuration ---------------------------------------------------------

def _coerce(raw):
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def _overrides(extra):
    pairs, i = {}, 0
    while i < len(extra):
        flag = extra[i]
        if not flag.startswith("--") or len(flag) == 2:
            raise ConfigError(f"unexpected argument {flag!r}")
        key = flag[2:]
        if "=" in key:
            key, raw = key.split("=", 1)
            i += 1
        elif i + 1 < len(extra):
            raw = extra[i + 1]
            i += 2
        else:
            raise ConfigError(f"flag {flag} needs a value")
        pairs[key.replace("-", "_")] = _coerce(raw)
    return pairs


def load_config(command, path=None, overrides=None):
    """Merge defaults, the JSON file at ``path`` and ``overrides``."""
    config = dict(DEFAULTS[command])
    layers = []
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
        try:
            loaded = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"malformed JSON in {path} at line {exc.lineno} "
                              f"column {exc.colno}: {exc.msg}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError(f"config {path} must hold a JSON object")
        layers.append(loaded)
    layers.append(overrides or {})
    for layer in layers:
        for key, value in layer.items():
            if key not in config:
                raise ConfigError(f"unknown key {key!r} for command {command!r}")
            config[key] = value
    return config


def _number(config, key, kind=float, positive=False, minimum=None):
    value = config[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key}: expected a number, got {value!r}")
    if kind is int and float(value) != int(value):
        raise ConfigError(f"{key}: expected an integer, got {value!r}")
    value = kind(value)
    if not math.isfinite(value):
        raise ConfigError(f"{key}: must be finite")
    if positive and value <= 0:
        raise ConfigError(f"{key}: must be positive, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(f"{key}: must be at least {minimum}, got {value!r}")
    return value


def _numbers(config, key, positive=False):
    values = config[key]
    if not isinstance(values, list) or not values:
        raise ConfigError(f"{key}: expected a non-empty list")
    return [_number({key: v}, key, positive=positive) for v in values]


def _exchanger(config):
    return ExchangerParams(*(_number(config, k, positive=True) for k in ("c", "d", "mu", "nu")))


def _grid(config):
    return SpectralGrid(dim=_number(config, "dim", int), points_per_dim=_number(config, "points", int),
                        half_length=_number(config, "half_length", positive=True))


def _gaussian(config):
    return GaussianDataSpec(*(_number(config, k) for k in ("amp_u", "amp_v", "width_u", "width_v")))


def _data_spec(config):
    family = config["data"]
    if family == "gaussian":
        return _gaussian(config)
    if family == "shaped":
        return ShapedDataSpec(_number(config, "eta"), _number(config, "radius", positive=True))
    raise ConfigError(f"data: expected 'gaussian' or 'shaped', got {family!r}")


def _fields(spec, grid, exchanger):
    if isinstance(spec, ShapedDataSpec):
        return spec.fields(grid, exchanger)
    return spec.fields(grid)


def _reaction(config, q=None):
    p = _number(config, "p", positive=True)
    q = _number(config, "q", positive=True) if q is None else q
    kappa = _number(config, "kappa", int)
    if kappa not in (0, 1):
        raise ConfigError(f"kappa: must be 0 or 1, got {kappa}")
    return ReactionParams(p=p, q=q, kappa=kappa)


# --- commands --------------------------------------------------------------

def cmd_linear(config, out: Path, args):
    grid, exchanger = _grid(config), _exchanger(config)
    data0 = _gaussian(config).fields(grid)
    t_end = _number(config, "t_end", positive=True)
    samples = _number(config, "samples", int, minimum=2)
    times = np.linspace(0.0, t_end, samples)
    trace = linear.linear_trace(data0, times, grid, exchanger)
    write_csv(out / "trace.csv", trace.columns, trace.rows())
    window = (_number(config, "fit_start"), _number(config, "fit_end"))
    exponent = -linear.sup_norm_decay_fit(trace, window)
    ev_window = (_number(config, "evanescent_start"), _number(config, "evanescent_end"))
    rate = linear.evanescent_decay_rate(data0, grid, exchanger, ev_window)
    target_rate = (math.sqrt(exchanger.mu) + math.sqrt(exchanger.nu)) ** 2 / 2
    print(f"decay_exponent={fmt(exponent)} target={fmt(grid.dim / 2)}")
    print(f"evanescent_rate={fmt(rate)} target={fmt(target_rate)}")
    return EXIT_OK


def _outcome_line(outcome, t_star):
    if outcome == semilinear.Outcome.BLOW_UP:
        return f"BLOW_UP t_star={fmt(t_star)}"
    return {semilinear.Outcome.GLOBAL_DECAY: "GLOBAL_DECAY",
            semilinear.Outcome.INCONCLUSIVE: "INCONCLUSIVE"}[outcome]


def cmd_semilinear(config, out: Path, args):
    grid, exchanger = _grid(config), _exchanger(config)
    reaction = _reaction(config)
    data0 = _fields(_data_spec(config), grid, exchanger)
    factor = _number(config, "blowup_factor", positive=True)
    sup0 = data0.sup
    sim = semilinear.SimulationConfig(
        grid=grid, exchanger=exchanger, reaction=reaction, data0=data0,
        t_end=_number(config, "t_end", positive=True),
        dt_init=_number(config, "dt_init", positive=True),
        dt_min=_number(config, "dt_min", positive=True),
        blowup_threshold=factor * sup0 if sup0 > 0 else None,
        decay_margin=_number(config, "decay_margin", positive=True))
    trace = semilinear.simulate(sim)
    write_csv(out / "trace.csv", trace.columns, trace.rows)
    print(_outcome_line(trace.outcome, trace.t_star))
    return EXIT_OK


def cmd_sweep(config, out: Path, args):
    grid, exchanger = _grid(config), _exchanger(config)
    q = None if config["q"] is None else _number(config, "q", positive=True)
    kappa = _number(config, "kappa", int)
    if kappa not in (0, 1):
        raise ConfigError(f"kappa: must be 0 or 1, got {kappa}")
    p_values = _numbers(config, "p_values", positive=True)
    amplitudes = _numbers(config, "amplitudes")
    if any(a < 0 for a in amplitudes):
        raise ConfigError("amplitudes: must be non-negative")
    records = certificates.phase_diagram(
        p_values, amplitudes, grid, exchanger, _data_spec(config), kappa=kappa, q=q,
        t_end=_number(config, "t_end", positive=True),
        dt_init=_number(config, "dt_init", positive=True),
        decay_margin=_number(config, "decay_margin", positive=True),
        threads=max(1, args.threads))
    header = ("p", "amplitude", "m", "m0", "outcome", "t_star")
    write_jsonl(out / "grid.json", ({k: r[k] for k in header} for r in records))
    write_csv(out / "grid.csv", header, ([r[k] for k in header] for r in records))
    for r in records:
        print(f"p={fmt(r['p'])} amplitude={fmt(r['amplitude'])} "
              + _outcome_line(semilinear.Outcome(r["outcome"]), r["t_star"]))
    return EXIT_OK


def cmd_symbols(config, out: Path, args):
    combos = config["combinations"]
    if not isinstance(combos, list) or not combos:
        raise ConfigError("combinations: expected a non-empty list of [c, d, mu, nu]")
    params = []
    for i, combo in enumerate(combos):
        if not isinstance(combo, list) or len(combo) != 4:
            raise ConfigError(f"combinations[{i}]: expected [c, d, mu, nu]")
        params.append(ExchangerParams(*(_number({"v": v}, "v", positive=True) for v in combo)))
    radius = _number(config, "radius", minimum=0.0)
    samples = _number(config, "samples", int, minimum=2)
    xi = np.linspace(0.0, radius, samples)
    columns = [symbols_from_k2(xi ** 2, p).L for p in params]
    header = ["xi"] + [f"L(c={fmt(p.c)};d={fmt(p.d)};mu={fmt(p.mu)};nu={fmt(p.nu)})"
                       for p in params]
    write_csv(out / "lprofile.csv", header, zip(xi, *columns))
    return EXIT_OK


def cmd_phaseplane(config, out: Path, args):
    exchanger = _exchanger(config)
    p = _number(config, "p", positive=True)
    dim = _number(config, "dim", int)
    if dim not in (1, 2):
        raise ConfigError(f"dim: must be 1 or 2, got {dim}")
    direct = [config[k] is not None for k in ("U0", "V0", "lambda")]
    if any(direct) and not all(direct):
        raise ConfigError("U0, V0 and lambda must be given together")
    record = {"p": p, "dim": dim}
    if all(direct):
        U0, V0 = _number(config, "U0", minimum=0.0), _number(config, "V0", minimum=0.0)
        lam = _number(config, "lambda", minimum=0.0)
        record["epsilon"] = lam / (2 * dim)
    else:
        found = phase.find_lambda(
            ShapedDataSpec(_number(config, "eta", positive=True),
                           _number(config, "radius", positive=True)),
            exchanger, p, dim)
        U0, V0, lam = found.U0, found.V0, found.lam
        record["epsilon"] = found.epsilon
    geo = phase.geometry(lam, exchanger, p)
    record.update(lam=lam, U0=U0, V0=V0, chi=geo.chi, E0=list(geo.E0), E1=list(geo.E1))
    if not geo.degenerate:
        alpha = np.linspace(0.0, 1.0, _number(config, "alpha_samples", int, minimum=2))
        record["alpha"] = alpha
        record["det_M_alpha"] = phase.det_M_alpha(alpha, lam, exchanger, p)
        record["omega_polygon"] = [list(pt) for pt in phase.omega_polygon(lam, exchanger, p)]
        record["inward_violation"] = phase.boundary_inward_check(lam, exchanger, p)
        record["in_omega"] = phase.omega_contains(U0, V0, lam, exchanger, p)
    result = phase.integrate_ode(U0, V0, lam, exchanger, p,
                                 t_max=_number(config, "t_max", positive=True))
    name = {phase.OdeOutcome.BLOW_UP: "BLOW_UP",
            phase.OdeOutcome.CONVERGES_TO_ORIGIN: "CONVERGES_TO_ORIGIN",
            phase.OdeOutcome.INCONCLUSIVE: "INCONCLUSIVE"}[result.outcome]
    record.update(outcome=name, t_star=result.t_star)
    record = {"lambda" if k == "lam" else k: v for k, v in record.items()}
    write_jsonl(out / "geometry.json", [record])
    write_csv(out / "trajectory.csv", ("t", "U", "V"), zip(result.t, result.U, result.V))
    line = name if result.t_star is None else f"{name} t_star={fmt(result.t_star)}"
    print(f"{line} epsilon={fmt(record['epsilon'])} lambda={fmt(lam)}")
    return EXIT_OK


def cmd_certificate(config, out: Path, args):
    exchanger = _exchanger(config)
    dim = _number(config, "dim", int, minimum=1)
    reaction = _reaction(config)
    constants = certificates.decay_constants(exchanger, dim)
    m = certificates.mass_functional(_gaussian(config), dim).m
    record = {"k": constants.k, "k_prime": constants.k_prime, "a": constants.a,
              "eta_gap": constants.eta_gap, "ell": constants.ell,
              "ell_prime": constants.ell_prime, "m": m}
    record["m0"] = certificates.m_zero(reaction, constants, dim)
    try:
        record["M"], record["M_prime"] = certificates.global_bounds(m, reaction, constants, dim)
        status = "CERTIFIED"
    except CertificateUnavailable:
        record["M"] = record["M_prime"] = None
        status = "UNCERTIFIED"
    write_jsonl(out / "certificate.json", [record])
    print(f"{status} m={fmt(m)} m0={fmt(record['m0'])}")
    return EXIT_OK


COMMANDS = {"linear": cmd_linear, "semilinear": cmd_semilinear, "sweep": cmd_sweep,
            "symbols": cmd_symbols, "phaseplane": cmd_phaseplane, "certificate": cmd_certificate}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="heatexchanger",
        description="Simulations and certificates for the linear and semilinear heat exchanger.",
        epilog="Any other --key value pair overrides the matching config key.")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", help="JSON file with flat keys for the command")
    parser.add_argument("--out", default=".", help="output directory (created if missing)")
    parser.add_argument("--seed", type=int, default=0,
                        help="seed for randomized runs; the built-in commands are deterministic")
    parser.add_argument("--threads", type=int, default=1, help="worker threads for sweep")
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args, extra = parser.parse_known_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        config = load_config(args.command, args.config, _overrides(extra))
        if args.threads < 1:
            raise ConfigError("threads: must be at least 1")
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command](config, out, args)
    except (ConfigError, ParameterError, GridMismatch, RegimeViolation,
            UnsupportedDataFamily, GeometryDegenerate) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (BoxContaminated, Underflow, Overflow) as exc:
        print(f"numerical guard: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except SearchFailed as exc:
        print(f"search failed: {exc}", file=sys.stderr)
        return EXIT_SEARCH


if __name__ == "__main__":
    sys.exit(main())
