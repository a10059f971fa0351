"""Command-line entry point with JSON configs and bit-stable CSV/JSON output.

Commands: simulate, fit, rate, effdim. Each reads a JSON config whose schema
is documented in configs/*.json; unknown keys are hard errors so typos in
scientific configs fail loudly. All files are written atomically (temp file +
rename) and floating point is rendered with 17 significant digits, so
re-running the same experiment reproduces identical bytes.

Exit codes: 0 success, 2 configuration error (message names the offending
field or path), 1 runtime failure.
"""

import argparse
import json
import os
import sys

import numpy as np

from .analysis import RateConfig, effective_dimension, run_rate_experiment
from .exceptions import ConfigError
from .simulate import (
    RngSpec,
    atomic_write_text,
    build_model,
    load_dataset,
    sample_dataset,
    save_dataset,
)
from .solver import (
    FixedIterations,
    TheoremSchedule,
    Threshold,
    cg_fit,
    predict_beta,
)


def _fmt(x):
    """Render a float with 17 significant digits (round-trip exact)."""
    return format(float(x), ".17g")


def _load_config(path, schema):
    """Load a JSON config, apply defaults, and reject unknown or missing keys.

    ``schema`` maps key -> default, with ``...`` marking required keys.
    """
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    unknown = sorted(set(raw) - set(schema))
    if unknown:
        raise ConfigError(f"unknown config keys in {path}: {', '.join(unknown)}")
    config = {}
    for key, default in schema.items():
        if key in raw:
            config[key] = raw[key]
        elif default is ...:
            raise ConfigError(f"missing required config key in {path}: {key}")
        else:
            config[key] = default
    return config


def write_rate_csv(result, path):
    """Emit one CSV row per (n, replication) cell, sorted by (n, rep)."""
    lines = ["n,rep,m_star,l2_error,pred_error,omega,stop_reason,seed"]
    for rec in sorted(result.records, key=lambda r: (r.n, r.rep)):
        lines.append(
            f"{rec.n},{rec.rep},{rec.m_star},{_fmt(rec.l2_error)},"
            f"{_fmt(rec.pred_error)},{_fmt(rec.omega)},{rec.stop_reason},{rec.seed}"
        )
    atomic_write_text(path, "\n".join(lines) + "\n")


_SIMULATE_SCHEMA = {
    "s": ..., "alpha": ..., "theta": 0.5, "J": 200, "omega": 1.0,
    "sigma": 0.5, "n": ..., "seed": 0,
}

_FIT_SCHEMA = {
    "dataset": ..., "theta": 0.5, "rule": "theorem", "tau": 1.0,
    "m": None, "omega_value": None, "max_iter": None,
}

_RATE_SCHEMA = {
    "s": 0.5, "alpha": 1.0, "theta": 0.5, "J": 200, "omega": 1.0,
    "sigma": 0.5, "tau": 1.0, "n_grid": [128, 256, 512, 1024, 2048],
    "replications": 50, "seed": 0,
}

_EFFDIM_SCHEMA = {"s": ..., "J": 10000, "lambdas": [1e-1, 1e-2, 1e-3, 1e-4]}


def _cmd_simulate(config, out_dir, seed_override):
    seed = seed_override if seed_override is not None else config["seed"]
    try:
        model = build_model(config["s"], config["alpha"], config["theta"],
                            config["J"], config["omega"], config["sigma"])
        if config["n"] < 1:
            raise ConfigError(f"n must be >= 1, got {config['n']}")
    except ConfigError:
        raise
    dataset = sample_dataset(model, int(config["n"]), RngSpec(int(seed)))
    save_dataset(dataset, os.path.join(out_dir, "dataset.json"), model)
    return 0


def _cmd_fit(config, out_dir, seed_override):
    dataset = load_dataset(config["dataset"])
    with open(config["dataset"]) as fh:
        meta = json.load(fh)
    s, alpha = meta.get("s"), meta.get("alpha")
    J = dataset.Xcoefs.shape[1]
    if s is None:
        raise ConfigError(f"dataset {config['dataset']} carries no decay exponent s")
    j = np.arange(1, J + 1, dtype=float)
    t = j ** (-config["theta"] / s)

    rule_name = config["rule"]
    if rule_name == "theorem":
        if alpha is None:
            raise ConfigError("dataset carries no source exponent alpha")
        rule = TheoremSchedule(config["tau"], alpha, s)
    elif rule_name == "fixed":
        if config["m"] is None:
            raise ConfigError("rule 'fixed' requires config key m")
        rule = FixedIterations(int(config["m"]))
    elif rule_name == "threshold":
        if config["omega_value"] is None:
            raise ConfigError("rule 'threshold' requires config key omega_value")
        rule = Threshold(config["omega_value"])
    else:
        raise ConfigError(f"unknown rule: {rule_name!r}")

    from .gram import gram_spectral
    from .solver import IterationBudget

    K = gram_spectral(dataset.Xcoefs, t)
    budget = IterationBudget(m_max=config["max_iter"])
    result = cg_fit(K, dataset.y, rule, budget)
    beta_hat = predict_beta(dataset.Xcoefs, t, result.coeffs)
    payload = {
        "m_star": result.m_star,
        "stop_reason": result.stop_reason,
        "trace": [float(_fmt(v)) for v in result.trace],
        "coeffs": [float(_fmt(v)) for v in result.coeffs],
        "beta_hat": [float(_fmt(v)) for v in beta_hat],
    }
    if dataset.beta_star is not None:
        payload["l2_error"] = float(
            _fmt(np.linalg.norm(beta_hat - dataset.beta_star))
        )
    atomic_write_text(os.path.join(out_dir, "fit.json"),
                      json.dumps(payload, indent=1))
    return 0


def _cmd_rate(config, out_dir, seed_override, threads):
    seed = seed_override if seed_override is not None else config["seed"]
    try:
        rate_config = RateConfig(
            s=config["s"], alpha=config["alpha"], theta=config["theta"],
            J=int(config["J"]), omega=config["omega"], sigma=config["sigma"],
            tau=config["tau"], n_grid=tuple(config["n_grid"]),
            replications=int(config["replications"]), master_seed=int(seed),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    result = run_rate_experiment(rate_config, threads=threads)
    write_rate_csv(result, os.path.join(out_dir, "rate.csv"))
    summary = {
        "slope": float(_fmt(result.slope)),
        "intercept": float(_fmt(result.intercept)),
        "target_exponent": float(_fmt(
            -config["alpha"] / (1.0 + config["s"] + 2.0 * config["alpha"])
        )),
        "n": list(rate_config.n_grid),
        "median_l2_error": [float(_fmt(result.median_l2_error[n]))
                            for n in rate_config.n_grid],
        "median_m_star": [result.median_m_star[n] for n in rate_config.n_grid],
        "seed": int(seed),
    }
    atomic_write_text(os.path.join(out_dir, "rate-summary.json"),
                      json.dumps(summary, indent=1))
    return 0


def _cmd_effdim(config, out_dir):
    s = config["s"]
    if not 0.0 < s < 1.0:
        raise ConfigError(f"s must lie in (0, 1), got {s}")
    lambdas = [float(l) for l in config["lambdas"]]
    if any(l <= 0 for l in lambdas):
        raise ConfigError("lambdas must be positive")
    xi = np.arange(1, int(config["J"]) + 1, dtype=float) ** (-1.0 / s)
    payload = {
        "s": s,
        "J": int(config["J"]),
        "lambda": lambdas,
        "effective_dimension": [float(_fmt(effective_dimension(xi, l)))
                                for l in lambdas],
    }
    atomic_write_text(os.path.join(out_dir, "effdim.json"),
                      json.dumps(payload, indent=1))
    return 0


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="flrcg",
        description="Kernel CG for functional linear regression: simulation, "
                    "fitting, and rate experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("simulate", "fit", "rate", "effdim"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON config path")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--seed", type=int, default=None, help="seed override")
        p.add_argument("--threads", type=int, default=1,
                       help="parallel replication workers (rate only)")
    return parser


def run_cli(argv):
    """Dispatch a CLI invocation; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else 0
    try:
        os.makedirs(args.out, exist_ok=True)
        if args.command == "simulate":
            config = _load_config(args.config, _SIMULATE_SCHEMA)
            return _cmd_simulate(config, args.out, args.seed)
        if args.command == "fit":
            config = _load_config(args.config, _FIT_SCHEMA)
            return _cmd_fit(config, args.out, args.seed)
        if args.command == "rate":
            config = _load_config(args.config, _RATE_SCHEMA)
            return _cmd_rate(config, args.out, args.seed, args.threads)
        if args.command == "effdim":
            config = _load_config(args.config, _EFFDIM_SCHEMA)
            return _cmd_effdim(config, args.out)
        return 2
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime failure, never a traceback to the user
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
