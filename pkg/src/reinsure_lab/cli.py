"""Command-line front end.

    reinsure-lab <command> --config cfg.json --out dir [--seed N] [--grid N] [--paths N]

Commands write CSV files into the output directory:

* ``filter-demo``   -> filter.csv      (t, p_1..p_m, lambda_hat, q_1..q_l, event)
* ``bounds``        -> bounds.csv      (t, apriori_lower, apriori_upper, b_ce_1, b_ce_2)
* ``surplus``       -> surplus_<name>.csv per strategy (t, X, b, xi, event)
* ``value-compare`` -> values.csv      (strategy, n_paths, mean_utility, std_err, entropic_risk)

Every command is a pure function of (config, seed): reruns are byte-identical.
Exit codes: 0 success, 2 config validation failure, 3 numerical domain error.
The environment variable REINSURE_SEED is the seed fallback when neither the
--seed flag nor the config provides one.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from .claims import DomainError
from .config import ConfigError, ExperimentConfig, load_config
from .filtering import initial_state, jump_update, propagate
from .simulate import (draw_scenario, entropic_risk, filter_trajectory, path_rng,
                       simulate_path, simulate_terminal_wealth)
from .strategy import StrategySpec, apriori_bounds, bind_strategy

_FMT = "%.12g"


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return _FMT % float(x)


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _slug(label: str) -> str:
    return "".join(ch if ch.isalnum() or ch in "-_." else "_" for ch in label)


def cmd_filter_demo(cfg: ExperimentConfig, out: Path, seed: int, grid: int) -> None:
    scenario = draw_scenario(cfg.prior, cfg.dirichlet, cfg.claims, cfg.params,
                             path_rng(seed, 0), cfg.pin_lambda, cfg.pin_alpha)
    times, P, Q, lam_hat, mask = filter_trajectory(cfg.prior, cfg.dirichlet, scenario, n_grid=grid)
    m, nsub = cfg.prior.m, cfg.dirichlet.n_subsets
    header = (["t"] + [f"p_{j}" for j in range(1, m + 1)] + ["lambda_hat"]
              + [f"q_{k}" for k in range(1, nsub + 1)] + ["event"])
    rows = ([times[i]] + list(P[i]) + [lam_hat[i]] + list(Q[i]) + [mask[i]]
            for i in range(times.size))
    _write_csv(out / "filter.csv", header, rows)


def _ce_on_grid(cfg: ExperimentConfig, scenario, ts: np.ndarray) -> np.ndarray:
    """Certainty-equivalent retention at each grid time, post-jump at hits."""
    bound = bind_strategy(StrategySpec(retention="certainty_equivalent"),
                          cfg.claims, cfg.params, cfg.prior, cfg.dirichlet)
    state = initial_state(cfg.prior, cfg.dirichlet)
    out = np.empty(ts.size)
    i = 0
    for ev in scenario.events:
        j = int(np.searchsorted(ts, ev.time, side="left"))
        if j > i:
            out[i:j] = bound.retention_profile(ts[i:j], state)
            i = j
        state = propagate(state, ev.time - state.t, cfg.prior)
        state = jump_update(state, ev.lineset, cfg.prior)
    if i < ts.size:
        out[i:] = bound.retention_profile(ts[i:], state)
    return out


def cmd_bounds(cfg: ExperimentConfig, out: Path, seed: int, grid: int, n_scenarios: int = 2) -> None:
    T = cfg.params.horizon_T
    ts = np.linspace(0.0, T, grid)
    lower = np.empty(ts.size)
    upper = np.empty(ts.size)
    for i, t in enumerate(ts):
        lower[i], upper[i] = apriori_bounds(cfg.claims, cfg.params, cfg.prior, float(t))
    ce_cols = []
    for j in range(n_scenarios):
        scenario = draw_scenario(cfg.prior, cfg.dirichlet, cfg.claims, cfg.params,
                                 path_rng(seed, j), cfg.pin_lambda, cfg.pin_alpha)
        ce_cols.append(_ce_on_grid(cfg, scenario, ts))
    if n_scenarios == 1:
        ce_names = ["b_ce"]
    else:
        ce_names = [f"b_ce_{j + 1}" for j in range(n_scenarios)]
    header = ["t", "apriori_lower", "apriori_upper"] + ce_names
    rows = ([ts[i], lower[i], upper[i]] + [col[i] for col in ce_cols] for i in range(ts.size))
    _write_csv(out / "bounds.csv", header, rows)


def cmd_surplus(cfg: ExperimentConfig, out: Path, seed: int) -> None:
    if not cfg.strategies:
        raise ConfigError("'surplus' needs at least one strategy in the config")
    scenario = draw_scenario(cfg.prior, cfg.dirichlet, cfg.claims, cfg.params,
                             path_rng(seed, 0), cfg.pin_lambda, cfg.pin_alpha)
    for spec in cfg.strategies:
        rec = simulate_path(scenario, cfg.params, cfg.prior, cfg.dirichlet, cfg.claims,
                            spec, cfg.dt_max)
        rows = ([rec.grid[i], rec.X[i], rec.b_applied[i], rec.xi_applied[i], rec.event_mask[i]]
                for i in range(rec.grid.size))
        _write_csv(out / f"surplus_{_slug(spec.label)}.csv", ["t", "X", "b", "xi", "event"], rows)


def cmd_value_compare(cfg: ExperimentConfig, out: Path, seed: int, n_paths: int) -> None:
    if len(cfg.strategies) < 2:
        raise ConfigError("'value-compare' needs at least 2 strategies in the config")
    if n_paths < 100:
        raise ConfigError(f"'value-compare' needs n_paths >= 100, got {n_paths}")
    rows = []
    for spec in cfg.strategies:
        xt = simulate_terminal_wealth(cfg.claims, cfg.params, cfg.prior, cfg.dirichlet,
                                      spec, n_paths, seed, cfg.dt_max,
                                      cfg.pin_lambda, cfg.pin_alpha)
        utils = -np.exp(-cfg.params.alpha * xt)
        se = utils.std(ddof=1) / np.sqrt(n_paths)
        rows.append([spec.label, n_paths, utils.mean(), se, entropic_risk(xt, cfg.params.alpha)])
    _write_csv(out / "values.csv",
               ["strategy", "n_paths", "mean_utility", "std_err", "entropic_risk"],
               ([r[0], r[1], r[2], r[3], r[4]] for r in rows))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="reinsure-lab",
                                     description="Investment/reinsurance learning experiments")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("filter-demo", "one scenario's intensity/thinning filter trajectory"),
        ("bounds", "a-priori retention bounds and certainty-equivalent paths"),
        ("surplus", "surplus paths for the configured strategies on one scenario"),
        ("value-compare", "Monte Carlo utility comparison of the configured strategies"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="experiment config JSON")
        p.add_argument("--out", required=True, help="output directory for CSV files")
        p.add_argument("--seed", type=int, default=None, help="RNG seed (overrides config)")
        p.add_argument("--grid", type=int, default=None, help="time-grid resolution")
        p.add_argument("--paths", type=int, default=None, help="Monte Carlo path count")
    return parser


def _resolve_seed(arg_seed, cfg_seed) -> int:
    if arg_seed is not None:
        return arg_seed
    if cfg_seed is not None:
        return cfg_seed
    env = os.environ.get("REINSURE_SEED")
    if env is not None:
        return int(env)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        seed = _resolve_seed(args.seed, cfg.seed)
        if args.command == "filter-demo":
            cmd_filter_demo(cfg, out, seed, args.grid or 200)
        elif args.command == "bounds":
            cmd_bounds(cfg, out, seed, args.grid or 200)
        elif args.command == "surplus":
            cmd_surplus(cfg, out, seed)
        elif args.command == "value-compare":
            cmd_value_compare(cfg, out, seed, args.paths or cfg.n_paths)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"numerical domain error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"io error: {getattr(exc, 'filename', None) or args.out}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
