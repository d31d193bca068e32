"""JSON experiment configuration: parsing and validation.

A config file has four blocks::

    {
      "model":    {"r": .., "mu": .., "sigma": .., "alpha": .., "eta": ..,
                   "theta": .., "kappa": optional, "T": .., "x0": ..,
                   "lambdas": [..], "pi": [..],
                   "beta": {"1": v, "2": v, "1,2": v, ...}},
      "claims":   {"kind": "trunc_exp", "rate": 1.0, "cutoff": 3.0,
                   "identical": true}          (or a list, one entry per line)
      "strategy" / "strategies": {"investment": "merton" | {"constant": x},
                   "retention": "full" | {"constant": b}
                                | "certainty_equivalent"
                                | {"complete_info": {"lambda": v, "c": [..]}}
                                | "apriori_lower" | "apriori_upper"},
      "simulate": {"n_paths": N, "dt_max": h, "seed": s,
                   "pin_lambda": v?, "pin_alpha": [..]?}
    }

Subset keys of ``beta`` are comma-joined 1-based line indices; the implied
line count d must make the key set cover all 2^d - 1 nonempty subsets.
All validation failures raise ConfigError naming the offending keys.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .claims import ClaimModel, Deterministic, TruncatedExponential
from .model import DirichletPrior, IntensityPrior, LineSet, ModelParams, default_kappa
from .strategy import StrategySpec


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass
class ExperimentConfig:
    params: ModelParams
    prior: IntensityPrior
    dirichlet: DirichletPrior
    claims: ClaimModel
    strategies: list
    n_paths: int = 1000
    dt_max: float = 0.01
    seed: int | None = None
    pin_lambda: float | None = None
    pin_alpha: np.ndarray | None = None


def _require(block: dict, key: str, where: str):
    if key not in block:
        raise ConfigError(f"missing key '{key}' in '{where}' block")
    return block[key]


def _parse_beta(raw: dict) -> DirichletPrior:
    if not isinstance(raw, dict) or not raw:
        raise ConfigError("'beta' must be a nonempty object of subset keys")
    entries = {}
    d = 0
    for key, val in raw.items():
        try:
            lines = tuple(sorted(int(tok) for tok in str(key).split(",")))
        except ValueError:
            raise ConfigError(f"'beta' key {key!r} is not a comma-joined list of line indices") from None
        ls = LineSet.from_lines(lines)
        d = max(d, max(lines))
        if ls.mask in entries:
            raise ConfigError(f"'beta' key {key!r} duplicates subset {ls}")
        entries[ls.mask] = float(val)
    expected = 2**d - 1
    missing = [str(LineSet(m)) for m in range(1, expected + 1) if m not in entries]
    if missing:
        raise ConfigError(f"'beta' must cover all {expected} nonempty subsets of 1..{d}; missing {missing}")
    beta = np.array([entries[m] for m in range(1, expected + 1)])
    try:
        return DirichletPrior(beta)
    except ValueError as exc:
        raise ConfigError(f"'beta': {exc}") from None


def _parse_marginal(entry: dict):
    kind = _require(entry, "kind", "claims")
    try:
        if kind == "trunc_exp":
            return TruncatedExponential(rate=float(_require(entry, "rate", "claims")),
                                        cutoff=float(_require(entry, "cutoff", "claims")))
        if kind == "deterministic":
            return Deterministic(value=float(_require(entry, "value", "claims")))
    except ValueError as exc:
        raise ConfigError(f"claims entry: {exc}") from None
    raise ConfigError(f"unknown claims kind {kind!r} (expected 'trunc_exp' or 'deterministic')")


def _parse_claims(block, d: int) -> ClaimModel:
    if isinstance(block, dict):
        if not block.get("identical", False) and d != 1:
            raise ConfigError("'claims' single entry needs \"identical\": true for d > 1")
        return ClaimModel.identical(_parse_marginal(block), d)
    if isinstance(block, list):
        if len(block) != d:
            raise ConfigError(f"'claims' list must have one entry per line: expected {d}, got {len(block)}")
        return ClaimModel(tuple(_parse_marginal(e) for e in block))
    raise ConfigError("'claims' must be an object or a list of objects")


def _parse_strategy(block: dict, idx: int) -> StrategySpec:
    where = f"strategies[{idx}]"
    inv = block.get("investment", "merton")
    kwargs = {}
    if inv == "merton":
        kwargs["investment"] = "merton"
    elif isinstance(inv, dict) and set(inv) == {"constant"}:
        kwargs["investment"] = "constant"
        kwargs["investment_value"] = float(inv["constant"])
    else:
        raise ConfigError(f"{where}: investment must be \"merton\" or {{\"constant\": x}}, got {inv!r}")
    ret = _require(block, "retention", where)
    if ret in ("full", "certainty_equivalent", "apriori_lower", "apriori_upper"):
        kwargs["retention"] = ret
    elif isinstance(ret, dict) and set(ret) == {"constant"}:
        kwargs["retention"] = "constant"
        kwargs["retention_value"] = float(ret["constant"])
        if not 0.0 <= kwargs["retention_value"] <= 1.0:
            raise ConfigError(f"{where}: constant retention must lie in [0, 1], got {ret['constant']}")
    elif isinstance(ret, dict) and set(ret) == {"complete_info"}:
        info = ret["complete_info"]
        kwargs["retention"] = "complete_info"
        kwargs["info_lambda"] = float(_require(info, "lambda", where))
        kwargs["info_c"] = tuple(float(v) for v in _require(info, "c", where))
    else:
        raise ConfigError(f"{where}: unknown retention {ret!r}")
    if "name" in block:
        kwargs["name"] = str(block["name"])
    return StrategySpec(**kwargs)


def parse_config(doc: dict) -> ExperimentConfig:
    model = _require(doc, "model", "top level")
    dirichlet = _parse_beta(_require(model, "beta", "model"))
    try:
        prior = IntensityPrior(np.asarray(_require(model, "lambdas", "model"), dtype=float),
                               np.asarray(_require(model, "pi", "model"), dtype=float))
    except ValueError as exc:
        raise ConfigError(f"'lambdas'/'pi': {exc}") from None
    claims = _parse_claims(_require(doc, "claims", "top level"), dirichlet.d)

    kappa = model.get("kappa")
    if kappa is None:
        kappa = default_kappa(prior, dirichlet, claims)
    try:
        params = ModelParams(
            r=float(_require(model, "r", "model")),
            mu=float(_require(model, "mu", "model")),
            sigma=float(_require(model, "sigma", "model")),
            alpha=float(_require(model, "alpha", "model")),
            eta=float(_require(model, "eta", "model")),
            theta=float(_require(model, "theta", "model")),
            kappa=float(kappa),
            horizon_T=float(_require(model, "T", "model")),
            x0=float(_require(model, "x0", "model")),
        )
    except ValueError as exc:
        raise ConfigError(f"'model': {exc}") from None

    raw_strats = doc.get("strategies")
    if raw_strats is None and "strategy" in doc:
        raw_strats = [doc["strategy"]]
    strategies = []
    for i, blk in enumerate(raw_strats or []):
        try:
            strategies.append(_parse_strategy(blk, i))
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"strategies[{i}]: {exc}") from None

    sim = doc.get("simulate", {})
    pin_alpha = sim.get("pin_alpha")
    cfg = ExperimentConfig(
        params=params,
        prior=prior,
        dirichlet=dirichlet,
        claims=claims,
        strategies=strategies,
        n_paths=int(sim.get("n_paths", 1000)),
        dt_max=float(sim.get("dt_max", 1e-3 * params.horizon_T)),
        seed=None if sim.get("seed") is None else int(sim["seed"]),
        pin_lambda=None if sim.get("pin_lambda") is None else float(sim["pin_lambda"]),
        pin_alpha=None if pin_alpha is None else np.asarray(pin_alpha, dtype=float),
    )
    if cfg.dt_max <= 0:
        raise ConfigError("'simulate.dt_max' must be > 0")
    if cfg.pin_alpha is not None and cfg.pin_alpha.size != dirichlet.n_subsets:
        raise ConfigError(f"'simulate.pin_alpha' must have {dirichlet.n_subsets} entries")
    return cfg


def load_config(path) -> ExperimentConfig:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: not valid JSON ({exc})") from None
    return parse_config(doc)
