"""Scenario generation, surplus-path integration and Monte Carlo estimators.

A scenario fixes the latent parameters (intensity, thinning probabilities)
and the common-shock event stream (T_n, Z_n, Y_n).  Paths are integrated on
a grid refined to hit every event time exactly; the linear rate term of the
surplus dynamics is compounded with its exact exponential propagator so that
wealth enters the terminal value through e^{rT} exactly, while the remaining
drift and the diffusion use explicit left-endpoint (Euler) increments.

Randomness is fully splittable: every (seed, path index) pair determines a
path through named substreams, independent of worker scheduling, and common
random numbers across strategies or initial states come for free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .claims import ClaimModel, sample_claim_matrix
from .filtering import FilterState, initial_state, jump_update, lambda_hat, propagate, thinning_posterior_mean
from .model import DirichletPrior, IntensityPrior, LineSet, ModelParams, premium_rate
from .strategy import BoundStrategy, StrategySpec, bind_strategy


@dataclass(frozen=True)
class Event:
    """One common shock: arrival time, affected subset, full claim vector."""

    time: float
    lineset: LineSet
    amounts: np.ndarray

    def charged(self, retention: float = 1.0) -> float:
        """Claim amount borne by the insurer at the given retention."""
        idx = [i - 1 for i in self.lineset.lines()]
        return retention * float(self.amounts[idx].sum())


@dataclass(frozen=True)
class Scenario:
    """Latent parameters plus the realized marked event stream on (t0, T]."""

    lambda_true: float
    alpha_true: np.ndarray
    events: tuple
    brownian_seed: np.random.SeedSequence
    t0: float
    horizon: float


def path_rng(seed: int, index: int) -> np.random.Generator:
    """Root generator of path ``index``: splittable, scheduling-independent."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def sample_dirichlet(concentration, rng, size=None) -> np.ndarray:
    """Dirichlet draw(s) via normalized independent Gamma variables."""
    conc = np.asarray(concentration, dtype=float)
    shape = conc.shape if size is None else (size,) + conc.shape
    g = rng.standard_gamma(np.broadcast_to(conc, shape))
    return g / g.sum(axis=-1, keepdims=True)


def _categorical(weights: np.ndarray, u: float) -> int:
    return int(np.searchsorted(np.cumsum(weights), u, side="right"))


def _draw_scenario_core(lam_weights, lambdas, concentration, claims, t0, horizon, rng,
                        pin_lambda=None, pin_alpha=None) -> Scenario:
    # fixed substream layout; pins still consume their draws so that pinned
    # and unpinned runs stay aligned on every other stream
    r_lam, r_alpha, r_events, r_marks, r_claims, r_w = rng.spawn(6)
    u = r_lam.random()
    lam = float(lambdas[_categorical(np.asarray(lam_weights, dtype=float), u)])
    if pin_lambda is not None:
        lam = float(pin_lambda)
    alpha_vec = sample_dirichlet(concentration, r_alpha)
    if pin_alpha is not None:
        alpha_vec = np.asarray(pin_alpha, dtype=float)
        if abs(alpha_vec.sum() - 1.0) > 1e-9 or np.any(alpha_vec < 0):
            raise ValueError("pinned thinning probabilities must form a probability vector")

    times = []
    t = t0
    while True:
        t += r_events.exponential(1.0 / lam)
        if t > horizon:
            break
        times.append(t)
    n = len(times)
    marks = [_categorical(alpha_vec, r_marks.random()) for _ in range(n)]
    amounts = sample_claim_matrix(claims, r_claims, n)
    events = tuple(
        Event(times[k], LineSet(marks[k] + 1), amounts[k]) for k in range(n)
    )
    return Scenario(lam, alpha_vec, events, r_w.bit_generator.seed_seq, t0, horizon)


def draw_scenario(prior: IntensityPrior, dirichlet: DirichletPrior, claims: ClaimModel,
                  params: ModelParams, rng: np.random.Generator,
                  pin_lambda=None, pin_alpha=None) -> Scenario:
    """Draw latent parameters from the priors and a full event stream on (0, T]."""
    return _draw_scenario_core(prior.pi, prior.lambdas, dirichlet.beta, claims,
                               0.0, params.horizon_T, rng, pin_lambda, pin_alpha)


def posterior_scenario(prior: IntensityPrior, dirichlet: DirichletPrior, claims: ClaimModel,
                       params: ModelParams, t: float, p, q, rng: np.random.Generator) -> Scenario:
    """Scenario drawn from the posterior encoded by (p, beta+q), on (t, T]."""
    return _draw_scenario_core(p, prior.lambdas, dirichlet.beta + np.asarray(q), claims,
                               float(t), params.horizon_T, rng)


# ---------------------------------------------------------------------------
# path records and surplus integration
# ---------------------------------------------------------------------------

@dataclass
class PathRecord:
    """One simulated scenario under one strategy, sampled on the path grid.

    Event rows carry post-jump values (cadlag); ``b_applied[i]`` and
    ``xi_applied[i]`` are the controls in force on the step starting at
    ``grid[i]``, so the claim charge at an event row uses the control of the
    preceding row.
    """

    grid: np.ndarray
    X: np.ndarray
    p: np.ndarray
    q: np.ndarray
    b_applied: np.ndarray
    xi_applied: np.ndarray
    event_mask: np.ndarray
    terminal_utility: float


def _segment_times(s: float, e: float, dt_max: float) -> np.ndarray:
    n = max(1, math.ceil((e - s) / dt_max - 1e-12))
    return np.linspace(s, e, n + 1)


def simulate_path(scenario: Scenario, params: ModelParams, prior: IntensityPrior,
                  dirichlet: DirichletPrior, claims: ClaimModel, spec, dt_max: float,
                  wiener: np.random.Generator | None = None) -> PathRecord:
    """Integrate the surplus under the given strategy along one scenario.

    Between events dX = (rX + (mu-r)xi + c(b))dt + xi sigma dW with step
    <= dt_max; the grid hits every event time exactly.  At an event the
    surplus drops by the charged claims at the pre-jump retention, then the
    filter jumps.  Strategies are evaluated at left endpoints (predictable).
    """
    if dt_max <= 0:
        raise ValueError("dt_max must be > 0")
    bound = spec if isinstance(spec, BoundStrategy) else bind_strategy(spec, claims, params, prior, dirichlet)
    if wiener is None:
        wiener = np.random.default_rng(scenario.brownian_seed)

    state = initial_state(prior, dirichlet, t=scenario.t0)
    x = params.x0
    rows_t = [scenario.t0]
    rows_X = [x]
    rows_p = [state.p]
    rows_q = [state.q]
    rows_b: list = []
    rows_xi: list = []
    rows_ev = [0]

    breaks = [scenario.t0] + [ev.time for ev in scenario.events] + [scenario.horizon]
    for k in range(len(breaks) - 1):
        s, e = breaks[k], breaks[k + 1]
        if e > s:
            ts = _segment_times(s, e, dt_max)
            dts = np.diff(ts)
            b_seg = bound.retention_profile(ts[:-1], state)
            xi_seg = np.asarray(bound.xi(ts[:-1]), dtype=float)
            xi_seg = np.broadcast_to(xi_seg, b_seg.shape)
            dw = wiener.standard_normal(dts.size) * np.sqrt(dts)
            inc = ((params.mu - params.r) * xi_seg + premium_rate(params, b_seg)) * dts \
                + xi_seg * params.sigma * dw
            growth = np.exp(params.r * dts)
            P = np.cumprod(growth)
            X_seg = P * (x + np.cumsum(inc / P))
            # p evolves in closed form inside the segment, q is frozen
            rows_b.extend(b_seg.tolist())
            rows_xi.extend(xi_seg.tolist())
            rows_t.extend(ts[1:].tolist())
            rows_X.extend(X_seg.tolist())
            rows_p.extend(_propagated_rows(state, ts[1:], prior))
            rows_q.extend([state.q] * dts.size)
            rows_ev.extend([0] * dts.size)
            state = propagate(state, float(e - s), prior)
            x = float(X_seg[-1])
        if k < len(scenario.events):
            ev = scenario.events[k]
            b_pre = rows_b[-1] if rows_b else float(bound.retention(ev.time, state))
            x -= ev.charged(b_pre)
            state = jump_update(state, ev.lineset, prior)
            rows_X[-1] = x
            rows_p[-1] = state.p
            rows_q[-1] = state.q
            rows_ev[-1] = ev.lineset.mask
    # controls evaluated at the final row for completeness
    rows_b.append(float(bound.retention(scenario.horizon, state)))
    rows_xi.append(float(np.asarray(bound.xi(scenario.horizon), dtype=float)))

    return PathRecord(
        grid=np.array(rows_t),
        X=np.array(rows_X),
        p=np.array(rows_p),
        q=np.array(rows_q),
        b_applied=np.array(rows_b),
        xi_applied=np.array(rows_xi),
        event_mask=np.array(rows_ev, dtype=np.int64),
        terminal_utility=-math.exp(-params.alpha * x),
    )


def _propagated_rows(state: FilterState, times: np.ndarray, prior: IntensityPrior) -> list:
    from .filtering import propagate_weights

    ps = propagate_weights(state.p, prior.lambdas, np.asarray(times) - state.t)
    return [ps[i] for i in range(len(times))]


def filter_trajectory(prior: IntensityPrior, dirichlet: DirichletPrior, scenario: Scenario,
                      n_grid: int = 200):
    """Filter state sampled on a uniform grid merged with the event times.

    Returns (times, p matrix, q matrix, lambda_hat vector, event mask); event
    rows carry post-jump values.
    """
    grid = np.linspace(scenario.t0, scenario.horizon, n_grid)
    times = np.unique(np.concatenate([grid, [ev.time for ev in scenario.events]]))
    state = initial_state(prior, dirichlet, t=scenario.t0)
    ev_iter = iter(scenario.events)
    nxt = next(ev_iter, None)
    P, Q, mask = [], [], []
    for t in times:
        state = propagate(state, float(t - state.t), prior)
        m = 0
        while nxt is not None and nxt.time <= t:
            state = jump_update(state, nxt.lineset, prior)
            m = nxt.lineset.mask
            nxt = next(ev_iter, None)
        P.append(state.p)
        Q.append(state.q)
        mask.append(m)
    P = np.array(P)
    Q = np.array(Q)
    lam_hat = P @ prior.lambdas
    return times, P, Q, lam_hat, np.array(mask, dtype=np.int64)


def terminal_filter_state(prior: IntensityPrior, dirichlet: DirichletPrior, scenario: Scenario) -> FilterState:
    """Filter state at the horizon after processing every event."""
    state = initial_state(prior, dirichlet, t=scenario.t0)
    for ev in scenario.events:
        state = propagate(state, ev.time - state.t, prior)
        state = jump_update(state, ev.lineset, prior)
    return propagate(state, scenario.horizon - state.t, prior)


# ---------------------------------------------------------------------------
# Monte Carlo estimators
# ---------------------------------------------------------------------------

def simulate_terminal_wealth(claims: ClaimModel, params: ModelParams, prior: IntensityPrior,
                             dirichlet: DirichletPrior, spec: StrategySpec, n_paths: int,
                             seed: int, dt_max: float, pin_lambda=None, pin_alpha=None) -> np.ndarray:
    """Terminal surplus of n_paths independent scenario/path simulations."""
    bound = bind_strategy(spec, claims, params, prior, dirichlet)
    out = np.empty(n_paths)
    for i in range(n_paths):
        rng = path_rng(seed, i)
        sc = draw_scenario(prior, dirichlet, claims, params, rng, pin_lambda, pin_alpha)
        rec = simulate_path(sc, params, prior, dirichlet, claims, bound, dt_max)
        out[i] = rec.X[-1]
    return out


def estimate_value(claims: ClaimModel, params: ModelParams, prior: IntensityPrior,
                   dirichlet: DirichletPrior, spec: StrategySpec, n_paths: int,
                   seed: int, dt_max: float, pin_lambda=None, pin_alpha=None) -> tuple[float, float]:
    """Monte Carlo mean and standard error of the terminal utility -e^{-alpha X_T}."""
    if n_paths < 2:
        raise ValueError("n_paths must be at least 2")
    xt = simulate_terminal_wealth(claims, params, prior, dirichlet, spec,
                                  n_paths, seed, dt_max, pin_lambda, pin_alpha)
    utils = -np.exp(-params.alpha * xt)
    return float(utils.mean()), float(utils.std(ddof=1) / math.sqrt(n_paths))


def _discount_integral(params: ModelParams, a: float, b: float) -> float:
    """Exact integral of e^{r(T-s)} over [a, b]."""
    if params.r == 0.0:
        return b - a
    return (math.exp(params.r * (params.horizon_T - a))
            - math.exp(params.r * (params.horizon_T - b))) / params.r


def _g_exponent_fast(scenario: Scenario, bound: BoundStrategy, wiener: np.random.Generator) -> float:
    """Closed-form exponent for constant retention and merton/constant investment."""
    params = bound.params
    spec = bound.spec
    t0, T = scenario.t0, scenario.horizon
    b = 0.0 if spec.retention == "full" else spec.retention_value
    I = _discount_integral(params, t0, T)
    expo = -params.alpha * premium_rate(params, b) * I
    if spec.investment == "merton":
        mbar = (params.mu - params.r) / params.sigma**2 / params.alpha
        expo -= params.alpha * (params.mu - params.r) * mbar * (T - t0)
        var = ((params.mu - params.r) / params.sigma) ** 2 * (T - t0)
    else:
        xi = spec.investment_value
        expo -= params.alpha * (params.mu - params.r) * xi * I
        if params.r == 0.0:
            var2 = T - t0
        else:
            var2 = (math.exp(2 * params.r * (T - t0)) - 1.0) / (2 * params.r)
        var = (params.alpha * params.sigma * xi) ** 2 * var2
    z = wiener.standard_normal()
    expo -= math.sqrt(var) * z
    for ev in scenario.events:
        expo += params.alpha * math.exp(params.r * (T - ev.time)) * ev.charged(b)
    return expo


def _g_exponent_grid(scenario: Scenario, bound: BoundStrategy, dt_max: float,
                     wiener: np.random.Generator, p0, q0) -> float:
    """Grid-integrated exponent; drift uses exact per-step discount integrals."""
    params = bound.params
    prior, dirichlet = bound.prior, bound.dirichlet
    T = scenario.horizon
    state = FilterState(scenario.t0, p0, q0)
    expo = 0.0
    breaks = [scenario.t0] + [ev.time for ev in scenario.events] + [T]
    b_last = None
    for k in range(len(breaks) - 1):
        s, e = breaks[k], breaks[k + 1]
        if e > s:
            ts = _segment_times(s, e, dt_max)
            dts = np.diff(ts)
            b_seg = bound.retention_profile(ts[:-1], state)
            xi_seg = np.broadcast_to(np.asarray(bound.xi(ts[:-1]), dtype=float), b_seg.shape)
            if params.r == 0.0:
                steps = dts
            else:
                disc = np.exp(params.r * (T - ts))
                steps = (disc[:-1] - disc[1:]) / params.r
            drift = (params.mu - params.r) * xi_seg + premium_rate(params, b_seg)
            expo -= params.alpha * float(drift @ steps)
            dw = wiener.standard_normal(dts.size) * np.sqrt(dts)
            expo -= params.alpha * params.sigma * float(
                (xi_seg * np.exp(params.r * (T - ts[:-1]))) @ dw)
            b_last = float(b_seg[-1])
            state = propagate(state, float(e - s), prior)
        if k < len(scenario.events):
            ev = scenario.events[k]
            b_pre = b_last if b_last is not None else float(bound.retention(ev.time, state))
            expo += params.alpha * math.exp(params.r * (T - ev.time)) * ev.charged(b_pre)
            state = jump_update(state, ev.lineset, prior)
    return expo


def estimate_g(claims: ClaimModel, params: ModelParams, prior: IntensityPrior,
               dirichlet: DirichletPrior, spec: StrategySpec, t: float, p, q,
               n_paths: int, seed: int, dt_max: float | None = None) -> tuple[float, float]:
    """Monte Carlo estimate of the value-function factor for a fixed strategy.

    Per path the intensity is drawn from ``p`` and the thinning probabilities
    from Dirichlet(beta + q); the estimate is the mean of the exponential
    path functional whose conditional expectation defines the factor.
    Always positive.
    """
    if n_paths < 1:
        raise ValueError("n_paths must be at least 1")
    bound = bind_strategy(spec, claims, params, prior, dirichlet)
    fast = spec.retention in ("full", "constant") and spec.investment in ("merton", "constant")
    if dt_max is None:
        dt_max = 1e-3 * params.horizon_T
    p = np.asarray(p, dtype=float)
    q = np.asarray(q)
    vals = np.empty(n_paths)
    for i in range(n_paths):
        rng = path_rng(seed, i)
        sc = posterior_scenario(prior, dirichlet, claims, params, t, p, q, rng)
        wiener = np.random.default_rng(sc.brownian_seed)
        if fast:
            expo = _g_exponent_fast(sc, bound, wiener)
        else:
            expo = _g_exponent_grid(sc, bound, dt_max, wiener, p, q)
        vals[i] = math.exp(expo)
    se = 0.0 if n_paths == 1 else float(vals.std(ddof=1) / math.sqrt(n_paths))
    return float(vals.mean()), se


def entropic_risk(samples, alpha: float) -> float:
    """Entropic risk -(1/alpha) log E[e^{-alpha X}] of a terminal-wealth sample.

    Evaluated through a log-sum-exp shift so large |alpha X| cannot overflow.
    """
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise ValueError("entropic_risk needs a nonempty sample")
    return float(-(logsumexp(-alpha * x) - math.log(x.size)) / alpha)
