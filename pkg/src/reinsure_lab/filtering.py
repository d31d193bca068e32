"""Exact Bayesian state estimation for the observed claim stream.

Two sufficient statistics are tracked:

* ``p`` -- posterior over the finite set of candidate arrival intensities.
  Between shocks it follows an exponential reweighting (no-event evidence
  favours smaller intensities); at a shock it is reweighted by the
  intensities themselves.
* ``q`` -- per-subset shock counts.  Conjugacy of the Dirichlet prior makes
  the posterior over the thinning probabilities Dirichlet(beta + q), so only
  the counts need to be stored.

All operations are pure: they return new ``FilterState`` values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import DirichletPrior, IntensityPrior, LineSet

_SIMPLEX_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class FilterState:
    """Time t, intensity posterior p (simplex) and shock counts q."""

    t: float
    p: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        p = np.array(self.p, dtype=float)
        q = np.array(self.q, dtype=np.int64)
        if np.any(p < 0) or abs(p.sum() - 1.0) > _SIMPLEX_TOL:
            raise ValueError("p must be a probability vector (sum 1 within 1e-10)")
        if np.any(q < 0):
            raise ValueError("shock counts must be nonnegative")
        p.setflags(write=False)
        q.setflags(write=False)
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)


def initial_state(prior: IntensityPrior, dirichlet: DirichletPrior, t: float = 0.0) -> FilterState:
    return FilterState(t, prior.pi.copy(), np.zeros(dirichlet.n_subsets, dtype=np.int64))


def propagate_weights(p: np.ndarray, lambdas: np.ndarray, dt) -> np.ndarray:
    """Closed-form no-event update of the intensity posterior.

    p_j e^{-lambda_j dt} / sum_k p_k e^{-lambda_k dt}; weights are taken
    relative to the smallest intensity so large dt cannot underflow to an
    all-zero vector.  Vectorized: dt may be an array, giving one row per dt.
    """
    dt = np.asarray(dt, dtype=float)
    expo = -np.multiply.outer(dt, lambdas - lambdas.min())
    w = p * np.exp(expo)
    return w / w.sum(axis=-1, keepdims=True)


def propagate(state: FilterState, dt: float, prior: IntensityPrior) -> FilterState:
    """Advance the filter by dt with no shock observed in (t, t+dt]."""
    if dt < 0:
        raise ValueError(f"dt must be nonnegative, got {dt}")
    p = propagate_weights(state.p, prior.lambdas, float(dt))
    return FilterState(state.t + dt, p / p.sum(), state.q)


def jump_update(state: FilterState, D: LineSet, prior: IntensityPrior) -> FilterState:
    """Instantaneous update at a shock hitting subset D.

    The intensity posterior is reweighted by the intensities and the shock
    count of D increments by exactly one; time does not advance.
    """
    w = prior.lambdas * state.p
    s = w.sum()
    if s <= 0:
        raise ValueError("degenerate filter state: sum_k lambda_k p_k = 0")
    if D.index >= state.q.size:
        raise ValueError(f"subset {D} outside the {state.q.size}-slot count vector")
    q = np.array(state.q)
    q[D.index] += 1
    p = w / s
    return FilterState(state.t, p / p.sum(), q)


def lambda_hat(state: FilterState, prior: IntensityPrior) -> float:
    """Posterior mean arrival intensity sum_k lambda_k p_k."""
    return float(prior.lambdas @ state.p)


def thinning_posterior_mean(state: FilterState, dirichlet: DirichletPrior) -> np.ndarray:
    """Posterior mean thinning probabilities (beta_D + q_D) / ||beta + q||."""
    w = dirichlet.beta + state.q
    return w / w.sum()
