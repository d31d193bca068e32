"""Computable investment and retention rules.

The investment rule is Merton-type and fully explicit.  Retention rules come
from a first-order condition: the net reinsurance price (1+theta)*kappa is
matched against a strictly increasing, strictly convex claim-transform curve,
whose unique root (clipped to [0, 1]) is the optimal retention.

Under complete information the curve is ``h_{lambda,c}(t, a) = lambda *
sum_D c_D * gamma(t, a, D)``.  With learning, the exact curve involves an
unknown value-function factor; what is computable is

* the certainty-equivalent rule: plug the posterior means (lambda_hat, w(q))
  into the complete-information formula -- an upper bound on the optimal
  retention,
* time-deterministic a-priori lower/upper bounds valid for every posterior.

All curves depend on (t, a) only through the tilt u = alpha*a*e^{r(T-t)}, so
roots are solved once in u and mapped to any t.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .claims import ClaimModel, DomainError, gamma_tilt, tilt_argument
from .filtering import FilterState, lambda_hat, thinning_posterior_mean
from .model import DirichletPrior, IntensityPrior, ModelParams, enumerate_linesets

RETENTION_KINDS = ("full", "constant", "certainty_equivalent", "complete_info",
                   "apriori_lower", "apriori_upper")
INVESTMENT_KINDS = ("merton", "constant")


# ---------------------------------------------------------------------------
# investment
# ---------------------------------------------------------------------------

def xi_star(params: ModelParams, t):
    """Optimal risky-asset position ((mu-r)/sigma^2) * (1/alpha) * e^{-r(T-t)}.

    Deterministic: learning affects only the reinsurance side.
    """
    t = np.asarray(t, dtype=float)
    out = (params.mu - params.r) / params.sigma**2 / params.alpha \
        * np.exp(-params.r * (params.horizon_T - t))
    return float(out) if out.ndim == 0 else out


def investment_bound(params: ModelParams) -> float:
    """Default admissibility bound: 10 * max_t |xi_star(t)|."""
    peak = abs(params.mu - params.r) / params.sigma**2 / params.alpha
    return 10.0 * peak * max(1.0, math.exp(-params.r * params.horizon_T))


# ---------------------------------------------------------------------------
# root machinery in tilt space
# ---------------------------------------------------------------------------

def _u_tolerance(params: ModelParams) -> float:
    # guarantees 1e-10 absolute accuracy in a at every t in [0, T]
    return 1e-10 * params.alpha * min(1.0, math.exp(params.r * params.horizon_T))


def _a_from_u(params: ModelParams, t, u):
    t = np.asarray(t, dtype=float)
    return u * np.exp(-params.r * (params.horizon_T - t)) / params.alpha


def _inverse_increasing(g, targets, lo0: float, hi0: float, tol: float,
                        max_expand: int = 200, max_iter: int = 200) -> np.ndarray:
    """Elementwise inverse of a vectorized strictly increasing function.

    Brackets expand geometrically from [lo0, hi0] until they enclose each
    target, then bisect.  inf values of g are usable bracket evidence; nan
    aborts with DomainError.
    """
    targets = np.asarray(targets, dtype=float)
    lo = np.full(targets.shape, lo0, dtype=float)
    hi = np.full(targets.shape, hi0, dtype=float)
    ghi = np.asarray(g(hi), dtype=float)
    for _ in range(max_expand):
        if np.any(np.isnan(ghi)):
            raise DomainError("claim transform returned nan during bracket expansion")
        need = ghi < targets
        if not need.any():
            break
        hi = np.where(need, hi + (hi - lo), hi)
        ghi = np.asarray(g(hi), dtype=float)
    else:
        raise DomainError("bracket expansion failed on the upper side")
    glo = np.asarray(g(lo), dtype=float)
    for _ in range(max_expand):
        if np.any(np.isnan(glo)):
            raise DomainError("claim transform returned nan during bracket expansion")
        need = glo > targets
        if not need.any():
            break
        lo = np.where(need, lo - (hi - lo), lo)
        glo = np.asarray(g(lo), dtype=float)
    else:
        raise DomainError("bracket expansion failed on the lower side")

    for _ in range(max_iter):
        if np.max(hi - lo) <= tol:
            break
        mid = 0.5 * (lo + hi)
        gm = np.asarray(g(mid), dtype=float)
        if np.any(np.isnan(gm)):
            raise DomainError("claim transform returned nan during bisection")
        below = gm < targets
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


@lru_cache(maxsize=1024)
def _subset_lines(claims: ClaimModel) -> tuple[tuple[int, ...], ...]:
    return tuple(ls.lines() for ls in enumerate_linesets(claims.d))


def _identical_marginal(claims: ClaimModel):
    first = claims.marginals[0]
    return first if all(m is first or m == first for m in claims.marginals) else None


def _weighted_tilt_curve(claims: ClaimModel, weights):
    """u-curve sum_D weights_D * gamma_tilt(u, D), vectorized over u.

    With one shared marginal each subset term is |D| M(u)^{|D|-1} T(u), so
    the whole sum collapses to T(u) times a polynomial in M(u).
    """
    members = _subset_lines(claims)
    w = np.asarray(weights, dtype=float)
    if w.shape != (len(members),):
        raise ValueError(f"subset weight vector must have length {len(members)}, got {w.shape}")
    shared = _identical_marginal(claims)
    if shared is not None:
        sizes = np.array([len(mem) for mem in members])
        poly = np.zeros(claims.d)
        np.add.at(poly, sizes - 1, w * sizes)

        def curve(u):
            u = np.asarray(u, dtype=float)
            M = np.asarray(shared.mgf(u), dtype=float)
            T = np.asarray(shared.tilted_mean(u), dtype=float)
            return T * np.polynomial.polynomial.polyval(M, poly)

        return curve

    def curve(u):
        u = np.asarray(u, dtype=float)
        total = np.zeros_like(u)
        for wD, lines in zip(w, members):
            if wD != 0.0:
                total = total + wD * gamma_tilt(claims, u, lines)
        return total

    return curve


def _extreme_tilt_curve(claims: ClaimModel, use_max: bool):
    """u-curve max_D gamma_tilt (or min_D), by full subset enumeration."""
    members = _subset_lines(claims)
    shared = _identical_marginal(claims)
    if shared is not None:
        sizes = np.unique([len(mem) for mem in members]).astype(float)

        def curve(u):
            u = np.asarray(u, dtype=float)
            M = np.asarray(shared.mgf(u), dtype=float)
            T = np.asarray(shared.tilted_mean(u), dtype=float)
            vals = sizes.reshape((-1,) + (1,) * u.ndim) * M ** (sizes.reshape((-1,) + (1,) * u.ndim) - 1.0) * T
            return vals.max(axis=0) if use_max else vals.min(axis=0)

        return curve

    def curve(u):
        u = np.asarray(u, dtype=float)
        vals = np.stack([gamma_tilt(claims, u, lines) for lines in members])
        return vals.max(axis=0) if use_max else vals.min(axis=0)

    return curve


@lru_cache(maxsize=200_000)
def _tilt_root_weighted(claims: ClaimModel, params: ModelParams, lam: float, c_key: tuple) -> float:
    """u solving lam * sum_D c_D gamma_tilt(u, D) = (1+theta)*kappa."""
    curve = _weighted_tilt_curve(claims, c_key)
    target = (1.0 + params.theta) * params.kappa / lam
    u0 = params.alpha * max(1.0, math.exp(params.r * params.horizon_T))
    root = _inverse_increasing(curve, np.array([target]), -u0, 2.0 * u0, _u_tolerance(params))
    return float(root[0])


@lru_cache(maxsize=1024)
def _tilt_root_extreme(claims: ClaimModel, params: ModelParams, lam: float, use_max: bool) -> float:
    """u solving lam * extreme_D gamma_tilt(u, D) = (1+theta)*kappa."""
    curve = _extreme_tilt_curve(claims, use_max)
    target = (1.0 + params.theta) * params.kappa / lam
    u0 = params.alpha * max(1.0, math.exp(params.r * params.horizon_T))
    root = _inverse_increasing(curve, np.array([target]), -u0, 2.0 * u0, _u_tolerance(params))
    return float(root[0])


# ---------------------------------------------------------------------------
# complete-information quantities
# ---------------------------------------------------------------------------

def h_lambda_c(claims: ClaimModel, params: ModelParams, t: float, a, lam: float, c):
    """Complete-information transform curve lam * sum_D c_D gamma(t, a, D).

    Strictly increasing and strictly convex in a; tends to 0 as a -> -inf.
    """
    curve = _weighted_tilt_curve(claims, tuple(np.asarray(c, dtype=float)))
    val = lam * curve(tilt_argument(params, t, a))
    if not np.all(np.isfinite(val)):
        raise DomainError(f"h_lambda_c not finite at t={t}, a={a}")
    return float(val) if np.asarray(val).ndim == 0 else val


def solve_retention_root(claims: ClaimModel, params: ModelParams, t: float, lam: float, c) -> float:
    """Unique a with h_{lambda,c}(t, a) = (1+theta)*kappa, to 1e-10 in a."""
    u = _tilt_root_weighted(claims, params, float(lam), tuple(np.asarray(c, dtype=float)))
    return float(_a_from_u(params, t, u))


def b_star_complete(claims: ClaimModel, params: ModelParams, t: float, lam: float, c) -> float:
    """Optimal complete-information retention: FOC root clipped to [0, 1].

    Returns exactly 0 when the reinsurance loading is cheap enough that
    (1+theta)*kappa <= h(t, 0) and exactly 1 when (1+theta)*kappa >= h(t, 1).
    """
    c_key = tuple(np.asarray(c, dtype=float))
    curve = _weighted_tilt_curve(claims, c_key)
    target = (1.0 + params.theta) * params.kappa
    A = lam * float(curve(np.array(0.0)))
    if target <= A:
        return 0.0
    B = lam * float(curve(tilt_argument(params, t, 1.0)))
    if math.isnan(B):
        raise DomainError("claim transform returned nan at full retention")
    if target >= B:
        return 1.0
    a = solve_retention_root(claims, params, t, lam, c_key)
    return float(min(max(a, 0.0), 1.0))


def b_star_complete_profile(claims: ClaimModel, params: ModelParams, ts, lams, c) -> np.ndarray:
    """Vectorized b_star_complete over paired arrays of times and intensities
    with a shared subset-weight vector."""
    ts = np.asarray(ts, dtype=float)
    lams = np.broadcast_to(np.asarray(lams, dtype=float), ts.shape)
    c_key = tuple(np.asarray(c, dtype=float))
    curve = _weighted_tilt_curve(claims, c_key)
    target = (1.0 + params.theta) * params.kappa
    A = lams * float(curve(np.array(0.0)))
    B = lams * curve(tilt_argument(params, ts, 1.0))
    if np.any(np.isnan(B)):
        raise DomainError("claim transform returned nan at full retention")
    interior = (target > A) & (target < B)
    out = np.where(target <= A, 0.0, 1.0)
    if interior.any():
        u = _inverse_increasing(curve, target / lams[interior],
                                -params.alpha * max(1.0, math.exp(params.r * params.horizon_T)),
                                2.0 * params.alpha * max(1.0, math.exp(params.r * params.horizon_T)),
                                _u_tolerance(params))
        a = _a_from_u(params, ts[interior], u)
        out[interior] = np.clip(a, 0.0, 1.0)
    return out


# ---------------------------------------------------------------------------
# learning-based quantities
# ---------------------------------------------------------------------------

def certainty_equivalent_retention(claims: ClaimModel, params: ModelParams,
                                   prior: IntensityPrior, dirichlet: DirichletPrior,
                                   t: float, state: FilterState) -> float:
    """Complete-information rule evaluated at the posterior means.

    Upper bound on the (uncomputable) optimal retention under learning.
    """
    lam = lambda_hat(state, prior)
    c = thinning_posterior_mean(state, dirichlet)
    return b_star_complete(claims, params, t, lam, c)


def apriori_roots(claims: ClaimModel, params: ModelParams, prior: IntensityPrior, t: float) -> tuple[float, float]:
    """Unclipped roots (a_of_hmax, a_of_hmin) at time t.

    hmax = lambda_m * max_D gamma, hmin = lambda_1 * min_D gamma; since
    hmin <= h <= hmax pointwise, the roots bracket every posterior's root.
    """
    u_hi = _tilt_root_extreme(claims, params, float(prior.lambdas[-1]), True)
    u_lo = _tilt_root_extreme(claims, params, float(prior.lambdas[0]), False)
    return float(_a_from_u(params, t, u_hi)), float(_a_from_u(params, t, u_lo))


def apriori_bounds(claims: ClaimModel, params: ModelParams, prior: IntensityPrior, t: float) -> tuple[float, float]:
    """State-free retention bounds (lower, upper) valid for every posterior."""
    a_of_hmax, a_of_hmin = apriori_roots(claims, params, prior, t)
    lower = min(max(a_of_hmax, 0.0), 1.0)
    upper = min(max(a_of_hmin, 0.0), 1.0)
    return lower, upper


def euler_retention_cramer_lundberg(claims: ClaimModel, params: ModelParams, lam: float) -> float:
    """Constant optimal retention of the single-line compound-Poisson model.

    Solves (1+theta)*kappa = lam * E[Y e^{alpha b Y}], clipped to [0, 1].
    Coincides with b_star_complete for d=1, m=1, r=0 at every t.
    """
    if claims.d != 1:
        raise ValueError("the Cramer-Lundberg rule applies to a single business line (d=1)")
    u = _tilt_root_weighted(claims, params, float(lam), (1.0,))
    return float(min(max(u / params.alpha, 0.0), 1.0))


def h_partial(claims: ClaimModel, params: ModelParams, prior: IntensityPrior,
              dirichlet: DirichletPrior, state: FilterState, a, g_ratio=None):
    """Partial-information FOC curve at filter state (t, p, q).

    h = sum_k lambda_k p_k * sum_D w(q)_D * rho(D) * gamma(t, a, D), where
    rho is a caller-supplied estimate of the value-factor ratio
    g(t, J(p), q+e_D) / g(t, p, q).  With the default rho = 1 this reduces to
    the certainty-equivalent curve h_{u(p), w(q)}.
    """
    w = thinning_posterior_mean(state, dirichlet)
    if g_ratio is not None:
        w = w * np.array([g_ratio(state, ls) for ls in enumerate_linesets(claims.d)])
    lam = lambda_hat(state, prior)
    curve = _weighted_tilt_curve(claims, tuple(w))
    val = lam * curve(tilt_argument(params, state.t, a))
    if not np.all(np.isfinite(val)):
        raise DomainError(f"h_partial not finite at t={state.t}, a={a}")
    return float(val) if np.asarray(val).ndim == 0 else val


# ---------------------------------------------------------------------------
# strategy specifications
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StrategySpec:
    """Declarative choice of investment and retention rules.

    investment: "merton" or "constant" (with investment_value).
    retention: one of full | constant | certainty_equivalent | complete_info
    | apriori_lower | apriori_upper.
    """

    investment: str = "merton"
    retention: str = "certainty_equivalent"
    investment_value: float = 0.0
    retention_value: float = 0.0
    info_lambda: float = float("nan")
    info_c: tuple = ()
    k_bound: float = float("nan")
    name: str = ""

    def __post_init__(self):
        if self.investment not in INVESTMENT_KINDS:
            raise ValueError(f"unknown investment kind {self.investment!r}")
        if self.retention not in RETENTION_KINDS:
            raise ValueError(f"unknown retention kind {self.retention!r}")

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        if self.retention == "constant":
            return f"constant_{self.retention_value:g}"
        return self.retention


class BoundStrategy:
    """A StrategySpec bound to a concrete model, ready for path evaluation."""

    def __init__(self, spec: StrategySpec, claims: ClaimModel, params: ModelParams,
                 prior: IntensityPrior, dirichlet: DirichletPrior):
        self.spec = spec
        self.claims = claims
        self.params = params
        self.prior = prior
        self.dirichlet = dirichlet
        k = spec.k_bound if not math.isnan(spec.k_bound) else investment_bound(params)
        if spec.investment == "constant" and abs(spec.investment_value) > k:
            raise ValueError(f"constant investment {spec.investment_value} exceeds bound {k:g}")
        if spec.retention == "constant" and not 0.0 <= spec.retention_value <= 1.0:
            raise ValueError(f"constant retention must lie in [0, 1], got {spec.retention_value}")
        if spec.retention == "complete_info":
            lam = spec.info_lambda
            if not prior.lambdas[0] <= lam <= prior.lambdas[-1]:
                raise ValueError(f"complete_info lambda {lam} outside [{prior.lambdas[0]}, {prior.lambdas[-1]}]")
            c = np.asarray(spec.info_c, dtype=float)
            if c.size != dirichlet.n_subsets or np.any(c < 0) or abs(c.sum() - 1.0) > 1e-12:
                raise ValueError("complete_info c must be a probability vector over the line subsets")
        # only the certainty-equivalent rule reads the live filter state
        self.state_dependent = spec.retention == "certainty_equivalent"

    def xi(self, t):
        if self.spec.investment == "merton":
            return xi_star(self.params, t)
        out = np.full_like(np.asarray(t, dtype=float), self.spec.investment_value)
        return float(out) if out.ndim == 0 else out

    def retention(self, t: float, state: FilterState) -> float:
        return float(self.retention_profile(np.array([t]), state)[0])

    def retention_profile(self, ts, state: FilterState) -> np.ndarray:
        """Retention at each time in ts, with no shock inside the span.

        ``state`` is the filter state at or before ts[0] (no shock between
        state.t and ts[-1]); for the certainty-equivalent rule the intensity
        posterior is propagated in closed form along ts.
        """
        ts = np.asarray(ts, dtype=float)
        spec = self.spec
        if spec.retention == "full":
            return np.zeros_like(ts)
        if spec.retention == "constant":
            return np.full_like(ts, spec.retention_value)
        if spec.retention == "complete_info":
            return b_star_complete_profile(self.claims, self.params, ts,
                                           spec.info_lambda, spec.info_c)
        if spec.retention == "apriori_lower":
            return np.array([apriori_bounds(self.claims, self.params, self.prior, t)[0] for t in ts])
        if spec.retention == "apriori_upper":
            return np.array([apriori_bounds(self.claims, self.params, self.prior, t)[1] for t in ts])
        # certainty equivalent
        from .filtering import propagate_weights
        ps = propagate_weights(state.p, self.prior.lambdas, ts - state.t)
        lams = ps @ self.prior.lambdas
        w = (self.dirichlet.beta + state.q)
        c = w / w.sum()
        return b_star_complete_profile(self.claims, self.params, ts, lams, c)


def bind_strategy(spec: StrategySpec, claims: ClaimModel, params: ModelParams,
                  prior: IntensityPrior, dirichlet: DirichletPrior) -> BoundStrategy:
    return BoundStrategy(spec, claims, params, prior, dirichlet)
