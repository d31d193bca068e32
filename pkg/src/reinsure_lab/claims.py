"""Claim-size laws per business line and their moment transforms.

Claim vectors follow the product assumption: the d per-line marginals are
independent, each with a moment generating function that is finite on all of
the real line.  Every marginal exposes

* ``mean``            -- E[Y]
* ``mgf(z)``          -- E[e^{zY}], vectorized over z
* ``tilted_mean(z)``  -- E[Y e^{zY}], the derivative of the MGF
* ``sample(rng, size)``

The shock-level claim transform ``gamma_factor`` aggregates these per-line
transforms over an affected subset of lines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .model import LineSet, ModelParams


class DomainError(ArithmeticError):
    """A numerical quantity left its valid domain (non-finite transform)."""


def _em1_over(x):
    """expm1(x)/x, stable through x = 0; inf where e^x overflows."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-5
    xs = np.where(small, 1.0, x)
    with np.errstate(over="ignore"):
        out = np.where(small, 1.0 + x / 2.0 + x * x / 6.0, np.expm1(xs) / xs)
    return out


def _one_minus_1px_emx_over_x2(x):
    """(1 - (1+x) e^{-x}) / x^2, stable through x = 0; inf on overflow."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-4
    xs = np.where(small, 1.0, x)
    with np.errstate(over="ignore", invalid="ignore"):
        exact = (1.0 - (1.0 + xs) * np.exp(-xs)) / (xs * xs)
    series = 0.5 - x / 3.0 + x * x / 8.0
    return np.where(small, series, exact)


@dataclass(frozen=True)
class TruncatedExponential:
    """Exponential law with the given rate, right-truncated at ``cutoff``.

    Density rate*e^{-rate*y} / (1 - e^{-rate*cutoff}) on (0, cutoff).
    """

    rate: float
    cutoff: float

    def __post_init__(self):
        if self.rate <= 0 or self.cutoff <= 0:
            raise ValueError("rate and cutoff must be > 0")

    @property
    def _norm(self) -> float:
        return -math.expm1(-self.rate * self.cutoff)

    @property
    def mean(self) -> float:
        return float(self.tilted_mean(0.0))

    def mgf(self, z):
        # rate * (1 - e^{-(rate-z)c}) / ((rate-z) * norm), continuous at z = rate
        s = self.rate - np.asarray(z, dtype=float)
        return self.rate * self.cutoff * _em1_over(-s * self.cutoff) / self._norm

    def tilted_mean(self, z):
        s = self.rate - np.asarray(z, dtype=float)
        x = s * self.cutoff
        return self.rate * self.cutoff**2 * _one_minus_1px_emx_over_x2(x) / self._norm

    def sample(self, rng, size=None):
        u = rng.random(size)
        return -np.log1p(-u * self._norm) / self.rate


@dataclass(frozen=True)
class Deterministic:
    """Point mass: every claim equals ``value``."""

    value: float

    def __post_init__(self):
        if self.value <= 0:
            raise ValueError("claim sizes must be positive")

    @property
    def mean(self) -> float:
        return self.value

    def mgf(self, z):
        return np.exp(np.asarray(z, dtype=float) * self.value)

    def tilted_mean(self, z):
        return self.value * np.exp(np.asarray(z, dtype=float) * self.value)

    def sample(self, rng, size=None):
        u = rng.random(size)  # consumed to keep stream alignment with other laws
        return np.full_like(np.asarray(u, dtype=float), self.value)


@dataclass(frozen=True)
class QuadratureMarginal:
    """Marginal backed by numerical integration of a density.

    For laws without closed-form transforms.  ``pdf`` is integrated on
    (lower, upper) with absolute tolerance 1e-10.  Sampling requires an
    explicit ``sampler(rng, size)`` callable.
    """

    pdf: object
    lower: float
    upper: float
    sampler: object = None

    @property
    def mean(self) -> float:
        return float(self.tilted_mean(0.0))

    def _integrate(self, f):
        val, _ = quad(f, self.lower, self.upper, epsabs=1e-10, epsrel=1e-10, limit=200)
        return val

    def mgf(self, z):
        zs = np.atleast_1d(np.asarray(z, dtype=float))
        out = np.array([self._integrate(lambda y, zz=zz: math.exp(zz * y) * self.pdf(y)) for zz in zs])
        return out[0] if np.isscalar(z) or np.asarray(z).ndim == 0 else out

    def tilted_mean(self, z):
        zs = np.atleast_1d(np.asarray(z, dtype=float))
        out = np.array([self._integrate(lambda y, zz=zz: y * math.exp(zz * y) * self.pdf(y)) for zz in zs])
        return out[0] if np.isscalar(z) or np.asarray(z).ndim == 0 else out

    def sample(self, rng, size=None):
        if self.sampler is None:
            raise NotImplementedError("QuadratureMarginal needs an explicit sampler")
        return self.sampler(rng, size)


@dataclass(frozen=True)
class ClaimModel:
    """Product claim-size law: one independent marginal per business line."""

    marginals: tuple

    def __post_init__(self):
        if not self.marginals:
            raise ValueError("at least one marginal required")

    @classmethod
    def identical(cls, marginal, d: int) -> "ClaimModel":
        return cls(tuple([marginal] * d))

    @property
    def d(self) -> int:
        return len(self.marginals)

    def means(self) -> np.ndarray:
        return np.array([m.mean for m in self.marginals])


def sample_claim_vector(claims: ClaimModel, rng) -> np.ndarray:
    """One d-vector of independent per-line claim draws.

    The full vector is drawn even when only some coordinates will be charged,
    so random-number consumption does not depend on which lines a shock hits.
    """
    return np.array([float(m.sample(rng)) for m in claims.marginals])


def sample_claim_matrix(claims: ClaimModel, rng, n: int) -> np.ndarray:
    """n independent claim vectors, shape (n, d), in event-major stream order
    (equivalent to n stacked sample_claim_vector calls)."""
    if n == 0:
        return np.empty((0, claims.d))
    first = claims.marginals[0]
    if all(m is first for m in claims.marginals):
        # row-major fill consumes the stream exactly like per-event draws
        return np.asarray(first.sample(rng, size=(n, claims.d)), dtype=float)
    return np.array([[float(m.sample(rng)) for m in claims.marginals] for _ in range(n)])


def tilt_argument(params: ModelParams, t, a):
    """Exponential tilt u = alpha * a * e^{r(T-t)} used by all shock transforms."""
    return params.alpha * np.asarray(a, dtype=float) * np.exp(params.r * (params.horizon_T - np.asarray(t, dtype=float)))


def gamma_tilt(claims: ClaimModel, u, members: tuple[int, ...]):
    """Shock claim transform at tilt u for the subset with the given 1-based lines.

    sum_{i in D} E[Y_i e^{u Y_i}] * prod_{j in D, j != i} E[e^{u Y_j}].
    Vectorized over u; may return inf where a transform overflows.
    """
    u = np.asarray(u, dtype=float)
    by_marginal = {}  # shared marginal objects are transformed once
    for i in members:
        marg = claims.marginals[i - 1]
        if id(marg) not in by_marginal:
            by_marginal[id(marg)] = (marg.mgf(u), marg.tilted_mean(u))
    mgfs = {i: by_marginal[id(claims.marginals[i - 1])][0] for i in members}
    tilts = {i: by_marginal[id(claims.marginals[i - 1])][1] for i in members}
    total = np.zeros_like(u, dtype=float)
    for i in members:
        term = np.asarray(tilts[i], dtype=float).copy()
        for j in members:
            if j != i:
                term = term * mgfs[j]
        total = total + term
    return total


def gamma_factor(claims: ClaimModel, params: ModelParams, t: float, a: float, D: LineSet) -> float:
    """Expected charged claim amount per shock on subset D, tilted for time-t
    exposure at retention-like level a."""
    u = tilt_argument(params, t, a)
    val = gamma_tilt(claims, u, D.lines())
    if not np.all(np.isfinite(val)):
        raise DomainError(f"claim transform not finite at tilt u={np.max(u):g} for subset {D}")
    return float(val) if np.asarray(val).ndim == 0 else val
