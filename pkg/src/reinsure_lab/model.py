"""Static model data: market and premium constants, business-line subsets, priors.

Business lines are numbered 1..d.  A nonempty subset of lines is encoded as a
bitmask, and the mask value is the canonical index everywhere: arrays over
subsets (Dirichlet parameters, shock counts, thinning weights) are laid out in
increasing mask order, so subset ``D`` lives at position ``D.mask - 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

MAX_LINES = 16


@dataclass(frozen=True)
class LineSet:
    """Nonempty subset of business lines 1..d, encoded as a bitmask."""

    mask: int

    def __post_init__(self):
        if not isinstance(self.mask, int) or self.mask < 1:
            raise ValueError(f"line-set mask must be a positive integer, got {self.mask!r}")

    @property
    def size(self) -> int:
        return self.mask.bit_count()

    @property
    def index(self) -> int:
        """Position of this subset in mask-ordered arrays of length 2^d - 1."""
        return self.mask - 1

    def lines(self) -> tuple[int, ...]:
        """Member lines as 1-based indices, ascending."""
        return tuple(i + 1 for i in range(self.mask.bit_length()) if self.mask >> i & 1)

    def contains(self, line: int) -> bool:
        return bool(self.mask >> (line - 1) & 1)

    @classmethod
    def from_lines(cls, lines) -> "LineSet":
        mask = 0
        for i in lines:
            if not 1 <= i <= MAX_LINES:
                raise ValueError(f"line index {i} outside 1..{MAX_LINES}")
            mask |= 1 << (i - 1)
        return cls(mask)

    def __str__(self):
        return "{" + ",".join(str(i) for i in self.lines()) + "}"


def enumerate_linesets(d: int) -> list[LineSet]:
    """All 2^d - 1 nonempty subsets of lines 1..d in increasing mask order.

    This order is the canonical index for Dirichlet parameters and shock
    counts throughout the package.
    """
    if not 1 <= d <= MAX_LINES:
        raise ValueError(f"line count d must be in 1..{MAX_LINES}, got {d}")
    return [LineSet(mask) for mask in range(1, 2**d)]


@dataclass(frozen=True)
class ModelParams:
    """Market, utility and premium constants.

    r: risk-free rate; mu, sigma: risky-asset drift and volatility;
    alpha: exponential risk aversion; eta/theta: insurer/reinsurer safety
    loadings; kappa: premium scale; horizon_T: terminal time; x0: initial
    capital.
    """

    r: float
    mu: float
    sigma: float
    alpha: float
    eta: float
    theta: float
    kappa: float
    horizon_T: float
    x0: float

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError("sigma must be > 0")
        if self.alpha <= 0:
            raise ValueError("alpha must be > 0")
        if self.kappa <= 0:
            raise ValueError("kappa must be > 0")
        if self.horizon_T <= 0:
            raise ValueError("horizon_T must be > 0")
        if not self.eta > 0:
            raise ValueError("eta must be > 0")
        if not self.theta > self.eta:
            raise ValueError(f"theta must exceed eta, got theta={self.theta} <= eta={self.eta}")


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class IntensityPrior:
    """Finite prior over the unknown claim-arrival intensity.

    lambdas: candidate intensities, strictly increasing and positive.
    pi: prior probabilities, a point in the m-simplex.
    """

    lambdas: np.ndarray
    pi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "lambdas", _readonly(self.lambdas))
        object.__setattr__(self, "pi", _readonly(self.pi))
        lam, pi = self.lambdas, self.pi
        if lam.ndim != 1 or lam.size == 0:
            raise ValueError("lambdas must be a nonempty vector")
        if lam[0] <= 0 or np.any(np.diff(lam) <= 0):
            raise ValueError("lambdas must be strictly increasing and positive")
        if pi.shape != lam.shape:
            raise ValueError(f"pi and lambdas lengths differ: {pi.size} vs {lam.size}")
        if np.any(pi < 0) or abs(pi.sum() - 1.0) > 1e-12:
            raise ValueError("pi must have nonnegative entries summing to 1 within 1e-12")

    @property
    def m(self) -> int:
        return self.lambdas.size


@dataclass(frozen=True, eq=False)
class DirichletPrior:
    """Dirichlet parameter over the 2^d - 1 line subsets, in mask order."""

    beta: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "beta", _readonly(self.beta))
        b = self.beta
        if b.ndim != 1 or b.size == 0:
            raise ValueError("beta must be a nonempty vector")
        n = b.size + 1
        if n & (n - 1):
            raise ValueError(f"beta length must be 2^d - 1 for some d, got {b.size}")
        if np.any(b <= 0):
            raise ValueError("beta entries must be strictly positive")

    @property
    def n_subsets(self) -> int:
        return self.beta.size

    @property
    def d(self) -> int:
        return (self.beta.size + 1).bit_length() - 1


def premium_rate(params: ModelParams, b) -> float:
    """Net premium income rate at retention level b.

    Expected-value principle with proportional reinsurance: the insurer
    collects (1+eta)*kappa and cedes (1-b)(1+theta)*kappa, leaving
    (eta-theta)*kappa + (1+theta)*kappa*b.  Affine and strictly increasing
    in b; negative at b=0 because theta > eta.
    """
    barr = np.asarray(b, dtype=float)
    if np.any(barr < 0.0) or np.any(barr > 1.0):
        raise ValueError(f"retention level must lie in [0, 1], got {b!r}")
    out = (params.eta - params.theta) * params.kappa + (1.0 + params.theta) * params.kappa * barr
    return float(out) if np.isscalar(b) or barr.ndim == 0 else out


def default_kappa(prior: IntensityPrior, dirichlet: DirichletPrior, claims) -> float:
    """Premium scale implied by the priors and the claim-size means.

    kappa = sum_k lambda_k pi_k * sum_D (beta_D/||beta||) * sum_{i in D} E[Y^i].
    Callers may override the result with an explicit kappa in ModelParams.
    """
    d = dirichlet.d
    if claims.d != d:
        raise ValueError(f"claims dimension {claims.d} does not match beta dimension d={d}")
    means = claims.means()
    weights = dirichlet.beta / dirichlet.beta.sum()
    per_subset = np.array([means[[i - 1 for i in ls.lines()]].sum() for ls in enumerate_linesets(d)])
    return float((prior.lambdas @ prior.pi) * (weights @ per_subset))
