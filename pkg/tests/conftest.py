import json
import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

import reinsure_lab as rl

GOLDEN_PATH = Path(__file__).parent / "golden" / "section6.json"


@pytest.fixture(scope="session")
def golden():
    with open(GOLDEN_PATH) as fh:
        return json.load(fh)


class Bundle:
    """A model bundle: params + priors + claims, with convenience accessors."""

    def __init__(self, params, prior, dirichlet, claims):
        self.params = params
        self.prior = prior
        self.dirichlet = dirichlet
        self.claims = claims

    def as_tuple(self):
        return self.claims, self.params, self.prior, self.dirichlet


@pytest.fixture(scope="session")
def sec6(golden):
    """The two-line experiment setup with the pinned premium scale."""
    params = rl.ModelParams(r=0.01, mu=0.2, sigma=3.0, alpha=0.2, eta=0.4, theta=0.6,
                            kappa=golden["kappa_pinned"], horizon_T=10.0, x0=100.0)
    prior = rl.IntensityPrior(np.array([2.0, 4.0, 5.0]), np.array([0.4, 0.4, 0.2]))
    dirichlet = rl.DirichletPrior(np.array([8.0, 7.0, 5.0]))
    claims = rl.ClaimModel.identical(rl.TruncatedExponential(1.0, 3.0), 2)
    return Bundle(params, prior, dirichlet, claims)


@pytest.fixture(scope="session")
def unit_claim():
    """Single line, unit point-mass claims, r=0, alpha=1, kappa=1, theta=e-1.

    In this setup the retention FOC reads e^a = (1+theta), solvable by hand.
    """
    params = rl.ModelParams(r=0.0, mu=0.05, sigma=1.0, alpha=1.0, eta=1.0,
                            theta=math.e - 1.0, kappa=1.0, horizon_T=1.0, x0=10.0)
    prior = rl.IntensityPrior(np.array([1.0]), np.array([1.0]))
    dirichlet = rl.DirichletPrior(np.array([1.0]))
    claims = rl.ClaimModel.identical(rl.Deterministic(1.0), 1)
    return Bundle(params, prior, dirichlet, claims)
