"""Investment and proportional-reinsurance strategies under Bayesian learning
of common-shock claim arrivals.

The package simulates a multi-line insurer whose claim triggers arrive with
an unknown intensity and hit random subsets of business lines with unknown
thinning probabilities.  Both unknowns are learned exactly (finite intensity
filter, Dirichlet conjugacy); the package computes every strategy that is
computable in closed or root-solved form -- the Merton investment rule, the
complete-information retention, a-priori retention bounds and the
certainty-equivalent retention -- and values strategies by Monte Carlo.
"""

from .claims import ClaimModel, Deterministic, DomainError, QuadratureMarginal, TruncatedExponential, gamma_factor, sample_claim_vector
from .config import ConfigError, ExperimentConfig, load_config, parse_config
from .filtering import FilterState, initial_state, jump_update, lambda_hat, propagate, thinning_posterior_mean
from .model import DirichletPrior, IntensityPrior, LineSet, ModelParams, default_kappa, enumerate_linesets, premium_rate
from .simulate import (Event, PathRecord, Scenario, draw_scenario, entropic_risk, estimate_g,
                       estimate_value, filter_trajectory, path_rng, sample_dirichlet,
                       simulate_path, simulate_terminal_wealth, terminal_filter_state)
from .strategy import (StrategySpec, apriori_bounds, apriori_roots, b_star_complete,
                       bind_strategy, certainty_equivalent_retention,
                       euler_retention_cramer_lundberg, h_lambda_c, h_partial,
                       investment_bound, solve_retention_root, xi_star)

__version__ = "0.1.0"
