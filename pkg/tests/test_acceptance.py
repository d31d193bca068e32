"""Acceptance suite: one test per release criterion.

Each test evaluates its criterion at the stated tolerance (and time budget
where one applies) and prints a single PASS/FAIL line; run with ``-s`` to see
the lines as the suite executes.
"""

import csv
import math
import time
from dataclasses import replace
from importlib import resources

import numpy as np
import pytest

import reinsure_lab as rl
from reinsure_lab.cli import main
from oracles import no_event_surplus, rk4_filter_ode_batch

PAPER_CONFIG = str(resources.files("reinsure_lab") / "configs" / "paper.json")
PIN_ALPHA = np.array([0.38, 0.48, 0.14])


def _report(name: str, ok: bool, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")


def test_filter_correctness(sec6):
    start = time.perf_counter()
    rng = np.random.default_rng(2024)
    n = 1000
    P0 = rng.dirichlet(np.ones(3), size=n)
    dts = rng.uniform(0.0, 1.5, size=n)
    closed = np.array([rl.propagate(rl.FilterState(0.0, P0[i], np.zeros(3, dtype=int)),
                                    float(dts[i]), sec6.prior).p for i in range(n)])
    oracle = rk4_filter_ode_batch(P0, sec6.prior.lambdas, dts, step=1e-3)
    residual = np.abs(closed - oracle).max()

    st = rl.FilterState(0.0, np.array([0.4, 0.4, 0.2]), np.zeros(3, dtype=int))
    jumped = rl.jump_update(st, rl.LineSet(1), sec6.prior).p
    jump_err = np.abs(jumped - np.array([0.8, 1.6, 1.0]) / 3.4).max()
    elapsed = time.perf_counter() - start

    ok = residual <= 1e-6 and jump_err <= 1e-12 and elapsed < 1.0
    _report("filter correctness", ok,
            f"ODE residual {residual:.2e} (<=1e-6), jump error {jump_err:.2e} (<=1e-12), {elapsed:.2f}s (<1s)")
    assert residual <= 1e-6
    assert jump_err <= 1e-12
    assert elapsed < 1.0


def test_martingale_property(sec6):
    start = time.perf_counter()
    n = 10_000
    pT = np.empty((n, 3))
    for i in range(n):
        sc = rl.draw_scenario(sec6.prior, sec6.dirichlet, sec6.claims, sec6.params,
                              rl.path_rng(123, i))
        pT[i] = rl.terminal_filter_state(sec6.prior, sec6.dirichlet, sc).p
    se = pT.std(axis=0, ddof=1) / math.sqrt(n)
    dev = np.abs(pT.mean(axis=0) - sec6.prior.pi)
    elapsed = time.perf_counter() - start
    ok = bool(np.all(dev <= 3 * se)) and elapsed < 30.0
    _report("filter martingale", ok,
            f"max |mean p_j(T) - pi_j| / SE = {(dev / se).max():.2f} (<=3), {elapsed:.1f}s (<30s)")
    assert np.all(dev <= 3 * se)
    assert elapsed < 30.0


def test_dirichlet_conjugacy(sec6):
    rng = np.random.default_rng(55)
    worst = 0.0
    for _ in range(1000):
        q = rng.integers(0, 200, size=3)
        st = rl.FilterState(0.0, sec6.prior.pi, q)
        got = rl.thinning_posterior_mean(st, sec6.dirichlet)
        total = (sec6.dirichlet.beta[0] + q[0]) + (sec6.dirichlet.beta[1] + q[1]) \
            + (sec6.dirichlet.beta[2] + q[2])
        expected = np.array([(sec6.dirichlet.beta[k] + q[k]) / total for k in range(3)])
        worst = max(worst, np.abs(got - expected).max())
    ok = worst == 0.0
    _report("dirichlet conjugacy", ok, f"max deviation {worst:.1e} over 1000 count vectors (exact)")
    assert worst == 0.0


def test_strategy_roots(unit_claim, sec6):
    b = rl.b_star_complete(unit_claim.claims, unit_claim.params, 0.5, 1.0, (1.0,))
    analytic_err = abs(b - 1.0)

    thetas = np.linspace(0.45, 3.0, 50)
    roots = []
    residual_ok = True
    worst_resid = 0.0
    for th in thetas:
        params = replace(sec6.params, theta=float(th))
        a = rl.solve_retention_root(sec6.claims, params, 1.0, 3.4, (0.40, 0.35, 0.25))
        roots.append(a)
        target = (1 + params.theta) * params.kappa
        resid = abs(rl.h_lambda_c(sec6.claims, params, 1.0, a, 3.4, (0.40, 0.35, 0.25)) - target)
        worst_resid = max(worst_resid, resid / target)
        residual_ok &= resid <= 1e-8 * target
    monotone = bool(np.all(np.diff(roots) > 0))

    ok = analytic_err <= 1e-10 and monotone and residual_ok
    _report("strategy roots", ok,
            f"analytic |b-1| = {analytic_err:.1e} (<=1e-10), theta-grid monotone: {monotone}, "
            f"max rel residual {worst_resid:.1e} (<=1e-8)")
    assert analytic_err <= 1e-10
    assert monotone
    assert residual_ok


def test_sandwich_property(sec6):
    start = time.perf_counter()
    rng = np.random.default_rng(99)
    ts = np.linspace(0.0, 10.0, 100)
    bounds = [rl.apriori_bounds(sec6.claims, sec6.params, sec6.prior, float(t)) for t in ts]
    violations = 0
    for _ in range(1000):
        p = rng.dirichlet(np.ones(3))
        q = rng.integers(0, 50, size=3)
        st = rl.FilterState(0.0, p, q)
        for t, (lower, upper) in zip(ts, bounds):
            ce = rl.certainty_equivalent_retention(*sec6.as_tuple(), float(t), st)
            violations += not (lower <= ce <= upper)
    elapsed = time.perf_counter() - start
    ok = violations == 0 and elapsed < 120.0
    _report("sandwich property", ok,
            f"{violations} violations over 100 x 1000 (t, p, q) (=0), {elapsed:.1f}s (<2min)")
    assert violations == 0
    assert elapsed < 120.0


def test_cramer_lundberg_consistency(unit_claim):
    params = replace(unit_claim.params, theta=0.9, eta=0.5)
    b_euler = rl.euler_retention_cramer_lundberg(unit_claim.claims, params, 1.0)
    worst = 0.0
    for t in np.linspace(0.0, params.horizon_T, 25):
        b_ci = rl.b_star_complete(unit_claim.claims, params, float(t), 1.0, (1.0,))
        worst = max(worst, abs(b_euler - b_ci))
    ok = worst <= 1e-10
    _report("cramer-lundberg consistency", ok, f"max |euler - complete-info| = {worst:.1e} (<=1e-10)")
    assert worst <= 1e-10


def test_surplus_integrator(sec6, golden):
    empty = rl.Scenario(4.0, PIN_ALPHA, (), np.random.SeedSequence(0), 0.0, 10.0)
    spec0 = rl.StrategySpec(retention="full", investment="constant", investment_value=0.0)
    rec = rl.simulate_path(empty, sec6.params, sec6.prior, sec6.dirichlet, sec6.claims,
                           spec0, dt_max=1e-4)
    closed = no_event_surplus(sec6.params, 0.0, 10.0)
    det_err = abs(rec.X[-1] - closed)

    spec = rl.StrategySpec(retention="constant", retention_value=0.5, investment="merton")
    delta = 1.0
    params_up = replace(sec6.params, x0=sec6.params.x0 + delta)
    factor = math.exp(-sec6.params.alpha * delta * math.exp(sec6.params.r * 10.0))
    worst_rel = 0.0
    for i in range(32):
        sc = rl.draw_scenario(sec6.prior, sec6.dirichlet, sec6.claims, sec6.params, rl.path_rng(17, i))
        r0 = rl.simulate_path(sc, sec6.params, sec6.prior, sec6.dirichlet, sec6.claims, spec, 0.01)
        r1 = rl.simulate_path(sc, params_up, sec6.prior, sec6.dirichlet, sec6.claims, spec, 0.01)
        worst_rel = max(worst_rel, abs(r1.terminal_utility - r0.terminal_utility * factor)
                        / abs(r0.terminal_utility * factor))

    ok = det_err <= 1e-3 and worst_rel <= 1e-9
    _report("surplus integrator", ok,
            f"no-event error {det_err:.1e} vs {closed:.3f} (<=1e-3 at dt=1e-4), "
            f"translation identity max rel err {worst_rel:.1e} (<=1e-9)")
    assert closed == pytest.approx(golden["surplus_no_events_XT"], abs=1e-9)
    assert det_err <= 1e-3
    assert worst_rel <= 1e-9


def test_g_structure(sec6):
    start = time.perf_counter()
    spec = rl.StrategySpec(retention="constant", retention_value=0.5, investment="merton")
    rng = np.random.default_rng(314)
    n = 10_000
    checks = []
    for trial in range(3):
        t = float(rng.uniform(0.0, 8.0))
        p = rng.dirichlet(np.ones(3))
        q = rng.integers(0, 6, size=3)
        seed = 1000 + trial

        m_p, se_p = rl.estimate_g(sec6.claims, sec6.params, sec6.prior, sec6.dirichlet,
                                  spec, t, p, q, n_paths=n, seed=seed)
        mix, var = 0.0, se_p**2
        for j in range(3):
            ej = np.zeros(3)
            ej[j] = 1.0
            m_j, se_j = rl.estimate_g(sec6.claims, sec6.params, sec6.prior, sec6.dirichlet,
                                      spec, t, ej, q, n_paths=n, seed=seed)
            mix += p[j] * m_j
            var += (p[j] * se_j) ** 2
        checks.append(("linearity", abs(m_p - mix), 3.0 * math.sqrt(var)))

        w = (sec6.dirichlet.beta + q) / (sec6.dirichlet.beta + q).sum()
        mix, var = 0.0, se_p**2
        for D in range(3):
            qD = q.copy()
            qD[D] += 1
            m_D, se_D = rl.estimate_g(sec6.claims, sec6.params, sec6.prior, sec6.dirichlet,
                                      spec, t, p, qD, n_paths=n, seed=seed)
            mix += w[D] * m_D
            var += (w[D] * se_D) ** 2
        checks.append(("dirichlet mixture", abs(m_p - mix), 3.0 * math.sqrt(var)))
    elapsed = time.perf_counter() - start
    ok = all(diff <= tol for _, diff, tol in checks) and elapsed < 180.0
    detail = ", ".join(f"{name} |diff|={diff:.2e} (<= {tol:.2e})" for name, diff, tol in checks[:2])
    _report("g-structure identities", ok, f"{detail} and 4 more, {elapsed:.0f}s (<3min)")
    for name, diff, tol in checks:
        assert diff <= tol, (name, diff, tol)
    assert elapsed < 180.0


def test_entropic_expansion():
    rng = np.random.default_rng(42)
    x = rng.standard_normal(1_000_000)
    alpha = 0.01
    got = rl.entropic_risk(x, alpha)
    expansion = x.mean() - 0.5 * alpha * x.var()
    err = abs(got - expansion)
    ok = err <= 1e-3
    _report("entropic expansion", ok, f"|entropic - (mean - a/2 var)| = {err:.1e} (<=1e-3 at n=1e6)")
    assert err <= 1e-3


def test_figure_shape_reproduction(tmp_path, golden):
    seed = str(golden["filter_demo_seed"])
    out = tmp_path / "figs"
    assert main(["filter-demo", "--config", PAPER_CONFIG, "--out", str(out), "--seed", seed]) == 0
    assert main(["bounds", "--config", PAPER_CONFIG, "--out", str(out), "--seed", seed,
                 "--grid", "200"]) == 0
    assert main(["surplus", "--config", PAPER_CONFIG, "--out", str(out), "--seed", seed]) == 0

    with open(out / "filter.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    p2_start, p2_end = float(rows[0]["p_2"]), float(rows[-1]["p_2"])
    filter_ok = p2_end > p2_start

    with open(out / "surplus_full_reinsurance.csv", newline="") as fh:
        srows = list(csv.DictReader(fh))
    X = np.array([float(r["X"]) for r in srows])
    jump_free = np.abs(np.diff(X)).max() < 0.1
    below_riskfree = X[-1] < 100.0 * math.exp(0.01 * 10.0)

    with open(out / "bounds.csv", newline="") as fh:
        brows = list(csv.DictReader(fh))
    sandwich_ok = all(float(r["apriori_lower"]) <= float(r[c]) <= float(r["apriori_upper"])
                      for r in brows for c in ("b_ce_1", "b_ce_2"))

    ok = filter_ok and jump_free and below_riskfree and sandwich_ok
    _report("figure shapes", ok,
            f"p_true {p2_start:.2f}->{p2_end:.2f} (grows), full-reinsurance jump-free: {jump_free}, "
            f"X_T {X[-1]:.2f} < x0 e^(rT) {100 * math.exp(0.1):.2f}, bounds sandwich: {sandwich_ok}")
    assert filter_ok
    assert jump_free
    assert below_riskfree
    assert sandwich_ok
