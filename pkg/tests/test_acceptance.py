"""Acceptance suite: the seven release criteria, one test per criterion.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one summary line
per criterion. Every tolerance is pinned in the assertion that enforces it.
"""

from __future__ import annotations

import math
import time

import numpy as np

from mvcheck import (
    DecisionConfig,
    EmptyDomain,
    Verdict,
    VertexProbCache,
    build_domain,
    chisq_quantile,
    decide_with_faces,
    enumerate_outcomes,
    exact_p_value,
    from_logodds,
    grid_log_probs,
    halfspace_for,
    log_prob,
    oracle_max_min_pvalue,
    plan_faces,
    pvalue_interval,
    simplex_centroid_grid,
    to_logodds,
    vertex_min_prob,
    wilks_intersect,
)

from _helpers import (
    random_cell,
    random_interior_probs,
    random_outcome,
    random_point_in_cell,
)

OVERLAP_A, OVERLAP_B = (1, 6, 1), (2, 1, 5)
ALPHA_GRID = (0.05, 0.1, 0.17, 0.3)


def test_criterion_1_asymptotic_exact_disagreement():
    started = time.perf_counter()
    alpha = 0.17

    asymptotic = wilks_intersect(OVERLAP_A, OVERLAP_B, alpha, resolution=400)
    assert asymptotic is False, "chi-square regions must not overlap at alpha=0.17"

    margin_star = oracle_max_min_pvalue(OVERLAP_A, OVERLAP_B, 500)
    tau = 1e-3
    assert tau <= (margin_star - alpha) / 2.0, (
        f"margin tau={tau} is not safely below the oracle margin "
        f"(M*={margin_star:.6f}, limit={(margin_star - alpha) / 2.0:.6f})")

    decision = decide_with_faces(OVERLAP_A, OVERLAP_B,
                                 DecisionConfig(alpha=alpha, tau=tau, epsilon=1e-3))
    assert decision.verdict is Verdict.INTERSECT, f"expected INTERSECT, got {decision.verdict}"

    elapsed = time.perf_counter() - started
    assert elapsed < 30.0, f"criterion 1 must finish within 30s, took {elapsed:.1f}s"
    print(f"\n[PASS] criterion 1: chi-square disjoint, exact INTERSECT; "
          f"M*={margin_star:.6f}, tau={tau} <= {(margin_star - alpha) / 2.0:.6f}, "
          f"{elapsed:.1f}s")


def test_criterion_2_soundness_sweep_against_oracle():
    started = time.perf_counter()
    rng = np.random.default_rng(20260816)
    config_by_alpha = {a: DecisionConfig(alpha=a, tau=1e-3, epsilon=1e-3)
                       for a in ALPHA_GRID}
    tables = {}
    contradictions = []
    uncertain = 0
    verdicts = {Verdict.INTERSECT: 0, Verdict.DISJOINT: 0, Verdict.UNCERTAIN: 0}

    for index in range(300):
        n = int(rng.integers(1, 9))
        k = int(rng.choice((2, 3)))
        alpha = float(rng.choice(ALPHA_GRID))
        table = tables.setdefault((n, k), enumerate_outcomes(n, k))
        a, b = random_outcome(rng, table), random_outcome(rng, table)

        decision = decide_with_faces(a, b, config_by_alpha[alpha])
        verdicts[decision.verdict] += 1
        if decision.verdict is Verdict.UNCERTAIN:
            uncertain += 1
            continue
        reference = oracle_max_min_pvalue(a, b, 300, table=table)
        if decision.verdict is Verdict.INTERSECT and not reference >= alpha:
            contradictions.append((index, a, b, alpha, "INTERSECT", reference))
        if decision.verdict is Verdict.DISJOINT and not reference < alpha:
            contradictions.append((index, a, b, alpha, "DISJOINT", reference))

    elapsed = time.perf_counter() - started
    assert not contradictions, f"verdicts contradicting the oracle: {contradictions}"
    assert elapsed < 600.0, f"criterion 2 must finish within 10min, took {elapsed:.0f}s"
    print(f"\n[PASS] criterion 2: 300 instances, 0 contradictions; "
          f"intersect={verdicts[Verdict.INTERSECT]}, disjoint={verdicts[Verdict.DISJOINT]}, "
          f"uncertain rate={uncertain / 300:.3f}, {elapsed:.0f}s")


def test_criterion_3_interval_containment():
    rng = np.random.default_rng(3001)
    violations = 0
    checked = 0
    tables = {}
    caches = {}
    for _ in range(1000):
        n = int(rng.integers(2, 7))
        k = int(rng.choice((2, 3)))
        table = tables.setdefault((n, k), enumerate_outcomes(n, k))
        cache = caches.setdefault((n, k), VertexProbCache(table))
        cell = random_cell(rng, k - 1)
        for _ in range(10):
            r_hat = random_outcome(rng, table)
            interval = pvalue_interval(cell, r_hat, table, cache)
            point = random_point_in_cell(rng, cell)
            pv = exact_p_value(r_hat, from_logodds(point), table)
            checked += 1
            if not (interval.lower - 1e-9 <= pv <= interval.upper + 1e-9):
                violations += 1
    assert checked == 10_000
    assert violations == 0, f"{violations} containment violations in {checked} triples"
    print(f"\n[PASS] criterion 3: {checked} (cell, point, outcome) triples contained, "
          f"slack 1e-9, 0 violations")


def test_criterion_4_certified_bound_inequalities():
    rng = np.random.default_rng(4001)
    tables = {}

    # tail halfspace sign equivalence: g equals the log-probability gap
    for _ in range(1000):
        n = int(rng.integers(2, 9))
        k = int(rng.choice((2, 3, 4)))
        table = tables.setdefault((n, k), enumerate_outcomes(n, k))
        r, r_hat = random_outcome(rng, table), random_outcome(rng, table)
        p = random_interior_probs(rng, k)
        gap = log_prob(r, p) - log_prob(r_hat, p)
        g = halfspace_for(r, r_hat).value(to_logodds(p))
        assert abs(g - gap) <= 1e-9, f"sign functional off by {abs(g - gap)!r}"

    # universal bound: p-value never exceeds m times the outcome probability
    for _ in range(1000):
        n = int(rng.integers(1, 9))
        k = int(rng.choice((2, 3)))
        table = tables.setdefault((n, k), enumerate_outcomes(n, k))
        r_hat = random_outcome(rng, table)
        p = list(random_interior_probs(rng, k))
        if rng.random() < 0.2:
            p[int(rng.integers(k))] = 0.0
            total = sum(p)
            p = [x / total for x in p]
        pv = exact_p_value(r_hat, tuple(p), table)
        ceiling = table.m * math.exp(log_prob(r_hat, tuple(p)))
        assert pv <= ceiling + 1e-12, f"p-value {pv} above m*P {ceiling}"

    # vertex minimum bounds the probability everywhere inside the cell
    caches = {}
    for _ in range(1000):
        n = int(rng.integers(2, 6))
        k = int(rng.choice((2, 3)))
        table = tables.setdefault((n, k), enumerate_outcomes(n, k))
        cache = caches.setdefault((n, k), VertexProbCache(table))
        cell = random_cell(rng, k - 1)
        r = random_outcome(rng, table)
        floor = vertex_min_prob(cell, r, table, cache)
        for _ in range(20):
            inside = math.exp(log_prob(r, from_logodds(random_point_in_cell(rng, cell))))
            assert floor <= inside + 1e-12, f"vertex min {floor} above interior value {inside}"

    # bisection refines intervals monotonically
    table = tables.setdefault((6, 3), enumerate_outcomes(6, 3))
    cache = VertexProbCache(table)
    for _ in range(100):
        cell = random_cell(rng, 2)
        r_hat = random_outcome(rng, table)
        parent = pvalue_interval(cell, r_hat, table, cache)
        for _ in range(10):
            cell = cell.bisect()[int(rng.integers(2))]
            child = pvalue_interval(cell, r_hat, table, cache)
            assert child.lower >= parent.lower - 1e-12, "lower bound regressed"
            assert child.upper <= parent.upper + 1e-12, "upper bound regressed"
            parent = child

    print("\n[PASS] criterion 4: sign equivalence (1000), universal bound (1000), "
          "vertex-min dominance (1000x20), refinement monotonicity (100x10); 0 violations")


def test_criterion_5_face_decomposition_fixtures():
    plan = plan_faces((3, 2, 0, 0), (4, 1, 0, 0))
    dropped = [face.dropped for face in plan.faces]
    assert dropped == [(), (2,), (3,), (2, 3)], f"unexpected face set {dropped}"

    pv = exact_p_value((2, 2, 1), (0.5, 0.5, 0.0))
    assert pv == 0.0, f"impossible observed outcome must give exactly 0.0, got {pv!r}"
    print("\n[PASS] criterion 5: face plan {(), (2,), (3,), (2,3)}; "
          "zero-count exclusion p-value == 0.0 exactly")


def test_criterion_6_search_domain_containment():
    rng = np.random.default_rng(6001)
    tables = {}
    grids = {}
    checked_points = 0
    empty_domains = 0
    violations = []

    for index in range(500):
        n = int(rng.integers(1, 9))
        k = int(rng.choice((2, 3)))
        alpha = float(rng.choice(ALPHA_GRID))
        tau = 1e-3
        table = tables.setdefault((n, k), enumerate_outcomes(n, k))
        while True:
            a, b = random_outcome(rng, table), random_outcome(rng, table)
            if a[-1] > 0 or b[-1] > 0:
                break

        grid = grids.setdefault(k, simplex_centroid_grid(k, 40))
        log_probs_a = grid_log_probs(table, grid)[:, table.index_of(a)]
        log_probs_b = grid_log_probs(table, grid)[:, table.index_of(b)]
        log_t = math.log((alpha - tau) / table.m)
        passing = (log_probs_a >= log_t) & (log_probs_b >= log_t)

        try:
            domain = build_domain(a, b, alpha, tau, table)
        except EmptyDomain:
            empty_domains += 1
            if passing.any():
                violations.append((index, a, b, alpha, "empty domain excludes passing points"))
            continue

        for row in grid[passing]:
            checked_points += 1
            if not domain.contains(to_logodds(tuple(row))):
                violations.append((index, a, b, alpha, tuple(row)))

    assert not violations, f"points escaping the search box: {violations[:5]}"
    print(f"\n[PASS] criterion 6: 500 instances, {checked_points} qualifying grid points "
          f"all inside their box ({empty_domains} provably empty domains), 0 violations")


def test_criterion_7_hand_computed_values():
    pv_uniform = exact_p_value((1, 1), (0.5, 0.5))
    assert abs(pv_uniform - 1.0) <= 1e-12, f"expected 1.0, got {pv_uniform!r}"
    pv_corner = exact_p_value((2, 0), (0.5, 0.5))
    assert abs(pv_corner - 0.5) <= 1e-12, f"expected 0.5, got {pv_corner!r}"

    assert enumerate_outcomes(8, 3).m == 45

    # quantile for 2 degrees of freedom at 0.83 has the closed form -2 log 0.17
    closed_form = -2.0 * math.log(0.17)
    quantile = chisq_quantile(2, 0.83)
    assert abs(quantile - 3.543914) <= 1e-4, f"quantile {quantile!r} off the pinned value"
    assert abs(quantile - closed_form) <= 1e-9, f"quantile {quantile!r} vs closed form {closed_form!r}"

    print(f"\n[PASS] criterion 7: p-values (1.0, 0.5) exact to 1e-12; m=45; "
          f"chisq_quantile(2, 0.83)={quantile:.9f} matches -2*log(0.17) to 1e-9")
