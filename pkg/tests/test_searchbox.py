"""Search-domain construction: profile slices, extents, strip walls."""

from __future__ import annotations

import math

import numpy as np
import pytest

from mvcheck import (
    DegenerateSlice,
    EmptyDomain,
    InvalidTolerance,
    build_domain,
    enumerate_outcomes,
    log_prob,
    from_logodds,
    slice_maximizer,
    superlevel_slice,
    superlevel_threshold,
    to_logodds,
)
from mvcheck.searchbox import slice_value

from _helpers import random_interior_probs


class TestThreshold:
    def test_value(self):
        assert superlevel_threshold(0.17, 1e-3, 45) == pytest.approx(0.169 / 45, rel=1e-15)

    def test_rejects_bad_margins(self):
        with pytest.raises(InvalidTolerance):
            superlevel_threshold(0.17, 0.0, 45)
        with pytest.raises(InvalidTolerance):
            superlevel_threshold(0.17, 0.17, 45)
        with pytest.raises(InvalidTolerance):
            superlevel_threshold(0.9, 0.2, 45)


class TestSliceValue:
    def test_matches_log_prob_at_assembled_point(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            counts = (2, 3, 1, 2)
            axis = int(rng.integers(3))
            fixed = tuple(rng.normal(0, 2, size=2))
            x = float(rng.normal(0, 2))
            u = list(fixed)
            u.insert(axis, x)
            expected = log_prob(counts, from_logodds(tuple(u)))
            assert slice_value(counts, axis, fixed, x) == pytest.approx(expected, abs=1e-9)


class TestSliceMaximizer:
    def test_is_a_local_maximum(self):
        rng = np.random.default_rng(5)
        for counts in [(2, 3, 3), (1, 6, 1), (4, 1, 3)]:
            for _ in range(20):
                axis = int(rng.integers(2))
                fixed = (float(rng.normal(0, 2)),)
                x_star = slice_maximizer(counts, axis, fixed)
                best = slice_value(counts, axis, fixed, x_star)
                for dx in (-1e-4, 1e-4, -0.5, 0.5):
                    assert slice_value(counts, axis, fixed, x_star + dx) <= best + 1e-12

    def test_degenerate_zero_count(self):
        with pytest.raises(DegenerateSlice):
            slice_maximizer((0, 5, 3), 0, (0.0,))

    def test_degenerate_full_count(self):
        with pytest.raises(DegenerateSlice):
            slice_maximizer((8, 0, 0), 0, (0.0,))


class TestSuperlevelSlice:
    def test_none_when_peak_below_threshold(self):
        counts = (2, 3, 3)
        peak = slice_value(counts, 0, (0.0,), slice_maximizer(counts, 0, (0.0,)))
        assert superlevel_slice(counts, 0, (0.0,), peak + 1.0) is None

    def test_encloses_the_exact_superlevel_set(self):
        rng = np.random.default_rng(7)
        counts = (3, 2, 3)
        for _ in range(30):
            fixed = (float(rng.normal(0, 1)),)
            x_star = slice_maximizer(counts, 0, fixed)
            peak = slice_value(counts, 0, fixed, x_star)
            log_t = peak - float(rng.uniform(0.1, 4.0))
            lo, hi = superlevel_slice(counts, 0, fixed, log_t)
            assert lo < x_star < hi
            # everything at level >= log_t lies inside [lo, hi]
            for x in np.linspace(x_star - 10, x_star + 10, 400):
                if slice_value(counts, 0, fixed, float(x)) >= log_t:
                    assert lo <= x <= hi
            # endpoints are genuinely outside: value below threshold just past them
            assert slice_value(counts, 0, fixed, lo - 1e-6) < log_t
            assert slice_value(counts, 0, fixed, hi + 1e-6) < log_t


class TestBuildDomain:
    def test_contains_certified_witness(self):
        from mvcheck import DecisionConfig, Verdict, decide_with_faces

        a, b = (1, 6, 1), (2, 1, 5)
        table = enumerate_outcomes(8, 3)
        domain = build_domain(a, b, 0.17, 1e-3, table)
        decision = decide_with_faces(a, b, DecisionConfig(alpha=0.17, tau=1e-3))
        assert decision.verdict is Verdict.INTERSECT
        # the witness passes both p-value thresholds, so it passes both
        # universal-bound constraints and must lie inside the box
        assert domain.contains(to_logodds(decision.witness))

    def test_every_qualifying_point_lies_inside(self):
        rng = np.random.default_rng(11)
        table = enumerate_outcomes(8, 3)
        a, b = (1, 6, 1), (2, 1, 5)
        alpha, tau = 0.17, 1e-3
        domain = build_domain(a, b, alpha, tau, table)
        log_t = math.log(superlevel_threshold(alpha, tau, table.m))
        hits = 0
        for _ in range(3000):
            p = random_interior_probs(rng, 3)
            if log_prob(a, p) >= log_t and log_prob(b, p) >= log_t:
                hits += 1
                assert domain.contains(to_logodds(p))
        assert hits > 50  # the sweep actually exercised the domain

    def test_points_outside_fail_some_constraint(self):
        table = enumerate_outcomes(8, 3)
        a, b = (1, 6, 1), (2, 1, 5)
        domain = build_domain(a, b, 0.17, 1e-3, table)
        log_t = math.log(domain.threshold)
        rng = np.random.default_rng(13)
        # sample just outside each box wall: the violated axis makes one of
        # the two profile constraints fail
        for axis in range(2):
            for side, offset in ((0, -0.5), (1, 0.5)):
                wall = (domain.lows, domain.highs)[side][axis]
                for _ in range(20):
                    u = [float(rng.uniform(domain.lows[i], domain.highs[i])) for i in range(2)]
                    u[axis] = wall + offset
                    p = from_logodds(tuple(u))
                    assert min(log_prob(a, p), log_prob(b, p)) < log_t

    def test_empty_domain_for_far_apart_binomials(self):
        table = enumerate_outcomes(8, 2)
        with pytest.raises(EmptyDomain):
            build_domain((8, 0), (0, 8), 0.05, 1e-3, table)

    def test_rejects_unsupported_reference(self):
        table = enumerate_outcomes(4, 3)
        with pytest.raises(ValueError):
            build_domain((2, 2, 0), (3, 1, 0), 0.17, 1e-3, table)

    def test_jointly_zero_axis_gets_the_strip_wall(self):
        table = enumerate_outcomes(6, 3)
        a, b = (0, 5, 1), (0, 4, 2)
        tau = 1e-3
        domain = build_domain(a, b, 0.17, tau, table)
        wall = math.log(tau) - math.log(2.0 * 6 * (3 + 1) ** 2)
        assert domain.lows[0] == pytest.approx(wall, abs=1e-5)
        assert math.isfinite(domain.highs[0])

    def test_one_sided_zero_axis_is_finite_via_the_other_outcome(self):
        table = enumerate_outcomes(6, 3)
        # category 0 observed only in b; the domain must still be a box
        domain = build_domain((0, 5, 1), (2, 2, 2), 0.17, 1e-3, table)
        assert all(math.isfinite(lo) for lo in domain.lows)
        assert all(math.isfinite(hi) for hi in domain.highs)
        assert all(lo < hi for lo, hi in zip(domain.lows, domain.highs))
