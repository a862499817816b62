import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import linprog

from mixagg import DomainError, square_loss, square_substitution
from mixagg.oracle import (
    check_holder,
    check_mixability,
    discrete_ot_bruteforce,
    discrete_ot_lp,
    mc_integrate,
    search_square_loss_violation,
    transportation_simplex,
)


class TestMixabilityCheck:
    def test_sole_expert_is_equality(self):
        res = check_mixability(square_loss, 0.3, [0.3], [1.0], 2.0, np.linspace(0, 1, 11))
        assert res.passed and res.worst_slack == 0.0

    def test_substitution_passes(self):
        rng = np.random.default_rng(0)
        g, w = rng.uniform(0, 1, 4), rng.dirichlet(np.ones(4))
        assert check_mixability(square_loss, square_substitution(g, w), g, w, 2.0, np.linspace(0, 1, 1000)).passed

    def test_reports_worst_outcome(self):
        res = check_mixability(square_loss, 0.5, [0.0, 1.0], [0.5, 0.5], 8.0, [0.0, 0.5, 1.0])
        assert not res.passed and res.worst_outcome in (0, 2)

    def test_empty_outcome_set(self):
        assert check_mixability(square_loss, 0.5, [0.5], [1.0], 1.0, []).passed

    def test_json(self):
        res = check_mixability(square_loss, 0.5, [0.5], [1.0], 1.0, [0.1])
        assert json.loads(res.to_json())["passed"] is True


class TestHolder:
    def test_constant_is_equality(self):
        r = check_holder(np.full((3, 4), 2.5), [0.2, 0.3, 0.5], np.ones(4), np.full(4, 0.25))
        assert r.gap == pytest.approx(0.0, abs=1e-14)

    def test_single_y_is_equality(self):
        rng = np.random.default_rng(1)
        r = check_holder(rng.uniform(0.1, 2, (5, 1)), rng.dirichlet(np.ones(5)), [1.3], [0.7])
        assert r.gap == pytest.approx(0.0, abs=1e-13)

    @given(st.integers(0, 2**32 - 1))
    def test_random_instances(self, seed):
        rng = np.random.default_rng(seed)
        f = np.exp(rng.normal(0, 2, (16, 16)))
        r = check_holder(f, rng.dirichlet(np.ones(16)), rng.uniform(0, 2, 16), rng.dirichlet(np.ones(16)))
        assert r.passed

    def test_rejects_nonpositive(self):
        with pytest.raises(DomainError):
            check_holder([[1.0, 0.0]], [1.0], [1, 1], [1, 1])


class TestBruteForce:
    def test_examples(self):
        assert discrete_ot_bruteforce([0.2, 0.5, 0.9], [0.2, 0.5, 0.9]) == 0
        assert discrete_ot_bruteforce([0, 1], [0, 1]) == 0
        assert discrete_ot_bruteforce([0, 1], [1, 0]) == 0

    def test_sorted_matching(self):
        rng = np.random.default_rng(2)
        for n in range(1, 9):
            xs, ys = rng.normal(size=n), rng.normal(size=n)
            assert discrete_ot_bruteforce(xs, ys) == pytest.approx(np.mean((np.sort(xs) - np.sort(ys)) ** 2), abs=1e-12)

    def test_size_limit(self):
        with pytest.raises(DomainError):
            discrete_ot_bruteforce(np.zeros(9), np.zeros(9))


class TestLP:
    def test_examples(self):
        assert discrete_ot_lp([0.1, 0.4], [0.3, 0.7], [0.1, 0.4], [0.3, 0.7]) == pytest.approx(0.0, abs=1e-15)
        assert discrete_ot_lp([0.0, 1.0], [0.25, 0.75], [0.5], [1.0]) == pytest.approx(0.25)

    def test_matches_bruteforce_on_equal_weights(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            n = int(rng.integers(1, 8))
            xs, ys = rng.uniform(0, 1, n), rng.uniform(0, 1, n)
            u = np.full(n, 1 / n)
            v = discrete_ot_lp(xs, u, ys, u)
            assert v >= 0 and v == pytest.approx(discrete_ot_bruteforce(xs, ys), abs=1e-10)

    def test_matches_scipy_linprog(self):
        rng = np.random.default_rng(4)
        for _ in range(50):
            m, n = int(rng.integers(1, 10)), int(rng.integers(1, 10))
            a, b = rng.dirichlet(np.ones(m)), rng.dirichlet(np.ones(n))
            C = rng.uniform(0, 1, (m, n))
            A = np.zeros((m + n, m * n))
            for i in range(m):
                A[i, i * n : (i + 1) * n] = 1
            for j in range(n):
                A[m + j, j::n] = 1
            ref = linprog(C.ravel(), A_eq=A, b_eq=np.concatenate([a, b]), bounds=(0, None), method="highs").fun
            cost, plan = transportation_simplex(a, b, C)
            assert cost == pytest.approx(ref, abs=1e-10)
            np.testing.assert_allclose(plan.sum(axis=1), a, atol=1e-12)
            np.testing.assert_allclose(plan.sum(axis=0), b, atol=1e-12)

    def test_degenerate_marginals(self):
        cost, _ = transportation_simplex([0.5, 0.5], [0.5, 0.5], np.array([[1.0, 0.0], [0.0, 1.0]]))
        assert cost == pytest.approx(0.0)

    def test_rejects_bad_weights(self):
        with pytest.raises(DomainError):
            discrete_ot_lp([0, 1], [0.5, 0.6], [0], [1.0])


class TestMonteCarlo:
    def test_constant(self):
        r = mc_integrate(lambda x: np.full(len(x), 3.0), 100)
        assert r.estimate == 3.0 and r.std_error == 0.0

    def test_coordinate_square_on_circle(self):
        r = mc_integrate(lambda x: x[:, 0] ** 2, 100_000, seed=1, dim=2)
        assert abs(r.estimate - 0.5) <= 3 * r.std_error

    def test_hemisphere(self):
        r = mc_integrate(lambda x: (x[:, 2] > 0).astype(float), 100_000, seed=2, dim=3)
        assert abs(r.estimate - 0.5) <= 3 * r.std_error

    def test_deterministic(self):
        f = lambda x: x[:, 0]  # noqa: E731
        assert mc_integrate(f, 1000, seed=5).to_dict() == mc_integrate(f, 1000, seed=5).to_dict()

    def test_needs_two_samples(self):
        with pytest.raises(DomainError):
            mc_integrate(lambda x: x[:, 0], 1)


class TestViolationSearch:
    def test_finds_violation_above_rate(self):
        r = search_square_loss_violation(8.0, trials=2000, outcome_points=200, candidate_points=401, seed=0)
        assert r.found and r.note == "certified violation"
        # independent recheck of the reported instance on a finer candidate grid
        g, w = np.array(r.forecasts), np.array(r.weights)
        om = np.linspace(0, 1, 2001)
        cand = np.linspace(0, 1, 4001)
        rhs = w @ np.exp(-8 * (g[:, None] - om[None, :]) ** 2)
        best = max((np.exp(-8 * (c - om) ** 2) - rhs).min() for c in cand)
        assert best < 0

    def test_reports_absence_at_rate(self):
        r = search_square_loss_violation(2.0, trials=200, outcome_points=200, candidate_points=401, seed=0)
        assert not r.found and r.trials_used == 200 and "no violation" in r.note
