import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mixagg import BoundedInterval, DomainError, EtaRate, InfiniteLossError, square_loss, square_substitution
from mixagg.oracle import check_mixability
from mixagg.pointwise import (
    complex_square_loss,
    complex_square_substitution,
    expconcavity_hessian_check,
    log_loss,
    log_substitution,
)

# Value of the square-loss substitution for forecasts {0.2, 0.8}, weights
# (0.3, 0.7) on [0, 1], computed independently from the generalized-prediction
# form (l + r)/2 + (g(l) - g(r)) / (2 (r - l)).
SQUARE_SUB_EXAMPLE = 0.6091094606576342
COMPLEX_SUB_EXAMPLE = complex(0.0848089734806359, 0.28817111969786424)


def _generalized_prediction_substitution(g, w, l, r):
    eta = 2.0 / (r - l) ** 2

    def gen(om):
        return -math.log(sum(wi * math.exp(-eta * (gi - om) ** 2) for wi, gi in zip(w, g))) / eta

    return 0.5 * (l + r) + (gen(l) - gen(r)) / (2.0 * (r - l))


pools = st.integers(1, 6).flatmap(
    lambda n: st.tuples(st.lists(st.floats(0, 1), min_size=n, max_size=n), st.lists(st.floats(0.01, 1), min_size=n, max_size=n))
)


class TestInterval:
    def test_rejects_empty(self):
        with pytest.raises(DomainError):
            BoundedInterval(1.0, 1.0)

    def test_eta_rate_ordering(self):
        with pytest.raises(DomainError):
            EtaRate(1.0, 2.0)
        assert EtaRate(2.0, 0.5).for_mode("expconcave") == 0.5


class TestSquareLoss:
    @pytest.mark.parametrize("g,o,v", [(0.5, 0.5, 0.0), (0, 1, 1.0), (0.3, 0.7, 0.16)])
    def test_examples(self, g, o, v):
        assert square_loss(g, o, (0, 1)) == pytest.approx(v, abs=1e-15)

    def test_rejects_outside(self):
        with pytest.raises(DomainError):
            square_loss(1.5, 0.0, (0, 1))


class TestSquareSubstitution:
    def test_single_expert(self):
        assert square_substitution([0.37], [1.0]) == pytest.approx(0.37, abs=1e-15)

    def test_symmetric_pair(self):
        assert square_substitution([0.2, 0.8], [0.5, 0.5]) == pytest.approx(0.5, abs=1e-15)
        assert square_substitution([-1.0, 3.0], [0.5, 0.5], (-1, 3)) == pytest.approx(1.0, abs=1e-15)

    def test_frozen_example(self):
        v = square_substitution([0.2, 0.8], [0.3, 0.7], (0, 1))
        assert v == pytest.approx(SQUARE_SUB_EXAMPLE, abs=1e-14)
        assert v == pytest.approx(_generalized_prediction_substitution([0.2, 0.8], [0.3, 0.7], 0, 1), abs=1e-14)
        res = check_mixability(square_loss, v, [0.2, 0.8], [0.3, 0.7], 2.0, np.linspace(0, 1, 1000))
        assert res.passed and res.worst_slack >= -1e-10

    @given(pools)
    def test_matches_generalized_prediction_form(self, pool):
        g, raw = pool
        w = np.array(raw) / sum(raw)
        assert square_substitution(g, w) == pytest.approx(_generalized_prediction_substitution(g, w, 0, 1), abs=1e-12)

    def test_mixable_on_random_instances(self):
        rng = np.random.default_rng(1)
        om = np.linspace(0, 1, 1000)
        worst = np.inf
        for _ in range(10_000):
            n = int(rng.integers(1, 6))
            g = rng.uniform(0, 1, n)
            w = rng.dirichlet(np.ones(n))
            v = square_substitution(g, w)
            lhs = np.exp(-2 * (v - om) ** 2)
            rhs = w @ np.exp(-2 * (g[:, None] - om[None, :]) ** 2)
            worst = min(worst, (lhs - rhs).min())
        assert worst >= -1e-10

    def test_elementwise_over_trailing_axes(self):
        f = np.array([[0.1, 0.9], [0.3, 0.2]])
        out = square_substitution(f, [0.4, 0.6])
        assert out[0] == pytest.approx(square_substitution([0.1, 0.3], [0.4, 0.6]))
        assert out[1] == pytest.approx(square_substitution([0.9, 0.2], [0.4, 0.6]))

    def test_rejects_forecasts_outside(self):
        with pytest.raises(DomainError):
            square_substitution([1.2], [1.0])

    def test_extreme_weights_stay_finite(self):
        assert 0 <= square_substitution([0.0, 1.0], [1 - 1e-300, 1e-300]) <= 1


class TestLogLoss:
    def test_examples(self):
        assert log_loss([1.0, 0.0, 0.0], 0) == 0.0
        assert log_loss([0.25] * 4, 2) == pytest.approx(math.log(4))
        assert log_loss([0.1, 0.9], 0) == pytest.approx(2.302585092994046)

    def test_zero_probability_signals(self):
        with pytest.raises(InfiniteLossError):
            log_loss([1.0, 0.0], 1)

    def test_substitution_examples(self):
        np.testing.assert_allclose(log_substitution([[1, 0], [0, 1]], [0.25, 0.75]), [0.25, 0.75])
        np.testing.assert_allclose(log_substitution([[0.3, 0.7]], [1.0]), [0.3, 0.7])
        np.testing.assert_allclose(log_substitution([[0.3, 0.7], [0.3, 0.7]], [0.5, 0.5]), [0.3, 0.7])

    def test_substitution_is_one_mixable(self):
        rng = np.random.default_rng(2)
        for _ in range(10_000):
            n, k = int(rng.integers(1, 5)), int(rng.integers(2, 6))
            g = rng.dirichlet(np.ones(k), n)
            w = rng.dirichlet(np.ones(n))
            gbar = log_substitution(g, w)
            # exp(-log p) = p, so the inequality is an identity in each outcome
            np.testing.assert_allclose(gbar, w @ g, atol=1e-15)
            res = check_mixability(log_loss, gbar, list(g), w, 1.0, list(range(k)), tol=1e-12)
            assert res.passed


class TestComplexSquare:
    def test_examples(self):
        assert complex_square_loss(0.3j, 0.3j) == 0
        assert complex_square_loss(1, -1) == pytest.approx(4)
        assert complex_square_loss(1j, 1) == pytest.approx(2)

    def test_rejects_outside_disc(self):
        with pytest.raises(DomainError):
            complex_square_loss(1 + 1j, 0)

    def test_substitution_examples(self):
        assert complex_square_substitution([0.2 - 0.4j], [1.0]) == pytest.approx(0.2 - 0.4j, abs=1e-15)
        assert abs(complex_square_substitution([0.5 + 0.5j, -0.5 - 0.5j], [0.5, 0.5])) < 1e-15
        v = complex_square_substitution([0.5 + 0.5j, -0.3 + 0.1j], [0.5, 0.5])
        assert v == pytest.approx(COMPLEX_SUB_EXAMPLE, abs=1e-14)
        x = np.linspace(-1, 1, 64)
        grid = (x[:, None] + 1j * x[None, :]).ravel()
        disc = grid[np.abs(grid) <= 1]
        res = check_mixability(complex_square_loss, v, [0.5 + 0.5j, -0.3 + 0.1j], [0.5, 0.5], 0.25, disc)
        assert res.passed

    def test_mixable_on_disc_grid(self):
        rng = np.random.default_rng(3)
        x = np.linspace(-1, 1, 64)
        grid = (x[:, None] + 1j * x[None, :]).ravel()
        om = grid[np.abs(grid) <= 1]
        worst = np.inf
        for _ in range(1000):
            n = int(rng.integers(1, 5))
            z = rng.uniform(-1, 1, n) + 1j * rng.uniform(-1, 1, n)
            w = rng.dirichlet(np.ones(n))
            v = complex_square_substitution(z, w)
            lhs = np.exp(-0.25 * np.abs(v - om) ** 2)
            rhs = w @ np.exp(-0.25 * np.abs(z[:, None] - om[None, :]) ** 2)
            worst = min(worst, (lhs - rhs).min())
        assert worst >= -1e-10


class TestHessianCheck:
    @given(st.floats(0, 1), st.floats(0, 1))
    def test_square_expconcave_at_half(self, g, o):
        assert expconcavity_hessian_check(square_loss, 0.5, g, o)

    def test_square_fails_at_large_rate(self):
        assert not expconcavity_hessian_check(square_loss, 10.0, 0.0, 1.0)

    def test_complex_square_at_one_eighth(self):
        rng = np.random.default_rng(4)
        for _ in range(200):
            r, th = np.sqrt(rng.uniform(0, 1, 2)), rng.uniform(0, 2 * np.pi, 2)
            z, z2 = r * np.exp(1j * th)
            loss = lambda a, b: float(abs(a - b) ** 2)  # noqa: E731
            assert expconcavity_hessian_check(loss, 1 / 8, complex(z), complex(z2))

    def test_agrees_with_midpoint_concavity(self):
        rng = np.random.default_rng(5)
        for eta in (0.5, 10.0):
            for _ in range(20):
                o = rng.uniform(0, 1)
                g = rng.uniform(0.05, 0.95)
                verdict = expconcavity_hessian_check(square_loss, eta, g, o)
                f = lambda x: math.exp(-eta * (x - o) ** 2)  # noqa: E731
                concave = True
                for _ in range(100):
                    h = rng.uniform(0, min(g, 1 - g, 0.05))
                    if f(g) < 0.5 * (f(g - h) + f(g + h)) - 1e-8:
                        concave = False
                if verdict:
                    assert concave
