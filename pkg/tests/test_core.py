import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mixagg import (
    DensityGrid,
    DomainError,
    GridDistribution1D,
    ParticleDistributionND,
    QuantileGrid1D,
    as_weights,
    make_density,
    make_dirac,
    make_empirical,
    make_probabilities,
    make_uniform,
    uniform_weights,
)
from mixagg.core import tensor_cdf_from_particles, tensor_cdf_product

unit = st.floats(0.0, 1.0, allow_nan=False)


def empirical_strategy():
    return st.lists(st.tuples(unit, st.floats(0.01, 1.0)), min_size=1, max_size=8).map(
        lambda pairs: make_empirical(
            [p[0] for p in pairs], np.array([p[1] for p in pairs]) / sum(p[1] for p in pairs), domain=(0, 1)
        )
    )


def _linear_cdf(increments):
    cdf = np.concatenate(([0.0], np.cumsum(increments)))
    return GridDistribution1D(np.linspace(0, 1, cdf.size), cdf / cdf[-1], "linear")


def smooth_strategy():
    return st.lists(st.floats(0.0, 1.0), min_size=3, max_size=12).filter(lambda inc: sum(inc) > 1e-6).map(_linear_cdf)


class TestDirac:
    def test_left_endpoint_is_one_everywhere(self):
        d = make_dirac(0.0, (0, 1))
        assert np.all(d.cdf == 1.0)

    def test_right_endpoint_jumps_at_last_point(self):
        d = make_dirac(1.0, (0, 1))
        assert np.all(d.cdf[:-1] == 0.0) and d.cdf[-1] == 1.0

    def test_interior_step_on_given_grid(self):
        d = make_dirac(0.5, (0, 1), grid=[0, 0.25, 0.5, 0.75, 1])
        np.testing.assert_array_equal(d.grid, [0, 0.25, 0.5, 0.75, 1])
        np.testing.assert_array_equal(d.cdf, [0, 0, 1, 1, 1])

    def test_outside_domain_raises(self):
        with pytest.raises(DomainError):
            make_dirac(1.5, (0, 1))

    @given(st.floats(0.0, 1.0), st.floats(1e-9, 1.0))
    def test_quantile_is_the_atom(self, x, t):
        d = make_dirac(x, (0, 1), n=16)
        assert d.quantile_at(t) == x


class TestEvaluation:
    def test_uniform_cdf_is_identity(self):
        u = make_uniform((0, 1))
        assert u.cdf_at(0.5) == pytest.approx(0.5)
        assert u.cdf_at(-0.1) == 0.0
        assert u.cdf_at(1.0) == 1.0 and u.cdf_at(2.0) == 1.0

    def test_uniform_quantile(self):
        assert make_uniform((0, 1)).quantile_at(0.25) == pytest.approx(0.25, abs=1e-12)

    def test_empirical_median_takes_infimum(self):
        e = make_empirical([0.1, 0.9], domain=(0, 1))
        assert e.quantile_at(0.5) == 0.1
        # linear scan over a fine grid agrees with the infimum definition
        xs = np.linspace(0, 1, 100001)
        assert xs[np.argmax(e.cdf_at(xs) >= 0.5)] == pytest.approx(0.1, abs=1e-5)

    def test_step_is_right_continuous(self):
        e = make_empirical([0.4], domain=(0, 1))
        assert e.cdf_at(0.4) == 1.0
        assert e.cdf_left_limit(0.4) == 0.0

    def test_quantile_rejects_levels_outside_unit_interval(self):
        with pytest.raises(DomainError):
            make_uniform((0, 1)).quantile_at(1.5)

    def test_mean_of_uniform_and_dirac(self):
        assert make_uniform((0, 2)).mean() == pytest.approx(1.0)
        assert make_dirac(0.3, (0, 1), n=8).mean() == pytest.approx(0.3)


class TestQuantileProperties:
    @given(empirical_strategy())
    def test_round_trip_step(self, d):
        t = np.linspace(1e-3, 1, 1000)
        assert np.all(d.cdf_at(d.quantile_at(t)) >= t - 1e-12)

    @given(smooth_strategy())
    def test_round_trip_linear(self, d):
        t = np.linspace(1e-3, 1, 1000)
        assert np.all(d.cdf_at(d.quantile_at(t)) >= t)

    @given(empirical_strategy())
    def test_quantile_nondecreasing(self, d):
        q = d.quantile_at(np.sort(np.random.default_rng(0).uniform(0, 1, 1000)))
        assert np.all(np.diff(q) >= 0)

    @given(empirical_strategy())
    def test_step_quantile_table_is_exact(self, d):
        table = d.to_quantile_grid()
        t = np.linspace(1e-3, 1, 500)
        np.testing.assert_array_equal(table.quantile_at(t), d.quantile_at(t))


class TestValidation:
    def test_rejects_decreasing_cdf(self):
        with pytest.raises(DomainError):
            GridDistribution1D([0, 1, 2], [0.5, 0.2, 1.0])

    def test_rejects_cdf_not_reaching_one(self):
        with pytest.raises(DomainError):
            GridDistribution1D([0, 1], [0.0, 0.9])

    def test_rejects_unsorted_grid(self):
        with pytest.raises(DomainError):
            GridDistribution1D([0, 2, 1], [0, 0.5, 1])

    def test_arrays_are_read_only(self):
        d = make_uniform((0, 1), n=8)
        with pytest.raises(ValueError):
            d.cdf[0] = 0.5

    def test_input_is_copied(self):
        cdf = np.array([0.0, 0.5, 1.0])
        d = GridDistribution1D([0, 1, 2], cdf)
        cdf[1] = 0.9
        assert d.cdf[1] == 0.5

    def test_json_round_trip(self):
        d = make_empirical([0.2, 0.7], [0.25, 0.75], domain=(0, 1))
        e = GridDistribution1D.from_dict(d.to_dict())
        np.testing.assert_array_equal(e.grid, d.grid)
        np.testing.assert_array_equal(e.cdf, d.cdf)
        p = ParticleDistributionND([[0, 1], [1, 0]], [0.3, 0.7], radius=1.0)
        q = ParticleDistributionND.from_dict(p.to_dict())
        np.testing.assert_array_equal(q.points, p.points)
        assert q.radius == 1.0


class TestWeights:
    def test_small_deviation_is_renormalised(self):
        w = as_weights([0.5, 0.5 + 5e-10])
        assert abs(w.sum() - 1.0) <= 1e-12

    @pytest.mark.parametrize("bad", [[0.5, 0.6], [1.2, -0.2], [np.nan, 1.0], []])
    def test_rejects_invalid(self, bad):
        with pytest.raises(DomainError):
            as_weights(bad)

    def test_uniform(self):
        np.testing.assert_allclose(uniform_weights(4), 0.25)


class TestParticles:
    def test_radius_is_enforced(self):
        with pytest.raises(DomainError):
            ParticleDistributionND([[2.0, 0.0]], radius=1.0)

    def test_characteristic_function_of_dirac(self):
        p = ParticleDistributionND([[0.5]])
        t = np.array([[1.0], [2.0]])
        np.testing.assert_allclose(p.characteristic_function(t), np.exp(1j * t[:, 0] * 0.5))

    def test_one_dimensional_cloud_converts(self):
        p = ParticleDistributionND([0.2, 0.6], [0.5, 0.5])
        g = p.to_grid1d((0, 1))
        assert g.cdf_at(0.3) == 0.5


class TestDensities:
    def test_probabilities(self):
        d = make_probabilities([0.25, 0.75])
        assert d.total_mass == 2.0

    def test_rejects_unnormalised(self):
        with pytest.raises(DomainError):
            DensityGrid([0, 1], [1, 1], [0.5, 0.6])

    def test_rejects_bound_violation(self):
        with pytest.raises(DomainError):
            make_probabilities([0.0, 1.0], bound=0.9)

    def test_make_density_integrates_to_one(self):
        d = make_density(lambda x: 1 + x, (0, 1), n=64)
        assert np.sum(d.density * d.mass) == pytest.approx(1.0, abs=1e-12)


class TestTensor:
    def test_product_matches_marginals(self):
        u = make_uniform((0, 1), n=5)
        t = tensor_cdf_product([u, u])
        assert t.cdf_at([[0.5, 0.5]])[0] == pytest.approx(0.25)

    def test_particles(self):
        ax = np.linspace(0, 1, 3)
        t = tensor_cdf_from_particles([[0.0, 0.0]], None, (ax, ax))
        assert np.all(t.cdf == 1.0)
        assert t.cdf_at([[-0.1, 0.5]])[0] == 0.0

    def test_quantile_grid_validates(self):
        with pytest.raises(DomainError):
            QuantileGrid1D([0.5, 1.0], [1.0, 0.0])
