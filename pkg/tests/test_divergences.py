import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import classical_renyi
from pgmcoding.divergences import (
    DivergenceValue,
    collision_divergence,
    cq_conditional_entropy,
    cq_conditional_renyi,
    cq_information_variance,
    cq_mutual_information,
    cq_mutual_renyi,
    inverse_normal_cdf,
    max_relative_entropy,
    petz_renyi,
    relative_entropy,
    relative_entropy_variance,
)
from pgmcoding.ensembles import random_cq_channel, random_density
from pgmcoding.errors import AlphaOutOfRange, POutOfRange, SupportViolation
from pgmcoding.models import CQChannel, build_cq_joint
from pgmcoding.operators import tensor_product

seeds = st.integers(0, 2**32 - 1)

P, Q = np.array([0.5, 0.5]), np.array([0.9, 0.1])
ORTHO = (np.diag([1.0, 0.0]), np.diag([0.0, 1.0]))


def phi(x):
    return 0.5 * (1 + math.erf(x / math.sqrt(2)))


class TestPetz:
    @pytest.mark.parametrize("alpha", [0.3, 0.5, 0.99, 1.5, 2.0])
    def test_identical_is_zero(self, rng, alpha):
        rho = random_density(3, rng)
        assert float(petz_renyi(rho, rho, alpha)) == pytest.approx(0, abs=1e-10)

    def test_diagonal_alpha_two(self, diag_pair):
        oracle = math.log(0.25 / 0.9 + 0.25 / 0.1)
        assert oracle == pytest.approx(1.02165, abs=1e-5)
        d = petz_renyi(*diag_pair, 2.0)
        assert d.value == pytest.approx(oracle, abs=1e-12)
        assert d.order == 2.0 and d.kind == "petz" and not d.infinite

    @pytest.mark.parametrize("alpha", [0.2, 0.5, 0.8, 1.3, 1.7])
    def test_diagonal_formula(self, diag_pair, alpha):
        assert float(petz_renyi(*diag_pair, alpha)) == pytest.approx(classical_renyi(P, Q, alpha), abs=1e-12)

    def test_support_violation_is_infinite(self):
        d = petz_renyi(np.eye(2) / 2, np.diag([1.0, 0.0]), 1.5)
        assert d.infinite and float(d) == math.inf and str(d) == "inf"

    def test_below_one_finite_without_containment(self):
        d = petz_renyi(np.eye(2) / 2, np.diag([1.0, 0.0]), 0.5)
        assert not d.infinite
        assert d.value == pytest.approx(-2 * math.log(0.5 ** 0.5), abs=1e-12)

    def test_orthogonal_below_one_infinite(self):
        assert petz_renyi(*ORTHO, 0.5).infinite

    @pytest.mark.parametrize("alpha", [0, 1, 2.5, -1])
    def test_alpha_range(self, alpha):
        with pytest.raises(AlphaOutOfRange):
            petz_renyi(np.eye(2) / 2, np.eye(2) / 2, alpha)

    @given(seeds)
    def test_nondecreasing_in_alpha(self, seed):
        rng = np.random.default_rng(seed)
        rho, sigma = random_density(3, rng), random_density(3, rng)
        vals = [float(petz_renyi(rho, sigma, a)) for a in np.arange(0.55, 0.96, 0.05)]
        assert all(b >= a - 1e-10 for a, b in zip(vals, vals[1:]))

    @given(seeds)
    def test_limit_is_relative_entropy(self, seed):
        rng = np.random.default_rng(seed)
        rho, sigma = random_density(3, rng), random_density(3, rng)
        d = float(relative_entropy(rho, sigma))
        for a in (0.999, 1.001):
            assert abs(float(petz_renyi(rho, sigma, a)) - d) <= 0.01 * (1 + abs(d))

    @given(seeds, st.sampled_from([0.4, 0.7, 1.5, 2.0]))
    def test_additive(self, seed, alpha):
        rng = np.random.default_rng(seed)
        r1, s1, r2, s2 = (random_density(2, rng) for _ in range(4))
        joint = float(petz_renyi(tensor_product(r1, r2), tensor_product(s1, s2), alpha))
        parts = float(petz_renyi(r1, s1, alpha)) + float(petz_renyi(r2, s2, alpha))
        assert joint == pytest.approx(parts, abs=1e-8)


class TestRelativeEntropy:
    def test_identical(self, rng):
        rho = random_density(3, rng)
        assert float(relative_entropy(rho, rho)) == pytest.approx(0, abs=1e-12)
        assert float(relative_entropy_variance(rho, rho)) == pytest.approx(0, abs=1e-12)

    def test_diagonal_values(self, diag_pair):
        d_oracle = 0.5 * math.log(5 / 9) + 0.5 * math.log(5)
        v_oracle = 0.5 * math.log(5 / 9) ** 2 + 0.5 * math.log(5) ** 2 - d_oracle ** 2
        assert d_oracle == pytest.approx(0.51083, abs=1e-5)
        assert v_oracle == pytest.approx(1.2069, abs=1e-4)
        assert float(relative_entropy(*diag_pair)) == pytest.approx(d_oracle, abs=1e-12)
        assert float(relative_entropy_variance(*diag_pair)) == pytest.approx(v_oracle, abs=1e-12)

    def test_infinite(self):
        assert relative_entropy(*ORTHO).infinite
        with pytest.raises(SupportViolation):
            relative_entropy_variance(*ORTHO)

    @given(seeds)
    def test_nonnegative(self, seed):
        rng = np.random.default_rng(seed)
        rho, sigma = random_density(3, rng, rank=2), random_density(3, rng)
        assert float(relative_entropy(rho, sigma)) >= -1e-12
        assert float(relative_entropy_variance(rho, sigma)) >= -1e-10


class TestCollisionAndMax:
    def test_collision_identical(self, rng):
        rho = random_density(3, rng)
        assert float(collision_divergence(rho, rho)) == pytest.approx(0, abs=1e-10)

    def test_collision_commuting_matches_petz(self, diag_pair):
        assert float(collision_divergence(*diag_pair)) == pytest.approx(math.log(2.7777777777777777), abs=1e-12)

    def test_collision_orthogonal(self):
        assert collision_divergence(*ORTHO).infinite

    def test_max_values(self, diag_pair, rng):
        rho = random_density(3, rng)
        assert float(max_relative_entropy(rho, rho)) == pytest.approx(0, abs=1e-10)
        assert float(max_relative_entropy(*diag_pair)) == pytest.approx(math.log(5), abs=1e-12)
        assert max_relative_entropy(*ORTHO).infinite

    @given(seeds)
    def test_max_is_smallest_dominating_scale(self, seed):
        rng = np.random.default_rng(seed)
        rho, sigma = random_density(3, rng), random_density(3, rng)
        lam = math.exp(float(max_relative_entropy(rho, sigma)))
        assert np.linalg.eigvalsh(lam * sigma - rho).min() >= -1e-9
        assert np.linalg.eigvalsh(lam * (1 - 1e-6) * sigma - rho).min() < 0

    @given(seeds)
    def test_ordering(self, seed):
        rng = np.random.default_rng(seed)
        rho, sigma = random_density(3, rng), random_density(3, rng)
        d = float(relative_entropy(rho, sigma))
        d2 = float(collision_divergence(rho, sigma))
        dmax = float(max_relative_entropy(rho, sigma))
        assert d <= d2 + 1e-9 <= dmax + 2e-9


class TestCQ:
    def test_identical_outputs(self, flat):
        for a in (0.6, 0.9, 1.5):
            assert float(cq_mutual_renyi(build_cq_joint(flat), a)) == pytest.approx(0, abs=1e-12)

    @pytest.mark.parametrize("alpha", [0.55, 0.7, 0.9, 1.2, 1.8])
    def test_noiseless_is_log_two(self, noiseless, alpha):
        assert float(cq_mutual_renyi(build_cq_joint(noiseless), alpha)) == pytest.approx(math.log(2), abs=1e-12)

    @given(seeds, st.sampled_from([0.7, 0.55, 1.5]))
    def test_blockwise_matches_full_matrix(self, seed, alpha):
        ch = random_cq_channel(3, 2, np.random.default_rng(seed))
        st_ = build_cq_joint(ch)
        full = float(petz_renyi(st_.joint_matrix(), st_.product_matrix(), alpha))
        assert float(cq_mutual_renyi(st_, alpha)) == pytest.approx(full, abs=1e-9)
        ones = np.kron(np.eye(len(st_)), st_.marginal_b)
        assert cq_conditional_renyi(st_, alpha) == pytest.approx(-float(petz_renyi(st_.joint_matrix(), ones, alpha)),
                                                                 abs=1e-9)

    def test_information_quantities(self, noiseless):
        st_ = build_cq_joint(noiseless)
        assert cq_mutual_information(st_) == pytest.approx(math.log(2), abs=1e-12)
        assert cq_information_variance(st_) == pytest.approx(0, abs=1e-12)
        assert cq_conditional_entropy(st_) == pytest.approx(0, abs=1e-12)

    def test_conditional_with_trivial_side_info(self):
        st_ = build_cq_joint(CQChannel.from_states([np.array([[1.0]]), np.array([[1.0]])]))
        for a in (0.6, 1.5):
            assert cq_conditional_renyi(st_, a) == pytest.approx(math.log(2), abs=1e-12)


class TestNormalQuantile:
    def test_values(self):
        assert inverse_normal_cdf(0.5) == pytest.approx(0, abs=1e-15)
        assert inverse_normal_cdf(0.975) == pytest.approx(1.959964, abs=1e-6)
        assert inverse_normal_cdf(0.025) == pytest.approx(-1.959964, abs=1e-6)

    @pytest.mark.parametrize("x", [-3, -2, -1, 0, 1, 2, 3])
    def test_inverts_erf_cdf(self, x):
        assert inverse_normal_cdf(phi(x)) == pytest.approx(x, abs=1e-8)

    @pytest.mark.parametrize("p", [0, 1, -0.1, 1.5])
    def test_range(self, p):
        with pytest.raises(POutOfRange):
            inverse_normal_cdf(p)


def test_value_type():
    v = DivergenceValue(0.25, 2.0, "petz")
    assert float(v) == 0.25
    assert DivergenceValue.inf("max").value == math.inf
