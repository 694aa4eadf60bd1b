import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import instances
from oracles import pgm_error, random_coding_error
from pgmcoding.bounds import cq_bound
from pgmcoding.ensembles import random_cq_channel, random_density
from pgmcoding.errors import DimensionTooLarge, EnumerationTooLarge, ValidationError
from pgmcoding.models import CQChannel, Precoder, cq_source
from pgmcoding.operators import partial_trace, tensor_product
from pgmcoding.simulate import (
    broadcast_exact,
    broadcast_mc,
    cq_random_coding_exact,
    cq_random_coding_mc,
    cqsw_exact,
    cqsw_mc,
    mac_exact,
    mac_mc,
    packing_exact,
    state_info_exact,
    state_info_mc,
)

seeds = st.integers(0, 2**32 - 1)


class TestCQ:
    def test_noiseless(self, noiseless):
        res = cq_random_coding_exact(noiseless, 2)
        assert res.mean_error == pytest.approx(0.25, abs=1e-12)
        assert res.bound_checked == pytest.approx(0.5)
        assert res.certified and res.mode == "exact" and res.seed is None

    @pytest.mark.parametrize("m", [1, 2, 3, 5])
    def test_flat_channel(self, flat, m):
        assert cq_random_coding_exact(flat, m).mean_error == pytest.approx(1 - 1 / m, abs=1e-12)

    @given(seeds, st.integers(1, 4))
    def test_matches_ordered_enumeration(self, seed, m):
        ch = random_cq_channel(3, 2, np.random.default_rng(seed))
        res = cq_random_coding_exact(ch, m)
        assert res.mean_error == pytest.approx(random_coding_error(ch.prior, ch.outputs, m), abs=1e-10)
        assert res.certified

    def test_cap(self, bsc):
        with pytest.raises(EnumerationTooLarge):
            cq_random_coding_exact(bsc, 13)
        assert cq_random_coding_exact(bsc, 3, cap=8).mean_error > 0
        with pytest.raises(EnumerationTooLarge):
            cq_random_coding_exact(bsc, 3, cap=7)

    def test_mc_deterministic_across_threads(self, bsc):
        a = cq_random_coding_mc(bsc, 3, 64, seed=7, threads=1)
        b = cq_random_coding_mc(bsc, 3, 64, seed=7, threads=4)
        assert a == b
        assert a.mode == "monte_carlo" and a.trials == 64 and a.seed == 7

    def test_mc_prefix_consistency(self, bsc):
        one = cq_random_coding_mc(bsc, 3, 1, seed=11)
        again = cq_random_coding_mc(bsc, 3, 1, seed=11)
        assert one == again and one.std_error == 0
        assert cq_random_coding_mc(bsc, 3, 1, seed=12).seed == 12

    def test_mc_near_exact(self, bsc):
        exact = cq_random_coding_exact(bsc, 3).mean_error
        mc = cq_random_coding_mc(bsc, 3, 2000, seed=3, threads=2)
        assert abs(mc.mean_error - exact) <= 4 * mc.std_error
        assert mc.certified

    @pytest.mark.parametrize("kw", [{"trials": 0, "seed": 1}, {"trials": 5, "seed": -1},
                                    {"trials": 5, "seed": 2**64}, {"trials": 2.5, "seed": 1}])
    def test_mc_validation(self, bsc, kw):
        with pytest.raises(ValidationError):
            cq_random_coding_mc(bsc, 2, **kw)


class TestPacking:
    def test_product_state(self, rng):
        tau, rho_b = random_density(2, rng), random_density(2, rng)
        res = packing_exact(tensor_product(tau, rho_b), (2, 2), tau, 2)
        assert res.mean_error == pytest.approx(0.5, abs=1e-9)
        assert res.bound_checked == pytest.approx(1, abs=1e-9)

    def test_single_message(self, rng):
        rho_rb, tau = instances.packing_instance(rng)
        assert packing_exact(rho_rb, (2, 2), tau, 1).mean_error == pytest.approx(0, abs=1e-10)

    @given(seeds, st.integers(2, 4))
    @settings(max_examples=15)
    def test_certified(self, seed, m):
        rho_rb, tau = instances.packing_instance(np.random.default_rng(seed))
        assert packing_exact(rho_rb, (2, 2), tau, m).certified

    def test_dimension_cap(self, rng):
        rho_rb, tau = instances.packing_instance(rng)
        with pytest.raises(DimensionTooLarge):
            packing_exact(rho_rb, (2, 2), tau, 6)


def cqsw_oracle(state, m):
    blocks = list(state.blocks)
    total = 0.0
    for bins in itertools.product(range(m), repeat=len(blocks)):
        for b in range(m):
            members = [blocks[i] for i, k in enumerate(bins) if k == b]
            if len(members) > 1:
                total += pgm_error(members)
    return total / m ** len(blocks)


class TestCQSW:
    def test_perfect_side_information(self, noiseless):
        assert cqsw_exact(cq_source(noiseless), 2).mean_error == pytest.approx(0, abs=1e-12)

    def test_no_side_information(self):
        uniform = cq_source(CQChannel.from_states([np.array([[1.0]])] * 2))
        # the two symbols collide with probability 1/2 and are then guessed at random
        assert cqsw_exact(uniform, 2).mean_error == pytest.approx(0.25, abs=1e-12)

    @given(seeds, st.integers(1, 3))
    def test_matches_oracle(self, seed, m):
        state = instances.source_instance(np.random.default_rng(seed))
        res = cqsw_exact(state, m)
        assert res.mean_error == pytest.approx(cqsw_oracle(state, m), abs=1e-10)
        assert res.certified

    def test_mc_threads(self):
        state = instances.source_instance(np.random.default_rng(5))
        assert cqsw_mc(state, 2, 50, seed=1, threads=1) == cqsw_mc(state, 2, 50, seed=1, threads=3)


def mac_oracle(px, py, grid, m_a, m_b):
    total = 0.0
    for xa in itertools.product(range(len(px)), repeat=m_a):
        for yb in itertools.product(range(len(py)), repeat=m_b):
            w = math.prod(px[i] for i in xa) * math.prod(py[j] for j in yb)
            total += w * pgm_error([grid[i][j] / (m_a * m_b) for i in xa for j in yb])
    return total


class TestMAC:
    @given(seeds, st.sampled_from([(1, 2), (2, 1), (2, 2)]))
    @settings(max_examples=20)
    def test_matches_oracle(self, seed, ms):
        ch = instances.mac_channel(np.random.default_rng(seed))
        px, py, grid = instances.mac_slices(ch)
        res = mac_exact(ch, *ms)
        assert res.mean_error == pytest.approx(mac_oracle(px, py, grid, *ms), abs=1e-10)
        assert res.certified

    @given(seeds)
    @settings(max_examples=20)
    def test_single_receiver_collapse(self, seed):
        ch = instances.mac_channel(np.random.default_rng(seed))
        px, py, grid = instances.mac_slices(ch)
        direct = cq_random_coding_exact(instances.direct_sum_channel(grid, px, py), 3)
        res = mac_exact(ch, 3, 1)
        assert res.mean_error == pytest.approx(direct.mean_error, abs=1e-10)
        assert res.bound_checked == pytest.approx(direct.bound_checked, abs=1e-10)

    def test_mc_threads(self, rng):
        ch = instances.mac_channel(rng)
        assert mac_mc(ch, 2, 2, 40, seed=9, threads=1) == mac_mc(ch, 2, 2, 40, seed=9, threads=4)


def broadcast_oracle(ch, shape, pre, m_b, m_c):
    us, vs = pre.u_labels, pre.v_labels
    out = {(u, v): ch.output(pre(u, v)) for u in us for v in vs}
    eb = ec = 0.0
    for cu in itertools.product(range(len(us)), repeat=m_b):
        for cv in itertools.product(range(len(vs)), repeat=m_c):
            w = math.prod(pre.u_prior[i] for i in cu) * math.prod(pre.v_prior[j] for j in cv)
            bob = [sum(partial_trace(out[us[i], vs[j]], shape, [0]) for j in cv) / (m_c * m_b) for i in cu]
            charlie = [sum(partial_trace(out[us[i], vs[j]], shape, [1]) for i in cu) / (m_b * m_c) for j in cv]
            eb += w * pgm_error(bob)
            ec += w * pgm_error(charlie)
    return eb, ec


class TestBroadcast:
    @given(seeds)
    @settings(max_examples=15)
    def test_matches_oracle(self, seed):
        ch, shape, pre = instances.broadcast_instance(np.random.default_rng(seed))
        b, c = broadcast_exact(ch, shape, pre, 2, 2)
        ob, oc = broadcast_oracle(ch, shape, pre, 2, 2)
        assert b.mean_error == pytest.approx(ob, abs=1e-10)
        assert c.mean_error == pytest.approx(oc, abs=1e-10)
        assert b.certified and c.certified

    def test_trivial_c_factor(self, rng):
        ch = random_cq_channel(3, 2, rng)
        pre = instances.random_precoder(rng, 2, 2, list(ch.alphabet))
        b, _ = broadcast_exact(ch, (2, 1), pre, 3, 1)
        states = [sum(pv * ch.output(pre(u, v)) for v, pv in zip(pre.v_labels, pre.v_prior)) for u in pre.u_labels]
        assert b.mean_error == pytest.approx(broadcast_oracle(ch, (2, 1), pre, 3, 1)[0], abs=1e-10)
        assert b.bound_checked == pytest.approx(cq_bound(CQChannel.from_states(states, pre.u_prior), 3).bound,
                                                abs=1e-12)

    def test_mc_threads(self, rng):
        ch, shape, pre = instances.broadcast_instance(rng)
        assert broadcast_mc(ch, shape, pre, 2, 2, 30, 4, 1) == broadcast_mc(ch, shape, pre, 2, 2, 30, 4, 4)


class TestStateInfo:
    def test_single_state(self, rng):
        ch = random_cq_channel(2, 2, rng, labels=["0|s", "1|s"])
        pre = Precoder(("a", "b"), [0.3, 0.7], ("s",), [1.0], {("a", "s"): "1", ("b", "s"): "0"})
        composed = CQChannel.from_states([ch.output("1|s"), ch.output("0|s")], [0.3, 0.7])
        assert state_info_exact(ch, pre, 3).mean_error == pytest.approx(
            cq_random_coding_exact(composed, 3).mean_error, abs=1e-12)

    @given(seeds)
    @settings(max_examples=20)
    def test_certified(self, seed):
        ch, pre = instances.state_info_instance(np.random.default_rng(seed))
        assert state_info_exact(ch, pre, 3).certified

    def test_mc_threads(self, rng):
        ch, pre = instances.state_info_instance(rng)
        assert state_info_mc(ch, pre, 2, 30, 2, 1) == state_info_mc(ch, pre, 2, 30, 2, 3)
