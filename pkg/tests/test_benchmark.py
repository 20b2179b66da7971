import numpy as np
import pytest
from dataclasses import replace

from wpirc import (
    ChannelRealization,
    SolveStatus,
    check_constraints,
    eq_solve,
    feasibility_frontier,
    kkt_certificate,
    solve,
)
from wpirc.sim import sample_channel

from conftest import make_params


class TestEqSolve:
    def test_zero_floors(self):
        params = make_params()
        chan = ChannelRealization(h=[1, 1], radar_snr=[1, 1], comm_snr=[1, 1])
        sol = eq_solve(params, chan)
        assert sol.status is SolveStatus.ZERO_DEMAND
        assert sol.energy == 0.0

    def test_single_carrier_equals_optimal(self):
        # with one subcarrier the two schemes coincide
        params = make_params(n_subcarriers=1, mi_floor=15.0, rate_floor=10.0)
        chan = ChannelRealization(h=[0.8, 0.4], radar_snr=[1.2], comm_snr=[0.9])
        eq = eq_solve(params, chan)
        op = solve(params, chan)
        assert eq.status is SolveStatus.OPTIMAL
        assert eq.energy == pytest.approx(op.energy, rel=1e-8)

    def test_skewed_channel_strict_dominance(self):
        # water-filling concentrates energy on the strong subcarrier
        params = make_params(n_subcarriers=2, mi_floor=15.0, rate_floor=0.0)
        chan = ChannelRealization(h=[1.0, 0.5], radar_snr=[1.0, 0.01], comm_snr=[1.0, 1.0])
        eq = eq_solve(params, chan)
        op = solve(params, chan)
        assert eq.status is op.status is SolveStatus.OPTIMAL
        assert eq.energy > op.energy * (1 + 1e-6)

    def test_dominance_on_random_instances(self):
        params = make_params(n_subcarriers=6, n_antennas=3, mi_floor=30.0, rate_floor=35.0)
        for seed in range(6):
            chan = sample_channel(seed, params, 10.0, 10.0)
            eq = eq_solve(params, chan)
            op = solve(params, chan)
            if eq.status is op.status is SolveStatus.OPTIMAL:
                assert eq.energy >= op.energy * (1 - 1e-9)

    def test_eq_output_is_feasible_and_certified(self):
        params = make_params(n_subcarriers=5, n_antennas=4, mi_floor=25.0, rate_floor=25.0)
        chan = sample_channel(4, params, 10.0, 10.0)
        sol = eq_solve(params, chan)
        assert sol.status is SolveStatus.OPTIMAL
        assert check_constraints(params, chan, sol, tol=1e-6).all_satisfied
        assert np.allclose(sol.gamma, sol.gamma[0])
        assert kkt_certificate(params, chan, sol).valid


class TestFeasibilityFrontier:
    def test_zero_efficiency_frontier_is_zero(self):
        params = make_params(n_subcarriers=2, efficiency=0.0)
        chan = ChannelRealization(h=[1, 1], radar_snr=[1, 1], comm_snr=[1, 1])
        assert feasibility_frontier(params, chan, target="mi") == 0.0

    def test_frontier_nonincreasing_in_other_floor(self):
        params = make_params(n_subcarriers=3, n_antennas=2)
        chan = sample_channel(9, params, 12.0, 12.0)
        frontiers = [
            feasibility_frontier(replace(params, rate_floor=rc), chan, target="mi")
            for rc in (0.0, 20.0, 40.0)
        ]
        assert all(b <= a + 0.2 for a, b in zip(frontiers, frontiers[1:]))

    def test_op_frontier_dominates_eq(self):
        for seed in range(3):
            params = make_params(n_subcarriers=3, n_antennas=2, rate_floor=10.0)
            chan = sample_channel(seed, params, 12.0, 10.0)
            f_op = feasibility_frontier(params, chan, target="mi", scheme="op")
            f_eq = feasibility_frontier(params, chan, target="mi", scheme="eq")
            assert f_eq <= f_op + 0.2

    def test_infeasible_beyond_frontier_feasible_below(self):
        params = make_params(n_subcarriers=3, n_antennas=2)
        chan = sample_channel(13, params, 12.0, 12.0)
        frontier = feasibility_frontier(params, chan, target="mi")
        assert frontier > 0
        below = solve(replace(params, mi_floor=0.8 * frontier), chan)
        beyond = solve(replace(params, mi_floor=frontier + 1.0), chan)
        assert below.status is SolveStatus.OPTIMAL
        assert beyond.status is SolveStatus.INFEASIBLE
