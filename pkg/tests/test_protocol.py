from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from imodleach.metrics import RoundRecord
from imodleach.model import NetworkConfig, NodeState, Position, ProtocolParams, build_network
from imodleach.protocol import (
    DIRECT_TO_BS,
    ClusterAssignment,
    elect_cluster_heads,
    election_threshold,
    form_clusters,
    retain_cluster_heads,
    run_simulation,
    sense,
    sensed_values,
    should_report,
    simulate_round,
    steady_state_frame,
)
from tests.conftest import make_state

E_ELEC, E_DA, FS, MP = 50e-9, 5e-9, 10e-12, 0.0013e-12
K = 4000


def node(**kw):
    defaults = dict(id=0, pos=Position(0, 0), energy=0.5)
    defaults.update(kw)
    return NodeState(**defaults)


# -- election threshold -----------------------------------------------------

def test_threshold_first_round():
    assert election_threshold(ProtocolParams(p=0.1), 0, node()) == pytest.approx(0.1)


def test_threshold_last_round_of_epoch():
    assert election_threshold(ProtocolParams(p=0.1), 9, node()) == pytest.approx(1.0)


def test_threshold_is_clamped():
    assert election_threshold(ProtocolParams(p=0.3), 3, node()) == 1.0


def test_threshold_zero_after_recent_ch():
    assert election_threshold(ProtocolParams(p=0.1), 5, node(rounds_since_ch=1)) == 0.0


def test_threshold_resets_at_epoch_start():
    params = ProtocolParams(p=0.1)
    # CH at round 9, asked about round 10: new epoch
    assert election_threshold(params, 10, node(rounds_since_ch=1)) == pytest.approx(0.1)
    # CH at round 10, asked about round 19: same epoch
    assert election_threshold(params, 19, node(rounds_since_ch=9)) == 0.0


# -- election -----------------------------------------------------------------

def test_p_one_elects_everyone():
    state = build_network(NetworkConfig(protocol=ProtocolParams(p=1.0)))
    chs = elect_cluster_heads(state, state.config.protocol)
    assert chs == set(range(100))


def test_mean_ch_count_binomial():
    counts = []
    for seed in range(1000):
        state = build_network(NetworkConfig(seed=seed))
        counts.append(len(elect_cluster_heads(state, state.config.protocol)))
    assert 9.0 <= np.mean(counts) <= 11.0


def test_epoch_reset_allows_reelection():
    config = NetworkConfig(node_count=20, protocol=ProtocolParams(p=0.5, variant="leach"))
    state = build_network(config)
    params = config.protocol
    served = set()
    for _ in range(2):
        served |= elect_cluster_heads(state, params)
        state.r += 1
    assert served == set(range(20))  # threshold hits 1 on the last epoch round
    assert elect_cluster_heads(state, params)  # r=2: new epoch


def test_epoch_exclusion_in_simulation():
    config = NetworkConfig(seed=5, protocol=ProtocolParams(p=0.2))
    state = build_network(config)
    epoch = config.protocol.epoch_length
    seen = {}
    while state.r < 600 and simulate_round(state, config):
        r = state.r - 1
        for i in state.last_elected:
            assert seen.get(i, -1) < r - r % epoch, f"node {i} elected twice in epoch at round {r}"
            seen[i] = r


# -- retention ----------------------------------------------------------------

def test_leach_never_retains():
    state = make_state([(0, 0), (10, 0)])
    state.prev_chs = [0]
    state.energy_at_election[0] = 0.5
    assert retain_cluster_heads(state, ProtocolParams(variant="leach")) == set()


def test_retention_inequality():
    state = make_state([(0, 0), (10, 0), (20, 0)])
    state.prev_chs = [0, 1]
    state.energy_at_election[:] = 0.4
    state.energy[0] = 0.35  # 0.35 >= 0.7 * 0.4 = 0.28
    state.energy[1] = 0.27
    assert retain_cluster_heads(state, ProtocolParams(retention_fraction=0.7)) == {0}


def test_dead_ch_not_retained():
    state = make_state([(0, 0), (10, 0)])
    state.prev_chs = [0]
    state.energy_at_election[0] = 0.4
    state.energy[0] = 0.0
    state.alive[0] = False
    assert retain_cluster_heads(state, ProtocolParams()) == set()


def test_retained_cluster_keeps_members_out_of_draw():
    state = make_state([(0, 0), (10, 0), (20, 0)], p=1.0)
    state.prev_chs = [0]
    state.prev_member_of = {1: 0, 2: 0}
    state.energy_at_election[0] = 0.5
    chs = elect_cluster_heads(state, state.config.protocol)
    assert chs == {0}
    assert state.last_retained == [0] and state.last_elected == []


# -- cluster formation ----------------------------------------------------------

def test_single_ch_collects_everyone():
    state = make_state([(0, 0), (5, 5), (300, 300), (100, 0)])
    a = form_clusters(state, {2})
    assert a.ch_ids == [2]
    assert a.member_of == {0: 2, 1: 2, 3: 2}


def test_tie_goes_to_lowest_ch_id():
    positions = [(50, 50)] * 8
    positions[3] = (40, 50)
    positions[7] = (60, 50)
    positions[0] = (50, 50)
    state = make_state(positions)
    a = form_clusters(state, {7, 3})
    assert a.member_of[0] == 3


def test_no_ch_means_direct_to_bs():
    state = make_state([(i, i) for i in range(5)])
    a = form_clusters(state, set())
    assert a.ch_ids == [] and a.member_of == {i: DIRECT_TO_BS for i in range(5)}


def test_dead_nodes_not_clustered():
    state = make_state([(0, 0), (1, 0), (2, 0)])
    state.alive[1] = False
    assert form_clusters(state, {0}).member_of == {2: 0}


# -- sensing and reporting ------------------------------------------------------

def test_degenerate_sensing_interval():
    config = NetworkConfig(sensed_min=7.0, sensed_max=7.0)
    assert sense(node(id=3), config, 11) == 7.0


def test_sensing_mean_uniform():
    config = NetworkConfig(node_count=100)
    values = np.concatenate([sensed_values(config, r) for r in range(1000)])
    assert 495 <= values.mean() <= 505


def test_sensing_deterministic():
    config = NetworkConfig(seed=9)
    assert sense(node(id=4), config, 17) == sense(node(id=4), config, 17)
    assert sense(node(id=4), config, 17) != sense(node(id=4), config, 18)


def test_hard_threshold_blocks():
    assert should_report(99.0, node(), ProtocolParams(h=100)) is False


def test_first_crossing_reports_and_records():
    n = node()
    assert should_report(150.0, n, ProtocolParams(h=100)) is True
    assert n.last_reported_value == 150.0


def test_soft_threshold_blocks_small_change():
    n = node(last_reported_value=150.0)
    assert should_report(151.0, n, ProtocolParams(h=100, s=2)) is False
    assert n.last_reported_value == 150.0
    assert should_report(152.0, n, ProtocolParams(h=100, s=2)) is True


def test_leach_always_reports():
    assert should_report(1.0, node(), ProtocolParams(variant="leach", h=100)) is True


@given(
    values=st.lists(st.floats(0, 1000), min_size=1, max_size=30),
    h=st.floats(0, 1000),
    s=st.floats(0, 50),
)
def test_vector_gate_matches_scalar_gate(values, h, s):
    from imodleach.protocol import _report_mask

    params = ProtocolParams(h=h, s=s)
    state = make_state([(0, 0)])
    scalar = node()
    for v in values:
        expected = should_report(v, scalar, params)
        got = _report_mask(state, np.array([v]), np.array([0]), params)[0]
        assert got == expected


# -- steady-state frame ---------------------------------------------------------

def test_frame_one_cluster_hand_oracle():
    # CH 0 at (30,0); members at distances 10, 20, 30; sink at the origin
    state = make_state([(30, 0), (40, 0), (50, 0), (60, 0)], h=0.0, s=0.0)
    a = ClusterAssignment([0], {1: 0, 2: 0, 3: 0})
    state.is_ch[0] = True
    out = steady_state_frame(state, a, state.config)
    assert (out.packets_to_ch, out.packets_to_bs) == (3, 1)

    member_cost = [K * (E_ELEC + FS / 10 * d**2) for d in (10, 20, 30)]
    ch_cost = 3 * K * E_ELEC + 4 * K * E_DA + K * (E_ELEC + FS * 30**2)
    expected = np.array([ch_cost] + member_cost)
    np.testing.assert_allclose(0.5 - state.energy, expected, rtol=1e-12)
    assert out.energy_spent == pytest.approx(expected.sum(), rel=1e-12)


def test_frame_silent_cluster_sends_nothing_to_bs():
    state = make_state([(30, 0), (40, 0), (50, 0)], h=1001.0)
    a = ClusterAssignment([0], {1: 0, 2: 0})
    out = steady_state_frame(state, a, state.config)
    assert (out.packets_to_ch, out.packets_to_bs, out.energy_spent) == (0, 0, 0.0)


def test_frame_direct_to_bs():
    state = make_state([(100, 0), (0, 50)], h=0.0, s=0.0)
    a = ClusterAssignment([], {0: DIRECT_TO_BS, 1: DIRECT_TO_BS})
    out = steady_state_frame(state, a, state.config)
    assert (out.packets_to_ch, out.packets_to_bs) == (0, 2)
    np.testing.assert_allclose(
        0.5 - state.energy,
        [K * (E_ELEC + MP * 100**4), K * (E_ELEC + FS * 50**2)],
        rtol=1e-12,
    )


def test_frame_overdraw_clamps_and_kills():
    state = make_state([(300, 300), (0, 1)], h=0.0, s=0.0)
    state.energy[0] = 1e-6
    a = ClusterAssignment([], {0: DIRECT_TO_BS, 1: DIRECT_TO_BS})
    out = steady_state_frame(state, a, state.config)
    assert state.energy[0] == 0.0 and not state.alive[0]
    assert state.alive[1]
    assert out.energy_spent == pytest.approx(1e-6 + K * (E_ELEC + FS * 1.0), rel=1e-12)


# -- rounds and runs ------------------------------------------------------------

def test_round_on_dead_network_signals_completion():
    state = build_network(NetworkConfig(node_count=5))
    state.energy[:] = 0.0
    state.alive[:] = False
    assert simulate_round(state) is None


def test_round_without_chs():
    # p tiny: no CH at r=0 for this seed, members go direct
    config = NetworkConfig(node_count=3, seed=1, protocol=ProtocolParams(p=1e-6))
    state = build_network(config)
    rec = simulate_round(state, config)
    assert rec.ch_count == 0 and rec.packets_to_ch == 0
    assert rec.packets_to_bs > 0


def test_round_spends_energy_when_packets_move():
    config = NetworkConfig(seed=4)
    state = build_network(config)
    for _ in range(50):
        before = state.energy.sum()
        rec = simulate_round(state, config)
        if rec.packets_to_bs + rec.packets_to_ch:
            assert rec.energy_remaining < before


def test_round_record_fields():
    state = build_network(NetworkConfig(seed=2))
    rec = simulate_round(state)
    assert isinstance(rec, RoundRecord) and rec.r == 1 == state.r
    assert rec.alive == 100 and rec.ch_count == len(state.last_assignment.ch_ids)


def test_run_is_deterministic():
    config = NetworkConfig(seed=11, max_rounds=300)
    assert run_simulation(config) == run_simulation(config)


def test_run_respects_max_rounds():
    records, summary = run_simulation(NetworkConfig(max_rounds=25))
    assert len(records) == 25 and summary.last_dead_round is None


def test_run_stops_when_all_dead():
    records, summary = run_simulation(NetworkConfig(node_count=10, initial_energy=0.01, seed=3))
    assert records[-1].alive == 0
    assert summary.last_dead_round == records[-1].r


def _full_run_invariants(config):
    state = build_network(config)
    initial = state.energy.sum()
    spent = 0.0
    prev_energy = state.energy.copy()
    prev_alive = state.node_count
    while state.r < config.max_rounds:
        rec = simulate_round(state, config)
        if rec is None:
            break
        spent += state.last_outcome.energy_spent
        assert abs(initial - rec.energy_remaining - spent) <= 1e-9 * initial
        assert rec.alive <= prev_alive
        assert np.all(state.energy <= prev_energy)
        assert np.all(state.alive == (state.energy > 0))
        assert not np.any(state.is_ch & ~state.alive)
        prev_alive, prev_energy = rec.alive, state.energy.copy()
        if rec.alive == 0:
            break


@settings(max_examples=6, deadline=None)
@given(
    seed=st.integers(0, 2**32),
    p=st.sampled_from([0.05, 0.1, 0.4, 0.9]),
    variant=st.sampled_from(["leach", "modleach", "imodleach"]),
)
def test_invariants_hold_over_whole_runs(seed, p, variant):
    _full_run_invariants(NetworkConfig(
        node_count=30, initial_energy=0.05, seed=seed, protocol=ProtocolParams(p=p, variant=variant),
    ))


def test_reactive_reduces_to_proactive():
    config = NetworkConfig(seed=8, protocol=ProtocolParams(h=0.0, s=0.0))
    state = build_network(config)
    while (rec := simulate_round(state, config)) is not None:
        _, heads = state.last_assignment.arrays()
        assert rec.packets_to_ch == int((heads >= 0).sum())
        if rec.alive == 0:
            break


def test_imodleach_without_retention_or_thresholds_matches_leach():
    base = NetworkConfig(seed=21, max_rounds=800)
    leach, _ = run_simulation(replace(base, protocol=ProtocolParams(variant="leach")))
    imod, _ = run_simulation(replace(base, protocol=ProtocolParams(h=0.0, s=0.0, retention_fraction=1.0)))
    assert [r.ch_count for r in imod] == [r.ch_count for r in leach]


@pytest.mark.slow
def test_lifetime_trend_across_p():
    first, last = {}, {}
    for p in (0.1, 0.9):
        runs = [run_simulation(NetworkConfig(seed=s, protocol=ProtocolParams(p=p)))[1] for s in range(1, 11)]
        first[p] = np.mean([r.first_dead_round for r in runs])
        last[p] = np.mean([r.last_dead_round for r in runs])
    assert first[0.9] < first[0.1]
    assert last[0.9] > last[0.1]
