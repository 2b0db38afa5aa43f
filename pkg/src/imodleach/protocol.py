"""Round engine: setup phase (retention, election, clustering) and one steady-state frame."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Set, Tuple, Union

import numpy as np

from imodleach import radio
from imodleach.metrics import RoundRecord, SimSummary, summarize
from imodleach.model import (
    STREAM_ELECTION,
    STREAM_SENSING,
    NetworkConfig,
    NodeState,
    ProtocolParams,
    SimState,
    build_network,
    substream,
)
from imodleach.radio import PowerLevel

DIRECT_TO_BS = "direct_to_bs"


@dataclass
class ClusterAssignment:
    ch_ids: List[int]
    member_of: Dict[int, Union[int, str]] = field(default_factory=dict)
    _arrays: Optional[Tuple[np.ndarray, np.ndarray]] = field(default=None, repr=False, compare=False)

    def arrays(self) -> Tuple[np.ndarray, np.ndarray]:
        """Member ids (ascending) and their CH ids, -1 standing for direct-to-BS."""
        if self._arrays is None:
            members = np.array(sorted(self.member_of), dtype=np.int64)
            heads = np.array(
                [-1 if self.member_of[m] == DIRECT_TO_BS else self.member_of[m] for m in members.tolist()],
                dtype=np.int64,
            )
            self._arrays = (members, heads)
        return self._arrays


@dataclass(frozen=True)
class FrameOutcome:
    packets_to_ch: int
    packets_to_bs: int
    energy_spent: float


def election_threshold(params: ProtocolParams, r: int, node: NodeState) -> float:
    epoch = params.epoch_length
    phase = r % epoch
    if node.rounds_since_ch is not None and node.rounds_since_ch <= phase:
        return 0.0
    return min(1.0, params.p / (1.0 - params.p * phase))


def _threshold_vector(state: SimState, params: ProtocolParams) -> np.ndarray:
    r = state.r
    phase = r % params.epoch_length
    epoch_start = r - phase
    served = (state.last_ch_round >= 0) & (state.last_ch_round >= epoch_start)
    t = min(1.0, params.p / (1.0 - params.p * phase))
    return np.where(served, 0.0, t)


def retain_cluster_heads(state: SimState, params: ProtocolParams) -> Set[int]:
    """Previous-round CHs that keep the role without a new draw.

    A CH stays on while its residual energy is at least ``retention_fraction``
    of what it held when it was elected.
    """
    if not params.uses_retention:
        return set()
    keep = set()
    for i in state.prev_chs:
        if state.alive[i] and state.energy[i] >= params.retention_fraction * state.energy_at_election[i]:
            keep.add(int(i))
    return keep


def elect_cluster_heads(
    state: SimState, params: ProtocolParams, retained: Optional[Set[int]] = None
) -> Set[int]:
    """Run the rotating-threshold election for round ``state.r``.

    Returns the full CH set for the round (retained plus newly elected) and
    updates the per-node CH bookkeeping.
    """
    if retained is None:
        retained = retain_cluster_heads(state, params)
    n = state.node_count
    draws = substream(state.config.seed, STREAM_ELECTION, state.r).random(n)
    candidates = state.alive.copy()
    if retained:
        idx = np.fromiter(retained, dtype=np.int64)
        candidates[idx] = False
        # a retained cluster keeps its members for the round
        for member, ch in state.prev_member_of.items():
            if ch in retained:
                candidates[member] = False
    elected_mask = candidates & (draws < _threshold_vector(state, params))
    elected = np.flatnonzero(elected_mask)

    state.is_ch[:] = False
    state.is_ch[elected] = True
    state.last_ch_round[elected] = state.r
    state.energy_at_election[elected] = state.energy[elected]
    if retained:
        state.is_ch[idx] = True
        state.last_ch_round[idx] = state.r
    state.last_elected = elected.tolist()
    state.last_retained = sorted(retained)
    return set(state.last_elected) | set(retained)


def _assign(state: SimState, ch_ids: List[int]):
    """Members (ascending id) and the index into ``ch_ids`` each one joins."""
    members_mask = state.alive.copy()
    members_mask[ch_ids] = False
    members = np.flatnonzero(members_mask)
    if not ch_ids:
        return members, None
    chs = np.asarray(ch_ids)
    dx = state.x[members, None] - state.x[None, chs]
    dy = state.y[members, None] - state.y[None, chs]
    d2 = dx * dx + dy * dy
    # argmin keeps the first minimum, i.e. the lowest CH id on ties
    return members, np.argmin(d2, axis=1)


def form_clusters(state: SimState, chs) -> ClusterAssignment:
    ch_ids = sorted(int(c) for c in chs)
    members, nearest = _assign(state, ch_ids)
    if nearest is None:
        heads = np.full(len(members), -1, dtype=np.int64)
        member_of = dict.fromkeys(members.tolist(), DIRECT_TO_BS)
    else:
        heads = np.asarray(ch_ids, dtype=np.int64)[nearest]
        member_of = dict(zip(members.tolist(), heads.tolist()))
    return ClusterAssignment(ch_ids, member_of, (members, heads))


def sensed_values(config: NetworkConfig, r: int) -> np.ndarray:
    """Readings of every node in round ``r`` (indexed by node id)."""
    rng = substream(config.seed, STREAM_SENSING, r)
    return rng.uniform(config.sensed_min, config.sensed_max, config.node_count)


def sense(node: NodeState, config: NetworkConfig, r: int) -> float:
    return float(sensed_values(config, r)[node.id])


def should_report(value: float, node: NodeState, params: ProtocolParams) -> bool:
    """Hard/soft threshold gate; records the value on the node when it passes."""
    if params.uses_thresholds:
        if value < params.h:
            return False
        last = node.last_reported_value
        if last is not None and abs(value - last) < params.s:
            return False
    node.last_reported_value = value
    return True


def _report_mask(state: SimState, values: np.ndarray, ids: np.ndarray, params: ProtocolParams) -> np.ndarray:
    """Vector form of :func:`should_report` for nodes ``ids``; updates last reports."""
    v = values[ids]
    if params.uses_thresholds:
        last = state.last_reported[ids]
        ok = (v >= params.h) & (np.isnan(last) | (np.abs(v - last) >= params.s))
    else:
        ok = np.ones(len(ids), dtype=bool)
    state.last_reported[ids[ok]] = v[ok]
    return ok


def steady_state_frame(state: SimState, assignment: ClusterAssignment, config: NetworkConfig) -> FrameOutcome:
    params = config.protocol
    rad = config.radio
    k = config.packet_bits
    n = state.node_count
    cost = np.zeros(n)
    values = sensed_values(config, state.r)

    ch_ids = np.asarray(assignment.ch_ids, dtype=np.int64)
    member_ids, heads = assignment.arrays()

    reports = _report_mask(state, values, member_ids, params)
    direct = heads < 0

    # members with no CH go straight to the base station at full power
    to_bs = member_ids[direct & reports]
    cost[to_bs] += radio.tx_energy_unchecked(rad, k, state.dist_to_sink[to_bs], PowerLevel.TO_BASE_STATION)
    packets_to_bs = len(to_bs)
    packets_to_ch = 0

    if len(ch_ids):
        clustered = ~direct & reports
        senders = member_ids[clustered]
        targets = heads[clustered]
        d = np.hypot(state.x[senders] - state.x[targets], state.y[senders] - state.y[targets])
        cost[senders] += radio.tx_energy_unchecked(rad, k, d, PowerLevel.INTRA_CLUSTER)
        packets_to_ch = len(senders)

        received = np.bincount(targets, minlength=n)[ch_ids]
        own = _report_mask(state, values, ch_ids, params)
        held = received + own
        uplink = held > 0
        cost[ch_ids] += rad.e_elec * k * received + rad.e_da * k * held
        up = ch_ids[uplink]
        cost[up] += radio.tx_energy_unchecked(rad, k, state.dist_to_sink[up], PowerLevel.TO_BASE_STATION)
        packets_to_bs += len(up)

    # a node may overdraw once; it is clamped to zero and dies at frame end
    spent = np.minimum(cost, state.energy)
    state.energy = np.maximum(state.energy - cost, 0.0)
    dead = state.alive & (state.energy <= 0.0)
    state.alive[dead] = False
    state.is_ch[dead] = False
    return FrameOutcome(packets_to_ch, packets_to_bs, float(spent.sum()))


def simulate_round(state: SimState, config: Optional[NetworkConfig] = None) -> Optional[RoundRecord]:
    """Advance one round. Returns None once every node is dead."""
    config = config or state.config
    if not state.alive.any():
        return None
    params = config.protocol
    retained = retain_cluster_heads(state, params)
    chs = elect_cluster_heads(state, params, retained)
    assignment = form_clusters(state, chs)
    outcome = steady_state_frame(state, assignment, config)
    state.prev_chs = assignment.ch_ids
    state.prev_member_of = assignment.member_of
    state.last_assignment = assignment
    state.last_outcome = outcome
    state.r += 1
    return RoundRecord(
        r=state.r,
        alive=int(state.alive.sum()),
        ch_count=len(assignment.ch_ids),
        packets_to_ch=outcome.packets_to_ch,
        packets_to_bs=outcome.packets_to_bs,
        energy_remaining=float(state.energy.sum()),
    )


def run_simulation(config: NetworkConfig) -> Tuple[List[RoundRecord], SimSummary]:
    state = build_network(config)
    records = []
    while state.r < config.max_rounds:
        rec = simulate_round(state, config)
        if rec is None:
            break
        records.append(rec)
        if rec.alive == 0:
            break
    return records, summarize(records, config.protocol.p, node_count=config.node_count)
