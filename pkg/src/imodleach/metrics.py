"""Round traces, run summaries and the derived stability/throughput statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.stats import rankdata


@dataclass(frozen=True)
class RoundRecord:
    r: int
    alive: int
    ch_count: int
    packets_to_ch: int
    packets_to_bs: int
    energy_remaining: float


@dataclass(frozen=True)
class SimSummary:
    """Per-run figures in the shape of the lifetime tables.

    ``last_dead_round`` is None when the run was censored at max_rounds;
    ``ratio_x`` and ``k1`` are then None as well.
    """

    first_dead_round: Optional[int]
    last_dead_round: Optional[int]
    total_packets_to_bs: int
    total_packets_to_ch: int
    ratio_x: Optional[float]
    k1: Optional[float]
    k2: Optional[float]

    @property
    def censored(self) -> bool:
        return self.last_dead_round is None


def _check_order(first_dead, last_dead):
    if not 1 <= first_dead <= last_dead:
        raise ValueError(
            f"need 1 <= first_dead <= last_dead, got first={first_dead}, last={last_dead}"
        )


def ratio_x(first_dead: int, last_dead: int) -> float:
    _check_order(first_dead, last_dead)
    return first_dead / last_dead


def estimate_k1(p: float, first_dead: int, last_dead: int) -> float:
    """Proportionality constant linking p to the lifetime/stability ratio.

    From ``p = k1 * last_dead / first_dead``.
    """
    if last_dead == 0:
        raise ValueError("last_dead must be non-zero")
    _check_order(first_dead, last_dead)
    if not 0 < p <= 1:
        raise ValueError(f"p must lie in (0, 1], got {p}")
    # ratio first, so the result can never round above p
    return p * (first_dead / last_dead)


def estimate_k2(p: float, pkts_bs: int, pkts_ch: int) -> Optional[float]:
    """From ``p = k2 * pkts_bs / pkts_ch``; None when nothing reached the BS."""
    if not 0 < p <= 1:
        raise ValueError(f"p must lie in (0, 1], got {p}")
    if pkts_bs < 0 or pkts_ch < 0:
        raise ValueError("packet counts must be non-negative")
    if pkts_bs == 0:
        return None
    return p * pkts_ch / pkts_bs


def summarize(records: Sequence[RoundRecord], p: float, node_count: Optional[int] = None) -> SimSummary:
    """Fold a round trace into a :class:`SimSummary`.

    ``node_count`` is the number of nodes alive before round 1. When omitted it
    is taken from the first record, which is only right if nobody died in the
    first round.
    """
    if not records:
        raise ValueError("cannot summarize an empty trace")
    initial = records[0].alive if node_count is None else node_count
    first_dead = next((rec.r for rec in records if rec.alive < initial), None)
    last_dead = next((rec.r for rec in records if rec.alive == 0), None)
    total_bs = sum(rec.packets_to_bs for rec in records)
    total_ch = sum(rec.packets_to_ch for rec in records)
    x = k1 = None
    if first_dead is not None and last_dead is not None:
        x = ratio_x(first_dead, last_dead)
        k1 = estimate_k1(p, first_dead, last_dead)
    return SimSummary(
        first_dead_round=first_dead,
        last_dead_round=last_dead,
        total_packets_to_bs=total_bs,
        total_packets_to_ch=total_ch,
        ratio_x=x,
        k1=k1,
        k2=estimate_k2(p, total_bs, total_ch),
    )


def spearman(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Spearman rank correlation (average ranks for ties); 0.0 if a side is constant."""
    rx = rankdata(xs)
    ry = rankdata(ys)
    rx = rx - rx.mean()
    ry = ry - ry.mean()
    denom = math.sqrt(float(np.dot(rx, rx)) * float(np.dot(ry, ry)))
    if denom == 0.0:
        return 0.0
    return float(np.dot(rx, ry)) / denom


def trend_check(series: Sequence[Tuple[float, float]], expected: str) -> Tuple[bool, float]:
    """Test a (parameter, metric) series for a strict monotone trend.

    Passes only when the Spearman coefficient is exactly +1 (``increasing``)
    or -1 (``decreasing``).
    """
    if expected not in ("increasing", "decreasing"):
        raise ValueError(f"expected must be 'increasing' or 'decreasing', got {expected!r}")
    if len(series) < 3:
        raise ValueError("trend_check needs at least 3 points")
    params = [float(a) for a, _ in series]
    if len(set(params)) != len(params):
        raise ValueError("duplicate parameter values in series")
    metrics = [float(b) for _, b in series]
    rho = spearman(params, metrics)
    target = 1.0 if expected == "increasing" else -1.0
    return abs(rho - target) < 1e-12, rho
