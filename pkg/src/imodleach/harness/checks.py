"""Built-in acceptance suite: trend, property and unit checks with fixed tolerances.

Used by ``imodleach check`` and by the test suite. Sweeps are cached on the
suite instance so criteria sharing a sweep only run it once.
"""

from __future__ import annotations

import math
import statistics
import tempfile
import time
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Dict, List, Tuple

from imodleach import radio
from imodleach.harness.config import DEFAULT_SEEDS, SweepSpec
from imodleach.harness.csvio import write_sweep_csv
from imodleach.harness.sweep import SweepResult, run_sweep
from imodleach.metrics import trend_check
from imodleach.model import NetworkConfig, ProtocolParams, RadioParams, SinkPosition, build_network
from imodleach.protocol import run_simulation, simulate_round

P_AXIS = (0.1, 0.3, 0.5, 0.8)
S_AXIS = (1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0)
SWEEP_TIME_LIMIT_S = 30.0
SINK_RATIO_MIN = 2.0
CV_MAX = 0.25
RADIO_REL_TOL = 1e-9
CONTINUITY_REL_TOL = 1e-12
CONSERVATION_REL_TOL = 1e-9
FIRST_DEAD_BAND = (40, 500)
LAST_DEAD_BAND = (500, 3000)


@dataclass(frozen=True)
class CheckResult:
    number: int
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.number:>2}. {self.name}: {self.detail}"


def _sweep_spec(base: NetworkConfig, seeds, p=None, s=None, sinks=None) -> SweepSpec:
    return SweepSpec(
        base=base,
        p_values=tuple(p or (base.protocol.p,)),
        h_values=(base.protocol.h,),
        s_values=tuple(s or (base.protocol.s,)),
        sinks=tuple(sinks or (base.sink,)),
        seeds=tuple(seeds),
    )


class AcceptanceSuite:
    def __init__(self, seeds=DEFAULT_SEEDS, workers: int = 1, base: NetworkConfig = NetworkConfig()):
        self.seeds = tuple(seeds)
        self.workers = workers
        self.base = base
        self._sweeps: Dict[str, Tuple[SweepResult, float]] = {}

    def _sweep(self, name: str, spec: SweepSpec) -> Tuple[SweepResult, float]:
        if name not in self._sweeps:
            start = time.perf_counter()
            result = run_sweep(spec, workers=self.workers)
            self._sweeps[name] = (result, time.perf_counter() - start)
        return self._sweeps[name]

    def p_sweep(self):
        return self._sweep("p", _sweep_spec(self.base, self.seeds, p=P_AXIS))

    def sink_sweep(self):
        base = replace(self.base, protocol=replace(self.base.protocol, p=0.1))
        sinks = (SinkPosition("center"), SinkPosition("origin"))
        return self._sweep("sink", _sweep_spec(base, self.seeds, sinks=sinks))

    def s_sweep(self):
        base = replace(self.base, protocol=replace(self.base.protocol, p=0.4))
        return self._sweep("s", _sweep_spec(base, self.seeds, s=S_AXIS))

    def _p_series(self, metric: str):
        result, _ = self.p_sweep()
        means = result.averaged()
        base = self.base
        return [(p, getattr(means[(p, base.protocol.h, base.protocol.s, base.sink.label)], metric)) for p in P_AXIS]

    # -- criteria ----------------------------------------------------------

    def lifetime_trend(self) -> CheckResult:
        result, elapsed = self.p_sweep()
        series = self._p_series("last_dead_round")
        censored = sum(r.summary.censored for r in result.rows)
        ok, rho = (False, float("nan")) if any(v is None for _, v in series) else trend_check(series, "increasing")
        passed = ok and censored == 0 and elapsed < SWEEP_TIME_LIMIT_S
        return CheckResult(1, "last-death round increases with p", passed,
                           f"means={_fmt_series(series)} spearman={rho:+.3f} censored={censored} "
                           f"sweep_time={elapsed:.1f}s (limit {SWEEP_TIME_LIMIT_S:g}s, workers={self.workers})")

    def stability_trend(self) -> CheckResult:
        series = self._p_series("first_dead_round")
        ok, rho = trend_check(series, "decreasing")
        return CheckResult(2, "first-death round decreases with p", ok,
                           f"means={_fmt_series(series)} spearman={rho:+.3f}")

    def packet_trends(self) -> CheckResult:
        bs = self._p_series("packets_to_bs")
        ch = self._p_series("packets_to_ch")
        ok_bs, rho_bs = trend_check(bs, "increasing")
        ok_ch, rho_ch = trend_check(ch, "decreasing")
        return CheckResult(3, "packets to BS increase / packets to CH decrease with p", ok_bs and ok_ch,
                           f"bs={_fmt_series(bs)} ({rho_bs:+.3f}); ch={_fmt_series(ch)} ({rho_ch:+.3f})")

    def sink_effect(self) -> CheckResult:
        result, _ = self.sink_sweep()
        means = result.averaged()
        b = self.base.protocol
        center = means[(0.1, b.h, b.s, "center")].packets_to_ch
        origin = means[(0.1, b.h, b.s, "origin")].packets_to_ch
        ratio = center / origin if origin else math.inf
        return CheckResult(4, "packets to CH: sink at center >= 2x sink at origin", ratio >= SINK_RATIO_MIN,
                           f"center={center:.0f} origin={origin:.0f} ratio={ratio:.2f}")

    def soft_threshold_insensitivity(self) -> CheckResult:
        result, _ = self.s_sweep()
        means = result.averaged()
        b = self.base
        firsts = [means[(0.4, b.protocol.h, s, b.sink.label)].first_dead_round for s in S_AXIS]
        cv = statistics.pstdev(firsts) / statistics.mean(firsts)
        return CheckResult(5, "first-death round insensitive to s at p=0.4", cv < CV_MAX,
                           f"means={[round(v, 1) for v in firsts]} cv={cv:.4f} (limit {CV_MAX})")

    def k1_bound(self) -> CheckResult:
        rows = [row for name in ("p", "sink", "s") for row in self._sweep_rows(name)]
        completed = [row for row in rows if not row.summary.censored]
        bad = [row for row in completed if not (0 < row.summary.k1 <= row.p)]
        k2 = [row.summary.k2 for row in rows if row.summary.k2 is not None]
        k2_range = f"[{min(k2):.4f}, {max(k2):.4f}]" if k2 else "n/a"
        return CheckResult(6, "k1 in (0, p] for every completed run", not bad and bool(completed),
                           f"{len(completed)}/{len(rows)} completed runs checked, {len(bad)} violations; "
                           f"k2 range {k2_range} ({sum(v > 1 for v in k2)} above 1)")

    def _sweep_rows(self, name):
        getter = {"p": self.p_sweep, "sink": self.sink_sweep, "s": self.s_sweep}[name]
        return getter()[0].rows

    def radio_units(self) -> CheckResult:
        rad = RadioParams()
        tx0 = radio.tx_energy(rad, 4000, 0.0)
        agg = radio.agg_energy(rad, 4000, 1)
        d0 = radio.crossover_distance(rad)
        fs = rad.e_elec * 4000 + rad.eps_fs * 4000 * d0 ** 2
        mp = rad.e_elec * 4000 + rad.eps_mp * 4000 * d0 ** 4
        checks = [
            math.isclose(tx0, 2.0e-4, rel_tol=RADIO_REL_TOL),
            math.isclose(agg, 2.0e-5, rel_tol=RADIO_REL_TOL),
            math.isclose(d0, math.sqrt(10 / 0.0013), rel_tol=RADIO_REL_TOL),
            abs(fs - mp) / radio.tx_energy(rad, 4000, d0) < CONTINUITY_REL_TOL,
        ]
        return CheckResult(7, "radio model unit values", all(checks),
                           f"tx(4000,0)={tx0:.6g} agg(4000,1)={agg:.6g} d0={d0:.6f} "
                           f"continuity={abs(fs - mp) / mp:.2e}")

    def conservation_and_determinism(self) -> CheckResult:
        config = replace(self.base, seed=self.seeds[0])
        state = build_network(config)
        initial = float(state.energy.sum())
        spent = 0.0
        worst = 0.0
        while True:
            rec = simulate_round(state, config)
            if rec is None:
                break
            spent += state.last_outcome.energy_spent
            worst = max(worst, abs(initial - (rec.energy_remaining + spent)) / initial)
            if rec.alive == 0 or state.r >= config.max_rounds:
                break
        same = run_simulation(config) == run_simulation(config)

        spec = _sweep_spec(replace(self.base, max_rounds=400), self.seeds[:3], p=(0.1, 0.5))
        with tempfile.TemporaryDirectory() as tmp:
            one, many = Path(tmp, "w1.csv"), Path(tmp, "wn.csv")
            write_sweep_csv(run_sweep(spec, workers=1), one)
            write_sweep_csv(run_sweep(spec, workers=max(2, self.workers)), many)
            identical = one.read_bytes() == many.read_bytes()
        passed = worst < CONSERVATION_REL_TOL and same and identical
        return CheckResult(8, "energy conservation, deterministic traces, schedule-independent sweeps", passed,
                           f"max balance error={worst:.2e} (limit {CONSERVATION_REL_TOL:g}) "
                           f"repeat-identical={same} 1-vs-N-workers-identical={identical}")

    def reactive_reduces_to_proactive(self) -> CheckResult:
        config = replace(self.base, seed=self.seeds[0], protocol=replace(self.base.protocol, h=0.0, s=0.0))
        state = build_network(config)
        mismatches = 0
        rounds = 0
        while state.r < config.max_rounds:
            rec = simulate_round(state, config)
            if rec is None:
                break
            _, heads = state.last_assignment.arrays()
            rounds += 1
            mismatches += rec.packets_to_ch != int((heads >= 0).sum())
            if rec.alive == 0:
                break
        return CheckResult(9, "h=0, s=0: packets to CH equal clustered members every round", mismatches == 0,
                           f"{rounds} rounds, {mismatches} mismatches")

    def magnitude_band(self) -> CheckResult:
        first = dict(self._p_series("first_dead_round"))[0.1]
        last = dict(self._p_series("last_dead_round"))[0.1]
        ok = FIRST_DEAD_BAND[0] <= first <= FIRST_DEAD_BAND[1] and LAST_DEAD_BAND[0] <= last <= LAST_DEAD_BAND[1]
        return CheckResult(10, "default p=0.1 lifetime within order-of-magnitude band", ok,
                           f"first={first:.1f} in {list(FIRST_DEAD_BAND)}, last={last:.1f} in {list(LAST_DEAD_BAND)}")

    def criteria(self) -> List[Callable[[], CheckResult]]:
        return [
            self.lifetime_trend,
            self.stability_trend,
            self.packet_trends,
            self.sink_effect,
            self.soft_threshold_insensitivity,
            self.k1_bound,
            self.radio_units,
            self.conservation_and_determinism,
            self.reactive_reduces_to_proactive,
            self.magnitude_band,
        ]

    def run_all(self) -> List[CheckResult]:
        return [check() for check in self.criteria()]


def _fmt_series(series) -> str:
    return "[" + ", ".join(f"{p:g}:{v:.1f}" for p, v in series) + "]"
