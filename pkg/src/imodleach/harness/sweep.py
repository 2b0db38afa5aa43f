"""Parameter sweeps over (p, h, s, sink) with seed replication."""

from __future__ import annotations

import logging
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from imodleach.harness.config import SweepSpec, describe_cell
from imodleach.metrics import SimSummary
from imodleach.model import ConfigError, NetworkConfig
from imodleach.protocol import run_simulation

log = logging.getLogger(__name__)

CellKey = Tuple[float, float, float, str]


@dataclass(frozen=True)
class SweepRow:
    p: float
    h: float
    s: float
    sink: str
    seed: int
    summary: SimSummary

    @property
    def key(self) -> CellKey:
        return (self.p, self.h, self.s, self.sink)


@dataclass(frozen=True)
class CellStats:
    """Seed-aggregated metrics of one sweep cell.

    Round metrics aggregate only the runs where the event happened; the
    ``censored`` count says how many runs hit max_rounds with nodes alive.
    """

    runs: int
    censored: int
    first_dead_round: Optional[float]
    last_dead_round: Optional[float]
    packets_to_bs: float
    packets_to_ch: float
    ratio_x: Optional[float]
    k1: Optional[float]
    k2: Optional[float]


@dataclass
class SweepResult:
    rows: List[SweepRow]

    def averaged(self, stat: str = "mean") -> Dict[CellKey, CellStats]:
        """Seed-aggregated view keyed by (p, h, s, sink); ``stat`` is mean or median."""
        if stat not in ("mean", "median"):
            raise ValueError(f"stat must be 'mean' or 'median', got {stat!r}")
        agg = statistics.mean if stat == "mean" else statistics.median

        def over(values):
            values = [v for v in values if v is not None]
            return float(agg(values)) if values else None

        groups: Dict[CellKey, List[SimSummary]] = {}
        for row in self.rows:
            groups.setdefault(row.key, []).append(row.summary)
        return {
            key: CellStats(
                runs=len(runs),
                censored=sum(s.censored for s in runs),
                first_dead_round=over(s.first_dead_round for s in runs),
                last_dead_round=over(s.last_dead_round for s in runs),
                packets_to_bs=float(agg(s.total_packets_to_bs for s in runs)),
                packets_to_ch=float(agg(s.total_packets_to_ch for s in runs)),
                ratio_x=over(s.ratio_x for s in runs),
                k1=over(s.k1 for s in runs),
                k2=over(s.k2 for s in runs),
            )
            for key, runs in groups.items()
        }


def _run_cell(config: NetworkConfig) -> SimSummary:
    return run_simulation(config)[1]


def run_sweep(spec: SweepSpec, workers: int = 1) -> SweepResult:
    """Run every cell x seed; rows come back in (p, h, s, sink, seed) order."""
    spec.validate()
    cells = spec.cells()
    configs = []
    for cell in cells:
        config = spec.cell_config(*cell)
        try:
            config.validate()
        except ConfigError as exc:
            raise ConfigError(exc.key, f"{exc.message} (in sweep cell {describe_cell(cell)})") from None
        configs.append(config)
    log.info("sweep: %d runs (%d cells x %d seeds), %d worker(s)",
             len(configs), len(configs) // len(spec.seeds), len(spec.seeds), workers)

    if workers <= 1:
        summaries = [_run_cell(c) for c in configs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            summaries = list(pool.map(_run_cell, configs, chunksize=1))

    rows = [
        SweepRow(p=p, h=h, s=s, sink=sink.label, seed=seed, summary=summary)
        for (p, h, s, sink, seed), summary in zip(cells, summaries)
    ]
    return SweepResult(rows)
