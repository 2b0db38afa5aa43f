"""Trace and sweep CSV files.

Floats are written with 9 significant digits, missing values as empty
fields, and rows end in a bare ``\\n``.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import List, Sequence, Union

from imodleach.harness.sweep import SweepResult, SweepRow
from imodleach.metrics import RoundRecord, SimSummary

TRACE_HEADER = ["round", "alive", "cluster_heads", "packets_to_ch", "packets_to_bs", "energy_remaining_j"]
SWEEP_HEADER = [
    "p", "h", "s", "sink", "seed", "first_dead_round", "last_dead_round",
    "packets_to_bs", "packets_to_ch", "ratio_x", "k1", "k2",
]


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".9g")
    return str(value)


def _write(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])


def write_trace_csv(records: Sequence[RoundRecord], path: Union[str, Path]) -> None:
    _write(path, TRACE_HEADER, (
        (rec.r, rec.alive, rec.ch_count, rec.packets_to_ch, rec.packets_to_bs, float(rec.energy_remaining))
        for rec in records
    ))


def write_sweep_csv(result: SweepResult, path: Union[str, Path]) -> None:
    _write(path, SWEEP_HEADER, (
        (float(row.p), float(row.h), float(row.s), row.sink, row.seed,
         row.summary.first_dead_round, row.summary.last_dead_round,
         row.summary.total_packets_to_bs, row.summary.total_packets_to_ch,
         row.summary.ratio_x, row.summary.k1, row.summary.k2)
        for row in result.rows
    ))


def write_csv(rows: Union[Sequence[RoundRecord], SweepResult], path: Union[str, Path]) -> None:
    if isinstance(rows, SweepResult):
        write_sweep_csv(rows, path)
    else:
        write_trace_csv(rows, path)


def _read(path, header):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        found = next(reader, None)
        if found != header:
            raise ValueError(f"{path}: unexpected header {found!r}")
        return list(reader)


def _opt(text, kind):
    return None if text == "" else kind(text)


def read_trace_csv(path: Union[str, Path]) -> List[RoundRecord]:
    return [
        RoundRecord(int(r), int(alive), int(chs), int(to_ch), int(to_bs), float(energy))
        for r, alive, chs, to_ch, to_bs, energy in _read(path, TRACE_HEADER)
    ]


def read_sweep_csv(path: Union[str, Path]) -> SweepResult:
    rows = []
    for p, h, s, sink, seed, first, last, to_bs, to_ch, x, k1, k2 in _read(path, SWEEP_HEADER):
        summary = SimSummary(
            first_dead_round=_opt(first, int),
            last_dead_round=_opt(last, int),
            total_packets_to_bs=int(to_bs),
            total_packets_to_ch=int(to_ch),
            ratio_x=_opt(x, float),
            k1=_opt(k1, float),
            k2=_opt(k2, float),
        )
        rows.append(SweepRow(float(p), float(h), float(s), sink, int(seed), summary))
    return SweepResult(rows)


def read_header(path: Union[str, Path]) -> List[str]:
    with open(path, newline="") as fh:
        return next(csv.reader(fh), [])
