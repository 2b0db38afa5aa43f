"""Flat key-value config documents (YAML syntax) for single runs and sweeps.

A document is a flat mapping. Any of ``p_values``, ``h_values``,
``s_values``, ``sinks`` or ``seeds`` turns it into a sweep; the remaining
keys then describe the base configuration every cell starts from.

Example::

    p: 0.4
    sink: center
    seeds: [1, 2, 3]
    h_values: [100, 200, 300]
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, List, Mapping, Tuple, Union

import yaml

from imodleach.model import ConfigError, NetworkConfig, ProtocolParams, RadioParams, SinkPosition

NETWORK_KEYS = {
    "field_width": float,
    "field_height": float,
    "node_count": int,
    "initial_energy": float,
    "packet_bits": int,
    "max_rounds": int,
    "sensed_min": float,
    "sensed_max": float,
    "seed": int,
}
RADIO_KEYS = {name: float for name in ("e_elec", "e_da", "eps_fs", "eps_mp", "intra_divisor")}
PROTOCOL_KEYS = {"p": float, "s": float, "h": float, "retention_fraction": float}
SWEEP_KEYS = ("p_values", "h_values", "s_values", "sinks", "seeds")
DEFAULT_SEEDS = tuple(range(1, 11))


@dataclass(frozen=True)
class SweepSpec:
    base: NetworkConfig
    p_values: Tuple[float, ...]
    h_values: Tuple[float, ...]
    s_values: Tuple[float, ...]
    sinks: Tuple[SinkPosition, ...]
    seeds: Tuple[int, ...] = DEFAULT_SEEDS

    def validate(self) -> None:
        for name in SWEEP_KEYS:
            if not getattr(self, name):
                raise ConfigError(name, "axis must not be empty")
        for name in ("p_values", "h_values", "s_values", "seeds"):
            values = getattr(self, name)
            if len(set(values)) != len(values):
                raise ConfigError(name, "axis values must be distinct")
        labels = [sink.label for sink in self.sinks]
        if len(set(labels)) != len(labels):
            raise ConfigError("sinks", "axis values must be distinct")

    @property
    def size(self) -> int:
        return len(self.p_values) * len(self.h_values) * len(self.s_values) * len(self.sinks) * len(self.seeds)

    def cells(self) -> List[Tuple[float, float, float, SinkPosition, int]]:
        """Every (p, h, s, sink, seed) combination in lexicographic order."""
        cells = [
            (p, h, s, sink, seed)
            for p in self.p_values
            for h in self.h_values
            for s in self.s_values
            for sink in self.sinks
            for seed in self.seeds
        ]
        cells.sort(key=lambda c: (c[0], c[1], c[2], c[3].label, c[4]))
        return cells

    def cell_config(self, p, h, s, sink, seed) -> NetworkConfig:
        protocol = replace(self.base.protocol, p=p, h=h, s=s)
        return replace(self.base, protocol=protocol, sink=sink, seed=seed)


def _coerce(key: str, value: Any, kind):
    if isinstance(value, bool) or value is None:
        raise ConfigError(key, f"expected a number, got {value!r}")
    if isinstance(value, str):
        try:
            value = float(value)
        except ValueError:
            raise ConfigError(key, f"expected a number, got {value!r}") from None
    if not isinstance(value, (int, float)):
        raise ConfigError(key, f"expected a number, got {value!r}")
    if kind is int:
        if isinstance(value, float) and not (math.isfinite(value) and value.is_integer()):
            raise ConfigError(key, f"expected an integer, got {value!r}")
        return int(value)
    return float(value)


def _axis(key: str, value: Any, kind) -> tuple:
    if not isinstance(value, (list, tuple)):
        value = [value]
    return tuple(_coerce(key, v, kind) for v in value)


def load_document(source: Union[str, Path, Mapping, None]) -> dict:
    """Turn YAML text, a path to a YAML file, or a mapping into a dict."""
    if source is None:
        return {}
    if isinstance(source, Mapping):
        return dict(source)
    if isinstance(source, Path):
        source = source.read_text()
    try:
        doc = yaml.safe_load(source)
    except yaml.YAMLError as exc:
        raise ConfigError("document", f"not valid YAML: {exc}") from None
    if doc is None:
        return {}
    if not isinstance(doc, Mapping):
        raise ConfigError("document", "top level must be a key-value mapping")
    return dict(doc)


def parse_config(document: Union[str, Path, Mapping, None] = None) -> Union[NetworkConfig, SweepSpec]:
    doc = load_document(document)
    known = set(NETWORK_KEYS) | set(RADIO_KEYS) | set(PROTOCOL_KEYS) | set(SWEEP_KEYS) | {"sink", "variant"}
    for key in doc:
        if key not in known:
            raise ConfigError(str(key), "unknown key")

    network = {k: _coerce(k, doc[k], kind) for k, kind in NETWORK_KEYS.items() if k in doc}
    radio = {k: _coerce(k, doc[k], kind) for k, kind in RADIO_KEYS.items() if k in doc}
    protocol = {k: _coerce(k, doc[k], kind) for k, kind in PROTOCOL_KEYS.items() if k in doc}
    if "variant" in doc:
        protocol["variant"] = str(doc["variant"])
    if "sink" in doc:
        network["sink"] = SinkPosition.parse(doc["sink"])

    config = NetworkConfig(radio=RadioParams(**radio), protocol=ProtocolParams(**protocol), **network)
    config.validate()
    if not any(key in doc for key in SWEEP_KEYS):
        return config

    spec = SweepSpec(
        base=config,
        p_values=_axis("p_values", doc["p_values"], float) if "p_values" in doc else (config.protocol.p,),
        h_values=_axis("h_values", doc["h_values"], float) if "h_values" in doc else (config.protocol.h,),
        s_values=_axis("s_values", doc["s_values"], float) if "s_values" in doc else (config.protocol.s,),
        sinks=tuple(SinkPosition.parse(v) for v in _listify(doc["sinks"])) if "sinks" in doc else (config.sink,),
        seeds=_axis("seeds", doc["seeds"], int) if "seeds" in doc else DEFAULT_SEEDS,
    )
    spec.validate()
    for cell in spec.cells():
        try:
            spec.cell_config(*cell).validate()
        except ConfigError as exc:
            raise ConfigError(exc.key, f"{exc.message} (in sweep cell {describe_cell(cell)})") from None
    return spec


def _listify(value):
    return value if isinstance(value, (list, tuple)) else [value]


def describe_cell(cell) -> str:
    p, h, s, sink, seed = cell
    return f"p={p:g}, h={h:g}, s={s:g}, sink={sink.label}, seed={seed}"
