"""Domain types, configuration and deterministic network construction."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

VARIANTS = ("leach", "modleach", "imodleach")
SINK_TAGS = ("origin", "x_axis_midpoint", "y_axis_midpoint", "center", "custom")

# Substream identifiers; each is combined with the master seed so that placement
# does not shift when protocol parameters change.
STREAM_PLACEMENT = 0
STREAM_ELECTION = 1
STREAM_SENSING = 2


class ConfigError(ValueError):
    """Invalid configuration value. ``key`` names the offending setting."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key
        self.message = message


@dataclass(frozen=True)
class Position:
    x: float
    y: float

    def distance_to(self, other: "Position") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass
class NodeState:
    id: int
    pos: Position
    energy: float
    alive: bool = True
    is_ch: bool = False
    # rounds elapsed since the node last served as CH; None means never
    rounds_since_ch: Optional[int] = None
    energy_at_election: float = 0.0
    last_reported_value: Optional[float] = None


@dataclass(frozen=True)
class RadioParams:
    """First-order radio constants (SI units).

    ``e_elec`` is the per-bit electronics cost paid on both transmit and
    receive, ``e_da`` the per-bit per-report aggregation cost, ``eps_fs`` the
    free-space amplifier (J/bit/m^2) and ``eps_mp`` the multipath amplifier
    (J/bit/m^4). Intra-cluster links use both amplifiers divided by
    ``intra_divisor``.
    """

    e_elec: float = 50e-9
    e_da: float = 5e-9
    eps_fs: float = 10e-12
    eps_mp: float = 0.0013e-12
    intra_divisor: float = 10.0

    @property
    def d0(self) -> float:
        return math.sqrt(self.eps_fs / self.eps_mp)

    def validate(self) -> None:
        for name in ("e_elec", "e_da", "eps_fs", "eps_mp", "intra_divisor"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ConfigError(name, f"must be a positive finite number, got {value!r}")


@dataclass(frozen=True)
class ProtocolParams:
    variant: str = "imodleach"
    p: float = 0.1
    s: float = 2.0
    h: float = 100.0
    retention_fraction: float = 0.7

    @property
    def epoch_length(self) -> int:
        # guard against 1/p landing a hair above an integer
        return max(1, math.ceil(1.0 / self.p - 1e-9))

    @property
    def uses_retention(self) -> bool:
        return self.variant != "leach"

    @property
    def uses_thresholds(self) -> bool:
        return self.variant != "leach"

    def validate(self) -> None:
        if self.variant not in VARIANTS:
            raise ConfigError("variant", f"must be one of {VARIANTS}, got {self.variant!r}")
        if not (isinstance(self.p, (int, float)) and 0 < self.p <= 1):
            raise ConfigError("p", f"must lie in (0, 1], got {self.p!r}")
        for name in ("s", "h"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value >= 0):
                raise ConfigError(name, f"must be a non-negative number, got {value!r}")
        frac = self.retention_fraction
        if not (isinstance(frac, (int, float)) and 0 <= frac <= 1):
            raise ConfigError("retention_fraction", f"must lie in [0, 1], got {frac!r}")


@dataclass(frozen=True)
class SinkPosition:
    tag: str = "center"
    custom: Optional[Position] = None

    @classmethod
    def parse(cls, text: str) -> "SinkPosition":
        """Parse ``center``/``origin``/... or ``x,y`` for a custom position."""
        text = str(text).strip()
        if text in SINK_TAGS and text != "custom":
            return cls(text)
        body = text
        if body.startswith("custom(") and body.endswith(")"):
            body = body[len("custom("):-1]
        parts = body.split(",")
        if len(parts) != 2:
            raise ConfigError("sink", f"unknown sink position {text!r}")
        try:
            x, y = (float(v) for v in parts)
        except ValueError:
            raise ConfigError("sink", f"unknown sink position {text!r}") from None
        return cls("custom", Position(x, y))

    @property
    def label(self) -> str:
        if self.tag == "custom":
            return f"custom({self.custom.x:g},{self.custom.y:g})"
        return self.tag


@dataclass(frozen=True)
class NetworkConfig:
    field_width: float = 400.0
    field_height: float = 400.0
    node_count: int = 100
    initial_energy: float = 0.5
    packet_bits: int = 4000
    max_rounds: int = 5000
    sink: SinkPosition = field(default_factory=SinkPosition)
    sensed_min: float = 0.0
    sensed_max: float = 1000.0
    radio: RadioParams = field(default_factory=RadioParams)
    protocol: ProtocolParams = field(default_factory=ProtocolParams)
    seed: int = 1

    def validate(self) -> None:
        for name in ("field_width", "field_height", "initial_energy"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ConfigError(name, f"must be positive, got {value!r}")
        for name in ("node_count", "packet_bits", "max_rounds"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
                raise ConfigError(name, f"must be a positive integer, got {value!r}")
        if not self.sensed_min < self.sensed_max:
            raise ConfigError("sensed_max", "sensed_min must be below sensed_max")
        if isinstance(self.seed, bool) or not isinstance(self.seed, (int, np.integer)) \
                or not 0 <= self.seed < 2**64:
            raise ConfigError("seed", f"must be an unsigned 64-bit integer, got {self.seed!r}")
        self.radio.validate()
        self.protocol.validate()
        sink_coordinates(self.sink, self)


def sink_coordinates(sink: SinkPosition, config: NetworkConfig) -> Position:
    w, h = config.field_width, config.field_height
    if sink.tag == "origin":
        return Position(0.0, 0.0)
    if sink.tag == "x_axis_midpoint":
        return Position(w / 2, 0.0)
    if sink.tag == "y_axis_midpoint":
        return Position(0.0, h / 2)
    if sink.tag == "center":
        return Position(w / 2, h / 2)
    if sink.tag == "custom":
        pos = sink.custom
        if pos is None or not (0 <= pos.x <= w and 0 <= pos.y <= h):
            raise ConfigError("sink", f"custom sink {pos} lies outside the {w:g}x{h:g} field")
        return pos
    raise ConfigError("sink", f"unknown sink tag {sink.tag!r}")


def substream(seed: int, stream: int, *index: int) -> np.random.Generator:
    """Generator for one named substream of the master seed."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream, *index)))


class SimState:
    """Mutable state of one simulation run.

    Per-node quantities are held as parallel numpy arrays indexed by node id;
    ``nodes`` materialises :class:`NodeState` snapshots for inspection.
    """

    def __init__(self, config: NetworkConfig, x: np.ndarray, y: np.ndarray, sink: Position):
        n = config.node_count
        self.config = config
        self.r = 0
        self.sink = sink
        self.x = x
        self.y = y
        self.energy = np.full(n, float(config.initial_energy))
        self.alive = np.ones(n, dtype=bool)
        self.is_ch = np.zeros(n, dtype=bool)
        self.last_ch_round = np.full(n, -1, dtype=np.int64)  # -1: never served
        self.energy_at_election = np.zeros(n)
        self.last_reported = np.full(n, np.nan)  # nan: nothing reported yet
        self.dist_to_sink = np.hypot(x - sink.x, y - sink.y)
        # bookkeeping of the previous setup phase, used by CH retention
        self.prev_chs: List[int] = []
        self.prev_member_of: dict = {}
        self.last_elected: List[int] = []
        self.last_retained: List[int] = []
        self.last_assignment = None
        self.last_outcome = None

    @property
    def node_count(self) -> int:
        return len(self.x)

    def node(self, i: int) -> NodeState:
        last = int(self.last_ch_round[i])
        reported = float(self.last_reported[i])
        return NodeState(
            id=i,
            pos=Position(float(self.x[i]), float(self.y[i])),
            energy=float(self.energy[i]),
            alive=bool(self.alive[i]),
            is_ch=bool(self.is_ch[i]),
            rounds_since_ch=None if last < 0 else self.r - last,
            energy_at_election=float(self.energy_at_election[i]),
            last_reported_value=None if math.isnan(reported) else reported,
        )

    @property
    def nodes(self) -> List[NodeState]:
        return [self.node(i) for i in range(self.node_count)]

    def alive_ids(self) -> List[int]:
        return np.flatnonzero(self.alive).tolist()


def build_network(config: NetworkConfig) -> SimState:
    config.validate()
    rng = substream(config.seed, STREAM_PLACEMENT)
    x = rng.uniform(0.0, config.field_width, config.node_count)
    y = rng.uniform(0.0, config.field_height, config.node_count)
    return SimState(config, x, y, sink_coordinates(config.sink, config))
