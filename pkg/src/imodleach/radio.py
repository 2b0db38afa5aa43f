"""First-order radio energy model with two transmit power levels.

Transmit cost follows the free-space d^2 law below the crossover distance and
the multipath d^4 law at or above it. Intra-cluster links use amplifiers that
are the base-station amplifiers divided by ``RadioParams.intra_divisor``.

All functions accept scalars or numpy arrays for ``k`` and ``d``.
"""

from __future__ import annotations

import enum
import math

import numpy as np

from imodleach.model import RadioParams


class PowerLevel(str, enum.Enum):
    TO_BASE_STATION = "to_base_station"
    INTRA_CLUSTER = "intra_cluster"


def amplifiers(radio: RadioParams, level: PowerLevel) -> tuple:
    """(free-space, multipath) amplifier constants for ``level``."""
    if PowerLevel(level) is PowerLevel.INTRA_CLUSTER:
        return radio.eps_fs / radio.intra_divisor, radio.eps_mp / radio.intra_divisor
    return radio.eps_fs, radio.eps_mp


def crossover_distance(radio: RadioParams, level: PowerLevel = PowerLevel.TO_BASE_STATION) -> float:
    # the divisor cancels in the ratio, so both levels share one d0
    PowerLevel(level)
    return math.sqrt(radio.eps_fs / radio.eps_mp)


def _check_non_negative(name, value):
    if np.any(np.asarray(value) < 0):
        raise ValueError(f"{name} must be non-negative, got {value!r}")


def _as_result(value):
    if np.ndim(value) == 0:
        return float(value)
    return value


def tx_energy(radio: RadioParams, k, d, level: PowerLevel = PowerLevel.TO_BASE_STATION):
    """Energy to transmit ``k`` bits over ``d`` meters."""
    _check_non_negative("k", k)
    _check_non_negative("d", d)
    return _as_result(tx_energy_unchecked(radio, k, d, level))


def tx_energy_unchecked(radio: RadioParams, k, d, level: PowerLevel):
    """:func:`tx_energy` without input validation, for the round engine."""
    fs, mp = amplifiers(radio, level)
    d0 = crossover_distance(radio, level)
    d = np.asarray(d, dtype=float)
    d2 = d * d
    amp = np.where(d < d0, fs * d2, mp * d2 * d2)
    return radio.e_elec * k + amp * k


def rx_energy(radio: RadioParams, k):
    _check_non_negative("k", k)
    return _as_result(radio.e_elec * np.asarray(k, dtype=float))


def agg_energy(radio: RadioParams, k, n_reports):
    """Cost of aggregating ``n_reports`` reports of ``k`` bits each."""
    _check_non_negative("k", k)
    _check_non_negative("n_reports", n_reports)
    return _as_result(radio.e_da * np.asarray(k, dtype=float) * np.asarray(n_reports, dtype=float))
