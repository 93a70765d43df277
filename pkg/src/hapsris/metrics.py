"""Rate, power consumption, energy efficiency, payload feasibility and
empirical CDFs."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .ris import Direction, RisMode

SPEED_OF_LIGHT = 299_792_458.0


def dbm_to_w(dbm):
    return 10.0 ** ((np.asarray(dbm, dtype=float) - 30.0) / 10.0) if np.ndim(dbm) \
        else 10.0 ** ((dbm - 30.0) / 10.0)


def w_to_dbm(w):
    return 10.0 * np.log10(w) + 30.0


@dataclass(frozen=True)
class RisPowerParams:
    p_sw: float = 7.8e-3  # W per element
    p_dc: float = 10.0 ** (-5.0 / 10.0) * 1e-3  # -5 dBm per element
    p_a: float = 2.0  # W per amplifier

    def validate(self) -> "RisPowerParams":
        for name in ("p_sw", "p_dc", "p_a"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ConfigurationError(f"{name} must be >= 0 W, got {v}")
        return self


@dataclass(frozen=True)
class FeasibilityParams:
    element_mass: float = 0.010  # kg
    solar_irradiance: float = 1360.0  # W/m^2
    solar_efficiency: float = 0.27

    def validate(self) -> "FeasibilityParams":
        if not (self.element_mass > 0 and self.solar_irradiance > 0):
            raise ConfigurationError("element_mass and solar_irradiance must be positive")
        if not 0 < self.solar_efficiency <= 1:
            raise ConfigurationError(f"solar_efficiency must be in (0, 1], got {self.solar_efficiency}")
        return self


@dataclass(frozen=True)
class LinkMetrics:
    gateway_id: int
    drop_id: int
    direction: Direction
    snr_db: float
    rate_bps: float
    energy_efficiency: float


def shannon_rate(snr_linear, bandwidth: float):
    """bandwidth * log2(1 + snr) in bit/s."""
    snr = np.asarray(snr_linear, dtype=float)
    if np.any(snr < 0):
        raise ValueError("SNR must be non-negative")
    if not bandwidth > 0:
        raise ValueError("bandwidth must be positive")
    out = bandwidth * np.log2(1.0 + snr)
    return float(out) if out.ndim == 0 else out


def ris_power_consumption(n_total: int, mode: RisMode, group_size_L: int | None,
                          params: RisPowerParams = RisPowerParams()) -> float:
    """N P_sw + N P_dc + (N / L) P_A; the amplifier term vanishes when passive."""
    static = n_total * params.p_sw + n_total * params.p_dc
    if mode is RisMode.PASSIVE:
        return static
    if not group_size_L or n_total % group_size_L:
        raise ConfigurationError(
            f"n_total={n_total} is not divisible by group_size_L={group_size_L}")
    return static + (n_total // group_size_L) * params.p_a


def energy_efficiency(rate_bps, tx_power: float, ris_power: float):
    """Bits per joule over transmit plus RIS power."""
    total = tx_power + ris_power
    if np.any(np.asarray(total) <= 0):
        raise ValueError("total consumed power must be positive")
    return rate_bps / total


@dataclass(frozen=True)
class FeasibilityReport:
    area_m2: float
    mass_kg: float
    solar_area_m2: float


def feasibility_report(n_total: int, frequency_ghz: float, cell_edge_fraction: float,
                       ris_power: float,
                       params: FeasibilityParams = FeasibilityParams()) -> FeasibilityReport:
    if not (n_total > 0 and frequency_ghz > 0 and cell_edge_fraction > 0 and ris_power >= 0):
        raise ValueError("feasibility inputs must be positive")
    params.validate()
    wavelength = SPEED_OF_LIGHT / (frequency_ghz * 1e9)
    area = n_total * (cell_edge_fraction * wavelength) ** 2
    mass = n_total * params.element_mass
    solar = ris_power / (params.solar_irradiance * params.solar_efficiency)
    return FeasibilityReport(area, mass, solar)


class CdfSummary:
    """Empirical CDF of a finite sample. Immutable after construction."""

    __slots__ = ("_values",)

    def __init__(self, values):
        v = np.sort(np.asarray(values, dtype=float).ravel())
        if v.size == 0:
            raise ValueError("empirical CDF of an empty sample")
        if not np.all(np.isfinite(v)):
            raise ValueError("empirical CDF requires finite values")
        v.flags.writeable = False
        self._values = v

    @property
    def sorted_values(self) -> np.ndarray:
        return self._values

    def __len__(self):
        return self._values.size

    def evaluate(self, x):
        """Fraction of samples <= x."""
        out = np.searchsorted(self._values, x, side="right") / self._values.size
        return float(out) if np.ndim(out) == 0 else out

    def percentile(self, p: float) -> float:
        """Smallest sample v with evaluate(v) >= p, for p in [0, 1]."""
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"percentile level must be in [0, 1], got {p}")
        n = self._values.size
        levels = np.arange(1, n + 1) / n
        idx = int(np.searchsorted(levels, p, side="left"))
        return float(self._values[min(idx, n - 1)])

    def median(self) -> float:
        return self.percentile(0.5)


def empirical_cdf(values) -> CdfSummary:
    return CdfSummary(values)
