"""Monte Carlo campaign driver.

Each drop re-draws gateway positions and link states from its own substream,
seeded by ``SeedSequence([master_seed, drop_index])``. Drops are therefore
independent of evaluation order, and campaigns can be split across worker
processes with results merged in drop order.

Within a drop every scheme and transmit power sees the same placement and
the same LoS/shadowing realizations (common random numbers).
"""
from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import partial
from typing import Iterator, Sequence

import numpy as np

from .channel import ChannelParams, hop_gain_db, sample_link_states
from .errors import ConfigurationError
from .metrics import (
    CdfSummary,
    FeasibilityParams,
    FeasibilityReport,
    LinkMetrics,
    RisPowerParams,
    dbm_to_w,
    energy_efficiency,
    feasibility_report,
    ris_power_consumption,
    shannon_rate,
)
from .ris import Direction, RisArchitecture, budget_rho, cascade_snr, dynamic_noise_power
from .scenario import AreaSpec, ground_to_haps_geometry, link_geometry, sample_gateway_xy

DIRECTIONS = (Direction.DOWNLINK, Direction.UPLINK)
_DIR_CODE = {Direction.DOWNLINK: 0, Direction.UPLINK: 1}


def default_schemes(n_total: int = 30000) -> tuple[RisArchitecture, ...]:
    return (RisArchitecture.passive(n_total),
            RisArchitecture.active(2000, n_total),
            RisArchitecture.active(1000, n_total),
            RisArchitecture.active(500, n_total))


@dataclass(frozen=True)
class CampaignSpec:
    scenario: AreaSpec = field(default_factory=AreaSpec)
    channel: ChannelParams = field(default_factory=ChannelParams)
    schemes: tuple[RisArchitecture, ...] = field(default_factory=default_schemes)
    dl_tx_power_dbm: tuple[float, ...] = tuple(float(p) for p in range(50, 61))
    ul_tx_power_dbm: tuple[float, ...] = (28.0, 29.0, 30.0)
    num_drops: int = 100
    master_seed: int = 20240601
    power: RisPowerParams = field(default_factory=RisPowerParams)
    feasibility: FeasibilityParams = field(default_factory=FeasibilityParams)
    high_gain_receiver: bool = False
    high_gain_receiver_dbi: float = 15.0

    def validate(self) -> "CampaignSpec":
        self.scenario.validate()
        self.channel.validate()
        self.power.validate()
        self.feasibility.validate()
        if not self.schemes:
            raise ConfigurationError("at least one RIS scheme is required")
        for arch in self.schemes:
            arch.validate()
        labels = [a.label for a in self.schemes]
        if len(set(labels)) != len(labels):
            raise ConfigurationError(f"duplicate schemes: {labels}")
        if not self.dl_tx_power_dbm or not self.ul_tx_power_dbm:
            raise ConfigurationError("transmit-power grids must be non-empty")
        for grid in (self.dl_tx_power_dbm, self.ul_tx_power_dbm):
            if not all(math.isfinite(p) for p in grid):
                raise ConfigurationError("transmit powers must be finite")
        if isinstance(self.num_drops, bool) or int(self.num_drops) != self.num_drops \
                or self.num_drops < 1:
            raise ConfigurationError(f"num_drops must be a positive integer, got {self.num_drops}")
        if not 0 <= int(self.master_seed) < 2**64:
            raise ConfigurationError("master_seed must be an unsigned 64-bit integer")
        return self

    @property
    def gateway_gain_dbi(self) -> float:
        return self.high_gain_receiver_dbi if self.high_gain_receiver else self.channel.gw_antenna_gain

    def tx_grid(self, direction: Direction) -> tuple[float, ...]:
        return self.dl_tx_power_dbm if direction is Direction.DOWNLINK else self.ul_tx_power_dbm

    def ris_power(self, arch: RisArchitecture) -> float:
        params = replace(self.power, p_a=arch.pa_output_power)
        return ris_power_consumption(arch.n_total, arch.mode, arch.group_size_L, params)


_COLUMNS = ("scheme", "group_size", "direction", "tx_power_dbm", "drop_id", "gateway_id",
            "elevation_deg", "snr_db", "rate_bps", "ee_bit_per_joule")


@dataclass
class RecordTable:
    """Columnar per-gateway link records.

    ``scheme`` indexes the campaign's scheme tuple, ``group_size`` is 0 for a
    passive surface, ``direction`` is 0 for downlink and 1 for uplink.
    """

    scheme: np.ndarray
    group_size: np.ndarray
    direction: np.ndarray
    tx_power_dbm: np.ndarray
    drop_id: np.ndarray
    gateway_id: np.ndarray
    elevation_deg: np.ndarray
    snr_db: np.ndarray
    rate_bps: np.ndarray
    ee_bit_per_joule: np.ndarray

    def __len__(self) -> int:
        return int(self.scheme.size)

    @classmethod
    def concat(cls, tables: Sequence["RecordTable"]) -> "RecordTable":
        return cls(**{c: np.concatenate([getattr(t, c) for t in tables]) for c in _COLUMNS})

    def mask(self, scheme: int | None = None, direction: Direction | None = None,
             tx_power_dbm: float | None = None) -> np.ndarray:
        m = np.ones(len(self), dtype=bool)
        if scheme is not None:
            m &= self.scheme == scheme
        if direction is not None:
            m &= self.direction == _DIR_CODE[direction]
        if tx_power_dbm is not None:
            m &= self.tx_power_dbm == tx_power_dbm
        return m

    def subset(self, m: np.ndarray) -> "RecordTable":
        return RecordTable(**{c: getattr(self, c)[m] for c in _COLUMNS})

    def count(self, direction: Direction) -> int:
        return int(np.count_nonzero(self.direction == _DIR_CODE[direction]))

    def iter_metrics(self) -> Iterator[LinkMetrics]:
        dirs = {0: Direction.DOWNLINK, 1: Direction.UPLINK}
        for i in range(len(self)):
            yield LinkMetrics(int(self.gateway_id[i]), int(self.drop_id[i]),
                              dirs[int(self.direction[i])], float(self.snr_db[i]),
                              float(self.rate_bps[i]), float(self.ee_bit_per_joule[i]))


def drop_rng(master_seed: int, drop_index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(master_seed), int(drop_index)]))


def run_drop(spec: CampaignSpec, drop_index: int,
             directions: Sequence[Direction] = DIRECTIONS) -> RecordTable:
    """Evaluate every scheme, direction and transmit power on one random drop."""
    if not 0 <= drop_index < spec.num_drops:
        raise ConfigurationError(f"drop_index {drop_index} outside [0, {spec.num_drops})")
    ch = spec.channel
    area = spec.scenario
    rng = drop_rng(spec.master_seed, drop_index)

    xy = sample_gateway_xy(area, rng)
    _, gw_slant, gw_elev = ground_to_haps_geometry(xy, area.haps_altitude)
    gs_geo = link_geometry(area.ground_station, area.haps)
    gs_los, gs_shadow = sample_link_states([gs_geo.elevation_deg], ch, rng)
    gw_los, gw_shadow = sample_link_states(gw_elev, ch, rng)

    k = xy.shape[0]
    gw_ids = np.arange(k, dtype=np.int32)
    n0b = ch.thermal_noise_w
    rx_noise = ch.receiver_noise_w
    parts = []
    for s_idx, arch in enumerate(spec.schemes):
        g_gs = 10.0 ** (hop_gain_db(gs_geo.slant_distance, gs_los[0], gs_shadow[0],
                                    ch.gs_antenna_gain, arch.element_gain, ch) / 10.0)
        g_gw = 10.0 ** (hop_gain_db(gw_slant, gw_los, gw_shadow, spec.gateway_gain_dbi,
                                    arch.element_gain, ch) / 10.0)
        sigma_v2 = dynamic_noise_power(arch, n0b)
        p_ris = spec.ris_power(arch)
        for direction in directions:
            g1, g2 = (g_gs, g_gw) if direction is Direction.DOWNLINK else (g_gw, g_gs)
            for p_dbm in spec.tx_grid(direction):
                p_tx = dbm_to_w(p_dbm)
                if arch.is_active:
                    rho = budget_rho(arch.pa_output_power, arch.group_size_L, p_tx * g1,
                                     sigma_v2, arch.amp_gain_floor, arch.amp_gain_cap)
                else:
                    rho = 1.0
                snr = cascade_snr(p_tx, rho, arch.n_total, g1, g2, sigma_v2, rx_noise)
                snr = np.broadcast_to(snr, (k,))
                rate = shannon_rate(snr, ch.bandwidth)
                parts.append(RecordTable(
                    scheme=np.full(k, s_idx, dtype=np.int16),
                    group_size=np.full(k, arch.group_size_L or 0, dtype=np.int32),
                    direction=np.full(k, _DIR_CODE[direction], dtype=np.int8),
                    tx_power_dbm=np.full(k, p_dbm, dtype=float),
                    drop_id=np.full(k, drop_index, dtype=np.int32),
                    gateway_id=gw_ids,
                    elevation_deg=gw_elev,
                    snr_db=10.0 * np.log10(snr),
                    rate_bps=rate,
                    ee_bit_per_joule=energy_efficiency(rate, p_tx, p_ris),
                ))
    return RecordTable.concat(parts)


@dataclass(frozen=True)
class SchemePower:
    label: str
    group_size_L: int | None
    num_amplifiers: int
    ris_power_w: float
    feasibility: FeasibilityReport


@dataclass
class CampaignResult:
    spec: CampaignSpec
    records: RecordTable
    directions: tuple[Direction, ...] = DIRECTIONS

    def scheme_index(self, scheme: int | str | RisArchitecture) -> int:
        if isinstance(scheme, int):
            return scheme
        label = scheme.label if isinstance(scheme, RisArchitecture) else scheme
        labels = [a.label for a in self.spec.schemes]
        return labels.index(label)

    def series(self):
        """All (scheme index, direction, tx power) combinations present."""
        for direction in self.directions:
            for s in range(len(self.spec.schemes)):
                for p in self.spec.tx_grid(direction):
                    yield s, direction, p

    def values(self, metric: str, scheme, direction: Direction, tx_power_dbm: float) -> np.ndarray:
        m = self.records.mask(self.scheme_index(scheme), direction, tx_power_dbm)
        return getattr(self.records, metric)[m]

    def rate_cdf(self, scheme, direction: Direction, tx_power_dbm: float) -> CdfSummary:
        return CdfSummary(self.values("rate_bps", scheme, direction, tx_power_dbm))

    def ee_cdf(self, scheme, direction: Direction, tx_power_dbm: float) -> CdfSummary:
        return CdfSummary(self.values("ee_bit_per_joule", scheme, direction, tx_power_dbm))

    def sum_rates(self, scheme, direction: Direction, tx_power_dbm: float) -> tuple[float, float]:
        """Mean over drops of (aggregate throughput, equal time-share throughput)."""
        rates = self.values("rate_bps", scheme, direction, tx_power_dbm)
        per_drop = rates.reshape(self.spec.num_drops, -1)
        aggregate = per_drop.sum(axis=1)
        return float(aggregate.mean()), float((aggregate / per_drop.shape[1]).mean())

    def power_report(self) -> list[SchemePower]:
        return power_report(self.spec)


def power_report(spec: CampaignSpec) -> list[SchemePower]:
    """RIS power and payload feasibility for every scheme; no Monte Carlo."""
    out = []
    for arch in spec.schemes:
        p = spec.ris_power(arch)
        out.append(SchemePower(arch.label, arch.group_size_L, arch.num_amplifiers, p,
                               feasibility_report(arch.n_total, spec.channel.frequency,
                                                  arch.unit_cell_edge_fraction, p,
                                                  spec.feasibility)))
    return out


def run_campaign(spec: CampaignSpec, workers: int = 1,
                 directions: Sequence[Direction] = DIRECTIONS) -> CampaignResult:
    """Run all drops; output does not depend on ``workers``."""
    spec.validate()
    directions = tuple(directions)
    job = partial(run_drop, spec, directions=directions)
    drops = range(spec.num_drops)
    if workers > 1 and spec.num_drops > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            tables = list(pool.map(job, drops))
    else:
        tables = [job(i) for i in drops]
    return CampaignResult(spec, RecordTable.concat(tables), directions)


@dataclass(frozen=True)
class SweepRow:
    scheme: str
    tx_power_dbm: float
    median_rate_bps: float
    slope_bps_per_db: float  # NaN on the first grid point


def sweep_tx_power(spec: CampaignSpec, direction: Direction = Direction.DOWNLINK,
                   workers: int = 1, result: CampaignResult | None = None) -> list[SweepRow]:
    """Median rate per grid point and the per-dB slope between neighbours."""
    grid = spec.tx_grid(direction)
    if len(grid) < 2:
        raise ConfigurationError("a transmit-power sweep needs at least two grid points")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ConfigurationError("transmit-power grid must be strictly ascending")
    if result is None:
        result = run_campaign(spec, workers, directions=(direction,))
    rows = []
    for s, arch in enumerate(spec.schemes):
        prev = None
        for p in grid:
            med = result.rate_cdf(s, direction, p).median()
            slope = math.nan if prev is None else (med - prev[1]) / (p - prev[0])
            rows.append(SweepRow(arch.label, p, med, slope))
            prev = (p, med)
    return rows


def median_slope(rows: Sequence[SweepRow], scheme: str) -> float:
    slopes = [r.slope_bps_per_db for r in rows if r.scheme == scheme and not math.isnan(r.slope_bps_per_db)]
    return float(np.median(slopes))


class Objective(enum.Enum):
    MAX_SUM_RATE = "max-sum-rate"
    MAX_ENERGY_EFFICIENCY = "max-energy-efficiency"
    MIN_POWER = "min-power"


@dataclass(frozen=True)
class GroupingRow:
    label: str
    group_size_L: int | None
    num_amplifiers: int
    ris_power_w: float
    mean_rate_bps: float
    median_ee_bit_per_joule: float


@dataclass(frozen=True)
class GroupingSelection:
    objective: Objective
    chosen: RisArchitecture
    table: tuple[GroupingRow, ...]


def _larger_l_first(arch: RisArchitecture) -> float:
    return math.inf if not arch.is_active else float(arch.group_size_L)


def select_grouping(spec: CampaignSpec, objective: Objective,
                    candidates: Sequence[RisArchitecture],
                    direction: Direction = Direction.DOWNLINK, workers: int = 1) -> GroupingSelection:
    """Pick the candidate that best serves ``objective``.

    All candidates are evaluated in a single campaign, so they share every
    placement and channel draw. Ties go to the larger group size.
    """
    candidates = tuple(candidates)
    if not candidates:
        raise ConfigurationError("no grouping candidates given")
    sub = replace(spec, schemes=candidates)
    result = run_campaign(sub, workers, directions=(direction,))
    rows = []
    for s, arch in enumerate(candidates):
        m = result.records.mask(s, direction)
        rows.append(GroupingRow(arch.label, arch.group_size_L, arch.num_amplifiers,
                                sub.ris_power(arch),
                                float(result.records.rate_bps[m].mean()),
                                float(np.median(result.records.ee_bit_per_joule[m]))))
    if objective is Objective.MAX_SUM_RATE:
        score = [r.mean_rate_bps for r in rows]
    elif objective is Objective.MAX_ENERGY_EFFICIENCY:
        score = [r.median_ee_bit_per_joule for r in rows]
    else:
        score = [-r.ris_power_w for r in rows]
    best = max(score)
    tied = [i for i, v in enumerate(score) if v == best]
    chosen = max(tied, key=lambda i: _larger_l_first(candidates[i]))
    return GroupingSelection(objective, candidates[chosen], tuple(rows))
