"""INI-style run configuration.

Every physical quantity carries its unit in the key name. Unknown sections
or keys are rejected, and errors point at the offending line.
"""
from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

from .channel import ChannelParams, default_los_table, load_los_table
from .engine import CampaignSpec, Objective
from .errors import ConfigurationError
from .metrics import FeasibilityParams, RisPowerParams
from .ris import Direction, RisArchitecture, element_gain_dbi
from .scenario import AreaSpec, Position3D

# section -> key -> default (as written in a config file)
DEFAULTS: dict[str, dict[str, str]] = {
    "scenario": {
        "radius_km": "50",
        "haps_altitude_km": "20",
        "ground_station_x_km": "5",
        "ground_station_y_km": "5",
        "num_gateways": "1000",
    },
    "channel": {
        "frequency_ghz": "2.4",
        "bandwidth_mhz": "100",
        "noise_density_dbm_per_hz": "-174",
        "receiver_noise_figure_db": "0",
        "gs_antenna_gain_dbi": "43.2",
        "gw_antenna_gain_dbi": "0",
        "los_table_file": "",
        "shadow_sigma_los_db": "4",
        "shadow_sigma_nlos_db": "6",
        "clutter_loss_nlos_db": "20",
        "atmospheric_margin_db": "0",
        "high_gain_receiver": "false",
        "high_gain_receiver_dbi": "15",
    },
    "ris": {
        "n_total": "30000",
        "schemes": "passive, 2000, 1000, 500",
        "group_size_L": "500",
        "pa_output_power_w": "2",
        "p_sw_mw": "7.8",
        "p_dc_dbm": "-5",
        "amp_gain_floor": "1",
        "amp_gain_cap": "inf",
        "ris_noise_figure_db": "5",
        "element_gain_dbi": "",
        "unit_cell_edge_fraction": "0.2",
    },
    "feasibility": {
        "element_mass_kg": "0.010",
        "solar_irradiance_w_per_m2": "1360",
        "solar_efficiency": "0.27",
    },
    "campaign": {
        "dl_tx_power_dbm": "50:60:1",
        "ul_tx_power_dbm": "28, 29, 30",
        "num_drops": "100",
        "master_seed": "20240601",
        "workers": "1",
    },
    "grouping": {
        "objective": "max-sum-rate",
        "candidates": "passive, 2000, 1000, 500",
        "direction": "downlink",
    },
}


@dataclass
class RunConfig:
    spec: CampaignSpec
    reference: RisArchitecture
    workers: int = 1
    objective: Objective = Objective.MAX_SUM_RATE
    candidates: tuple[RisArchitecture, ...] = ()
    grouping_direction: Direction = Direction.DOWNLINK
    out_dir: Path = Path("results")
    source: str = "<defaults>"
    raw: dict = field(default_factory=dict)


def _key_lines(text: str) -> dict[tuple[str, str], int]:
    lines: dict[tuple[str, str], int] = {}
    section = None
    for n, line in enumerate(text.splitlines(), start=1):
        m = re.match(r"\s*\[([^\]]+)\]", line)
        if m:
            section = m.group(1).strip()
            lines[(section, "")] = n
            continue
        m = re.match(r"\s*([^=:#;\s][^=:]*?)\s*[=:]", line)
        if m and section is not None:
            lines[(section, m.group(1).strip())] = n
    return lines


class _Reader:
    def __init__(self, values: dict[str, dict[str, str]], lines, source: str):
        self.values = values
        self.lines = lines
        self.source = source

    def where(self, section: str, key: str) -> str:
        n = self.lines.get((section, key))
        loc = f"{self.source}:{n}" if n else self.source
        return f"{loc}: [{section}] {key}"

    def fail(self, section, key, msg):
        raise ConfigurationError(f"{self.where(section, key)}: {msg}")

    def str(self, section, key) -> str:
        return self.values[section][key].strip()

    def float(self, section, key) -> float:
        s = self.str(section, key)
        try:
            v = float(s)
        except ValueError:
            self.fail(section, key, f"expected a number, got {s!r}")
        if math.isnan(v):
            self.fail(section, key, "NaN is not allowed")
        return v

    def int(self, section, key) -> int:
        s = self.str(section, key)
        try:
            return int(s, 0)
        except ValueError:
            self.fail(section, key, f"expected an integer, got {s!r}")

    def bool(self, section, key) -> bool:
        s = self.str(section, key).lower()
        if s in ("1", "true", "yes", "on"):
            return True
        if s in ("0", "false", "no", "off"):
            return False
        self.fail(section, key, f"expected a boolean, got {s!r}")

    def grid(self, section, key) -> tuple[float, ...]:
        """Comma list, or inclusive ``start:stop:step`` range."""
        s = self.str(section, key)
        try:
            if ":" in s:
                start, stop, step = (float(p) for p in s.split(":"))
                if step <= 0 or stop < start:
                    raise ValueError
                n = int(math.floor((stop - start) / step + 1e-9)) + 1
                return tuple(round(start + i * step, 10) for i in range(n))
            return tuple(float(p) for p in s.split(",") if p.strip())
        except ValueError:
            self.fail(section, key, f"expected a comma list or start:stop:step, got {s!r}")

    def schemes(self, section, key, n_total, **arch_kw) -> tuple[RisArchitecture, ...]:
        out = []
        for item in self.str(section, key).split(","):
            item = item.strip().lower()
            if not item:
                continue
            if item == "passive":
                out.append(RisArchitecture.passive(n_total, **arch_kw))
                continue
            try:
                L = int(item.removeprefix("l="))
            except ValueError:
                self.fail(section, key, f"scheme must be 'passive' or a group size, got {item!r}")
            try:
                out.append(RisArchitecture.active(L, n_total, **arch_kw))
            except ConfigurationError as exc:
                self.fail(section, key, str(exc))
        if not out:
            self.fail(section, key, "at least one scheme is required")
        return tuple(out)


def parse_config_text(text: str, source: str = "<string>", base_dir: Path | None = None) -> RunConfig:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigurationError(f"{source}: malformed config: {exc}") from None

    lines = _key_lines(text)
    values = {s: dict(keys) for s, keys in DEFAULTS.items()}
    for section in parser.sections():
        if section not in DEFAULTS:
            n = lines.get((section, ""))
            raise ConfigurationError(f"{source}:{n}: unknown section [{section}]")
        for key, val in parser.items(section):
            if key not in DEFAULTS[section]:
                n = lines.get((section, key))
                raise ConfigurationError(f"{source}:{n}: unknown key '{key}' in [{section}]")
            values[section][key] = val
    r = _Reader(values, lines, source)
    return _build(r, base_dir or Path.cwd())


def _build(r: _Reader, base_dir: Path) -> RunConfig:
    def checked(section, key, value, ok, what):
        if not ok(value):
            r.fail(section, key, f"{value} {what}")
        return value

    sc = "scenario"
    area = AreaSpec(
        radius=checked(sc, "radius_km", r.float(sc, "radius_km"), lambda v: v > 0, "must be > 0"),
        haps_altitude=checked(sc, "haps_altitude_km", r.float(sc, "haps_altitude_km"),
                              lambda v: v > 0, "must be > 0"),
        ground_station=Position3D(r.float(sc, "ground_station_x_km"), r.float(sc, "ground_station_y_km"), 0.0),
        num_gateways=checked(sc, "num_gateways", r.int(sc, "num_gateways"), lambda v: v >= 1, "must be >= 1"),
    )
    try:
        area.validate()
    except ConfigurationError as exc:
        r.fail(sc, "ground_station_x_km", str(exc))

    ch = "channel"
    table_file = r.str(ch, "los_table_file")
    if table_file:
        path = Path(table_file)
        if not path.is_absolute():
            path = base_dir / path
        los_table = load_los_table(path)
    else:
        los_table = default_los_table()
    nonneg = (lambda v: v >= 0, "must be >= 0")
    channel = ChannelParams(
        frequency=checked(ch, "frequency_ghz", r.float(ch, "frequency_ghz"), lambda v: v > 0, "must be > 0"),
        bandwidth=checked(ch, "bandwidth_mhz", r.float(ch, "bandwidth_mhz"), lambda v: v > 0, "must be > 0") * 1e6,
        noise_density=r.float(ch, "noise_density_dbm_per_hz"),
        los_table=los_table,
        shadow_sigma_los=checked(ch, "shadow_sigma_los_db", r.float(ch, "shadow_sigma_los_db"), *nonneg),
        shadow_sigma_nlos=checked(ch, "shadow_sigma_nlos_db", r.float(ch, "shadow_sigma_nlos_db"), *nonneg),
        clutter_loss_nlos=checked(ch, "clutter_loss_nlos_db", r.float(ch, "clutter_loss_nlos_db"), *nonneg),
        atmospheric_margin=checked(ch, "atmospheric_margin_db", r.float(ch, "atmospheric_margin_db"), *nonneg),
        gs_antenna_gain=r.float(ch, "gs_antenna_gain_dbi"),
        gw_antenna_gain=r.float(ch, "gw_antenna_gain_dbi"),
        receiver_noise_figure=checked(ch, "receiver_noise_figure_db",
                                      r.float(ch, "receiver_noise_figure_db"), *nonneg),
    )

    rs = "ris"
    fraction = checked(rs, "unit_cell_edge_fraction", r.float(rs, "unit_cell_edge_fraction"),
                       lambda v: v > 0, "must be > 0")
    elem = r.str(rs, "element_gain_dbi")
    arch_kw = dict(
        pa_output_power=checked(rs, "pa_output_power_w", r.float(rs, "pa_output_power_w"),
                                lambda v: v > 0, "must be > 0"),
        amp_gain_floor=checked(rs, "amp_gain_floor", r.float(rs, "amp_gain_floor"),
                               lambda v: v >= 1, "must be >= 1"),
        amp_gain_cap=r.float(rs, "amp_gain_cap"),
        ris_noise_figure=r.float(rs, "ris_noise_figure_db"),
        element_gain=r.float(rs, "element_gain_dbi") if elem else element_gain_dbi(fraction),
        unit_cell_edge_fraction=fraction,
    )
    if arch_kw["amp_gain_cap"] < arch_kw["amp_gain_floor"]:
        r.fail(rs, "amp_gain_cap", "must be >= amp_gain_floor")
    n_total = checked(rs, "n_total", r.int(rs, "n_total"), lambda v: v >= 1, "must be >= 1")
    schemes = r.schemes(rs, "schemes", n_total, **arch_kw)
    ref_L = r.int(rs, "group_size_L")
    try:
        reference = RisArchitecture.active(ref_L, n_total, **arch_kw)
    except ConfigurationError as exc:
        r.fail(rs, "group_size_L", str(exc))
    power = RisPowerParams(
        p_sw=checked(rs, "p_sw_mw", r.float(rs, "p_sw_mw"), *nonneg) * 1e-3,
        p_dc=10.0 ** ((r.float(rs, "p_dc_dbm") - 30.0) / 10.0),
        p_a=arch_kw["pa_output_power"],
    )

    fs = "feasibility"
    feas = FeasibilityParams(
        element_mass=checked(fs, "element_mass_kg", r.float(fs, "element_mass_kg"), lambda v: v > 0, "must be > 0"),
        solar_irradiance=checked(fs, "solar_irradiance_w_per_m2", r.float(fs, "solar_irradiance_w_per_m2"),
                                 lambda v: v > 0, "must be > 0"),
        solar_efficiency=checked(fs, "solar_efficiency", r.float(fs, "solar_efficiency"),
                                 lambda v: 0 < v <= 1, "must be in (0, 1]"),
    )

    cp = "campaign"
    dl = r.grid(cp, "dl_tx_power_dbm")
    ul = r.grid(cp, "ul_tx_power_dbm")
    if not dl:
        r.fail(cp, "dl_tx_power_dbm", "grid is empty")
    if not ul:
        r.fail(cp, "ul_tx_power_dbm", "grid is empty")
    seed = checked(cp, "master_seed", r.int(cp, "master_seed"), lambda v: 0 <= v < 2**64,
                   "must be an unsigned 64-bit integer")
    spec = CampaignSpec(
        scenario=area, channel=channel, schemes=schemes,
        dl_tx_power_dbm=dl, ul_tx_power_dbm=ul,
        num_drops=checked(cp, "num_drops", r.int(cp, "num_drops"), lambda v: v >= 1, "must be >= 1"),
        master_seed=seed, power=power, feasibility=feas,
        high_gain_receiver=r.bool(ch, "high_gain_receiver"),
        high_gain_receiver_dbi=r.float(ch, "high_gain_receiver_dbi"),
    )
    try:
        spec.validate()
    except ConfigurationError as exc:
        raise ConfigurationError(f"{r.source}: {exc}") from None

    gp = "grouping"
    try:
        objective = Objective(r.str(gp, "objective").lower())
    except ValueError:
        r.fail(gp, "objective", f"must be one of {[o.value for o in Objective]}")
    try:
        g_dir = Direction(r.str(gp, "direction").lower())
    except ValueError:
        r.fail(gp, "direction", "must be 'downlink' or 'uplink'")

    return RunConfig(
        spec=spec, reference=reference,
        workers=checked(cp, "workers", r.int(cp, "workers"), lambda v: v >= 1, "must be >= 1"),
        objective=objective,
        candidates=r.schemes(gp, "candidates", n_total, **arch_kw),
        grouping_direction=g_dir,
        source=r.source,
        raw=r.values,
    )


def parse_config(path: str | Path | None = None) -> RunConfig:
    """Read and validate a config file; ``None`` yields the built-in defaults."""
    if path is None:
        return parse_config_text("", "<defaults>")
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc.strerror or exc}") from None
    return parse_config_text(text, str(path), path.parent)
