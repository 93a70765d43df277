"""CSV and text emitters for campaign results.

Numbers are written with ``%.12g`` so repeated runs with the same config and
seed produce identical bytes.
"""
from __future__ import annotations

import math
from pathlib import Path
from typing import Sequence

import numpy as np

from .engine import CampaignResult, GroupingSelection, SchemePower, SweepRow
from .metrics import SPEED_OF_LIGHT, CdfSummary
from .ris import Direction, RisArchitecture

RECORDS_HEADER = ("scheme,L,direction,tx_power_dbm,drop_id,gateway_id,"
                  "elevation_deg,snr_db,rate_bps,ee_bit_per_joule")
CDF_HEADER = "scheme,tx_power_dbm,x,F(x)"
CDF_POINTS = 200
_METRICS = {"rate": "rate_bps", "ee": "ee_bit_per_joule"}

# Quoted surface area for 30000 unit cells of (0.2 lambda)^2.
QUOTED_AREA_M2 = 27.0


def fmt(x) -> str:
    return "%.12g" % x


def _ensure_dir(out_dir: Path) -> Path:
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out_dir}: {exc.strerror or exc}") from exc
    return out_dir


def write_text(path: Path, text) -> Path:
    """Write a string, or an iterable of string chunks."""
    chunks = [text] if isinstance(text, str) else text
    try:
        with open(path, "w", newline="\n") as fh:
            for part in chunks:
                fh.write(part)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def _column(values: np.ndarray, integer: bool = False) -> list[str]:
    if integer:
        return [str(int(v)) for v in values]
    return [fmt(v) for v in values.tolist()]


def iter_records_csv(result: CampaignResult, chunk: int = 100_000):
    """Yield records.csv text in chunks, header first."""
    rec = result.records
    labels = np.array([a.label for a in result.spec.schemes], dtype=object)
    dirs = np.array([Direction.DOWNLINK.value, Direction.UPLINK.value], dtype=object)
    yield RECORDS_HEADER + "\n"
    for lo in range(0, len(rec), chunk):
        sl = slice(lo, lo + chunk)
        cols = [
            labels[rec.scheme[sl]].tolist(),
            _column(rec.group_size[sl], integer=True),
            dirs[rec.direction[sl]].tolist(),
            _column(rec.tx_power_dbm[sl]),
            _column(rec.drop_id[sl], integer=True),
            _column(rec.gateway_id[sl], integer=True),
            _column(rec.elevation_deg[sl]),
            _column(rec.snr_db[sl]),
            _column(rec.rate_bps[sl]),
            _column(rec.ee_bit_per_joule[sl]),
        ]
        yield "".join(",".join(row) + "\n" for row in zip(*cols))


def records_csv(result: CampaignResult) -> str:
    return "".join(iter_records_csv(result))


def cdf_points(cdf: CdfSummary, n: int = CDF_POINTS) -> tuple[np.ndarray, np.ndarray]:
    v = cdf.sorted_values
    x = np.linspace(v[0], v[-1], n)
    return x, cdf.evaluate(x)


def cdf_csv(result: CampaignResult, metric: str, direction: Direction) -> str:
    column = _METRICS[metric]
    lines = [CDF_HEADER]
    for s, arch in enumerate(result.spec.schemes):
        for p in result.spec.tx_grid(direction):
            x, F = cdf_points(CdfSummary(result.values(column, s, direction, p)))
            lines.extend(f"{arch.label},{fmt(p)},{fmt(xi)},{fmt(fi)}" for xi, fi in zip(x, F))
    return "\n".join(lines) + "\n"


def power_lines(report: Sequence[SchemePower], frequency_ghz: float) -> list[str]:
    lines = ["RIS power consumption and payload feasibility",
             "-" * 46,
             f"{'scheme':<10}{'amps':>6}{'P_RIS [W]':>12}{'budget':>7}{'area [m2]':>11}"
             f"{'mass [kg]':>11}{'solar [m2]':>12}"]
    for row in report:
        f = row.feasibility
        lines.append(f"{row.label:<10}{row.num_amplifiers:>6}{row.ris_power_w:>12.2f}"
                     f"{math.ceil(row.ris_power_w):>5d} W{f.area_m2:>11.2f}{f.mass_kg:>11.1f}{f.solar_area_m2:>12.3f}")
    lines.append("")
    for row in report:
        lines.append(f"P_RIS({row.label}) = {row.ris_power_w:.2f} W (supply budget {math.ceil(row.ris_power_w)} W)")
    lines.append("")
    lines.extend(area_note(report[0].feasibility.area_m2, frequency_ghz))
    return lines


def area_note(area_m2: float, frequency_ghz: float) -> list[str]:
    lam = SPEED_OF_LIGHT / (frequency_ghz * 1e9)
    # wavelength at which the computed area would equal the quoted one
    lam_quoted = lam * np.sqrt(QUOTED_AREA_M2 / area_m2)
    f_quoted = SPEED_OF_LIGHT / lam_quoted / 1e9
    return [
        "Surface-area note:",
        f"  (0.2 lambda)^2 unit cells at {frequency_ghz:g} GHz (lambda = {lam:.5f} m) "
        f"give {area_m2:.2f} m2.",
        f"  The often-quoted {QUOTED_AREA_M2:g} m2 for 30000 cells corresponds to "
        f"lambda = {lam_quoted:.3f} m ({f_quoted:.2f} GHz) and does not match the configured frequency.",
    ]


def percentile_lines(result: CampaignResult) -> list[str]:
    lines = []
    for direction in result.directions:
        lines += ["", f"{direction.value} rate percentiles [Mbit/s] and energy efficiency [Mbit/J]",
                  "-" * 72,
                  f"{'scheme':<10}{'P_tx[dBm]':>10}{'p10':>10}{'p50':>10}{'p90':>10}"
                  f"{'mean':>10}{'sum[Gb/s]':>11}{'EE p50':>10}"]
        for s, arch in enumerate(result.spec.schemes):
            for p in result.spec.tx_grid(direction):
                cdf = result.rate_cdf(s, direction, p)
                ee = result.ee_cdf(s, direction, p)
                aggregate, shared = result.sum_rates(s, direction, p)
                lines.append(
                    f"{arch.label:<10}{p:>10g}{cdf.percentile(0.1) / 1e6:>10.2f}"
                    f"{cdf.median() / 1e6:>10.2f}{cdf.percentile(0.9) / 1e6:>10.2f}"
                    f"{shared / 1e6:>10.2f}{aggregate / 1e9:>11.3f}{ee.median() / 1e6:>10.4f}")
    lines += ["", "mean = time-shared sum rate (aggregate / gateways), averaged over drops;",
              "sum = aggregate throughput over all gateways, averaged over drops."]
    return lines


def summary_text(result: CampaignResult) -> str:
    spec = result.spec
    lines = [
        "HAPS-RIS backhaul campaign summary",
        "=" * 34,
        f"master_seed = {spec.master_seed}",
        f"drops = {spec.num_drops}, gateways per drop = {spec.scenario.num_gateways}",
        f"frequency = {spec.channel.frequency:g} GHz, bandwidth = {spec.channel.bandwidth / 1e6:g} MHz",
        f"schemes = {', '.join(a.label for a in spec.schemes)}",
        "",
    ]
    lines += power_lines(result.power_report(), spec.channel.frequency)
    lines += percentile_lines(result)
    return "\n".join(lines) + "\n"


def emit_results(result: CampaignResult, out_dir) -> list[Path]:
    """Write records.csv, cdf_<metric>_<direction>.csv and summary.txt."""
    out = _ensure_dir(Path(out_dir))
    written = [write_text(out / "records.csv", iter_records_csv(result))]
    for direction in result.directions:
        for metric in _METRICS:
            written.append(write_text(out / f"cdf_{metric}_{direction.value}.csv",
                                  cdf_csv(result, metric, direction)))
    written.append(write_text(out / "summary.txt", summary_text(result)))
    return written


def sweep_csv(rows: Sequence[SweepRow]) -> str:
    lines = ["scheme,tx_power_dbm,median_rate_bps,slope_bps_per_db"]
    lines += [f"{r.scheme},{fmt(r.tx_power_dbm)},{fmt(r.median_rate_bps)},"
              f"{'' if np.isnan(r.slope_bps_per_db) else fmt(r.slope_bps_per_db)}" for r in rows]
    return "\n".join(lines) + "\n"


def grouping_text(sel: GroupingSelection) -> str:
    lines = [f"objective: {sel.objective.value}",
             f"{'scheme':<10}{'amps':>6}{'P_RIS [W]':>12}{'mean rate [Mb/s]':>18}{'EE p50 [Mb/J]':>15}"]
    for r in sel.table:
        lines.append(f"{r.label:<10}{r.num_amplifiers:>6}{r.ris_power_w:>12.2f}"
                     f"{r.mean_rate_bps / 1e6:>18.2f}{r.median_ee_bit_per_joule / 1e6:>15.4f}")
    lines.append(f"chosen: {sel.chosen.label}")
    return "\n".join(lines) + "\n"


def feasibility_text(reference: RisArchitecture, report: Sequence[SchemePower],
                     frequency_ghz: float) -> str:
    header = [f"reference grouping: N_total = {reference.n_total}, L = {reference.group_size_L} "
              f"({reference.num_amplifiers} amplifiers)", ""]
    return "\n".join(header + power_lines(report, frequency_ghz)) + "\n"
