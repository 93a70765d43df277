"""Per-hop propagation: free-space path loss, elevation-dependent LoS
probability, log-normal shadowing, NLoS clutter loss and antenna gains.

Functions accept scalars or numpy arrays and broadcast.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import ConfigurationError
from .scenario import LinkGeometry

LosTable = tuple[tuple[float, float], ...]


def parse_los_table(text: str, source: str = "<string>") -> LosTable:
    """Parse two-column ``elevation_deg probability`` text; ``#`` starts a comment."""
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.replace(",", " ").split()
        if len(parts) != 2:
            raise ConfigurationError(f"{source}:{lineno}: expected 2 columns, got {raw!r}")
        try:
            rows.append((float(parts[0]), float(parts[1])))
        except ValueError:
            raise ConfigurationError(f"{source}:{lineno}: non-numeric entry {raw!r}") from None
    table = tuple(rows)
    validate_los_table(table)
    return table


def load_los_table(path: str | Path) -> LosTable:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read LoS table {path}: {exc}") from exc
    return parse_los_table(text, str(path))


def default_los_table() -> LosTable:
    text = resources.files("hapsris").joinpath("data/los_urban.txt").read_text()
    return parse_los_table(text, "los_urban.txt")


def validate_los_table(table) -> None:
    if len(table) == 0:
        raise ConfigurationError("LoS table is empty")
    elev = [e for e, _ in table]
    if any(b <= a for a, b in zip(elev, elev[1:])):
        raise ConfigurationError("LoS table elevations must be strictly ascending")
    for e, p in table:
        if not (math.isfinite(e) and 0.0 <= p <= 1.0):
            raise ConfigurationError(f"invalid LoS table row ({e}, {p})")


@dataclass(frozen=True)
class ChannelParams:
    """Radio and channel-model parameters.

    Defaults for the LoS table, shadowing sigmas and clutter loss are
    reconstructed defaults meant to be calibrated.
    """

    frequency: float = 2.4  # GHz
    bandwidth: float = 100e6  # Hz
    noise_density: float = -174.0  # dBm/Hz
    los_table: LosTable = field(default_factory=default_los_table)
    shadow_sigma_los: float = 4.0
    shadow_sigma_nlos: float = 6.0
    clutter_loss_nlos: float = 20.0
    atmospheric_margin: float = 0.0
    gs_antenna_gain: float = 43.2  # dBi
    gw_antenna_gain: float = 0.0  # dBi
    receiver_noise_figure: float = 0.0  # dB

    def validate(self) -> "ChannelParams":
        if not self.frequency > 0:
            raise ConfigurationError(f"frequency must be > 0 GHz, got {self.frequency}")
        if not self.bandwidth > 0:
            raise ConfigurationError(f"bandwidth must be > 0 Hz, got {self.bandwidth}")
        validate_los_table(self.los_table)
        for name in ("shadow_sigma_los", "shadow_sigma_nlos", "clutter_loss_nlos",
                     "atmospheric_margin", "receiver_noise_figure"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ConfigurationError(f"{name} must be >= 0, got {v}")
        for name in ("noise_density", "gs_antenna_gain", "gw_antenna_gain"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigurationError(f"{name} must be finite")
        return self

    @property
    def wavelength_m(self) -> float:
        return 299_792_458.0 / (self.frequency * 1e9)

    @property
    def thermal_noise_w(self) -> float:
        """N0 * B in watts, without any noise figure."""
        return 10.0 ** ((self.noise_density - 30.0) / 10.0) * self.bandwidth

    @property
    def receiver_noise_w(self) -> float:
        return self.thermal_noise_w * 10.0 ** (self.receiver_noise_figure / 10.0)


@dataclass(frozen=True)
class LinkState:
    is_los: bool
    shadow_db: float


@dataclass(frozen=True)
class HopGain:
    """Power gain |h|^2 of one hop, antenna and element gains included."""

    power_gain_db: float

    @property
    def power_gain_linear(self) -> float:
        return 10.0 ** (self.power_gain_db / 10.0)

    @classmethod
    def from_linear(cls, g: float) -> "HopGain":
        if not g > 0:
            raise ValueError(f"hop power gain must be positive, got {g}")
        return cls(10.0 * math.log10(g))


def fspl_db(distance_km, frequency_ghz):
    """Free-space path loss, 92.45 + 20 log10(d/km) + 20 log10(f/GHz)."""
    d = np.asarray(distance_km, dtype=float)
    f = np.asarray(frequency_ghz, dtype=float)
    if np.any(d <= 0) or np.any(f <= 0):
        raise ValueError("distance and frequency must be positive")
    out = 92.45 + 20.0 * np.log10(d) + 20.0 * np.log10(f)
    return float(out) if out.ndim == 0 else out


def los_probability(elevation_deg, table: LosTable):
    """Piecewise-linear interpolation of the table, clamped at both ends."""
    if len(table) == 0:
        raise ConfigurationError("LoS table is empty")
    elev = np.array([e for e, _ in table], dtype=float)
    prob = np.array([p for _, p in table], dtype=float)
    out = np.interp(elevation_deg, elev, prob)
    return float(out) if np.ndim(out) == 0 else out


def sample_link_states(elevation_deg, params: ChannelParams, rng: np.random.Generator):
    """Vectorised LoS draws and shadowing for an array of elevations.

    Returns ``(is_los, shadow_db)`` arrays. Always consumes one uniform and one
    standard normal per link, so the stream layout does not depend on outcomes.
    """
    elevation_deg = np.atleast_1d(np.asarray(elevation_deg, dtype=float))
    p = los_probability(elevation_deg, params.los_table)
    is_los = rng.random(elevation_deg.shape) < p
    z = rng.standard_normal(elevation_deg.shape)
    sigma = np.where(is_los, params.shadow_sigma_los, params.shadow_sigma_nlos)
    return is_los, z * sigma


def sample_link_state(elevation_deg: float, params: ChannelParams,
                      rng: np.random.Generator) -> LinkState:
    is_los, shadow = sample_link_states([elevation_deg], params, rng)
    return LinkState(bool(is_los[0]), float(shadow[0]))


def hop_gain_db(slant_km, is_los, shadow_db, endpoint_antenna_gain, element_gain,
                params: ChannelParams):
    """Array form of :func:`hop_power_gain`, returning dB values."""
    clutter = np.where(is_los, 0.0, params.clutter_loss_nlos)
    return (-fspl_db(slant_km, params.frequency) + endpoint_antenna_gain + element_gain
            - params.atmospheric_margin - clutter - shadow_db)


def hop_power_gain(geometry: LinkGeometry, state: LinkState, endpoint_antenna_gain: float,
                   element_gain: float, params: ChannelParams) -> HopGain:
    g = hop_gain_db(geometry.slant_distance, state.is_los, state.shadow_db,
                    endpoint_antenna_gain, element_gain, params)
    return HopGain(float(g))
