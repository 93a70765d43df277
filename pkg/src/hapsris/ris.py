"""RIS-assisted cascade link: passive reflection and sub-connected active
amplification under a per-amplifier output-power budget.

Signal model (ideal per-element phase alignment)::

    y = sum_g rho_g sum_{n in g} |h2_n| (|h1_n| sqrt(P) s + v_n) + w

where ``v_n`` is dynamic noise of power ``sigma_v2`` injected at each active
element input and ``w`` is receiver noise. Passive mode is ``rho = 1`` and
``sigma_v2 = 0``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .channel import HopGain
from .errors import ConfigurationError


class RisMode(enum.Enum):
    PASSIVE = "passive"
    SUB_CONNECTED_ACTIVE = "active"


class Direction(enum.Enum):
    DOWNLINK = "downlink"
    UPLINK = "uplink"


def element_gain_dbi(cell_edge_fraction: float = 0.2) -> float:
    """Aperture gain of a square unit cell of edge ``fraction * lambda``: 4 pi A / lambda^2."""
    return 10.0 * math.log10(4.0 * math.pi * cell_edge_fraction**2)


@dataclass(frozen=True)
class RisArchitecture:
    mode: RisMode = RisMode.PASSIVE
    n_total: int = 30000
    group_size_L: Optional[int] = None
    pa_output_power: float = 2.0  # W, per amplifier
    amp_gain_floor: float = 1.0
    amp_gain_cap: float = math.inf
    ris_noise_figure: float = 5.0  # dB
    element_gain: float = element_gain_dbi(0.2)
    unit_cell_edge_fraction: float = 0.2

    @classmethod
    def passive(cls, n_total: int = 30000, **kw) -> "RisArchitecture":
        return cls(mode=RisMode.PASSIVE, n_total=n_total, group_size_L=None, **kw).validate()

    @classmethod
    def active(cls, group_size_L: int, n_total: int = 30000, **kw) -> "RisArchitecture":
        return cls(mode=RisMode.SUB_CONNECTED_ACTIVE, n_total=n_total,
                   group_size_L=group_size_L, **kw).validate()

    @property
    def is_active(self) -> bool:
        return self.mode is RisMode.SUB_CONNECTED_ACTIVE

    @property
    def num_amplifiers(self) -> int:
        return self.n_total // self.group_size_L if self.is_active else 0

    @property
    def label(self) -> str:
        return f"L={self.group_size_L}" if self.is_active else "passive"

    def as_passive(self) -> "RisArchitecture":
        """Same surface with every amplifier switched off."""
        return RisArchitecture(
            mode=RisMode.PASSIVE, n_total=self.n_total, group_size_L=None,
            pa_output_power=self.pa_output_power, amp_gain_floor=self.amp_gain_floor,
            amp_gain_cap=self.amp_gain_cap, ris_noise_figure=self.ris_noise_figure,
            element_gain=self.element_gain, unit_cell_edge_fraction=self.unit_cell_edge_fraction,
        )

    def validate(self) -> "RisArchitecture":
        if int(self.n_total) != self.n_total or self.n_total < 1:
            raise ConfigurationError(f"n_total must be a positive integer, got {self.n_total}")
        if self.is_active:
            L = self.group_size_L
            if L is None or int(L) != L or not 1 <= L <= self.n_total:
                raise ConfigurationError(
                    f"group_size_L must be an integer in [1, n_total={self.n_total}], got {L}")
            if self.n_total % L:
                raise ConfigurationError(
                    f"n_total={self.n_total} is not divisible by group_size_L={L}")
        if not self.pa_output_power > 0:
            raise ConfigurationError(f"pa_output_power must be > 0 W, got {self.pa_output_power}")
        if not self.amp_gain_floor >= 1:
            raise ConfigurationError(f"amp_gain_floor must be >= 1, got {self.amp_gain_floor}")
        if not self.amp_gain_cap >= self.amp_gain_floor:
            raise ConfigurationError("amp_gain_cap must be >= amp_gain_floor")
        if not 0 < self.unit_cell_edge_fraction:
            raise ConfigurationError("unit_cell_edge_fraction must be > 0")
        return self


@dataclass(frozen=True)
class AmplifierState:
    rho: float
    input_power_per_element: float
    dynamic_noise_power: float


@dataclass(frozen=True)
class CascadeLink:
    hop1: HopGain
    hop2: HopGain
    direction: Direction = Direction.DOWNLINK


def dynamic_noise_power(arch: RisArchitecture, thermal_noise_w: float) -> float:
    """sigma_v^2 = N0 B F_ris for active surfaces, zero when passive."""
    if not arch.is_active:
        return 0.0
    return thermal_noise_w * 10.0 ** (arch.ris_noise_figure / 10.0)


def budget_rho(pa_output_power, group_size, input_power_per_element, sigma_v2,
               floor=1.0, cap=math.inf):
    """Amplitude gain that drives each amplifier exactly at its output budget.

    Each amplifier feeds ``group_size`` elements, each receiving
    ``input_power_per_element + sigma_v2``; the result is clamped to
    ``[floor, cap]``. Works elementwise on arrays.
    """
    denom = group_size * (np.asarray(input_power_per_element, dtype=float) + sigma_v2)
    with np.errstate(divide="ignore"):
        rho = np.sqrt(pa_output_power / denom)
    rho = np.clip(rho, floor, cap)
    return float(rho) if rho.ndim == 0 else rho


def amplification_factor(arch: RisArchitecture, tx_power: float, hop1: HopGain,
                         thermal_noise_w: float) -> AmplifierState:
    if not arch.is_active:
        raise ValueError("amplification requested for a passive RIS")
    if not tx_power > 0:
        raise ValueError(f"tx_power must be > 0 W, got {tx_power}")
    p_in = tx_power * hop1.power_gain_linear
    sigma_v2 = dynamic_noise_power(arch, thermal_noise_w)
    rho = budget_rho(arch.pa_output_power, arch.group_size_L, p_in, sigma_v2,
                     arch.amp_gain_floor, arch.amp_gain_cap)
    return AmplifierState(rho, p_in, sigma_v2)


def cascade_snr(tx_power, rho, n_total, g1, g2, sigma_v2, receiver_noise):
    """Closed-form SNR with uniform per-element hop gains and a common rho.

        SNR = P rho^2 N^2 g1 g2 / (rho^2 N g2 sigma_v2 + noise)
    """
    rho2 = np.square(rho)
    num = tx_power * rho2 * n_total**2 * g1 * g2
    den = rho2 * n_total * g2 * sigma_v2 + receiver_noise
    return num / den


def end_to_end_snr(link: CascadeLink, arch: RisArchitecture, tx_power: float,
                   receiver_noise_power: float, thermal_noise_w: float | None = None) -> float:
    """Linear SNR of the cascade.

    ``thermal_noise_w`` (N0 B) sets the dynamic noise of an active surface and
    defaults to ``receiver_noise_power``.
    """
    if not tx_power > 0 or not receiver_noise_power > 0:
        raise ValueError("tx_power and receiver_noise_power must be positive")
    g1 = link.hop1.power_gain_linear
    g2 = link.hop2.power_gain_linear
    if arch.is_active:
        n0b = receiver_noise_power if thermal_noise_w is None else thermal_noise_w
        amp = amplification_factor(arch, tx_power, link.hop1, n0b)
        rho, sigma_v2 = amp.rho, amp.dynamic_noise_power
    else:
        rho, sigma_v2 = 1.0, 0.0
    return float(cascade_snr(tx_power, rho, arch.n_total, g1, g2, sigma_v2, receiver_noise_power))


def elementwise_oracle_snr(h1_amplitudes: Sequence[float], h2_amplitudes: Sequence[float],
                           group_assignment: Sequence[int], rho_per_group: Sequence[float],
                           tx_power: float, sigma_v2: float, receiver_noise: float) -> float:
    """Coherent-sum SNR with per-element amplitudes and per-group gains.

    No uniform-gain assumption; used to check :func:`cascade_snr`.
    """
    a1 = np.asarray(h1_amplitudes, dtype=float)
    a2 = np.asarray(h2_amplitudes, dtype=float)
    groups = np.asarray(group_assignment, dtype=int)
    rho = np.asarray(rho_per_group, dtype=float)
    if not (a1.shape == a2.shape == groups.shape) or a1.ndim != 1:
        raise ValueError("amplitude and group arrays must be 1-D with equal length")
    if groups.min() < 0 or groups.max() >= rho.size:
        raise ValueError("group index out of range of rho_per_group")
    rho_n = rho[groups]
    amplitude = np.sum(rho_n * a1 * a2)
    noise = sigma_v2 * np.sum(rho_n**2 * a2**2) + receiver_noise
    return float(tx_power * amplitude**2 / noise)


def complex_baseband_snr(h1: np.ndarray, h2: np.ndarray, group_assignment, rho_per_group,
                         tx_power: float, sigma_v2: float, receiver_noise: float) -> float:
    """Direct complex-baseband evaluation with conjugate phase alignment.

    Builds the reflection matrix ``Phi = diag(rho_n exp(j theta_n))`` with
    ``theta_n = -arg(h1_n h2_n)`` and evaluates signal power
    ``P |h2^T Phi h1|^2`` against the noise covariance ``sigma_v2 h2^T Phi Phi^H h2^*``.
    """
    h1 = np.asarray(h1, dtype=complex)
    h2 = np.asarray(h2, dtype=complex)
    rho_n = np.asarray(rho_per_group, dtype=float)[np.asarray(group_assignment, dtype=int)]
    theta = -np.angle(h1 * h2)
    phi = np.diag(rho_n * np.exp(1j * theta))
    effective = h2 @ phi @ h1
    b = h2 @ phi
    noise = sigma_v2 * np.real(b @ b.conj()) + receiver_noise
    return float(tx_power * abs(effective) ** 2 / noise)
