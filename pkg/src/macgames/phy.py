"""Rate/payload arithmetic for 802.11-style senders.

Internal units are strict throughout the package: times in seconds, payloads
in bits, rates in bits per second. Mbps appears only in scenario files and
rendered output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

MBPS = 1e6

# Slack applied before flooring a TXOP fill so an exact fit is not lost to
# float rounding (15 ms / 3.75 ms must give 4 frames, not 3).
_FILL_EPS = 1e-9


@dataclass(frozen=True)
class PhyProfile:
    """Radio and MAC constants shared by the analytic model and the simulator."""

    rates_bps: tuple[float, ...]
    bit_overhead_bits: int = 288      # MAC + LLC headers [bits]
    time_overhead_s: float = 556e-6   # preamble + SIFS + ack + DIFS [s]
    slot_time_s: float = 20e-6
    cw_min: int = 31
    cw_max: int = 1023
    txop_limit_s: float = 0.015       # channel-time allowance per transmission opportunity
    max_payload_bits: int = 12000

    def __post_init__(self):
        object.__setattr__(self, "rates_bps", tuple(float(r) for r in self.rates_bps))
        if not self.rates_bps:
            raise DomainError("rate table is empty")
        if any(r <= 0 for r in self.rates_bps):
            raise DomainError("data rates must be positive")
        if list(self.rates_bps) != sorted(set(self.rates_bps)):
            raise DomainError("data rates must be strictly increasing")
        if self.bit_overhead_bits < 0:
            raise DomainError("bit overhead must be >= 0 bits")
        if self.time_overhead_s < 0:
            raise DomainError("time overhead must be >= 0 s")
        if self.slot_time_s <= 0:
            raise DomainError("slot time must be > 0 s")
        if not 0 < self.cw_min <= self.cw_max:
            raise DomainError("need 0 < cw_min <= cw_max")
        if self.txop_limit_s <= 0:
            raise DomainError("txop limit must be > 0 s")
        if self.max_payload_bits <= 0:
            raise DomainError("max payload must be > 0 bits")


@dataclass(frozen=True)
class Strategy:
    """One sender action: a data rate [bits/s] paired with a frame payload [bits]."""

    rate_bps: float
    payload_bits: int

    @classmethod
    def mbps(cls, rate_mbps, payload_bits) -> "Strategy":
        return cls(float(rate_mbps) * MBPS, int(payload_bits))

    @property
    def rate_mbps(self) -> float:
        return self.rate_bps / MBPS

    def label(self) -> str:
        return f"{self.rate_mbps:g}Mbps/{self.payload_bits}b"


# 2.4 GHz DSSS profile: 1/2/5.5/11 Mbps, 20 us slots, cw 31..1023. Overheads
# cover long preamble + SIFS + 1 Mbps ack + DIFS; every field is overridable
# in scenario files.
DOT11B = PhyProfile(rates_bps=(1 * MBPS, 2 * MBPS, 5.5 * MBPS, 11 * MBPS))

PRESETS = {"dot11b": DOT11B}


def validate_strategy(strategy: Strategy, phy: PhyProfile) -> None:
    """Reject strategies outside the profile's rate table or frame-size bound."""
    if strategy.rate_bps not in phy.rates_bps:
        raise DomainError(
            f"rate {strategy.rate_mbps:g} Mbps is not in the profile rate table"
        )
    if not 0 < strategy.payload_bits <= phy.max_payload_bits:
        raise DomainError(
            f"payload {strategy.payload_bits} bits outside (0, {phy.max_payload_bits}]"
        )


def frame_airtime_s(strategy: Strategy, phy: PhyProfile) -> float:
    """Channel time one frame occupies: fixed overhead plus serialized bits."""
    validate_strategy(strategy, phy)
    return (
        phy.time_overhead_s
        + (strategy.payload_bits + phy.bit_overhead_bits) / strategy.rate_bps
    )


def peak_throughput_bps(strategy: Strategy, phy: PhyProfile) -> float:
    """Zero-loss, sole-occupancy throughput of a strategy."""
    return strategy.payload_bits / frame_airtime_s(strategy, phy)


def achievable_throughput_bps(strategy: Strategy, success_fraction: float, phy: PhyProfile) -> float:
    """Peak throughput discounted by the per-frame success fraction."""
    if not 0.0 <= success_fraction <= 1.0:
        raise DomainError(f"success fraction {success_fraction} outside [0, 1]")
    return peak_throughput_bps(strategy, phy) * success_fraction


def max_burst_frames(strategy: Strategy, phy: PhyProfile) -> int:
    """Frames that fit the TXOP allowance, never less than one."""
    fit = math.floor(phy.txop_limit_s / frame_airtime_s(strategy, phy) + _FILL_EPS)
    return max(1, fit)
