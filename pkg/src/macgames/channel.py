"""Per-sender frame-success models.

Analysis consumes fixed per-strategy success fractions; the simulator can
instead draw per-frame outcomes from a Rayleigh block-fading link, where one
power draw covers a window of consecutive frames so losses cluster.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError
from .phy import MBPS, PhyProfile, Strategy

# Representative DSSS receiver sensitivities [dBm]. Not calibrated to any
# particular radio; scenario files may override per rate.
DEFAULT_THRESHOLDS_DBM = (
    (1 * MBPS, -94.0),
    (2 * MBPS, -91.0),
    (5.5 * MBPS, -87.0),
    (11 * MBPS, -82.0),
)


def dbm_to_mw(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0)


def mw_to_dbm(mw: float) -> float:
    if mw <= 0.0:
        return -math.inf
    return 10.0 * math.log10(mw)


def log_distance_rx_power_dbm(
    tx_power_dbm: float,
    distance_m: float,
    path_loss_exponent: float = 3.0,
    ref_distance_m: float = 1.0,
    ref_loss_db: float = 40.0,
) -> float:
    """Mean received power under log-distance path loss.

    ``ref_loss_db`` is the loss already incurred at the reference distance;
    distances inside the reference clamp to it.
    """
    if distance_m <= 0:
        raise DomainError("distance must be > 0 m")
    if ref_distance_m <= 0:
        raise DomainError("reference distance must be > 0 m")
    d = max(distance_m, ref_distance_m)
    return tx_power_dbm - ref_loss_db - 10.0 * path_loss_exponent * math.log10(d / ref_distance_m)


class SuccessTable:
    """Per-strategy frame success fractions for one sender.

    Construction enforces weak rate monotonicity at equal payload: dropping
    the data rate must not reduce the success fraction. A table violating
    that is a configuration error, not a representable channel.
    """

    def __init__(self, entries):
        self._entries: dict[Strategy, float] = dict(entries)
        if not self._entries:
            raise DomainError("success table is empty")
        for strategy, frac in self._entries.items():
            if not 0.0 <= frac <= 1.0:
                raise DomainError(
                    f"success fraction {frac} for {strategy.label()} outside [0, 1]"
                )
        by_payload: dict[int, list[Strategy]] = {}
        for strategy in self._entries:
            by_payload.setdefault(strategy.payload_bits, []).append(strategy)
        for group in by_payload.values():
            group.sort(key=lambda s: s.rate_bps)
            for lower, higher in zip(group, group[1:]):
                if self._entries[lower] < self._entries[higher]:
                    raise DomainError(
                        "success fractions must not rise with the data rate at "
                        f"equal payload: {lower.label()} has {self._entries[lower]} "
                        f"but {higher.label()} has {self._entries[higher]}"
                    )

    @classmethod
    def from_fading(cls, channel: "FadingChannel", strategies) -> "SuccessTable":
        """Deterministic table induced by a fading link over a strategy set."""
        return cls({s: rayleigh_success_fraction(channel, s) for s in strategies})

    def success_fraction(self, strategy: Strategy) -> float:
        try:
            return self._entries[strategy]
        except KeyError:
            raise DomainError(f"no success entry for strategy {strategy.label()}") from None

    def strategies(self) -> tuple[Strategy, ...]:
        return tuple(self._entries)

    def items(self):
        return self._entries.items()

    def __eq__(self, other):
        return isinstance(other, SuccessTable) and self._entries == other._entries

    def __repr__(self):
        body = ", ".join(f"{s.label()}: {a:g}" for s, a in self._entries.items())
        return f"SuccessTable({{{body}}})"


@dataclass(frozen=True)
class FadingChannel:
    """Rayleigh link: exponentially distributed instantaneous power around a
    fixed mean, compared against per-rate decode thresholds.

    ``coherence_frames`` consecutive frames share one power draw; with a
    window larger than one, failures arrive in bursts.
    """

    mean_rx_power_dbm: float
    thresholds_dbm: tuple[tuple[float, float], ...] = DEFAULT_THRESHOLDS_DBM
    coherence_frames: int = 1
    rng_seed: int = 0

    def __post_init__(self):
        pairs = tuple(sorted((float(r), float(t)) for r, t in self.thresholds_dbm))
        object.__setattr__(self, "thresholds_dbm", pairs)
        if not pairs:
            raise DomainError("threshold table is empty")
        rates = [r for r, _ in pairs]
        if len(set(rates)) != len(rates):
            raise DomainError("duplicate rate in threshold table")
        thresholds = [t for _, t in pairs]
        if any(b <= a for a, b in zip(thresholds, thresholds[1:])):
            raise DomainError("decode thresholds must rise strictly with the data rate")
        if self.coherence_frames < 1:
            raise DomainError("coherence_frames must be >= 1")

    def threshold_dbm(self, rate_bps: float) -> float:
        for r, t in self.thresholds_dbm:
            if r == rate_bps:
                return t
        raise DomainError(f"no decode threshold for rate {rate_bps / MBPS:g} Mbps")


def rayleigh_success_fraction(channel: FadingChannel, strategy: Strategy) -> float:
    """P[instantaneous power clears the rate's threshold] = exp(-thr/mean), linear units."""
    thr_mw = dbm_to_mw(channel.threshold_dbm(strategy.rate_bps))
    return math.exp(-thr_mw / dbm_to_mw(channel.mean_rx_power_dbm))


def rbar_select_rate_bps(channel: FadingChannel, phy: PhyProfile, sampled_power_dbm: float) -> float:
    """Highest profile rate whose threshold the reported power clears.

    Falls back to the lowest profile rate when nothing qualifies; rates
    without a threshold entry are never selected.
    """
    best = None
    for rate in phy.rates_bps:
        try:
            thr = channel.threshold_dbm(rate)
        except DomainError:
            continue
        if thr <= sampled_power_dbm:
            best = rate
    return best if best is not None else phy.rates_bps[0]


class FadingSampler:
    """Stateful per-frame outcome stream for one sender over a fading link."""

    def __init__(self, channel: FadingChannel, rng):
        self._channel = channel
        self._rng = rng
        self._mean_mw = dbm_to_mw(channel.mean_rx_power_dbm)
        self._thr_mw = {r: dbm_to_mw(t) for r, t in channel.thresholds_dbm}
        self._frames_left = 0
        self._power_mw = 0.0

    def _refresh(self):
        if self._frames_left == 0:
            self._power_mw = self._rng.exponential(self._mean_mw)
            self._frames_left = self._channel.coherence_frames

    def current_power_dbm(self) -> float:
        """Power governing the next frame; peeking does not consume the window."""
        self._refresh()
        return mw_to_dbm(self._power_mw)

    def sample_frame_outcome(self, strategy: Strategy) -> bool:
        self._refresh()
        self._frames_left -= 1
        try:
            thr = self._thr_mw[strategy.rate_bps]
        except KeyError:
            raise DomainError(
                f"no decode threshold for rate {strategy.rate_mbps:g} Mbps"
            ) from None
        return self._power_mw >= thr


class TableSampler:
    """Independent Bernoulli per-frame outcomes from a success table."""

    def __init__(self, table: SuccessTable, rng):
        self._table = table
        self._rng = rng

    def sample_frame_outcome(self, strategy: Strategy) -> bool:
        return self._rng.random() < self._table.success_fraction(strategy)
