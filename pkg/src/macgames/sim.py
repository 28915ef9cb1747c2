"""Discrete-event contention simulator for saturated senders.

The clock advances in integer nanoseconds so the busy/idle/collision ledger
sums to the elapsed time exactly and a seed replays bit for bit. Contention is
slot-synchronous: while the medium is idle every pending sender counts its
backoff down one slot at a time, the sender reaching zero transmits, and
simultaneous zeros collide (every frame involved fails, the channel stays busy
for the longest of them).

Per transmission opportunity, DCF and the adaptive-window discipline send one
frame; the EDCF disciplines send a burst pre-fitted to the TXOP allowance.
A TXOP whose last frame failed doubles the contention window, anything else
resets it to the sender's effective minimum. Under ``dcf_star`` (and
``time_fair``, which the simulator realizes the same way) a share controller
rescales each sender's effective minimum window every adaptation period to
hold its long-run channel-time share at a target.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .channel import FadingChannel, FadingSampler, SuccessTable, TableSampler, rbar_select_rate_bps
from .errors import DomainError
from .game import BurstPolicy, Discipline
from .phy import MBPS, PhyProfile, Strategy, frame_airtime_s, max_burst_frames, validate_strategy

# Sub-stream ids: every random consumer hangs off the scenario seed through a
# fixed key so adding one never perturbs the others.
STREAM_BACKOFF = 0
STREAM_CHANNEL = 1
STREAM_CONTROLLER = 2   # reserved; the share controller is deterministic today

_NS = 1_000_000_000


def substream(seed: int, *key: int):
    """Independent generator keyed under the scenario seed."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=key))


class StrategyPolicy(str, Enum):
    FIXED = "fixed"
    AUTO_RATE = "auto_rate"           # receiver-reported power picks the rate per TXOP
    BEST_RESPONSE = "best_response"   # periodically re-measures every candidate


@dataclass(frozen=True)
class DcfStarConfig:
    """Share-controller settings.

    Every adaptation period each sender rescales its effective minimum window
    by (observed share / target share) ** gain, clamped to the window range.
    Shares are measured against total busy time, so targets describe how the
    occupied air divides among senders.
    """

    target_shares: tuple[float, ...]
    gain: float = 1.0
    adaptation_period_s: float = 0.1
    cw_floor: int = 7
    cw_ceiling: int = 255

    def __post_init__(self):
        object.__setattr__(self, "target_shares", tuple(float(t) for t in self.target_shares))
        if not self.target_shares or any(t <= 0 for t in self.target_shares):
            raise DomainError("target shares must all be > 0")
        if sum(self.target_shares) > 1.0 + 1e-9:
            raise DomainError("target shares must sum to <= 1")
        if self.gain <= 0:
            raise DomainError("controller gain must be > 0")
        if self.adaptation_period_s <= 0:
            raise DomainError("adaptation period must be > 0 s")
        if not 1 <= self.cw_floor <= self.cw_ceiling:
            raise DomainError("need 1 <= cw_floor <= cw_ceiling")


@dataclass(frozen=True)
class BestResponseConfig:
    measurement_window_s: float = 5.0
    epoch_cap: int = 8

    def __post_init__(self):
        if self.measurement_window_s <= 0:
            raise DomainError("measurement window must be > 0 s")
        if self.epoch_cap < 1:
            raise DomainError("epoch cap must be >= 1")


@dataclass(frozen=True)
class SimNode:
    name: str
    channel: SuccessTable | FadingChannel
    strategy: Strategy | None = None
    policy: StrategyPolicy = StrategyPolicy.FIXED
    candidates: tuple[Strategy, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "candidates", tuple(self.candidates))


@dataclass(frozen=True)
class SimScenario:
    phy: PhyProfile
    discipline: Discipline
    nodes: tuple[SimNode, ...]
    duration_s: float
    seed: int = 0
    report_interval_s: float = 1.0
    dcf_star: DcfStarConfig | None = None
    best_response: BestResponseConfig | None = None

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        if not self.nodes:
            raise DomainError("scenario has no nodes")
        if self.duration_s <= 0:
            raise DomainError("duration must be > 0 s")
        if self.report_interval_s <= 0:
            raise DomainError("report interval must be > 0 s")

        if self.discipline.fixed_time_share and self.dcf_star is None:
            equal = 1.0 / len(self.nodes)
            object.__setattr__(self, "dcf_star", DcfStarConfig((equal,) * len(self.nodes)))
        if self.dcf_star is not None:
            if not self.discipline.fixed_time_share:
                raise DomainError("dcf_star settings require the dcf_star (or time_fair) discipline")
            if len(self.dcf_star.target_shares) != len(self.nodes):
                raise DomainError("need one target share per node")
            if self.dcf_star.cw_ceiling > self.phy.cw_max:
                raise DomainError("cw_ceiling must not exceed the profile cw_max")

        any_br = False
        for node in self.nodes:
            if node.policy is StrategyPolicy.AUTO_RATE:
                if not isinstance(node.channel, FadingChannel):
                    raise DomainError(f"node {node.name}: auto_rate requires a fading channel")
                if node.strategy is None:
                    raise DomainError(f"node {node.name}: auto_rate still needs a strategy for its payload")
                node.channel.threshold_dbm(self.phy.rates_bps[0])   # fallback rate must be decodable
            elif node.strategy is None:
                raise DomainError(f"node {node.name}: a fixed strategy is required")
            if node.strategy is not None:
                validate_strategy(node.strategy, self.phy)
            if node.policy is StrategyPolicy.BEST_RESPONSE:
                any_br = True
                if not node.candidates:
                    raise DomainError(f"node {node.name}: best_response needs candidate strategies")
            for cand in node.candidates:
                validate_strategy(cand, self.phy)
            if isinstance(node.channel, SuccessTable):
                needed = set(node.candidates)
                if node.strategy is not None:
                    needed.add(node.strategy)
                for s in needed:
                    node.channel.success_fraction(s)   # raises when the table has a hole
        if any_br and self.best_response is None:
            object.__setattr__(self, "best_response", BestResponseConfig())


def dcf_star_cw_update(cw_min_eff: float, observed_share: float, target_share: float, config: DcfStarConfig) -> float:
    """One multiplicative controller step; the fixed point is observed == target."""
    if not 0.0 <= observed_share <= 1.0:
        raise DomainError(f"observed share {observed_share} outside [0, 1]")
    if target_share <= 0.0:
        raise DomainError("target share must be > 0")
    scaled = cw_min_eff * (observed_share / target_share) ** config.gain
    return min(max(scaled, float(config.cw_floor)), float(config.cw_ceiling))


@dataclass(frozen=True)
class TxopResult:
    frames: int
    frames_ok: int
    delivered_bits: int
    last_frame_ok: bool


def execute_txop(strategy: Strategy, phy: PhyProfile, policy: BurstPolicy | None, sample_outcome) -> TxopResult:
    """Send one transmission opportunity's frames.

    ``policy=None`` means a single frame (DCF-style). Bursts are pre-fitted:
    the frame count never exceeds what the TXOP allowance admits, except that
    a lone oversized frame still goes out so nobody starves.
    """
    limit = 1 if policy is None else max_burst_frames(strategy, phy)
    frames = ok = bits = 0
    last_ok = False
    for _ in range(limit):
        frames += 1
        good = bool(sample_outcome(strategy))
        last_ok = good
        if good:
            ok += 1
            bits += strategy.payload_bits
        elif policy is BurstPolicy.STOP_ON_LOSS:
            break
    return TxopResult(frames, ok, bits, last_ok)


@dataclass(frozen=True)
class IntervalSample:
    time_s: float
    node: str
    throughput_mbps: float
    share: float
    loss_rate: float
    cw_min_eff: float
    strategy: str


@dataclass(frozen=True)
class NodeReport:
    name: str
    strategy: str
    throughput_mbps: float
    share: float
    loss_rate: float
    busy_s: float
    txops: int
    collisions: int
    frames: int
    frames_ok: int
    delivered_bits: int
    cw_min_eff: float
    busy_ns: int


@dataclass(frozen=True)
class SimReport:
    duration_s: float
    idle_s: float
    collision_s: float
    aggregate_throughput_mbps: float
    nodes: tuple[NodeReport, ...]
    timeseries: tuple[IntervalSample, ...]
    best_response_rounds: int | None
    best_response_converged: bool | None
    elapsed_ns: int
    idle_ns: int
    collision_ns: int


class _NodeState:
    __slots__ = (
        "spec", "idx", "strategy", "sampler", "rng",
        "cw_min_eff", "cw_cur", "backoff",
        "txops", "collisions", "frames", "frames_ok", "delivered_bits", "busy_ns",
    )

    def __init__(self, spec: SimNode, idx: int, sampler, rng, cw_min: float):
        self.spec = spec
        self.idx = idx
        self.strategy = spec.strategy
        self.sampler = sampler
        self.rng = rng
        self.cw_min_eff = float(cw_min)
        self.cw_cur = float(cw_min)
        self.backoff = 0
        self.txops = 0
        self.collisions = 0
        self.frames = 0
        self.frames_ok = 0
        self.delivered_bits = 0
        self.busy_ns = 0


class Simulator:
    """Resumable engine over one scenario; ``run`` drives it to completion."""

    def __init__(self, scenario: SimScenario, seed: int | None = None):
        self.scenario = scenario
        self.phy = scenario.phy
        seed = scenario.seed if seed is None else seed
        self._policy = scenario.discipline.burst_policy
        self._slot_ns = max(1, round(scenario.phy.slot_time_s * _NS))
        self._duration_ns = round(scenario.duration_s * _NS)
        self._airtime_ns: dict[Strategy, int] = {}

        self._nodes: list[_NodeState] = []
        for idx, spec in enumerate(scenario.nodes):
            if isinstance(spec.channel, SuccessTable):
                sampler = TableSampler(spec.channel, substream(seed, STREAM_CHANNEL, idx))
            else:
                sampler = FadingSampler(
                    spec.channel, substream(seed, STREAM_CHANNEL, idx, spec.channel.rng_seed)
                )
            node = _NodeState(spec, idx, sampler, substream(seed, STREAM_BACKOFF, idx), scenario.phy.cw_min)
            self._nodes.append(node)
            self._draw_backoff(node)

        self.t_ns = 0
        self.idle_ns = 0
        self.collision_ns = 0

        cfg = scenario.dcf_star
        self._controller = cfg if scenario.discipline.fixed_time_share else None
        self._ctrl_period_ns = round(cfg.adaptation_period_s * _NS) if self._controller else 0
        self._next_ctrl_ns = self._ctrl_period_ns if self._controller else None
        self._ctrl_busy_snapshot = [0] * len(self._nodes)

        self._report_ns = round(scenario.report_interval_s * _NS)
        self._next_report_ns = self._report_ns
        self._last_report_t_ns = 0
        self._iv_snapshot = [(0, 0, 0, 0) for _ in self._nodes]   # (bits, busy, frames, ok)
        self._timeseries: list[IntervalSample] = []

        self._br_rounds: int | None = None
        self._br_converged: bool | None = None

    # -- backoff / airtime helpers ------------------------------------------

    def _airtime(self, strategy: Strategy) -> int:
        ns = self._airtime_ns.get(strategy)
        if ns is None:
            ns = max(1, round(frame_airtime_s(strategy, self.phy) * _NS))
            self._airtime_ns[strategy] = ns
        return ns

    def _draw_backoff(self, node: _NodeState) -> None:
        node.backoff = int(node.rng.integers(0, int(node.cw_cur) + 1))

    # -- event loop ----------------------------------------------------------

    def run_until(self, t_stop_ns: int) -> None:
        while self.t_ns < t_stop_ns:
            self._step()

    def _step(self) -> None:
        nodes = self._nodes
        wait = min(n.backoff for n in nodes)
        if wait:
            dt = wait * self._slot_ns
            self.t_ns += dt
            self.idle_ns += dt
            for n in nodes:
                n.backoff -= wait
        winners = [n for n in nodes if n.backoff == 0]
        if len(winners) == 1:
            self._transmit(winners[0])
        else:
            self._collide(winners)
        self._fire_ticks()

    def _transmit(self, node: _NodeState) -> None:
        strategy = node.strategy
        if node.spec.policy is StrategyPolicy.AUTO_RATE:
            power = node.sampler.current_power_dbm()
            rate = rbar_select_rate_bps(node.spec.channel, self.phy, power)
            strategy = Strategy(rate, node.strategy.payload_bits)
            node.strategy = strategy
        result = execute_txop(strategy, self.phy, self._policy, node.sampler.sample_frame_outcome)
        busy = result.frames * self._airtime(strategy)
        self.t_ns += busy
        node.busy_ns += busy
        node.txops += 1
        node.frames += result.frames
        node.frames_ok += result.frames_ok
        node.delivered_bits += result.delivered_bits
        if result.last_frame_ok:
            node.cw_cur = node.cw_min_eff
        else:
            node.cw_cur = min(node.cw_cur * 2 + 1, float(self.phy.cw_max))
        self._draw_backoff(node)

    def _collide(self, winners: list[_NodeState]) -> None:
        # Everyone's first frame overlaps and fails; the medium stays busy for
        # the longest of them and the time lands in the collision ledger, not
        # in any sender's occupancy.
        dur = max(self._airtime(w.strategy) for w in winners)
        self.t_ns += dur
        self.collision_ns += dur
        for w in winners:
            w.collisions += 1
            w.frames += 1
            w.cw_cur = min(w.cw_cur * 2 + 1, float(self.phy.cw_max))
            self._draw_backoff(w)

    # -- periodic work -------------------------------------------------------

    def _fire_ticks(self) -> None:
        while True:
            ctrl_due = self._next_ctrl_ns is not None and self._next_ctrl_ns <= self.t_ns
            report_due = self._next_report_ns <= self.t_ns
            if ctrl_due and (not report_due or self._next_ctrl_ns <= self._next_report_ns):
                self._controller_tick()
            elif report_due:
                self._report_tick()
            else:
                return

    def _controller_tick(self) -> None:
        deltas = [n.busy_ns - prev for n, prev in zip(self._nodes, self._ctrl_busy_snapshot)]
        total = sum(deltas)
        if total > 0:
            cfg = self._controller
            targets = cfg.target_shares
            norm = sum(targets)
            for node, delta, target in zip(self._nodes, deltas, targets):
                node.cw_min_eff = dcf_star_cw_update(
                    node.cw_min_eff, delta / total, target / norm, cfg
                )
            # The multiplicative law only pins window *ratios*; re-anchor the
            # geometric mean at the profile cw_min so the overall contention
            # level (and with it the collision rate) cannot drift.
            log_mean = sum(math.log(n.cw_min_eff) for n in self._nodes) / len(self._nodes)
            scale = self.phy.cw_min / math.exp(log_mean)
            for node in self._nodes:
                node.cw_min_eff = min(
                    max(node.cw_min_eff * scale, float(cfg.cw_floor)), float(cfg.cw_ceiling)
                )
        self._ctrl_busy_snapshot = [n.busy_ns for n in self._nodes]
        self._next_ctrl_ns += self._ctrl_period_ns

    def _report_tick(self) -> None:
        # Rows are labeled with the scheduled tick time, but rates are taken
        # over the actual window (ticks land on event completions, so window
        # edges slip by up to one burst; the actual length keeps share <= 1).
        time_s = self._next_report_ns / _NS
        # one long event can cross several boundaries; repeat ticks then see an
        # empty window and report zero activity
        window_ns = max(1, self.t_ns - self._last_report_t_ns)
        for node, (bits0, busy0, fr0, ok0) in zip(self._nodes, self._iv_snapshot):
            d_bits = node.delivered_bits - bits0
            d_busy = node.busy_ns - busy0
            d_fr = node.frames - fr0
            d_ok = node.frames_ok - ok0
            self._timeseries.append(IntervalSample(
                time_s=time_s,
                node=node.spec.name,
                throughput_mbps=d_bits * _NS / window_ns / MBPS,
                share=d_busy / window_ns,
                loss_rate=1.0 - d_ok / d_fr if d_fr else 0.0,
                cw_min_eff=node.cw_min_eff,
                strategy=node.strategy.label(),
            ))
        self._iv_snapshot = [(n.delivered_bits, n.busy_ns, n.frames, n.frames_ok) for n in self._nodes]
        self._last_report_t_ns = self.t_ns
        self._next_report_ns += self._report_ns

    # -- strategy search -----------------------------------------------------

    def set_strategy(self, idx: int, strategy: Strategy) -> None:
        validate_strategy(strategy, self.phy)
        self._nodes[idx].strategy = strategy

    def measure_throughput_bps(self, idx: int, window_ns: int) -> float:
        """Run the live system for a window and return one node's rate in it."""
        node = self._nodes[idx]
        bits0, t0 = node.delivered_bits, self.t_ns
        self.run_until(self.t_ns + window_ns)
        return (node.delivered_bits - bits0) * _NS / (self.t_ns - t0)

    # -- orchestration -------------------------------------------------------

    def run(self) -> SimReport:
        if any(n.spec.policy is StrategyPolicy.BEST_RESPONSE for n in self._nodes):
            self._best_response_loop()
        if self.t_ns < self._duration_ns:
            self.run_until(self._duration_ns)
        return self._build_report()

    def _best_response_loop(self) -> None:
        cfg = self.scenario.best_response
        window_ns = round(cfg.measurement_window_s * _NS)
        searchers = [n for n in self._nodes if n.spec.policy is StrategyPolicy.BEST_RESPONSE]
        rounds = 0
        converged = False
        while rounds < cfg.epoch_cap and not converged:
            switched = False
            for node in searchers:
                incumbent = node.strategy
                measured: list[tuple[Strategy, float]] = []
                for cand in node.spec.candidates:
                    node.strategy = cand
                    measured.append((cand, self.measure_throughput_bps(node.idx, window_ns)))
                # ties keep the incumbent (when it was probed at all)
                ranked = dict(measured)
                best, best_rate = incumbent, ranked.get(incumbent, -math.inf)
                for cand, rate in measured:
                    if rate > best_rate:
                        best, best_rate = cand, rate
                node.strategy = best
                if best != incumbent:
                    switched = True
            rounds += 1
            converged = not switched
        self._br_rounds = rounds
        self._br_converged = converged

    def _build_report(self) -> SimReport:
        elapsed = self.t_ns
        dur_s = elapsed / _NS
        reports = []
        for n in self._nodes:
            reports.append(NodeReport(
                name=n.spec.name,
                strategy=n.strategy.label(),
                throughput_mbps=n.delivered_bits / dur_s / MBPS,
                share=n.busy_ns / elapsed,
                loss_rate=1.0 - n.frames_ok / n.frames if n.frames else 0.0,
                busy_s=n.busy_ns / _NS,
                txops=n.txops,
                collisions=n.collisions,
                frames=n.frames,
                frames_ok=n.frames_ok,
                delivered_bits=n.delivered_bits,
                cw_min_eff=n.cw_min_eff,
                busy_ns=n.busy_ns,
            ))
        return SimReport(
            duration_s=dur_s,
            idle_s=self.idle_ns / _NS,
            collision_s=self.collision_ns / _NS,
            aggregate_throughput_mbps=sum(r.throughput_mbps for r in reports),
            nodes=tuple(reports),
            timeseries=tuple(self._timeseries),
            best_response_rounds=self._br_rounds,
            best_response_converged=self._br_converged,
            elapsed_ns=elapsed,
            idle_ns=self.idle_ns,
            collision_ns=self.collision_ns,
        )


def run_sim(scenario: SimScenario, seed: int | None = None) -> SimReport:
    """Simulate one scenario to completion; identical inputs replay exactly."""
    return Simulator(scenario, seed=seed).run()
