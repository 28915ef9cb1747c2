"""Two-player channel contention games.

Payoffs follow the occupancy-share model: a sender's throughput is its
achievable throughput times the fraction of the round (both occupancies plus
idle time) that its own bursts fill. What separates the disciplines is the
occupancy rule:

* dcf            - one frame per win, occupancy = frame airtime
* edcf_*         - a burst per win, occupancy = expected frames x airtime
* time_fair      - every win confers exactly the TXOP allowance
* dcf_star       - adaptive-window realization of time_fair; analytically identical
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .channel import SuccessTable
from .errors import DomainError
from .phy import (
    MBPS,
    PhyProfile,
    Strategy,
    achievable_throughput_bps,
    frame_airtime_s,
    max_burst_frames,
    peak_throughput_bps,
)

# Relative slack when deciding whether a strategy attains the best achievable
# throughput; exact argmax ties all count as efficient.
EFFICIENCY_REL_TOL = 1e-9


class BurstPolicy(Enum):
    STOP_ON_LOSS = "stop_on_loss"   # end the burst at the first failed frame
    FULL_BURST = "full_burst"       # always send the whole TXOP allowance


class Discipline(str, Enum):
    DCF = "dcf"
    EDCF_STOP_ON_LOSS = "edcf_stop_on_loss"
    EDCF_FULL_BURST = "edcf_full_burst"
    TIME_FAIR = "time_fair"
    DCF_STAR = "dcf_star"

    @property
    def burst_policy(self):
        if self is Discipline.EDCF_STOP_ON_LOSS:
            return BurstPolicy.STOP_ON_LOSS
        if self is Discipline.EDCF_FULL_BURST:
            return BurstPolicy.FULL_BURST
        return None

    @property
    def fixed_time_share(self) -> bool:
        return self in (Discipline.TIME_FAIR, Discipline.DCF_STAR)


class SpeClass(str, Enum):
    UNIQUE_DESIRABLE = "unique-desirable"
    UNIQUE_UNDESIRABLE = "unique-undesirable"
    MULTIPLE = "multiple-NE"
    NONE = "none"


@dataclass(frozen=True)
class StageGame:
    """One contention round between senders i and j with fixed channels."""

    phy: PhyProfile
    discipline: Discipline
    strategies_i: tuple[Strategy, ...]
    strategies_j: tuple[Strategy, ...]
    success_i: SuccessTable
    success_j: SuccessTable
    t_idle_s: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "strategies_i", tuple(self.strategies_i))
        object.__setattr__(self, "strategies_j", tuple(self.strategies_j))
        if not self.strategies_i or not self.strategies_j:
            raise DomainError("strategy sets must be nonempty")
        if self.t_idle_s < 0:
            raise DomainError("idle time must be >= 0 s")


@dataclass(frozen=True)
class Outcome:
    """Per-round result of one strategy pair."""

    r_i_bps: float
    r_j_bps: float
    t_i_s: float
    t_j_s: float
    t_total_s: float
    f_i: float
    f_j: float
    b_i: float
    b_j: float

    @property
    def r_i_mbps(self) -> float:
        return self.r_i_bps / MBPS

    @property
    def r_j_mbps(self) -> float:
        return self.r_j_bps / MBPS


def dcf_occupancy_s(strategy: Strategy, phy: PhyProfile) -> float:
    """Round occupancy under DCF: exactly one frame airtime."""
    return frame_airtime_s(strategy, phy)


def expected_burst_frames(strategy: Strategy, alpha: float, phy: PhyProfile, policy: BurstPolicy) -> float:
    """Mean frames per TXOP.

    Full-burst senders always use the whole allowance. Stop-on-loss senders
    send a success run truncated at the first loss or at the allowance,
    whichever comes first.
    """
    if not 0.0 <= alpha <= 1.0:
        raise DomainError(f"success fraction {alpha} outside [0, 1]")
    n = max_burst_frames(strategy, phy)
    if policy is BurstPolicy.FULL_BURST:
        return float(n)
    acc = 0.0
    cum = 0.0
    for k in range(1, n):
        p_k = alpha ** (k - 1) * (1.0 - alpha)
        acc += p_k * k
        cum += p_k
    return acc + (1.0 - cum) * n


def edcf_occupancy_s(strategy: Strategy, alpha: float, phy: PhyProfile, policy: BurstPolicy) -> float:
    """Round occupancy under EDCF: expected burst length times frame airtime."""
    return expected_burst_frames(strategy, alpha, phy, policy) * frame_airtime_s(strategy, phy)


def _occupancy_s(discipline: Discipline, strategy: Strategy, alpha: float, phy: PhyProfile) -> float:
    if discipline.fixed_time_share:
        return phy.txop_limit_s
    if discipline is Discipline.DCF:
        return dcf_occupancy_s(strategy, phy)
    return edcf_occupancy_s(strategy, alpha, phy, discipline.burst_policy)


def _burst_report(discipline: Discipline, strategy: Strategy, alpha: float, phy: PhyProfile, t_s: float) -> float:
    if discipline is Discipline.DCF:
        return 1.0
    if discipline.fixed_time_share:
        return t_s / frame_airtime_s(strategy, phy)
    return expected_burst_frames(strategy, alpha, phy, discipline.burst_policy)


def stage_payoff(game: StageGame, g_i: Strategy, g_j: Strategy) -> Outcome:
    """Outcome of one strategy pair: occupancies, shares, throughputs."""
    if g_i not in game.strategies_i:
        raise DomainError(f"{g_i.label()} is not in sender i's strategy set")
    if g_j not in game.strategies_j:
        raise DomainError(f"{g_j.label()} is not in sender j's strategy set")
    a_i = game.success_i.success_fraction(g_i)
    a_j = game.success_j.success_fraction(g_j)
    t_i = _occupancy_s(game.discipline, g_i, a_i, game.phy)
    t_j = _occupancy_s(game.discipline, g_j, a_j, game.phy)
    t_total = t_i + t_j + game.t_idle_s
    f_i = t_i / t_total
    f_j = t_j / t_total
    return Outcome(
        r_i_bps=achievable_throughput_bps(g_i, a_i, game.phy) * f_i,
        r_j_bps=achievable_throughput_bps(g_j, a_j, game.phy) * f_j,
        t_i_s=t_i,
        t_j_s=t_j,
        t_total_s=t_total,
        f_i=f_i,
        f_j=f_j,
        b_i=_burst_report(game.discipline, g_i, a_i, game.phy, t_i),
        b_j=_burst_report(game.discipline, g_j, a_j, game.phy, t_j),
    )


@dataclass(frozen=True)
class PayoffMatrix:
    """Outcomes for every strategy pair; rows index sender i, columns sender j."""

    strategies_i: tuple[Strategy, ...]
    strategies_j: tuple[Strategy, ...]
    outcomes: tuple[tuple[Outcome, ...], ...]

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.strategies_i), len(self.strategies_j)

    def outcome(self, i_idx: int, j_idx: int) -> Outcome:
        return self.outcomes[i_idx][j_idx]

    def r_i(self, i_idx: int, j_idx: int) -> float:
        return self.outcomes[i_idx][j_idx].r_i_bps

    def r_j(self, i_idx: int, j_idx: int) -> float:
        return self.outcomes[i_idx][j_idx].r_j_bps


def payoff_matrix(game: StageGame) -> PayoffMatrix:
    rows = tuple(
        tuple(stage_payoff(game, g_i, g_j) for g_j in game.strategies_j)
        for g_i in game.strategies_i
    )
    return PayoffMatrix(game.strategies_i, game.strategies_j, rows)


def find_pure_nash(matrix: PayoffMatrix) -> list[tuple[Strategy, Strategy]]:
    """Cells where neither sender has a strictly better unilateral deviation.

    Payoff ties count as best responses, so the result is the weak-equilibrium
    set; brute force over all cells.
    """
    n_i, n_j = matrix.shape
    equilibria = []
    for a in range(n_i):
        for b in range(n_j):
            r_i = matrix.r_i(a, b)
            if any(matrix.r_i(x, b) > r_i for x in range(n_i)):
                continue
            r_j = matrix.r_j(a, b)
            if any(matrix.r_j(a, y) > r_j for y in range(n_j)):
                continue
            equilibria.append((matrix.strategies_i[a], matrix.strategies_j[b]))
    return equilibria


def most_efficient_strategy(strategies, success: SuccessTable, phy: PhyProfile) -> Strategy:
    """Argmax of achievable throughput; ties go to the higher rate, then the
    larger payload."""
    strategies = tuple(strategies)
    if not strategies:
        raise DomainError("strategy set is empty")
    best = None
    best_key = None
    for s in strategies:
        value = achievable_throughput_bps(s, success.success_fraction(s), phy)
        key = (value, s.rate_bps, s.payload_bits)
        if best_key is None or key > best_key:
            best, best_key = s, key
    return best


def _attains_best(value: float, best: float) -> bool:
    return value >= best * (1.0 - EFFICIENCY_REL_TOL)


@dataclass(frozen=True)
class EquilibriumReport:
    matrix: PayoffMatrix
    nash: tuple[tuple[Strategy, Strategy], ...]
    desirable: tuple[bool, ...]   # aligned with ``nash``
    spe_class: SpeClass
    best_response_i: tuple[tuple[Strategy, tuple[Strategy, ...]], ...]
    best_response_j: tuple[tuple[Strategy, tuple[Strategy, ...]], ...]
    most_efficient_i: Strategy
    most_efficient_j: Strategy
    best_achievable_i_bps: float
    best_achievable_j_bps: float

    @property
    def unique(self) -> bool:
        return len(self.nash) == 1


def classify_equilibria(game: StageGame) -> EquilibriumReport:
    """Equilibrium set, per-equilibrium desirability, and the repeated-game class.

    An equilibrium is desirable when both senders' equilibrium strategies
    attain their best achievable throughput (by value, so argmax ties all
    qualify). A unique stage equilibrium pins the repeated game to the unique
    subgame-perfect outcome of the same desirability; multiple equilibria are
    reported as such with no subgame-perfect claim.
    """
    matrix = payoff_matrix(game)
    nash = tuple(find_pure_nash(matrix))

    n_i, n_j = matrix.shape
    br_i = []
    for b, g_j in enumerate(game.strategies_j):
        top = max(matrix.r_i(x, b) for x in range(n_i))
        br_i.append((g_j, tuple(game.strategies_i[x] for x in range(n_i) if matrix.r_i(x, b) == top)))
    br_j = []
    for a, g_i in enumerate(game.strategies_i):
        top = max(matrix.r_j(a, y) for y in range(n_j))
        br_j.append((g_i, tuple(game.strategies_j[y] for y in range(n_j) if matrix.r_j(a, y) == top)))

    best_i = most_efficient_strategy(game.strategies_i, game.success_i, game.phy)
    best_j = most_efficient_strategy(game.strategies_j, game.success_j, game.phy)
    best_i_bps = achievable_throughput_bps(best_i, game.success_i.success_fraction(best_i), game.phy)
    best_j_bps = achievable_throughput_bps(best_j, game.success_j.success_fraction(best_j), game.phy)

    desirable = []
    for g_i, g_j in nash:
        v_i = achievable_throughput_bps(g_i, game.success_i.success_fraction(g_i), game.phy)
        v_j = achievable_throughput_bps(g_j, game.success_j.success_fraction(g_j), game.phy)
        desirable.append(_attains_best(v_i, best_i_bps) and _attains_best(v_j, best_j_bps))

    if len(nash) == 0:
        spe = SpeClass.NONE
    elif len(nash) > 1:
        spe = SpeClass.MULTIPLE
    elif desirable[0]:
        spe = SpeClass.UNIQUE_DESIRABLE
    else:
        spe = SpeClass.UNIQUE_UNDESIRABLE

    return EquilibriumReport(
        matrix=matrix,
        nash=nash,
        desirable=tuple(desirable),
        spe_class=spe,
        best_response_i=tuple(br_i),
        best_response_j=tuple(br_j),
        most_efficient_i=best_i,
        most_efficient_j=best_j,
        best_achievable_i_bps=best_i_bps,
        best_achievable_j_bps=best_j_bps,
    )


@dataclass(frozen=True)
class RateDropTradeoff:
    """Numeric sides of the rate-drop share check under DCF.

    Swapping a faster strategy for an equal-payload slower one must raise the
    sender's time share while lowering its peak-weighted share.
    """

    applicable: bool
    share_fast: float
    share_slow: float
    weighted_fast_bps: float
    weighted_slow_bps: float

    @property
    def share_increases(self) -> bool:
        return self.share_fast < self.share_slow

    @property
    def weighted_decreases(self) -> bool:
        return self.weighted_fast_bps > self.weighted_slow_bps

    @property
    def passed(self) -> bool:
        if not self.applicable:
            return True
        return self.share_increases and self.weighted_decreases


def check_rate_drop_tradeoff(
    fast: Strategy,
    slow: Strategy,
    other: Strategy,
    phy: PhyProfile,
    t_idle_s: float = 0.0,
) -> RateDropTradeoff:
    """Evaluate the DCF rate-drop tradeoff against a fixed opponent strategy.

    Requires equal payloads with ``fast`` at the strictly higher rate; the
    degenerate identical pair is reported as not applicable rather than
    checked.
    """
    if fast == slow:
        t = frame_airtime_s(fast, phy)
        share = t / (t + frame_airtime_s(other, phy) + t_idle_s)
        w = peak_throughput_bps(fast, phy) * share
        return RateDropTradeoff(False, share, share, w, w)
    if fast.payload_bits != slow.payload_bits:
        raise DomainError("rate-drop check requires equal payloads")
    if fast.rate_bps <= slow.rate_bps:
        raise DomainError("first strategy must use the strictly higher rate")
    t_other = frame_airtime_s(other, phy)
    t_fast = frame_airtime_s(fast, phy)
    t_slow = frame_airtime_s(slow, phy)
    share_fast = t_fast / (t_fast + t_other + t_idle_s)
    share_slow = t_slow / (t_slow + t_other + t_idle_s)
    return RateDropTradeoff(
        True,
        share_fast,
        share_slow,
        peak_throughput_bps(fast, phy) * share_fast,
        peak_throughput_bps(slow, phy) * share_slow,
    )


def is_dominant_strategy(game: StageGame, player: str, candidate: Strategy) -> bool:
    """Strict dominance by enumeration over the opponent's whole set."""
    if player not in ("i", "j"):
        raise DomainError("player must be 'i' or 'j'")
    own = game.strategies_i if player == "i" else game.strategies_j
    opponent = game.strategies_j if player == "i" else game.strategies_i
    if candidate not in own:
        raise DomainError(f"{candidate.label()} is not in sender {player}'s strategy set")
    if len(own) == 1:
        return True
    for g_opp in opponent:
        if player == "i":
            r_cand = stage_payoff(game, candidate, g_opp).r_i_bps
            others = (stage_payoff(game, alt, g_opp).r_i_bps for alt in own if alt != candidate)
        else:
            r_cand = stage_payoff(game, g_opp, candidate).r_j_bps
            others = (stage_payoff(game, g_opp, alt).r_j_bps for alt in own if alt != candidate)
        if any(r_alt >= r_cand for r_alt in others):
            return False
    return True


@dataclass(frozen=True)
class NashConditionSide:
    alternative: Strategy
    lhs: float   # success ratio alpha(candidate) / alpha(alternative)
    rhs: float   # occupancy-weighted round-length ratio
    holds: bool


@dataclass(frozen=True)
class NashConditionReport:
    holds: bool
    sides: tuple[NashConditionSide, ...]


def unique_nash_condition(game: StageGame, g_i_star: Strategy, g_j_star: Strategy) -> NashConditionReport:
    """Ratio test for (g_i*, g_j*) being the unique equilibrium.

    Precondition: g_j* is strictly dominant for sender j, so every equilibrium
    already has j playing it. For each alternative g' of sender i the success
    ratio alpha(g*)/alpha(g') must then strictly exceed

        (peak(g') * t(g') * T(g*)) / (peak(g*) * t(g*) * T(g')),

    where t is the discipline's occupancy and T the full round length against
    g_j*. That inequality is exactly R_i(g*, g_j*) > R_i(g', g_j*) unfolded,
    and it reduces to the plain round-length ratio under DCF at equal payload
    and to the burst-weighted ratio under EDCF.
    """
    if not is_dominant_strategy(game, "j", g_j_star):
        raise DomainError(f"{g_j_star.label()} is not strictly dominant for sender j")
    if g_i_star not in game.strategies_i:
        raise DomainError(f"{g_i_star.label()} is not in sender i's strategy set")

    a_star = game.success_i.success_fraction(g_i_star)
    a_j = game.success_j.success_fraction(g_j_star)
    t_j = _occupancy_s(game.discipline, g_j_star, a_j, game.phy)
    t_star = _occupancy_s(game.discipline, g_i_star, a_star, game.phy)
    big_t_star = t_star + t_j + game.t_idle_s

    sides = []
    for alt in game.strategies_i:
        if alt == g_i_star:
            continue
        a_alt = game.success_i.success_fraction(alt)
        t_alt = _occupancy_s(game.discipline, alt, a_alt, game.phy)
        big_t_alt = t_alt + t_j + game.t_idle_s
        if a_alt > 0.0:
            lhs = a_star / a_alt
        elif a_star > 0.0:
            lhs = math.inf
        else:
            lhs = math.nan
        rhs = (
            peak_throughput_bps(alt, game.phy) * t_alt * big_t_star
        ) / (
            peak_throughput_bps(g_i_star, game.phy) * t_star * big_t_alt
        )
        sides.append(NashConditionSide(alt, lhs, rhs, lhs > rhs))
    return NashConditionReport(all(s.holds for s in sides), tuple(sides))


@dataclass(frozen=True)
class Witness:
    """A sender locked into an equilibrium strategy it could beat alone."""

    player: str
    equilibrium_strategy: Strategy
    better_strategy: Strategy
    equilibrium_bps: float
    better_bps: float


def undesirability_witness(game: StageGame) -> Witness | None:
    """If the game has a unique equilibrium in which some sender forgoes a more
    efficient strategy, return that sender and both achievable values."""
    report = classify_equilibria(game)
    if len(report.nash) != 1:
        return None
    g_i, g_j = report.nash[0]
    for player, g_ne, success, best_strategy, best_bps in (
        ("i", g_i, game.success_i, report.most_efficient_i, report.best_achievable_i_bps),
        ("j", g_j, game.success_j, report.most_efficient_j, report.best_achievable_j_bps),
    ):
        v_ne = achievable_throughput_bps(g_ne, success.success_fraction(g_ne), game.phy)
        if not _attains_best(v_ne, best_bps):
            return Witness(player, g_ne, best_strategy, v_ne, best_bps)
    return None
