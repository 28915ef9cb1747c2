"""Condition checkers: rate-drop tradeoff, dominance, unique-equilibrium test."""

import numpy as np
import pytest

from macgames import (
    Discipline,
    DomainError,
    Strategy,
    check_rate_drop_tradeoff,
    find_pure_nash,
    is_dominant_strategy,
    payoff_matrix,
    unique_nash_condition,
)

from conftest import G1, G2
from gamegen import RATES_BPS, random_game


def test_rate_drop_fixture_values(phy2):
    # against a fixed fast opponent: share 1/2 -> 2/3, weighted 1.6 -> 16/15 Mbps
    res = check_rate_drop_tradeoff(G1, G2, G1, phy2)
    assert res.applicable
    assert res.share_fast == pytest.approx(0.5, rel=1e-12)
    assert res.share_slow == pytest.approx(2 / 3, rel=1e-12)
    assert res.weighted_fast_bps == pytest.approx(1.6e6, rel=1e-12)
    assert res.weighted_slow_bps == pytest.approx(1.6e6 * 2 / 3, rel=1e-12)
    assert res.passed


def test_rate_drop_degenerate_pair(phy2):
    res = check_rate_drop_tradeoff(G1, G1, G2, phy2)
    assert not res.applicable
    assert res.passed


def test_rate_drop_preconditions(phy2):
    with pytest.raises(DomainError):
        check_rate_drop_tradeoff(G2, G1, G1, phy2)        # wrong order
    with pytest.raises(DomainError):
        check_rate_drop_tradeoff(G1, Strategy.mbps(1.6, 4000), G1, phy2)   # payload mismatch


def test_rate_drop_randomized():
    rng = np.random.default_rng(21)
    for _ in range(500):
        payload = int(rng.integers(1000, 12000))
        lo, hi = sorted(rng.choice(len(RATES_BPS), size=2, replace=False))
        fast = Strategy(RATES_BPS[hi], payload)
        slow = Strategy(RATES_BPS[lo], payload)
        other = Strategy(
            RATES_BPS[int(rng.integers(0, len(RATES_BPS)))], int(rng.integers(1000, 12000))
        )
        phy = random_game(rng, Discipline.DCF).phy
        t_idle = float(rng.uniform(0, 0.01))
        res = check_rate_drop_tradeoff(fast, slow, other, phy, t_idle)
        assert res.applicable and res.passed


def test_dominance_fixture(dcf_game):
    assert is_dominant_strategy(dcf_game, "j", G1)       # lossless at the top rate
    assert not is_dominant_strategy(dcf_game, "j", G2)
    assert not is_dominant_strategy(dcf_game, "i", G1)   # g2 beats it against g1
    with pytest.raises(DomainError):
        is_dominant_strategy(dcf_game, "k", G1)
    with pytest.raises(DomainError):
        is_dominant_strategy(dcf_game, "i", Strategy.mbps(1.6, 4000))


def test_dominance_single_strategy(phy2, success_i, success_j):
    from macgames import StageGame

    game = StageGame(phy2, Discipline.DCF, (G2,), (G1, G2), success_i, success_j)
    assert is_dominant_strategy(game, "i", G2)


def test_unique_nash_condition_dcf_fixture(dcf_game):
    # success ratio 0.95/0.6 = 1.583 vs round-length ratio 11.25/7.5 = 1.5
    report = unique_nash_condition(dcf_game, G2, G1)
    assert report.holds
    (side,) = report.sides
    assert side.alternative == G1
    assert side.lhs == pytest.approx(0.95 / 0.6, rel=1e-12)
    assert side.rhs == pytest.approx(1.5, rel=1e-12)


def test_unique_nash_condition_edcf_fixture(edcf_game):
    # burst-weighted ratio: (2.176 * 29.625) / (1.95 * 23.16) ~ 1.4274 < 1.583
    report = unique_nash_condition(edcf_game, G2, G1)
    assert report.holds
    (side,) = report.sides
    assert side.rhs == pytest.approx((2.176 * 29.625) / (1.95 * 23.16), rel=1e-9)


def test_unique_nash_condition_requires_dominance(dcf_game):
    with pytest.raises(DomainError):
        unique_nash_condition(dcf_game, G1, G2)   # g2 is not dominant for j


def test_unique_nash_condition_lossless_top_rate(phy2, success_j):
    from macgames import StageGame

    game = StageGame(phy2, Discipline.DCF, (G1, G2), (G1, G2), success_j, success_j)
    report = unique_nash_condition(game, G1, G1)
    assert report.holds


def test_condition_agrees_with_brute_force():
    # wherever the opponent has a strictly dominant strategy, the ratio test
    # holds exactly when brute force finds that single equilibrium cell
    rng = np.random.default_rng(22)
    checked = 0
    for _ in range(400):
        options = (Discipline.DCF, Discipline.EDCF_STOP_ON_LOSS, Discipline.EDCF_FULL_BURST)
        discipline = options[int(rng.integers(len(options)))]
        game = random_game(rng, discipline, n_strategies=int(rng.integers(2, 4)))
        dominant = [g for g in game.strategies_j if is_dominant_strategy(game, "j", g)]
        if not dominant:
            continue
        checked += 1
        g_j = dominant[0]
        nash = find_pure_nash(payoff_matrix(game))
        for candidate in game.strategies_i:
            predicted = unique_nash_condition(game, candidate, g_j).holds
            assert predicted == (nash == [(candidate, g_j)])
    assert checked > 50
