"""Acceptance criteria.

Each test prints one `[criterion N] PASS/FAIL` line (run pytest with -s to see
them live) and asserts both the substance and its stated runtime budget.

Known red: criterion 1 also pins the both-efficient-profile aggregate at
2.76 +/- 0.03 Mbps, but the fixture's efficient profile pays (0.96, 1.6) whose
sum is 2.56, so 2.76 is not attainable from those same cell values. The
substantive inefficiency gap (2.08 < 2.56) is asserted separately and holds;
the 2.76 expectation is kept verbatim in
test_criterion_1_efficient_profile_aggregate_as_stated rather than silently
adjusted, and fails.
"""

import copy
import time
from dataclasses import replace
import numpy as np
import yaml

from macgames import (
    BestResponseConfig,
    BurstPolicy,
    DcfStarConfig,
    Discipline,
    SimNode,
    SimScenario,
    SpeClass,
    Strategy,
    StrategyPolicy,
    SuccessTable,
    check_rate_drop_tradeoff,
    classify_equilibria,
    execute_txop,
    expected_burst_frames,
    find_pure_nash,
    is_dominant_strategy,
    payoff_matrix,
    run_sim,
    stage_payoff,
    undesirability_witness,
    unique_nash_condition,
)
from macgames import cli
from macgames.scenario import bundled_scenario_text, load_bundled_scenario

from conftest import G1, G2
from gamegen import RATES_BPS, random_game

PRINTED_T1 = {(1, 1): (0.96, 1.6), (1, 2): (0.63, 1.07), (2, 1): (1.02, 1.06), (2, 2): (0.76, 0.8)}
PRINTED_T2 = {(1, 1): (0.68, 2.07), (1, 2): (0.68, 1.04), (2, 1): (0.75, 1.62), (2, 2): (0.75, 0.81)}
IDX = {1: G1, 2: G2}


def _line(n, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    msg = f"[criterion {n}] {status}" + (f" - {detail}" if detail else "")
    print(msg)
    return msg


def _budget(n, started, limit_s):
    elapsed = time.perf_counter() - started
    assert elapsed < limit_s, f"criterion {n} took {elapsed:.1f}s, budget {limit_s}s"
    return elapsed


# -- criterion 1: two-rate DCF table ------------------------------------------

def test_criterion_1_dcf_table(dcf_game):
    started = time.perf_counter()
    ok = True
    for (si, sj), (want_i, want_j) in PRINTED_T1.items():
        out = stage_payoff(dcf_game, IDX[si], IDX[sj])
        ok &= abs(out.r_i_mbps - want_i) <= 0.02
        ok &= abs(out.r_j_mbps - want_j) <= 0.02
    nash = find_pure_nash(payoff_matrix(dcf_game))
    ok &= nash == [(G2, G1)]
    report = classify_equilibria(dcf_game)
    ok &= report.spe_class is SpeClass.UNIQUE_UNDESIRABLE
    ne = stage_payoff(dcf_game, G2, G1)
    eff = stage_payoff(dcf_game, G1, G1)
    ne_total = ne.r_i_mbps + ne.r_j_mbps
    eff_total = eff.r_i_mbps + eff.r_j_mbps
    ok &= abs(ne_total - 2.08) <= 0.03
    ok &= ne_total < eff_total
    elapsed = _budget(1, started, 1.0)
    msg = _line(1, ok, f"table/NE/class ok, NE aggregate {ne_total:.3f} < efficient {eff_total:.3f} ({elapsed*1e3:.0f} ms)")
    assert ok, msg


def test_criterion_1_efficient_profile_aggregate_as_stated(dcf_game):
    # Stated expectation: efficient-profile aggregate 2.76 +/- 0.03. The same
    # fixture's efficient profile pays (0.96, 1.6) => 2.56, so this is
    # unattainable; kept verbatim instead of being loosened.
    eff = stage_payoff(dcf_game, G1, G1)
    eff_total = eff.r_i_mbps + eff.r_j_mbps
    ok = abs(eff_total - 2.76) <= 0.03
    msg = _line(1, ok, f"efficient-profile aggregate as stated: {eff_total:.3f} vs 2.76 +/- 0.03")
    assert ok, msg


# -- criterion 2: burst-mode table --------------------------------------------

def test_criterion_2_edcf_table(edcf_game, phy2):
    started = time.perf_counter()
    ok = True
    b1 = expected_burst_frames(G1, 0.6, phy2, BurstPolicy.STOP_ON_LOSS)
    b2 = expected_burst_frames(G2, 0.95, phy2, BurstPolicy.STOP_ON_LOSS)
    ok &= abs(b1 - 2.18) <= 0.005
    ok &= abs(b2 - 1.95) <= 0.005
    for (si, sj), (want_i, want_j) in PRINTED_T2.items():
        out = stage_payoff(edcf_game, IDX[si], IDX[sj])
        ok &= abs(out.r_i_mbps - want_i) <= 0.02
        ok &= abs(out.r_j_mbps - want_j) <= 0.02
    ok &= find_pure_nash(payoff_matrix(edcf_game)) == [(G2, G1)]
    ok &= classify_equilibria(edcf_game).spe_class is SpeClass.UNIQUE_UNDESIRABLE
    elapsed = _budget(2, started, 1.0)
    msg = _line(2, ok, f"bursts ({b1:.3f}, {b2:.3f}), table, unique undesirable NE ({elapsed*1e3:.0f} ms)")
    assert ok, msg


# -- criterion 3: fixed time shares make equilibria efficient -----------------

def test_criterion_3_time_share_property_suite():
    started = time.perf_counter()
    rng = np.random.default_rng(101)
    undesirable_fixed_share = 0
    undesirable_unique_dcf = 0
    for _ in range(1000):
        n = int(rng.integers(2, 4))
        seed_game = random_game(rng, Discipline.DCF, n_strategies=n)
        for discipline in (Discipline.EDCF_FULL_BURST, Discipline.TIME_FAIR):
            game = replace(seed_game, discipline=discipline)
            report = classify_equilibria(game)
            undesirable_fixed_share += sum(not d for d in report.desirable)
        dcf_report = classify_equilibria(seed_game)
        if dcf_report.spe_class is SpeClass.UNIQUE_UNDESIRABLE:
            undesirable_unique_dcf += 1
    ok = undesirable_fixed_share == 0 and undesirable_unique_dcf >= 1
    elapsed = _budget(3, started, 10.0)
    msg = _line(3, ok,
                f"0 undesirable NEs under fixed time shares; {undesirable_unique_dcf}/1000 "
                f"DCF games end in a unique undesirable NE ({elapsed:.1f} s)")
    assert ok, msg


# -- criterion 4: checker suite ------------------------------------------------

def test_criterion_4_checker_suite():
    started = time.perf_counter()
    rng = np.random.default_rng(202)

    tradeoff_ok = 0
    for _ in range(1000):
        payload = int(rng.integers(1000, 12000))
        lo, hi = sorted(rng.choice(len(RATES_BPS), size=2, replace=False))
        fast, slow = Strategy(RATES_BPS[hi], payload), Strategy(RATES_BPS[lo], payload)
        other = Strategy(RATES_BPS[int(rng.integers(0, len(RATES_BPS)))],
                         int(rng.integers(1000, 12000)))
        phy = random_game(rng, Discipline.DCF).phy
        res = check_rate_drop_tradeoff(fast, slow, other, phy, float(rng.uniform(0, 0.01)))
        tradeoff_ok += res.applicable and res.passed

    agreement_checked = 0
    witness_checked = 0
    options = (Discipline.DCF, Discipline.EDCF_STOP_ON_LOSS, Discipline.EDCF_FULL_BURST)
    for _ in range(1000):
        discipline = options[int(rng.integers(len(options)))]
        game = random_game(rng, discipline, n_strategies=int(rng.integers(2, 4)))

        report = classify_equilibria(game)
        witness = undesirability_witness(game)
        assert (witness is not None) == (report.spe_class is SpeClass.UNIQUE_UNDESIRABLE)
        witness_checked += 1

        dominant = [g for g in game.strategies_j if is_dominant_strategy(game, "j", g)]
        if dominant:
            nash = find_pure_nash(report.matrix)
            for candidate in game.strategies_i:
                predicted = unique_nash_condition(game, candidate, dominant[0]).holds
                assert predicted == (nash == [(candidate, dominant[0])])
            agreement_checked += 1

    ok = tradeoff_ok == 1000 and agreement_checked > 100 and witness_checked == 1000
    elapsed = _budget(4, started, 10.0)
    msg = _line(4, ok,
                f"1000/1000 rate-drop fixtures, condition agreement on {agreement_checked} "
                f"dominant-opponent fixtures, witness agreement on 1000 ({elapsed:.1f} s)")
    assert ok, msg


# -- criterion 5: simulator vs analytic ----------------------------------------

def test_criterion_5_sim_cross_validation(dcf_game):
    started = time.perf_counter()
    scenario = load_bundled_scenario("theorem1_sim").sim_scenario()
    assert scenario.duration_s >= 60.0
    report = run_sim(scenario)

    node_i, node_j = report.nodes
    rounds = (node_i.txops + node_j.txops) / 2
    t_idle = (report.idle_s + report.collision_s) / rounds
    analytic_game = replace(dcf_game, t_idle_s=t_idle)
    predicted = stage_payoff(analytic_game, G2, G1)

    dev_i = abs(node_i.throughput_mbps - predicted.r_i_mbps) / predicted.r_i_mbps
    dev_j = abs(node_j.throughput_mbps - predicted.r_j_mbps) / predicted.r_j_mbps
    ok = dev_i <= 0.10 and dev_j <= 0.10

    # control: identical lossless senders split transmission opportunities evenly
    lossless = SuccessTable({G1: 1.0, G2: 1.0})
    control = SimScenario(
        phy=scenario.phy, discipline=Discipline.DCF,
        nodes=(SimNode("a", lossless, G1), SimNode("b", lossless, G1)),
        duration_s=60.0, seed=17,
    )
    control_report = run_sim(control)
    txops = [n.txops for n in control_report.nodes]
    split = txops[0] / sum(txops)
    ok &= sum(txops) >= 10_000 and abs(split - 0.5) <= 0.02

    elapsed = _budget(5, started, 30.0)
    msg = _line(5, ok,
                f"sim ({node_i.throughput_mbps:.3f}, {node_j.throughput_mbps:.3f}) vs analytic "
                f"({predicted.r_i_mbps:.3f}, {predicted.r_j_mbps:.3f}) Mbps, dev ({dev_i:.1%}, {dev_j:.1%}); "
                f"control split {split:.3f} over {sum(txops)} TXOPs ({elapsed:.1f} s)")
    assert ok, msg


# -- criterion 6: stop-on-loss burst statistics ---------------------------------

def test_criterion_6_burst_statistics(phy2):
    started = time.perf_counter()
    rng = np.random.default_rng(66)
    n = 100_000
    total = 0
    for _ in range(n):
        total += execute_txop(G1, phy2, BurstPolicy.STOP_ON_LOSS,
                              lambda s: rng.random() < 0.6).frames
    mean = total / n
    ok = abs(mean - 2.18) <= 0.02
    elapsed = _budget(6, started, 10.0)
    msg = _line(6, ok, f"mean frames per TXOP {mean:.4f} over 1e5 TXOPs ({elapsed:.1f} s)")
    assert ok, msg


# -- criterion 7: adaptive time shares ------------------------------------------

def _theorem1_sim(discipline, strategy_i, duration=60.0, seed=5, star=None, policy=StrategyPolicy.FIXED):
    base = load_bundled_scenario("theorem1_sim").sim_scenario()
    node_i = replace(base.nodes[0], strategy=strategy_i, policy=policy,
                     candidates=(G1, G2) if policy is StrategyPolicy.BEST_RESPONSE else ())
    node_j = replace(base.nodes[1], policy=policy,
                     candidates=(G1, G2) if policy is StrategyPolicy.BEST_RESPONSE else ())
    return replace(
        base, discipline=discipline, nodes=(node_i, node_j), duration_s=duration,
        seed=seed, dcf_star=star,
        best_response=BestResponseConfig(10.0, 6) if policy is StrategyPolicy.BEST_RESPONSE else None,
    )


def test_criterion_7_adaptive_shares():
    started = time.perf_counter()
    star = DcfStarConfig((0.5, 0.5))

    # (a) share invariance across the strategy switch
    share_star = {
        s.label(): run_sim(_theorem1_sim(Discipline.DCF_STAR, s, star=star)).nodes[0].share
        for s in (G1, G2)
    }
    share_dcf = {
        s.label(): run_sim(_theorem1_sim(Discipline.DCF, s)).nodes[0].share
        for s in (G1, G2)
    }
    move_star = abs(share_star[G1.label()] - share_star[G2.label()])
    move_dcf = abs(share_dcf[G1.label()] - share_dcf[G2.label()])
    ok_a = move_star < 0.05 and move_dcf > 0.10

    # (b) best-response dynamics land on the analytic predictions
    br_dcf = run_sim(_theorem1_sim(Discipline.DCF, G1, duration=10.0, seed=2,
                                   policy=StrategyPolicy.BEST_RESPONSE))
    br_star = run_sim(_theorem1_sim(Discipline.DCF_STAR, G1, duration=10.0, seed=2,
                                    star=star, policy=StrategyPolicy.BEST_RESPONSE))
    ok_b = (
        br_dcf.best_response_converged
        and [n.strategy for n in br_dcf.nodes] == [G2.label(), G1.label()]
        and br_star.best_response_converged
        and [n.strategy for n in br_star.nodes] == [G1.label(), G1.label()]
    )

    # (c) aggregate throughput at the two fixed points
    at_dcf = run_sim(_theorem1_sim(Discipline.DCF, G2, duration=30.0, seed=9))
    at_star = run_sim(_theorem1_sim(Discipline.DCF_STAR, G1, duration=30.0, seed=9, star=star))
    gain = (at_star.aggregate_throughput_mbps - at_dcf.aggregate_throughput_mbps) \
        / at_dcf.aggregate_throughput_mbps
    ok_c = at_star.aggregate_throughput_mbps > at_dcf.aggregate_throughput_mbps

    ok = ok_a and ok_b and ok_c
    elapsed = _budget(7, started, 120.0)
    msg = _line(7, ok,
                f"share move {move_star:.3f} (adaptive) vs {move_dcf:.3f} (plain); "
                f"fixed points ({br_dcf.nodes[0].strategy}, {br_dcf.nodes[1].strategy}) / "
                f"({br_star.nodes[0].strategy}, {br_star.nodes[1].strategy}); "
                f"aggregate {at_dcf.aggregate_throughput_mbps:.3f} -> "
                f"{at_star.aggregate_throughput_mbps:.3f} Mbps (+{gain:.0%}) ({elapsed:.1f} s)")
    assert ok, msg


# -- criterion 8: rate cross-over over distance ----------------------------------

def test_criterion_8_crossover_exists(tmp_path):
    started = time.perf_counter()
    base = yaml.safe_load(bundled_scenario_text("crossover_sweep"))
    curves = {}
    for rate in (11.0, 5.5):
        data = copy.deepcopy(base)
        data["nodes"][0]["strategy"]["rate_mbps"] = rate
        data["sim"]["duration_s"] = 3.0
        rows = cli.cmd_sweep(data, "nodes.0.channel.distance_m", 10.0, 120.0, 12,
                             tmp_path / f"rate{rate}", plots=False)
        curves[rate] = [(r["value"], r["throughput_mbps"]) for r in rows]
    diffs = [fast[1] - slow[1] for fast, slow in zip(curves[11.0], curves[5.5])]
    # 11 Mbps wins close in, 5.5 Mbps wins far out: the difference changes sign
    ok = diffs[0] > 0 and any(d < 0 for d in diffs)
    crossover = next(v for (v, _), d in zip(curves[11.0], diffs) if d < 0)
    elapsed = _budget(8, started, 30.0)
    msg = _line(8, ok, f"5.5 Mbps overtakes 11 Mbps by {crossover:.0f} m ({elapsed:.1f} s)")
    assert ok, msg


# -- criterion 9: determinism ------------------------------------------------------

def _run_bundled(name, out):
    if name == "crossover_sweep":
        code = cli.main(["sweep", name, "--param", "nodes.0.channel.distance_m",
                         "--from", "20", "--to", "80", "--steps", "4",
                         "--set", "sim.duration_s=1", "--out", str(out), "--no-plots"])
    elif name == "region_sweep":
        code = cli.main(["sweep", name, "--param", "nodes.0.channel.entries.1.success",
                         "--from", "0.85", "--to", "1.0", "--steps", "6",
                         "--out", str(out), "--no-plots"])
    else:
        scenario = load_bundled_scenario(name)
        command = "analyze" if scenario.mode == "analyze" else "simulate"
        code = cli.main([command, name, "--out", str(out), "--no-plots"])
    assert code == 0, name


def test_criterion_9_determinism(tmp_path):
    started = time.perf_counter()
    names = ["theorem1", "theorem2", "theorem3_property", "theorem1_sim",
             "dcfstar", "crossover_sweep", "region_sweep"]
    compared = 0
    for name in names:
        out_a = tmp_path / f"{name}_a"
        out_b = tmp_path / f"{name}_b"
        _run_bundled(name, out_a)
        _run_bundled(name, out_b)
        files = sorted(p.name for p in out_a.iterdir())
        assert files, name
        for fname in files:
            assert (out_a / fname).read_bytes() == (out_b / fname).read_bytes(), (name, fname)
            compared += 1
    ok = compared > 0
    elapsed = _budget(9, started, 60.0)
    msg = _line(9, ok, f"{compared} artifacts byte-identical across {len(names)} scenarios ({elapsed:.1f} s)")
    assert ok, msg
