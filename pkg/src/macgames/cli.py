"""Command-line entry points: analyze, simulate, and sweep over scenario files.

Exit codes: 0 success, 1 runtime failure, 2 scenario validation failure.
"""

from __future__ import annotations

import argparse
import copy
import csv
import json
import sys
from pathlib import Path

import yaml

from .errors import ScenarioError
from .game import classify_equilibria, undesirability_witness
from .phy import MBPS
from .scenario import (
    Scenario,
    bundled_scenario_names,
    bundled_scenario_text,
    override_scenario_field,
    scenario_from_data,
    set_numeric_field,
)
from .sim import run_sim

_NUM = "{:.10g}".format


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return _NUM(value)
    return str(value)


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


# --------------------------------------------------------------------------
# analyze
# --------------------------------------------------------------------------

def _analysis_record(scenario: Scenario, report, witness) -> dict:
    matrix = report.matrix
    n_i, n_j = matrix.shape

    def cell(a, b):
        o = matrix.outcome(a, b)
        return {
            "r_i_mbps": o.r_i_mbps, "r_j_mbps": o.r_j_mbps,
            "t_i_s": o.t_i_s, "t_j_s": o.t_j_s,
            "f_i": o.f_i, "f_j": o.f_j, "b_i": o.b_i, "b_j": o.b_j,
        }

    nash = []
    for (gi, gj), good in zip(report.nash, report.desirable):
        o = _matrix_outcome(matrix, gi, gj)
        nash.append({
            "i": gi.label(), "j": gj.label(),
            "r_i_mbps": o.r_i_mbps, "r_j_mbps": o.r_j_mbps,
            "aggregate_mbps": o.r_i_mbps + o.r_j_mbps,
            "desirable": good,
        })

    eff = _matrix_outcome(matrix, report.most_efficient_i, report.most_efficient_j)
    record = {
        "discipline": scenario.discipline.value,
        "t_idle_s": scenario.t_idle_s,
        "strategies_i": [s.label() for s in matrix.strategies_i],
        "strategies_j": [s.label() for s in matrix.strategies_j],
        "payoffs": [[cell(a, b) for b in range(n_j)] for a in range(n_i)],
        "nash": nash,
        "unique": report.unique,
        "spe_class": report.spe_class.value,
        "most_efficient": {
            "i": report.most_efficient_i.label(),
            "j": report.most_efficient_j.label(),
        },
        "best_achievable_mbps": {
            "i": report.best_achievable_i_bps / MBPS,
            "j": report.best_achievable_j_bps / MBPS,
        },
        "efficient_profile": {
            "i": report.most_efficient_i.label(),
            "j": report.most_efficient_j.label(),
            "r_i_mbps": eff.r_i_mbps,
            "r_j_mbps": eff.r_j_mbps,
            "aggregate_mbps": eff.r_i_mbps + eff.r_j_mbps,
        },
        "witness": None,
    }
    if witness is not None:
        record["witness"] = {
            "player": witness.player,
            "equilibrium_strategy": witness.equilibrium_strategy.label(),
            "better_strategy": witness.better_strategy.label(),
            "equilibrium_mbps": witness.equilibrium_bps / MBPS,
            "better_mbps": witness.better_bps / MBPS,
        }
    return record


def _matrix_outcome(matrix, gi, gj):
    a = matrix.strategies_i.index(gi)
    b = matrix.strategies_j.index(gj)
    return matrix.outcome(a, b)


def _analysis_text(record: dict) -> str:
    lines = []
    lines.append(f"discipline: {record['discipline']}   idle per round: {record['t_idle_s']:g} s")
    lines.append("")
    width = max(14, max(len(s) for s in record["strategies_i"] + record["strategies_j"]) + 2)
    head = " " * width + "".join(s.ljust(width + 2) for s in record["strategies_j"])
    lines.append("payoffs (sender i, sender j) [Mbps]")
    lines.append(head)
    for label_i, row in zip(record["strategies_i"], record["payoffs"]):
        cells = "".join(
            f"({c['r_i_mbps']:.3f}, {c['r_j_mbps']:.3f})".ljust(width + 2) for c in row
        )
        lines.append(label_i.ljust(width) + cells)
    lines.append("")
    if record["nash"]:
        lines.append("pure equilibria:")
        for ne in record["nash"]:
            tag = "desirable" if ne["desirable"] else "undesirable"
            lines.append(
                f"  (i={ne['i']}, j={ne['j']})  payoffs ({ne['r_i_mbps']:.3f}, "
                f"{ne['r_j_mbps']:.3f}) Mbps, aggregate {ne['aggregate_mbps']:.3f}  [{tag}]"
            )
    else:
        lines.append("pure equilibria: none")
    lines.append(f"repeated-game class: {record['spe_class']}")
    lines.append("")
    lines.append(
        f"most efficient strategies: i -> {record['most_efficient']['i']} "
        f"({record['best_achievable_mbps']['i']:.3f} Mbps), "
        f"j -> {record['most_efficient']['j']} "
        f"({record['best_achievable_mbps']['j']:.3f} Mbps)"
    )
    eff = record["efficient_profile"]
    lines.append(
        f"both-efficient profile payoffs: ({eff['r_i_mbps']:.3f}, {eff['r_j_mbps']:.3f}) "
        f"Mbps, aggregate {eff['aggregate_mbps']:.3f}"
    )
    w = record["witness"]
    if w is not None:
        lines.append(
            f"inefficiency witness: sender {w['player']} plays {w['equilibrium_strategy']} "
            f"({w['equilibrium_mbps']:.3f} Mbps achievable) although {w['better_strategy']} "
            f"achieves {w['better_mbps']:.3f} Mbps"
        )
    lines.append("")
    return "\n".join(lines)


def cmd_analyze(scenario: Scenario, out_dir: Path, plots: bool = True) -> dict:
    game = scenario.stage_game()
    report = classify_equilibria(game)
    witness = undesirability_witness(game)
    record = _analysis_record(scenario, report, witness)

    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "analysis.json").write_text(json.dumps(record, indent=2) + "\n")
    (out_dir / "analysis.txt").write_text(_analysis_text(record))

    matrix = report.matrix
    nash_set = set(report.nash)
    rows = []
    for a, gi in enumerate(matrix.strategies_i):
        for b, gj in enumerate(matrix.strategies_j):
            o = matrix.outcome(a, b)
            rows.append([
                gi.label(), gj.label(), o.r_i_mbps, o.r_j_mbps,
                o.t_i_s, o.t_j_s, o.f_i, o.f_j, o.b_i, o.b_j,
                (gi, gj) in nash_set,
            ])
    _write_csv(
        out_dir / "payoffs.csv",
        ["strategy_i", "strategy_j", "r_i_mbps", "r_j_mbps",
         "t_i_s", "t_j_s", "f_i", "f_j", "b_i", "b_j", "is_nash"],
        rows,
    )
    if plots:
        from .plots import render_payoff_matrix

        render_payoff_matrix(report, out_dir / "payoffs.png")
    return record


# --------------------------------------------------------------------------
# simulate
# --------------------------------------------------------------------------

_TIMESERIES_HEADER = ["time_s", "node", "throughput_mbps", "share", "loss_rate", "cw_min_eff", "strategy"]


def cmd_simulate(scenario: Scenario, out_dir: Path, plots: bool = True, seed: int | None = None):
    report = run_sim(scenario.sim_scenario(), seed=seed)
    out_dir.mkdir(parents=True, exist_ok=True)

    _write_csv(
        out_dir / "timeseries.csv",
        _TIMESERIES_HEADER,
        [[r.time_s, r.node, r.throughput_mbps, r.share, r.loss_rate, r.cw_min_eff, r.strategy]
         for r in report.timeseries],
    )

    rows = [
        [n.name, n.strategy, n.throughput_mbps, n.share, n.loss_rate,
         n.txops, n.collisions, n.frames, n.frames_ok, n.cw_min_eff]
        for n in report.nodes
    ]
    busy = sum(n.busy_ns for n in report.nodes)
    frames = sum(n.frames for n in report.nodes)
    ok = sum(n.frames_ok for n in report.nodes)
    rows.append([
        "total", "", report.aggregate_throughput_mbps, busy / report.elapsed_ns,
        1.0 - ok / frames if frames else 0.0,
        sum(n.txops for n in report.nodes), sum(n.collisions for n in report.nodes),
        frames, ok, "",
    ])
    _write_csv(
        out_dir / "summary.csv",
        ["node", "strategy", "throughput_mbps", "share", "loss_rate",
         "txops", "collisions", "frames", "frames_ok", "cw_min_eff"],
        rows,
    )

    summary = {
        "duration_s": report.duration_s,
        "idle_s": report.idle_s,
        "collision_s": report.collision_s,
        "aggregate_throughput_mbps": report.aggregate_throughput_mbps,
        "best_response_rounds": report.best_response_rounds,
        "best_response_converged": report.best_response_converged,
        "nodes": [
            {
                "name": n.name, "strategy": n.strategy,
                "throughput_mbps": n.throughput_mbps, "share": n.share,
                "loss_rate": n.loss_rate, "txops": n.txops,
                "collisions": n.collisions, "cw_min_eff": n.cw_min_eff,
            }
            for n in report.nodes
        ],
    }
    (out_dir / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")

    if plots:
        from .plots import render_simulation

        render_simulation(report, out_dir / "timeseries.png")
    return report


# --------------------------------------------------------------------------
# sweep
# --------------------------------------------------------------------------

def _grid(start: float, stop: float, steps: int) -> list[float]:
    if steps < 1:
        raise ScenarioError("sweep needs at least one step")
    if steps == 1:
        return [start]
    return [start + k * (stop - start) / (steps - 1) for k in range(steps)]


def cmd_sweep(
    base_data: dict,
    param: str,
    start: float,
    stop: float,
    steps: int,
    out_dir: Path,
    plots: bool = True,
    seed: int | None = None,
) -> list[dict]:
    values = _grid(start, stop, steps)
    rows: list[dict] = []
    mode = None
    for value in values:
        data = copy.deepcopy(base_data)
        set_numeric_field(data, param, value)
        scenario = scenario_from_data(data)
        mode = scenario.mode
        if mode == "simulate":
            report = run_sim(scenario.sim_scenario(), seed=seed)
            for n in report.nodes:
                rows.append({
                    "param": param, "value": value, "node": n.name,
                    "strategy": n.strategy, "throughput_mbps": n.throughput_mbps,
                    "share": n.share, "loss_rate": n.loss_rate, "txops": n.txops,
                })
        else:
            game = scenario.stage_game()
            report = classify_equilibria(game)
            for pos, node in enumerate(scenario.nodes):
                own = [ne[pos] for ne in report.nash]
                first = report.matrix.outcome(
                    report.matrix.strategies_i.index(report.nash[0][0]),
                    report.matrix.strategies_j.index(report.nash[0][1]),
                ) if report.nash else None
                r_at = None
                if first is not None:
                    r_at = first.r_i_mbps if pos == 0 else first.r_j_mbps
                best = (report.best_achievable_i_bps if pos == 0 else report.best_achievable_j_bps) / MBPS
                rows.append({
                    "param": param, "value": value, "node": node.name,
                    "spe_class": report.spe_class.value,
                    "nash_count": len(report.nash),
                    "nash_strategies": "|".join(s.label() for s in own),
                    "r_at_nash_mbps": r_at,
                    "best_achievable_mbps": best,
                    "desirable": bool(report.desirable[0]) if report.nash else None,
                })

    out_dir.mkdir(parents=True, exist_ok=True)
    if mode == "simulate":
        header = ["param", "value", "node", "strategy", "throughput_mbps", "share", "loss_rate", "txops"]
    else:
        header = ["param", "value", "node", "spe_class", "nash_count", "nash_strategies",
                  "r_at_nash_mbps", "best_achievable_mbps", "desirable"]
    _write_csv(out_dir / "sweep.csv", header, [[row[h] for h in header] for row in rows])

    if plots:
        from .plots import render_sweep

        render_sweep(rows, mode, param, out_dir / "sweep.png")
    return rows


# --------------------------------------------------------------------------
# argument plumbing
# --------------------------------------------------------------------------

def _scenario_data(ref: str) -> tuple[dict, dict, str]:
    """Scenario text from a path or a bundled name, as plain data plus lines."""
    path = Path(ref)
    if path.is_file():
        text, source = path.read_text(), str(path)
    else:
        try:
            text, source = bundled_scenario_text(ref), f"bundled:{ref}"
        except ScenarioError:
            if any(sep in ref for sep in "/\\") or ref.endswith(".yaml"):
                raise ScenarioError(f"scenario file not found: {ref}") from None
            raise
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ScenarioError(
            f"invalid YAML: {exc}",
            line=mark.line + 1 if mark else None,
            source=source,
        ) from None
    if node is None:
        raise ScenarioError("empty scenario document", source=source)
    from .scenario import _to_plain   # shared converter

    lines: dict = {}
    data = _to_plain(node, (), lines, source)
    return data, lines, source


def _prepare(args) -> tuple[dict, dict, str]:
    data, lines, source = _scenario_data(args.scenario)
    for item in args.set or []:
        if "=" not in item:
            raise ScenarioError(f"--set expects PATH=VALUE, got {item!r}")
        dotted, raw = item.split("=", 1)
        override_scenario_field(data, dotted.strip(), raw.strip())
    if args.seed is not None:
        data.setdefault("sim", {})["seed"] = args.seed
    return data, lines, source


def _out_dir(args, scenario_output_dir: str) -> Path:
    return Path(args.out) if args.out else Path(scenario_output_dir)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="macgames",
        description="Contention-game analysis and CSMA/CA simulation for multi-rate senders.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("scenario", help="scenario file, or the name of a bundled scenario")
    common.add_argument("--out", help="output directory (default: scenario output.dir)")
    common.add_argument("--seed", type=int, help="override the scenario seed")
    common.add_argument("--set", action="append", metavar="PATH=VALUE",
                        help="override a scenario field, e.g. sim.duration_s=10")
    common.add_argument("--no-plots", action="store_true", help="skip figure rendering")

    sub.add_parser("analyze", parents=[common],
                   help="equilibria, desirability, and payoff matrix of a scenario")
    sub.add_parser("simulate", parents=[common],
                   help="run the contention simulator on a scenario")

    sweep = sub.add_parser("sweep", parents=[common],
                           help="re-run a scenario over a grid of one numeric field")
    sweep.add_argument("--param", required=True, help="dotted field path, e.g. nodes.0.channel.distance_m")
    sweep.add_argument("--from", dest="start", type=float, required=True)
    sweep.add_argument("--to", dest="stop", type=float, required=True)
    sweep.add_argument("--steps", type=int, required=True)

    listing = sub.add_parser("scenarios", help="list bundled scenarios or print one")
    listing.add_argument("name", nargs="?", help="print this bundled scenario to stdout")

    args = parser.parse_args(argv)

    try:
        if args.command == "scenarios":
            if args.name:
                sys.stdout.write(bundled_scenario_text(args.name))
            else:
                for name in bundled_scenario_names():
                    print(name)
            return 0

        data, lines, source = _prepare(args)
        scenario = scenario_from_data(data, lines=lines, source=source)
        plots = not args.no_plots
        out = _out_dir(args, scenario.output_dir)

        if args.command == "analyze":
            record = cmd_analyze(scenario, out, plots=plots)
            print(f"wrote {out}/analysis.txt ({record['spe_class']})")
        elif args.command == "simulate":
            report = cmd_simulate(scenario, out, plots=plots)
            print(
                f"wrote {out}/timeseries.csv "
                f"(aggregate {report.aggregate_throughput_mbps:.3f} Mbps over {report.duration_s:.1f} s)"
            )
        elif args.command == "sweep":
            if scenario.mode == "analyze" and len(scenario.nodes) != 2:
                raise ScenarioError("analyze sweeps need exactly two nodes")
            rows = cmd_sweep(data, args.param, args.start, args.stop, args.steps, out,
                             plots=plots, seed=args.seed)
            print(f"wrote {out}/sweep.csv ({len(rows)} rows)")
        return 0
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - the CLI boundary reports, not raises
        print(f"runtime error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
