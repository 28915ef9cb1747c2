"""Scenario documents.

One YAML mapping fully describes a run: the radio profile, the contention
discipline, per-node channels and strategy policies, and the analyze/simulate
knobs. Validation is strict: unknown keys are rejected, and when the document
came from YAML text every diagnostic carries the offending file:line.

Schema (defaults in parentheses; Mbps and seconds only here, never internally):

    mode: analyze | simulate
    description: free text ("")
    phy:
      preset: dot11b                # optional base profile, fields below override
      rates_mbps: [1, 2, 5.5, 11]
      bit_overhead_bits (288)       time_overhead_s (556e-6)
      slot_time_s (20e-6)           cw_min (31)        cw_max (1023)
      txop_limit_s (0.015)          max_payload_bits (12000)
    discipline: dcf | edcf_stop_on_loss | edcf_full_burst | time_fair | dcf_star
    t_idle_s: per-round idle time for the analytic game (0.0)
    strategies:                     # default candidate set for every node
      - {rate_mbps: 11, payload_bits: 12000}
    nodes:                          # analyze requires exactly two
      - name (n<k>)
        policy: fixed | auto_rate | best_response (fixed)
        strategy: {rate_mbps, payload_bits}
        strategies: [...]           # per-node candidate override
        channel:
          kind: table | fading
          entries: [{rate_mbps, payload_bits, success}]      # kind: table
          mean_rx_power_dbm: ...                             # kind: fading, or:
          tx_power_dbm + distance_m [+ path_loss_exponent (3.0),
              ref_distance_m (1.0), ref_loss_db (40.0)]
          thresholds_dbm: [{rate_mbps, dbm}]  (built-in DSSS table)
          coherence_frames (1), rng_seed (0)
    sim:
      duration_s (required for simulate), seed (0), report_interval_s (1.0),
      rts_cts (false), rts_cts_overhead_s (320e-6)
    dcf_star:
      target_shares: [..] (equal), gain (1.0), adaptation_period_s (0.1),
      cw_floor (7), cw_ceiling (255)
    best_response:
      measurement_window_s (5.0), epoch_cap (8)
    output:
      dir (".")
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

import yaml

from .channel import (
    DEFAULT_THRESHOLDS_DBM,
    FadingChannel,
    SuccessTable,
    log_distance_rx_power_dbm,
)
from .errors import DomainError, ScenarioError
from .game import Discipline, StageGame
from .phy import MBPS, PRESETS, PhyProfile, Strategy
from .sim import (
    BestResponseConfig,
    DcfStarConfig,
    SimNode,
    SimScenario,
    StrategyPolicy,
)

_REQUIRED = object()


# --------------------------------------------------------------------------
# YAML text -> plain data plus a path -> line table
# --------------------------------------------------------------------------

def _scalar_value(node, path, lines, source):
    tag = node.tag.rsplit(":", 1)[-1]
    text = node.value
    try:
        if tag == "null":
            return None
        if tag == "bool":
            return text.lower() in ("true", "yes", "on")
        if tag == "int":
            return int(text.replace("_", ""))
        if tag == "float":
            lowered = text.lower().replace("_", "")
            if lowered.endswith(".inf"):
                return float("-inf") if lowered.startswith("-") else float("inf")
            if lowered.endswith(".nan"):
                return float("nan")
            return float(lowered)
    except ValueError:
        raise ScenarioError(
            f"cannot parse {text!r} as {tag}", path=path, line=lines.get(path), source=source
        ) from None
    return text


def _to_plain(node, path, lines, source):
    lines.setdefault(path, node.start_mark.line + 1)
    if isinstance(node, yaml.MappingNode):
        out = {}
        for key_node, value_node in node.value:
            key = str(key_node.value)
            child = path + (key,)
            if key in out:
                raise ScenarioError(
                    f"duplicate key {key!r}",
                    path=child, line=key_node.start_mark.line + 1, source=source,
                )
            lines[child] = key_node.start_mark.line + 1
            out[key] = _to_plain(value_node, child, lines, source)
        return out
    if isinstance(node, yaml.SequenceNode):
        out = []
        for idx, item in enumerate(node.value):
            child = path + (idx,)
            lines[child] = item.start_mark.line + 1
            out.append(_to_plain(item, child, lines, source))
        return out
    return _scalar_value(node, path, lines, source)


# --------------------------------------------------------------------------
# Typed cursor over plain data
# --------------------------------------------------------------------------

class _Section:
    """Cursor into the parsed document; accessors validate and attach file:line."""

    def __init__(self, data, path, lines, source):
        self.data = data
        self.path = path
        self.lines = lines
        self.source = source

    def fail(self, message, key=None):
        path = self.path if key is None else self.path + (key,)
        raise ScenarioError(message, path=path, line=self.lines.get(path), source=self.source)

    def check_keys(self, allowed):
        for key in self.data:
            if key not in allowed:
                self.fail(f"unknown key {key!r}", key=key)

    def has(self, key):
        return key in self.data

    def _fetch(self, key, default):
        if key not in self.data:
            if default is _REQUIRED:
                self.fail(f"missing required key {key!r}")
            return default
        return self.data[key]

    def scalar(self, key, kind, default=_REQUIRED, lo=None, hi=None):
        value = self._fetch(key, default)
        if value is default and key not in self.data:
            return value
        if kind == "float":
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                self.fail(f"expected a number, got {value!r}", key=key)
            value = float(value)
        elif kind == "int":
            if isinstance(value, bool) or not isinstance(value, int):
                self.fail(f"expected an integer, got {value!r}", key=key)
        elif kind == "bool":
            if not isinstance(value, bool):
                self.fail(f"expected true/false, got {value!r}", key=key)
        elif kind == "str":
            if not isinstance(value, str):
                self.fail(f"expected a string, got {value!r}", key=key)
        if lo is not None and value < lo:
            self.fail(f"{key} must be >= {lo}, got {value}", key=key)
        if hi is not None and value > hi:
            self.fail(f"{key} must be <= {hi}, got {value}", key=key)
        return value

    def section(self, key, default=_REQUIRED):
        value = self._fetch(key, default)
        if value is default and key not in self.data:
            return value
        if not isinstance(value, dict):
            self.fail("expected a mapping", key=key)
        return _Section(value, self.path + (key,), self.lines, self.source)

    def sequence(self, key, default=_REQUIRED):
        value = self._fetch(key, default)
        if value is default and key not in self.data:
            return value
        if not isinstance(value, list):
            self.fail("expected a list", key=key)
        return [
            _Section(item, self.path + (key, idx), self.lines, self.source)
            if isinstance(item, dict)
            else self._bad_item(key, idx, item)
            for idx, item in enumerate(value)
        ]

    def _bad_item(self, key, idx, item):
        raise ScenarioError(
            f"expected a mapping, got {item!r}",
            path=self.path + (key, idx),
            line=self.lines.get(self.path + (key, idx)),
            source=self.source,
        )

    def number_list(self, key, default=_REQUIRED):
        value = self._fetch(key, default)
        if value is default and key not in self.data:
            return value
        if not isinstance(value, list):
            self.fail("expected a list of numbers", key=key)
        out = []
        for idx, item in enumerate(value):
            if isinstance(item, bool) or not isinstance(item, (int, float)):
                raise ScenarioError(
                    f"expected a number, got {item!r}",
                    path=self.path + (key, idx),
                    line=self.lines.get(self.path + (key, idx)),
                    source=self.source,
                )
            out.append(float(item))
        return out


# --------------------------------------------------------------------------
# Validated scenario model
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ChannelSpec:
    kind: str                           # "table" | "fading"
    entries: tuple[tuple[Strategy, float], ...] = ()
    mean_rx_power_dbm: float | None = None
    tx_power_dbm: float | None = None
    distance_m: float | None = None
    path_loss_exponent: float = 3.0
    ref_distance_m: float = 1.0
    ref_loss_db: float = 40.0
    thresholds_dbm: tuple[tuple[float, float], ...] = DEFAULT_THRESHOLDS_DBM
    coherence_frames: int = 1
    rng_seed: int = 0

    def fading_channel(self) -> FadingChannel:
        mean = self.mean_rx_power_dbm
        if mean is None:
            mean = log_distance_rx_power_dbm(
                self.tx_power_dbm,
                self.distance_m,
                self.path_loss_exponent,
                self.ref_distance_m,
                self.ref_loss_db,
            )
        return FadingChannel(
            mean_rx_power_dbm=mean,
            thresholds_dbm=self.thresholds_dbm,
            coherence_frames=self.coherence_frames,
            rng_seed=self.rng_seed,
        )

    def success_table(self, strategies) -> SuccessTable:
        """Per-strategy success fractions: stored entries, or the deterministic
        fractions the fading link induces."""
        if self.kind == "table":
            return SuccessTable(dict(self.entries))
        return SuccessTable.from_fading(self.fading_channel(), strategies)


@dataclass(frozen=True)
class NodeSpec:
    name: str
    policy: StrategyPolicy
    channel: ChannelSpec
    strategy: Strategy | None = None
    strategies: tuple[Strategy, ...] | None = None


@dataclass(frozen=True)
class SimSettings:
    duration_s: float | None = None
    seed: int = 0
    report_interval_s: float = 1.0
    rts_cts: bool = False
    rts_cts_overhead_s: float = 320e-6


@dataclass(frozen=True)
class Scenario:
    mode: str
    phy: PhyProfile
    discipline: Discipline
    nodes: tuple[NodeSpec, ...]
    description: str = ""
    t_idle_s: float = 0.0
    default_strategies: tuple[Strategy, ...] = ()
    sim: SimSettings = field(default_factory=SimSettings)
    dcf_star: DcfStarConfig | None = None
    best_response: BestResponseConfig | None = None
    output_dir: str = "."

    def node_strategies(self, node: NodeSpec) -> tuple[Strategy, ...]:
        return node.strategies if node.strategies is not None else self.default_strategies

    def effective_phy(self) -> PhyProfile:
        """Profile actually simulated; RTS/CTS adds a constant to the per-frame
        time overhead."""
        if self.sim.rts_cts:
            return replace(self.phy, time_overhead_s=self.phy.time_overhead_s + self.sim.rts_cts_overhead_s)
        return self.phy

    def stage_game(self) -> StageGame:
        """The two-player analytic game this scenario describes."""
        if len(self.nodes) != 2:
            raise DomainError("analysis needs exactly two nodes")
        node_i, node_j = self.nodes
        strategies_i = self.node_strategies(node_i)
        strategies_j = self.node_strategies(node_j)
        phy = self.effective_phy()
        return StageGame(
            phy=phy,
            discipline=self.discipline,
            strategies_i=strategies_i,
            strategies_j=strategies_j,
            success_i=node_i.channel.success_table(strategies_i),
            success_j=node_j.channel.success_table(strategies_j),
            t_idle_s=self.t_idle_s,
        )

    def sim_scenario(self) -> SimScenario:
        if self.sim.duration_s is None:
            raise DomainError("sim.duration_s is required to simulate")
        phy = self.effective_phy()
        nodes = []
        for spec in self.nodes:
            if spec.channel.kind == "table":
                channel = spec.channel.success_table(())
            else:
                channel = spec.channel.fading_channel()
            nodes.append(SimNode(
                name=spec.name,
                channel=channel,
                strategy=spec.strategy,
                policy=spec.policy,
                candidates=self.node_strategies(spec),
            ))
        return SimScenario(
            phy=phy,
            discipline=self.discipline,
            nodes=tuple(nodes),
            duration_s=self.sim.duration_s,
            seed=self.sim.seed,
            report_interval_s=self.sim.report_interval_s,
            dcf_star=self.dcf_star,
            best_response=self.best_response,
        )

    def to_dict(self) -> dict:
        """Plain-data form that parses back to an equal scenario."""
        def strat(s: Strategy) -> dict:
            return {"rate_mbps": s.rate_mbps, "payload_bits": s.payload_bits}

        phy = {
            "rates_mbps": [r / MBPS for r in self.phy.rates_bps],
            "bit_overhead_bits": self.phy.bit_overhead_bits,
            "time_overhead_s": self.phy.time_overhead_s,
            "slot_time_s": self.phy.slot_time_s,
            "cw_min": self.phy.cw_min,
            "cw_max": self.phy.cw_max,
            "txop_limit_s": self.phy.txop_limit_s,
            "max_payload_bits": self.phy.max_payload_bits,
        }
        nodes = []
        for node in self.nodes:
            ch: dict = {"kind": node.channel.kind}
            if node.channel.kind == "table":
                ch["entries"] = [
                    {"rate_mbps": s.rate_mbps, "payload_bits": s.payload_bits, "success": a}
                    for s, a in node.channel.entries
                ]
            else:
                if node.channel.mean_rx_power_dbm is not None:
                    ch["mean_rx_power_dbm"] = node.channel.mean_rx_power_dbm
                else:
                    ch["tx_power_dbm"] = node.channel.tx_power_dbm
                    ch["distance_m"] = node.channel.distance_m
                    ch["path_loss_exponent"] = node.channel.path_loss_exponent
                    ch["ref_distance_m"] = node.channel.ref_distance_m
                    ch["ref_loss_db"] = node.channel.ref_loss_db
                ch["thresholds_dbm"] = [
                    {"rate_mbps": r / MBPS, "dbm": t} for r, t in node.channel.thresholds_dbm
                ]
                ch["coherence_frames"] = node.channel.coherence_frames
                ch["rng_seed"] = node.channel.rng_seed
            entry = {"name": node.name, "policy": node.policy.value, "channel": ch}
            if node.strategy is not None:
                entry["strategy"] = strat(node.strategy)
            if node.strategies is not None:
                entry["strategies"] = [strat(s) for s in node.strategies]
            nodes.append(entry)

        out = {
            "mode": self.mode,
            "description": self.description,
            "phy": phy,
            "discipline": self.discipline.value,
            "t_idle_s": self.t_idle_s,
            "strategies": [strat(s) for s in self.default_strategies],
            "nodes": nodes,
            "sim": {
                "seed": self.sim.seed,
                "report_interval_s": self.sim.report_interval_s,
                "rts_cts": self.sim.rts_cts,
                "rts_cts_overhead_s": self.sim.rts_cts_overhead_s,
            },
            "output": {"dir": self.output_dir},
        }
        if self.sim.duration_s is not None:
            out["sim"]["duration_s"] = self.sim.duration_s
        if self.dcf_star is not None:
            out["dcf_star"] = {
                "target_shares": list(self.dcf_star.target_shares),
                "gain": self.dcf_star.gain,
                "adaptation_period_s": self.dcf_star.adaptation_period_s,
                "cw_floor": self.dcf_star.cw_floor,
                "cw_ceiling": self.dcf_star.cw_ceiling,
            }
        if self.best_response is not None:
            out["best_response"] = {
                "measurement_window_s": self.best_response.measurement_window_s,
                "epoch_cap": self.best_response.epoch_cap,
            }
        return out


# --------------------------------------------------------------------------
# Builders
# --------------------------------------------------------------------------

_MODES = ("analyze", "simulate")
_POLICIES = {p.value: p for p in StrategyPolicy}
_DISCIPLINES = {d.value: d for d in Discipline}


def _build_strategy(section: _Section) -> Strategy:
    section.check_keys({"rate_mbps", "payload_bits"})
    rate = section.scalar("rate_mbps", "float", lo=1e-9)
    payload = section.scalar("payload_bits", "int", lo=1)
    return Strategy.mbps(rate, payload)


def _build_phy(section: _Section | None, root: _Section) -> PhyProfile:
    base = None
    fields: dict = {}
    if section is not None:
        section.check_keys({
            "preset", "rates_mbps", "bit_overhead_bits", "time_overhead_s",
            "slot_time_s", "cw_min", "cw_max", "txop_limit_s", "max_payload_bits",
        })
        preset = section.scalar("preset", "str", None)
        if preset is not None:
            if preset not in PRESETS:
                section.fail(f"unknown preset {preset!r}; available: {', '.join(sorted(PRESETS))}", key="preset")
            base = PRESETS[preset]
        rates = section.number_list("rates_mbps", None)
        if rates is not None:
            fields["rates_bps"] = tuple(r * MBPS for r in rates)
        for key, kind in (
            ("bit_overhead_bits", "int"),
            ("time_overhead_s", "float"),
            ("slot_time_s", "float"),
            ("cw_min", "int"),
            ("cw_max", "int"),
            ("txop_limit_s", "float"),
            ("max_payload_bits", "int"),
        ):
            value = section.scalar(key, kind, None)
            if value is not None:
                fields[key] = value
    if base is None and "rates_bps" not in fields:
        base = PRESETS["dot11b"]
    try:
        if base is not None:
            return replace(base, **fields)
        return PhyProfile(**fields)
    except DomainError as exc:
        (section or root).fail(f"invalid phy profile: {exc}")


def _build_channel(section: _Section, phy: PhyProfile) -> ChannelSpec:
    kind = section.scalar("kind", "str")
    if kind == "table":
        section.check_keys({"kind", "entries"})
        entry_sections = section.sequence("entries")
        if not entry_sections:
            section.fail("success table needs at least one entry", key="entries")
        entries = []
        for es in entry_sections:
            es.check_keys({"rate_mbps", "payload_bits", "success"})
            strategy = Strategy.mbps(
                es.scalar("rate_mbps", "float", lo=1e-9),
                es.scalar("payload_bits", "int", lo=1),
            )
            entries.append((strategy, es.scalar("success", "float", lo=0.0, hi=1.0)))
        try:
            SuccessTable(dict(entries))
        except DomainError as exc:
            section.fail(str(exc), key="entries")
        return ChannelSpec(kind="table", entries=tuple(entries))
    if kind == "fading":
        section.check_keys({
            "kind", "mean_rx_power_dbm", "tx_power_dbm", "distance_m",
            "path_loss_exponent", "ref_distance_m", "ref_loss_db",
            "thresholds_dbm", "coherence_frames", "rng_seed",
        })
        mean = section.scalar("mean_rx_power_dbm", "float", None)
        tx = section.scalar("tx_power_dbm", "float", None)
        dist = section.scalar("distance_m", "float", None)
        if mean is None and (tx is None or dist is None):
            section.fail("fading channel needs mean_rx_power_dbm, or tx_power_dbm plus distance_m")
        if mean is not None and (tx is not None or dist is not None):
            section.fail("give either mean_rx_power_dbm or the path-loss fields, not both")
        thresholds = DEFAULT_THRESHOLDS_DBM
        thr_sections = section.sequence("thresholds_dbm", None)
        if thr_sections is not None:
            pairs = []
            for ts in thr_sections:
                ts.check_keys({"rate_mbps", "dbm"})
                pairs.append((ts.scalar("rate_mbps", "float", lo=1e-9) * MBPS, ts.scalar("dbm", "float")))
            thresholds = tuple(pairs)
        spec = ChannelSpec(
            kind="fading",
            mean_rx_power_dbm=mean,
            tx_power_dbm=tx,
            distance_m=dist,
            path_loss_exponent=section.scalar("path_loss_exponent", "float", 3.0, lo=0.1),
            ref_distance_m=section.scalar("ref_distance_m", "float", 1.0, lo=1e-9),
            ref_loss_db=section.scalar("ref_loss_db", "float", 40.0),
            thresholds_dbm=thresholds,
            coherence_frames=section.scalar("coherence_frames", "int", 1, lo=1),
            rng_seed=section.scalar("rng_seed", "int", 0),
        )
        try:
            spec.fading_channel()
        except DomainError as exc:
            section.fail(str(exc))
        return spec
    section.fail(f"channel kind must be 'table' or 'fading', got {kind!r}", key="kind")


def scenario_from_data(data, *, lines=None, source=None) -> Scenario:
    """Validate plain data (as produced by YAML) into a Scenario."""
    if not isinstance(data, dict):
        raise ScenarioError("scenario document must be a mapping", source=source)
    lines = lines or {}
    root = _Section(data, (), lines, source)
    root.check_keys({
        "mode", "description", "phy", "discipline", "t_idle_s", "strategies",
        "nodes", "sim", "dcf_star", "best_response", "output",
    })

    mode = root.scalar("mode", "str")
    if mode not in _MODES:
        root.fail(f"mode must be one of {_MODES}, got {mode!r}", key="mode")
    description = root.scalar("description", "str", "")

    discipline_name = root.scalar("discipline", "str")
    if discipline_name not in _DISCIPLINES:
        root.fail(
            f"discipline must be one of {sorted(_DISCIPLINES)}, got {discipline_name!r}",
            key="discipline",
        )
    discipline = _DISCIPLINES[discipline_name]

    phy = _build_phy(root.section("phy", None), root)
    t_idle_s = root.scalar("t_idle_s", "float", 0.0, lo=0.0)

    default_strategies = tuple(
        _build_strategy(s) for s in (root.sequence("strategies", None) or [])
    )

    node_sections = root.sequence("nodes")
    if not node_sections:
        root.fail("at least one node is required", key="nodes")
    nodes = []
    seen_names = set()
    for idx, ns in enumerate(node_sections):
        ns.check_keys({"name", "policy", "strategy", "strategies", "channel"})
        name = ns.scalar("name", "str", f"n{idx}")
        if name in seen_names:
            ns.fail(f"duplicate node name {name!r}", key="name")
        seen_names.add(name)
        policy_name = ns.scalar("policy", "str", "fixed")
        if policy_name not in _POLICIES:
            ns.fail(f"policy must be one of {sorted(_POLICIES)}, got {policy_name!r}", key="policy")
        strategy_section = ns.section("strategy", None)
        strategy = _build_strategy(strategy_section) if strategy_section is not None else None
        own = ns.sequence("strategies", None)
        strategies = tuple(_build_strategy(s) for s in own) if own is not None else None
        channel_section = ns.section("channel", None)
        if channel_section is None:
            ns.fail("missing required key 'channel'")
        nodes.append(NodeSpec(
            name=name,
            policy=_POLICIES[policy_name],
            channel=_build_channel(channel_section, phy),
            strategy=strategy,
            strategies=strategies,
        ))

    sim_section = root.section("sim", None)
    sim_settings = SimSettings()
    if sim_section is not None:
        sim_section.check_keys({
            "duration_s", "seed", "report_interval_s", "rts_cts", "rts_cts_overhead_s",
        })
        sim_settings = SimSettings(
            duration_s=sim_section.scalar("duration_s", "float", None),
            seed=sim_section.scalar("seed", "int", 0),
            report_interval_s=sim_section.scalar("report_interval_s", "float", 1.0),
            rts_cts=sim_section.scalar("rts_cts", "bool", False),
            rts_cts_overhead_s=sim_section.scalar("rts_cts_overhead_s", "float", 320e-6, lo=0.0),
        )
        if sim_settings.duration_s is not None and sim_settings.duration_s <= 0:
            sim_section.fail("duration_s must be > 0", key="duration_s")
        if sim_settings.report_interval_s <= 0:
            sim_section.fail("report_interval_s must be > 0", key="report_interval_s")

    dcf_star = None
    ds_section = root.section("dcf_star", None)
    if ds_section is not None:
        ds_section.check_keys({"target_shares", "gain", "adaptation_period_s", "cw_floor", "cw_ceiling"})
        shares = ds_section.number_list("target_shares", None)
        if shares is None:
            shares = [1.0 / len(nodes)] * len(nodes)
        try:
            dcf_star = DcfStarConfig(
                target_shares=tuple(shares),
                gain=ds_section.scalar("gain", "float", 1.0),
                adaptation_period_s=ds_section.scalar("adaptation_period_s", "float", 0.1),
                cw_floor=ds_section.scalar("cw_floor", "int", 7),
                cw_ceiling=ds_section.scalar("cw_ceiling", "int", 255),
            )
        except DomainError as exc:
            ds_section.fail(str(exc))

    best_response = None
    br_section = root.section("best_response", None)
    if br_section is not None:
        br_section.check_keys({"measurement_window_s", "epoch_cap"})
        try:
            best_response = BestResponseConfig(
                measurement_window_s=br_section.scalar("measurement_window_s", "float", 5.0),
                epoch_cap=br_section.scalar("epoch_cap", "int", 8),
            )
        except DomainError as exc:
            br_section.fail(str(exc))

    output_dir = "."
    out_section = root.section("output", None)
    if out_section is not None:
        out_section.check_keys({"dir"})
        output_dir = out_section.scalar("dir", "str", ".")

    scenario = Scenario(
        mode=mode,
        phy=phy,
        discipline=discipline,
        nodes=tuple(nodes),
        description=description,
        t_idle_s=t_idle_s,
        default_strategies=default_strategies,
        sim=sim_settings,
        dcf_star=dcf_star,
        best_response=best_response,
        output_dir=output_dir,
    )
    _check_consistency(scenario, root)
    return scenario


def _check_consistency(scenario: Scenario, root: _Section) -> None:
    phy = scenario.effective_phy()
    for idx, node in enumerate(scenario.nodes):
        where = _Section(
            root.data.get("nodes", [{}])[idx] if isinstance(root.data.get("nodes"), list) else {},
            ("nodes", idx), root.lines, root.source,
        )
        candidates = scenario.node_strategies(node)
        for s in candidates:
            _validate_strategy_here(s, phy, where, "strategies")
        if node.strategy is not None:
            _validate_strategy_here(node.strategy, phy, where, "strategy")
        if node.policy is StrategyPolicy.AUTO_RATE and node.channel.kind != "fading":
            where.fail("auto_rate needs a fading channel", key="policy")
        if node.channel.kind == "table":
            table = dict(node.channel.entries)
            needed = set(candidates)
            if node.strategy is not None:
                needed.add(node.strategy)
            for s in needed:
                if s not in table:
                    where.fail(f"success table has no entry for {s.label()}", key="channel")

    if scenario.mode == "analyze":
        if len(scenario.nodes) != 2:
            root.fail("analyze mode requires exactly two nodes", key="nodes")
        for idx, node in enumerate(scenario.nodes):
            if not scenario.node_strategies(node):
                root.fail(
                    f"node {node.name!r} has an empty strategy set",
                    key="strategies" if node.strategies is None else "nodes",
                )
    else:
        if scenario.sim.duration_s is None:
            root.fail("simulate mode requires sim.duration_s", key="sim")
        for node in scenario.nodes:
            if node.policy is not StrategyPolicy.AUTO_RATE and node.strategy is None:
                root.fail(f"node {node.name!r} needs a strategy to simulate", key="nodes")
        try:
            scenario.sim_scenario()
        except DomainError as exc:
            root.fail(str(exc))

    if scenario.dcf_star is not None and not scenario.discipline.fixed_time_share:
        root.fail("dcf_star settings require the dcf_star (or time_fair) discipline", key="dcf_star")


def _validate_strategy_here(strategy: Strategy, phy: PhyProfile, where: _Section, key: str) -> None:
    from .phy import validate_strategy

    try:
        validate_strategy(strategy, phy)
    except DomainError as exc:
        where.fail(f"{strategy.label()}: {exc}", key=key)


# --------------------------------------------------------------------------
# Entry points
# --------------------------------------------------------------------------

def load_scenario_text(text: str, source="<scenario>") -> Scenario:
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.YAMLError as exc:
        line = None
        mark = getattr(exc, "problem_mark", None)
        if mark is not None:
            line = mark.line + 1
        raise ScenarioError(f"invalid YAML: {exc}", line=line, source=source) from None
    if node is None:
        raise ScenarioError("empty scenario document", source=source)
    lines: dict = {}
    data = _to_plain(node, (), lines, source)
    return scenario_from_data(data, lines=lines, source=source)


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise ScenarioError(f"scenario file not found: {path}") from None
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file {path}: {exc}") from None
    return load_scenario_text(text, source=str(path))


def bundled_scenario_names() -> list[str]:
    base = resources.files("macgames") / "scenarios"
    return sorted(p.name[: -len(".yaml")] for p in base.iterdir() if p.name.endswith(".yaml"))


def bundled_scenario_text(name: str) -> str:
    base = resources.files("macgames") / "scenarios"
    candidate = base / f"{name}.yaml"
    if not candidate.is_file():
        raise ScenarioError(
            f"no bundled scenario named {name!r}; available: {', '.join(bundled_scenario_names())}"
        )
    return candidate.read_text()


def load_bundled_scenario(name: str) -> Scenario:
    return load_scenario_text(bundled_scenario_text(name), source=f"bundled:{name}")


def override_scenario_field(data: dict, dotted: str, raw_value: str) -> None:
    """Assign a YAML scalar to an existing field addressed as a dotted path
    (list indices are numeric components, e.g. nodes.0.channel.distance_m)."""
    container, leaf = _walk_path(data, dotted)
    value = yaml.safe_load(raw_value)
    if isinstance(value, (dict, list)):
        raise ScenarioError(f"override value for {dotted!r} must be a scalar")
    container[leaf] = value


def set_numeric_field(data: dict, dotted: str, value: float) -> None:
    """Assign a number to an existing numeric scalar field (sweep targets)."""
    container, leaf = _walk_path(data, dotted)
    current = container[leaf]
    if isinstance(current, bool) or not isinstance(current, (int, float)):
        raise ScenarioError(
            f"sweep parameter {dotted!r} must name a numeric scalar, found {current!r}"
        )
    container[leaf] = value


def _walk_path(data: dict, dotted: str):
    parts = dotted.split(".")
    here = data
    for i, part in enumerate(parts):
        key = int(part) if part.lstrip("-").isdigit() else part
        last = i == len(parts) - 1
        try:
            if last:
                _ = here[key]
                return here, key
            here = here[key]
        except (KeyError, IndexError, TypeError):
            raise ScenarioError(
                f"no field {dotted!r} in the scenario (failed at {part!r})"
            ) from None
