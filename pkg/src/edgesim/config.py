"""JSON configuration: load, validate, fill defaults, record provenance.

Document layout (every block optional)::

    {
      "schema_version": 1,
      "scenario": {<scenario keys, applied to every model>},
      "models": {"fog": {<scenario keys>, "tiers": {"fog": {"link_speed": 37, "capacity": 1000}}}},
      "policy": {"hybrid": {"fill_order": ["u-mec", "c-mec", "cloud"], "thresholds": {"u-mec": 2000, "c-mec": 1000}}},
      "sweep": {"start_mb": 50, "end_mb": 2500, "step_mb": 50, "models": ["fog", "mec", "hybrid"],
                "seed": 42, "alpha_mode": "sampled", "repetitions": 1}
    }

Scenario keys: access_speed (MB/s), alpha_range ([low, high]),
backhaul_hops, cycle_duration_s, ue_count, alpha_semantics,
cloud_capacity (MB/cycle). Model blocks override the shared scenario
block. Unknown keys anywhere are rejected.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any

from edgesim.model import MODELS, PROVENANCE, ParameterError, ScenarioParams, default_scenario
from edgesim.policy import PolicyConfig, check_policy, default_policy
from edgesim.sweep import SweepConfig

SCHEMA_VERSION = 1

SCENARIO_KEYS = (
    "access_speed",
    "alpha_range",
    "backhaul_hops",
    "cycle_duration_s",
    "ue_count",
    "alpha_semantics",
    "cloud_capacity",
)
TIER_KEYS = ("link_speed", "capacity")
POLICY_KEYS = ("fill_order", "thresholds")
SWEEP_KEYS = ("start_mb", "end_mb", "step_mb", "models", "seed", "alpha_mode", "repetitions")
TOP_KEYS = ("schema_version", "scenario", "models", "policy", "sweep")


class ConfigError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass
class ConfigDocument:
    scenarios: dict[str, ScenarioParams]
    policies: dict[str, PolicyConfig]
    sweep: SweepConfig
    schema_version: int = SCHEMA_VERSION
    provenance: dict[str, str] = field(default_factory=dict, compare=False)

    def to_dict(self) -> dict:
        """Fully explicit form; loading it back gives an equal document."""
        models = {}
        for name, p in self.scenarios.items():
            models[name] = {
                "access_speed": p.access_speed,
                "alpha_range": list(p.alpha_range),
                "backhaul_hops": p.backhaul_hops,
                "cycle_duration_s": p.cycle_duration_s,
                "ue_count": p.ue_count,
                "alpha_semantics": p.alpha_semantics,
                "tiers": {t.name: {"link_speed": t.link_speed, "capacity": t.capacity} for t in p.tiers},
            }
        policy = {
            name: {"fill_order": list(pol.fill_order), "thresholds": dict(pol.thresholds)}
            for name, pol in self.policies.items()
        }
        sweep = asdict(self.sweep)
        sweep["models"] = list(self.sweep.models)
        return {"schema_version": self.schema_version, "models": models, "policy": policy, "sweep": sweep}

    def explain(self) -> list[str]:
        return [f"{path} = {json.dumps(value)}  [{self.provenance.get(path, '')}]"
                for path, value in _flatten(self.to_dict())]


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for key, value in obj.items():
            yield from _flatten(value, f"{prefix}.{key}" if prefix else str(key))
    else:
        yield prefix, obj


def _check_keys(block: Any, allowed, path: str) -> dict:
    if not isinstance(block, dict):
        raise ConfigError(path or "<root>", "expected a JSON object")
    unknown = sorted(set(block) - set(allowed))
    if unknown:
        where = f"{path}.{unknown[0]}" if path else unknown[0]
        raise ConfigError(where, f"unknown key (allowed: {', '.join(allowed)})")
    return block


def _number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(path, f"expected a number, got {value!r}")
    return float(value)


def _integer(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or value != int(value):
        raise ConfigError(path, f"expected an integer, got {value!r}")
    return int(value)


def _scenario_overrides(block: dict, path: str) -> dict:
    out = {}
    for key, value in block.items():
        where = f"{path}.{key}"
        if key in ("access_speed", "cycle_duration_s", "cloud_capacity"):
            out[key] = _number(value, where)
        elif key in ("backhaul_hops", "ue_count"):
            out[key] = _integer(value, where)
        elif key == "alpha_range":
            if not isinstance(value, list) or len(value) != 2:
                raise ConfigError(where, "expected [low, high]")
            out[key] = tuple(_number(v, where) for v in value)
        elif key == "alpha_semantics":
            if not isinstance(value, str):
                raise ConfigError(where, f"expected a string, got {value!r}")
            out[key] = value
    return out


def _build_scenario(model: str, shared: dict, own: dict, tier_block: dict, path: str) -> ScenarioParams:
    merged = {**shared, **own}
    try:
        params = default_scenario(model, **merged)
        for tier_name, values in tier_block.items():
            params = params.with_tier(tier_name, **values)
    except ParameterError as exc:
        origin = f"{path}.{exc.field}" if exc.field in own or "." in exc.field else f"scenario.{exc.field}"
        raise ConfigError(origin, str(exc).split(": ", 1)[-1]) from None
    return params


def _tier_overrides(model: str, block, path: str) -> dict:
    block = _check_keys(block, [t.name for t in default_scenario(model).tiers], path)
    out = {}
    for tier_name, values in block.items():
        tpath = f"{path}.{tier_name}"
        values = _check_keys(values, TIER_KEYS, tpath)
        out[tier_name] = {k: _number(v, f"{tpath}.{k}") for k, v in values.items()}
    return out


def _build_policy(params: ScenarioParams, block: dict, path: str) -> PolicyConfig:
    base = default_policy(params)
    fill_order = block.get("fill_order", list(base.fill_order))
    if not isinstance(fill_order, list) or not all(isinstance(n, str) for n in fill_order):
        raise ConfigError(f"{path}.fill_order", "expected a list of tier names")
    thresholds = dict(base.thresholds)
    if "thresholds" in block:
        tblock = _check_keys(block["thresholds"], list(base.thresholds), f"{path}.thresholds")
        thresholds.update({k: _number(v, f"{path}.thresholds.{k}") for k, v in tblock.items()})
    try:
        policy = PolicyConfig(tuple(fill_order), thresholds)
        check_policy(params, policy)
    except ParameterError as exc:
        raise ConfigError(f"{path}.{exc.field.removeprefix('policy.')}", str(exc).split(": ", 1)[-1]) from None
    return policy


def _build_sweep(block: dict) -> SweepConfig:
    kwargs = {}
    for key, value in block.items():
        where = f"sweep.{key}"
        if key in ("start_mb", "end_mb", "step_mb"):
            kwargs[key] = _number(value, where)
        elif key in ("seed", "repetitions"):
            kwargs[key] = _integer(value, where)
        elif key == "models":
            if not isinstance(value, list) or not all(isinstance(m, str) for m in value):
                raise ConfigError(where, "expected a list of model names")
            kwargs[key] = tuple(value)
        elif key == "alpha_mode":
            if not isinstance(value, str):
                raise ConfigError(where, f"expected a string, got {value!r}")
            kwargs[key] = value
    try:
        return SweepConfig(**kwargs)
    except ParameterError as exc:
        field_path = exc.field if exc.field.startswith("sweep.") else f"sweep.{exc.field}"
        raise ConfigError(field_path, str(exc).split(": ", 1)[-1]) from None


def _default_provenance(path: str) -> str:
    parts = path.split(".")
    if parts[0] == "models":
        key = ".".join(parts[1:])
        wildcard = ".".join(["*"] + parts[2:])
        return PROVENANCE.get(key) or PROVENANCE.get(wildcard, "default")
    if parts[0] == "policy":
        if parts[2] == "thresholds":
            return PROVENANCE["policy.thresholds"]
        return "default: edge tiers in order, cloud last"
    if parts[0] == "sweep":
        if parts[1] in ("start_mb", "end_mb", "step_mb"):
            return PROVENANCE["sweep.range"]
        return "default"
    return "default"


def from_dict(raw: Any) -> ConfigDocument:
    raw = _check_keys(raw, TOP_KEYS, "")
    version = raw.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION or isinstance(version, bool):
        raise ConfigError("schema_version", f"unsupported version {version!r} (expected {SCHEMA_VERSION})")

    shared_block = _check_keys(raw.get("scenario", {}), SCENARIO_KEYS, "scenario")
    shared = _scenario_overrides(shared_block, "scenario")
    models_block = _check_keys(raw.get("models", {}), MODELS, "models")
    policy_block = _check_keys(raw.get("policy", {}), MODELS, "policy")

    scenarios, policies = {}, {}
    explicit: set[str] = set()
    for model in MODELS:
        path = f"models.{model}"
        own_block = _check_keys(models_block.get(model, {}), SCENARIO_KEYS + ("tiers",), path)
        own = _scenario_overrides({k: v for k, v in own_block.items() if k != "tiers"}, path)
        tiers = _tier_overrides(model, own_block.get("tiers", {}), f"{path}.tiers")
        scenarios[model] = _build_scenario(model, shared, own, tiers, path)
        ppath = f"policy.{model}"
        pblock = _check_keys(policy_block.get(model, {}), POLICY_KEYS, ppath)
        policies[model] = _build_policy(scenarios[model], pblock, ppath)

        for key in set(shared) | set(own):
            if key == "cloud_capacity":
                explicit.add(f"{path}.tiers.cloud.capacity")
            else:
                explicit.add(f"{path}.{key}")
        for tier_name, values in tiers.items():
            explicit.update(f"{path}.tiers.{tier_name}.{k}" for k in values)
        if "fill_order" in pblock:
            explicit.add(f"{ppath}.fill_order")
        for k in pblock.get("thresholds", {}):
            explicit.add(f"{ppath}.thresholds.{k}")

    sweep_block = _check_keys(raw.get("sweep", {}), SWEEP_KEYS, "sweep")
    sweep = _build_sweep(sweep_block)
    explicit.update(f"sweep.{k}" for k in sweep_block)

    doc = ConfigDocument(scenarios, policies, sweep, version)
    for path, _ in _flatten(doc.to_dict()):
        if path == "schema_version":
            doc.provenance[path] = "config file" if "schema_version" in raw else "design decision: JSON schema version gate"
        elif any(path == e or path.startswith(e + ".") for e in explicit):
            doc.provenance[path] = "config file"
        else:
            doc.provenance[path] = _default_provenance(path)
    return doc


def load(path) -> ConfigDocument:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(str(path), f"cannot read: {exc.strerror or exc}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(str(path), f"malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return from_dict(raw)


def defaults() -> ConfigDocument:
    return from_dict({})


def dumps(doc: ConfigDocument) -> str:
    return json.dumps(doc.to_dict(), indent=2) + "\n"


def with_seed(doc: ConfigDocument, seed: int) -> ConfigDocument:
    return replace(doc, sweep=replace(doc.sweep, seed=seed))
