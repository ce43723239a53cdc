"""Latency model for the fog, 5G MEC and hybrid deployments.

Units are fixed throughout the package: volumes in MB (1 GB = 1000 MB),
link speeds in MB/s, compute capacities in MB/cycle, times in seconds.
Everything here is a pure function of its inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable

MB_PER_GB = 1000.0

MODELS = ("fog", "mec", "hybrid")
ALPHA_SEMANTICS = ("effective_speed", "printed_formula")

# Tier names per model, in default fill order. The cloud is always last.
MODEL_TIERS = {
    "fog": ("fog", "cloud"),
    "mec": ("mec", "cloud"),
    "hybrid": ("u-mec", "c-mec", "cloud"),
}

DEFAULT_CLOUD_CAPACITY = 10_000.0
DEFAULT_HOPS = 10
DEFAULT_CYCLE_S = 1.0


class ParameterError(ValueError):
    """A parameter violates a domain invariant."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


def _require_positive(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value) or value <= 0:
        raise ParameterError(name, f"must be a positive finite number, got {value!r}")
    return value


def _require_volume(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value) or value < 0:
        raise ParameterError(name, f"must be a non-negative volume in MB, got {value!r}")
    return value


@dataclass(frozen=True)
class MotionFactor:
    """UE mobility factor applied to the uplink, plus the interval it came from."""

    alpha: float
    range_low: float
    range_high: float

    def __post_init__(self):
        if not (0 < self.range_low <= self.alpha <= self.range_high <= 1):
            raise ParameterError(
                "alpha",
                f"need 0 < low <= alpha <= high <= 1, got "
                f"alpha={self.alpha!r} in [{self.range_low!r}, {self.range_high!r}]",
            )

    @classmethod
    def fixed(cls, alpha: float) -> "MotionFactor":
        return cls(alpha, alpha, alpha)

    @classmethod
    def midpoint(cls, alpha_range: tuple[float, float]) -> "MotionFactor":
        low, high = alpha_range
        return cls((low + high) / 2.0, low, high)


def validate_alpha_range(alpha_range: Iterable[float]) -> tuple[float, float]:
    try:
        low, high = (float(v) for v in alpha_range)
    except (TypeError, ValueError):
        raise ParameterError("alpha_range", "must be a pair [low, high]") from None
    if not (0 < low <= high <= 1):
        raise ParameterError(
            "alpha_range", f"need 0 < low <= high <= 1, got [{low!r}, {high!r}]"
        )
    return low, high


@dataclass(frozen=True)
class TierSpec:
    """One compute tier reachable from the access node."""

    name: str
    link_speed: float  # MB/s on the leg from the access side to this tier
    capacity: float  # MB/cycle
    is_cloud: bool = False

    def __post_init__(self):
        _require_positive(f"tiers.{self.name}.link_speed", self.link_speed)
        _require_positive(f"tiers.{self.name}.capacity", self.capacity)


@dataclass(frozen=True)
class ScenarioParams:
    model_name: str
    access_speed: float  # UE uplink, MB/s
    alpha_range: tuple[float, float]
    backhaul_hops: int
    tiers: tuple[TierSpec, ...]
    cycle_duration_s: float = DEFAULT_CYCLE_S
    ue_count: int = 1
    alpha_semantics: str = "effective_speed"

    def __post_init__(self):
        if self.model_name not in MODELS:
            raise ParameterError("model_name", f"unknown model {self.model_name!r}")
        _require_positive("access_speed", self.access_speed)
        object.__setattr__(self, "alpha_range", validate_alpha_range(self.alpha_range))
        if isinstance(self.backhaul_hops, bool) or int(self.backhaul_hops) != self.backhaul_hops:
            raise ParameterError("backhaul_hops", "must be an integer")
        if self.backhaul_hops < 1:
            raise ParameterError("backhaul_hops", f"must be >= 1, got {self.backhaul_hops}")
        _require_positive("cycle_duration_s", self.cycle_duration_s)
        if isinstance(self.ue_count, bool) or int(self.ue_count) != self.ue_count or self.ue_count < 1:
            raise ParameterError("ue_count", f"must be an integer >= 1, got {self.ue_count!r}")
        if self.alpha_semantics not in ALPHA_SEMANTICS:
            raise ParameterError(
                "alpha_semantics", f"must be one of {ALPHA_SEMANTICS}, got {self.alpha_semantics!r}"
            )
        tiers = tuple(self.tiers)
        object.__setattr__(self, "tiers", tiers)
        names = tuple(t.name for t in tiers)
        if names != MODEL_TIERS[self.model_name]:
            raise ParameterError(
                "tiers", f"{self.model_name} needs tiers {MODEL_TIERS[self.model_name]}, got {names}"
            )
        if [t.is_cloud for t in tiers] != [False] * (len(tiers) - 1) + [True]:
            raise ParameterError("tiers", "exactly one cloud tier, placed last")

    def tier(self, name: str) -> TierSpec:
        for t in self.tiers:
            if t.name == name:
                return t
        raise KeyError(name)

    @property
    def cloud(self) -> TierSpec:
        return self.tiers[-1]

    def with_tier(self, name: str, **changes) -> "ScenarioParams":
        tiers = tuple(replace(t, **changes) if t.name == name else t for t in self.tiers)
        return replace(self, tiers=tiers)


@dataclass(frozen=True)
class TierAllocation:
    """Split of one request's volume across tiers, in tier order."""

    per_tier: tuple[tuple[str, float], ...]

    @property
    def total(self) -> float:
        return sum(v for _, v in self.per_tier)

    def volume(self, name: str) -> float:
        for tier_name, v in self.per_tier:
            if tier_name == name:
                return v
        raise KeyError(name)

    def as_dict(self) -> dict[str, float]:
        return dict(self.per_tier)


@dataclass(frozen=True)
class LatencyBreakdown:
    transmission_s: float
    processing_s: float
    total_s: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "total_s", self.transmission_s + self.processing_s)


def ln_hop_factor(hops: int) -> float:
    """Backhaul penalty on the cloud leg: natural log of the hop count."""
    if isinstance(hops, bool) or int(hops) != hops or hops < 1:
        raise ParameterError("backhaul_hops", f"must be an integer >= 1, got {hops!r}")
    return math.log(hops)


def uplink_time(volume: float, speed: float, alpha: float, semantics: str = "effective_speed") -> float:
    if semantics == "effective_speed":
        return volume / (alpha * speed)
    if semantics == "printed_formula":
        return alpha * volume / speed
    raise ParameterError("alpha_semantics", f"unknown value {semantics!r}")


def tier_link_time(volume: float, tier: TierSpec, hops: int) -> float:
    """One-way transfer time from the access node to a tier."""
    t = volume / tier.link_speed
    if tier.is_cloud:
        t *= ln_hop_factor(hops)
    return t


def tier_processing_time(volume: float, tier: TierSpec, cycle_duration_s: float) -> float:
    return volume / tier.capacity * cycle_duration_s


def _check_alloc(alloc: TierAllocation, params: ScenarioParams) -> None:
    names = tuple(n for n, _ in alloc.per_tier)
    if names != tuple(t.name for t in params.tiers):
        raise ParameterError("allocation", f"tiers {names} do not match scenario {params.model_name}")


def transmission_time(alloc: TierAllocation, params: ScenarioParams, alpha: MotionFactor) -> float:
    """Round-trip transfer time for one UE's allocation (upload and reply)."""
    _check_alloc(alloc, params)
    one_way = uplink_time(alloc.total, params.access_speed, alpha.alpha, params.alpha_semantics)
    for tier, (_, v) in zip(params.tiers, alloc.per_tier):
        one_way += tier_link_time(v, tier, params.backhaul_hops)
    return 2.0 * one_way


def processing_time(alloc: TierAllocation, params: ScenarioParams) -> float:
    _check_alloc(alloc, params)
    return sum(
        tier_processing_time(v, tier, params.cycle_duration_s)
        for tier, (_, v) in zip(params.tiers, alloc.per_tier)
    )


def total_latency(volume: float, params: ScenarioParams, alpha: MotionFactor, policy=None) -> LatencyBreakdown:
    """Closed-form latency of ``volume`` MB split evenly over ``params.ue_count`` UEs.

    Per-UE latencies are summed, so N identical UEs cost N times one UE
    carrying volume/N.
    """
    from edgesim.policy import default_policy, split

    volume = _require_volume("volume", volume)
    policy = policy or default_policy(params)
    per_ue = volume / params.ue_count
    alloc = split(per_ue, params, policy)
    tx = transmission_time(alloc, params, alpha)
    proc = processing_time(alloc, params)
    n = params.ue_count
    return LatencyBreakdown(tx * n, proc * n)


def default_scenario(model_name: str, **overrides) -> ScenarioParams:
    """Calibration used in the published simulation, plus documented fill-ins.

    Cloud capacity (10 000 MB/cycle), the 1 s cycle and the single-UE
    default are not given by the source and are exposed as overrides.
    """
    cloud_capacity = overrides.pop("cloud_capacity", DEFAULT_CLOUD_CAPACITY)
    if model_name == "fog":
        access, alpha_range = 37.0, (0.7, 1.0)
        tiers = (
            TierSpec("fog", 37.0, 1000.0),
            TierSpec("cloud", 37.0, cloud_capacity, is_cloud=True),
        )
    elif model_name == "mec":
        access, alpha_range = 800.0, (0.8, 1.0)
        tiers = (
            TierSpec("mec", 800.0, 2000.0),
            TierSpec("cloud", 800.0, cloud_capacity, is_cloud=True),
        )
    elif model_name == "hybrid":
        access, alpha_range = 800.0, (0.9, 1.0)
        tiers = (
            TierSpec("u-mec", 800.0, 2000.0),
            TierSpec("c-mec", 800.0, 1000.0),
            TierSpec("cloud", 800.0, cloud_capacity, is_cloud=True),
        )
    else:
        raise ParameterError("model_name", f"unknown model {model_name!r}; expected one of {MODELS}")
    params = dict(
        model_name=model_name,
        access_speed=access,
        alpha_range=alpha_range,
        backhaul_hops=DEFAULT_HOPS,
        tiers=tiers,
        cycle_duration_s=DEFAULT_CYCLE_S,
        ue_count=1,
    )
    params.update(overrides)
    return ScenarioParams(**params)


# Where each default comes from, reported by ``validate-config --explain``.
PROVENANCE = {
    "fog.access_speed": "paper: UE uplink over 4G LTE-Advanced, 37 MB/s",
    "fog.alpha_range": "paper: motion factor between 0.7 and 1",
    "fog.tiers.fog.link_speed": "paper: BS-to-fog speed S_BS, same 37 MB/s link",
    "fog.tiers.fog.capacity": "paper: fog computes 1 GB per cycle",
    "fog.tiers.cloud.link_speed": "paper: BS-to-cloud speed S_BS",
    "mec.access_speed": "paper: 5G speed rate 800 MB/s",
    "mec.alpha_range": "paper: motion factor between 0.8 and 1",
    "mec.tiers.mec.link_speed": "paper: 5G gNB speed 800 MB/s",
    "mec.tiers.mec.capacity": "paper: MEC computes 2 GB per cycle",
    "mec.tiers.cloud.link_speed": "paper: 5G gNB speed 800 MB/s",
    "hybrid.access_speed": "paper: 5G speed rate 800 MB/s",
    "hybrid.alpha_range": "paper: motion factor between 0.9 and 1",
    "hybrid.tiers.u-mec.link_speed": "design decision: single 5G speed (800 MB/s) reused for CU-UP leg",
    "hybrid.tiers.u-mec.capacity": "paper: U-MEC computes 2 GB per cycle",
    "hybrid.tiers.c-mec.link_speed": "design decision: single 5G speed (800 MB/s) reused for CU-CP leg",
    "hybrid.tiers.c-mec.capacity": "paper: C-MEC computes 1 GB per cycle",
    "hybrid.tiers.cloud.link_speed": "design decision: single 5G speed (800 MB/s) reused for cloud leg",
    "*.tiers.cloud.capacity": "design decision: cloud capacity unspecified, 10000 MB/cycle",
    "*.backhaul_hops": "paper: 10 hops between access node and cloud",
    "*.cycle_duration_s": "design decision: one cycle is one second",
    "*.ue_count": "design decision: sweep volume carried by a single UE",
    "*.alpha_semantics": "design decision: alpha scales the uplink speed (V / (alpha * S))",
    "policy.thresholds": "design decision: edge tier takes at most one cycle of capacity",
    "sweep.range": "paper: 50 MB to 2.5 GB in 50 MB steps",
}
