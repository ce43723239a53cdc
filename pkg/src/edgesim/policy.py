"""Capacity-threshold offloading: fill edge tiers in order, overflow to the cloud."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

from edgesim.model import ParameterError, ScenarioParams, TierAllocation


@dataclass(frozen=True)
class PolicyConfig:
    fill_order: tuple[str, ...]
    thresholds: Mapping[str, float]  # MB per request, non-cloud tiers only

    def __post_init__(self):
        object.__setattr__(self, "fill_order", tuple(self.fill_order))
        object.__setattr__(self, "thresholds", dict(self.thresholds))
        for name, limit in self.thresholds.items():
            if not math.isfinite(limit) or limit <= 0:
                raise ParameterError(f"policy.thresholds.{name}", f"must be positive, got {limit!r}")


def default_policy(params: ScenarioParams) -> PolicyConfig:
    """Each edge tier takes at most one cycle's worth of its capacity."""
    edge = [t for t in params.tiers if not t.is_cloud]
    return PolicyConfig(
        fill_order=tuple(t.name for t in edge) + (params.cloud.name,),
        thresholds={t.name: t.capacity for t in edge},
    )


def check_policy(params: ScenarioParams, policy: PolicyConfig) -> None:
    names = {t.name for t in params.tiers}
    edge = names - {params.cloud.name}
    if set(policy.fill_order) != names or len(policy.fill_order) != len(names):
        raise ParameterError("policy.fill_order", f"must be a permutation of {sorted(names)}")
    if policy.fill_order[-1] != params.cloud.name:
        raise ParameterError("policy.fill_order", "the cloud must come last")
    if set(policy.thresholds) != edge:
        raise ParameterError("policy.thresholds", f"need exactly the edge tiers {sorted(edge)}")


def split(volume: float, params: ScenarioParams, policy: PolicyConfig | None = None) -> TierAllocation:
    """Greedy fill of ``volume`` MB across the scenario's tiers.

    Edge tiers in ``policy.fill_order`` each receive ``min(remaining,
    threshold)``; the cloud absorbs whatever is left. The result is
    reported in scenario tier order, not fill order.
    """
    if not math.isfinite(volume) or volume < 0:
        raise ParameterError("volume", f"must be a non-negative volume in MB, got {volume!r}")
    policy = policy or default_policy(params)
    check_policy(params, policy)

    shares = {}
    remaining = float(volume)
    for name in policy.fill_order[:-1]:
        take = min(remaining, policy.thresholds[name])
        shares[name] = take
        remaining -= take
    shares[policy.fill_order[-1]] = remaining
    return TierAllocation(tuple((t.name, shares[t.name]) for t in params.tiers))
