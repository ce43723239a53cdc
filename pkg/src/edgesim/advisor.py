"""Deployment advisor: use-case requirements to an edge deployment composition.

The five published use cases are answered by table lookup. Custom
profiles are ranked with a weighted score that links requirement levels,
requirement/feature relations and per-model feature levels.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum
from typing import Mapping


class RequirementLevel(IntEnum):
    INCIDENTAL = 1
    IMPORTANT = 2
    CRUCIAL = 3


class Relation(IntEnum):
    LESS = 1
    MOSTLY = 2
    HIGHLY = 3


class Level(IntEnum):
    LOW = 1
    MEDIUM = 2
    HIGH = 3


REQUIREMENTS = (
    "bandwidth",
    "ultra_low_latency",
    "extensibility",
    "context_location_awareness",
    "power_consumption",
    "scalability",
    "privacy_security",
)
FEATURES = ("coverage", "computational_capability", "real_time_interaction", "proximity")
SCORED_MODELS = ("cloudlets", "fog", "mec")

DISPLAY_NAMES = {
    "fog": "Fog Computing",
    "mec": "MEC",
    "cloudlets": "Cloudlets",
    "d2d": "D2D",
    "clc": "CLC",
}

_R, _L = Relation, Level
_I, _P, _C = RequirementLevel.INCIDENTAL, RequirementLevel.IMPORTANT, RequirementLevel.CRUCIAL

# requirement -> (coverage, computational capability, real-time interaction, proximity)
FEATURE_LINKS: dict[str, tuple[Relation, ...]] = {
    "bandwidth": (_R.HIGHLY, _R.MOSTLY, _R.HIGHLY, _R.HIGHLY),
    "ultra_low_latency": (_R.HIGHLY, _R.MOSTLY, _R.HIGHLY, _R.HIGHLY),
    "extensibility": (_R.MOSTLY, _R.HIGHLY, _R.MOSTLY, _R.HIGHLY),
    "context_location_awareness": (_R.MOSTLY, _R.MOSTLY, _R.HIGHLY, _R.LESS),
    "power_consumption": (_R.HIGHLY, _R.HIGHLY, _R.MOSTLY, _R.MOSTLY),
    "scalability": (_R.HIGHLY, _R.MOSTLY, _R.LESS, _R.MOSTLY),
    "privacy_security": (_R.MOSTLY, _R.LESS, _R.MOSTLY, _R.HIGHLY),
}

# Deployment-model comparison rows.
MODEL_FEATURES: dict[str, dict[str, Level]] = {
    "fog": {
        "real_time_interaction": _L.HIGH,
        "computation_power": _L.MEDIUM,
        "power_consumption": _L.LOW,
        "coverage": _L.LOW,
        "server_density": _L.MEDIUM,
        "context_awareness": _L.MEDIUM,
    },
    "mec": {
        "real_time_interaction": _L.MEDIUM,
        "computation_power": _L.HIGH,
        "power_consumption": _L.HIGH,
        "coverage": _L.HIGH,
        "server_density": _L.LOW,
        "context_awareness": _L.HIGH,
    },
    "cloudlets": {
        "real_time_interaction": _L.MEDIUM,
        "computation_power": _L.HIGH,
        "power_consumption": _L.MEDIUM,
        "coverage": _L.LOW,
        "server_density": _L.HIGH,
        "context_awareness": _L.LOW,
    },
}

# Deployment feature -> model-table row that measures it. Proximity has no
# row of its own; denser server placement is taken as closer to users.
FEATURE_SOURCE = {
    "coverage": "coverage",
    "computational_capability": "computation_power",
    "real_time_interaction": "real_time_interaction",
    "proximity": "server_density",
}


@dataclass(frozen=True)
class UseCaseProfile:
    name: str
    bandwidth: RequirementLevel
    ultra_low_latency: RequirementLevel
    extensibility: RequirementLevel
    context_location_awareness: RequirementLevel
    power_consumption: RequirementLevel
    scalability: RequirementLevel
    privacy_security: RequirementLevel
    heterogeneous_protocols: bool = False

    def levels(self) -> dict[str, RequirementLevel]:
        return {r: getattr(self, r) for r in REQUIREMENTS}

    @classmethod
    def from_dict(cls, data: Mapping) -> "UseCaseProfile":
        data = dict(data)
        unknown = set(data) - set(REQUIREMENTS) - {"name", "heterogeneous_protocols"}
        if unknown:
            raise ValueError(f"unknown profile keys: {sorted(unknown)}")
        missing = [r for r in REQUIREMENTS if r not in data]
        if missing:
            raise ValueError(f"profile missing requirements: {missing}")
        levels = {}
        for r in REQUIREMENTS:
            try:
                levels[r] = RequirementLevel[str(data[r]).upper()]
            except KeyError:
                raise ValueError(f"{r}: expected incidental, important or crucial, got {data[r]!r}") from None
        return cls(
            name=str(data.get("name", "custom")),
            heterogeneous_protocols=bool(data.get("heterogeneous_protocols", False)),
            **levels,
        )


@dataclass(frozen=True)
class Composition:
    """Ordered groups of deployment components; a group with several
    entries means any one of them fits (written ``A/B``)."""

    groups: tuple[tuple[str, ...], ...]
    source: str = "table"
    scores: Mapping[str, int] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.groups or not all(self.groups):
            raise ValueError("composition must be non-empty")

    @property
    def components(self) -> tuple[str, ...]:
        return tuple(c for g in self.groups for c in g)

    @property
    def label(self) -> str:
        return " + ".join("/".join(DISPLAY_NAMES[c] for c in g) for g in self.groups)

    def to_dict(self) -> dict:
        return {
            "composition": self.label,
            "components": list(self.components),
            "source": self.source,
            "scores": dict(self.scores),
        }


USE_CASES: dict[str, UseCaseProfile] = {
    "Autonomous Vehicles": UseCaseProfile("Autonomous Vehicles", _P, _C, _P, _C, _C, _P, _C),
    "Smart Factory": UseCaseProfile("Smart Factory", _P, _C, _I, _P, _C, _P, _C, heterogeneous_protocols=True),
    "AR/VR": UseCaseProfile("AR/VR", _C, _C, _P, _P, _C, _P, _C),
    "3D Gaming": UseCaseProfile("3D Gaming", _C, _C, _P, _P, _C, _P, _P),
    "Remote Surgery": UseCaseProfile("Remote Surgery", _P, _C, _I, _I, _C, _P, _C),
}

RECOMMENDATIONS: dict[str, tuple[tuple[str, ...], ...]] = {
    "Autonomous Vehicles": (("fog",), ("mec",), ("d2d",)),
    "Smart Factory": (("fog",), ("mec",), ("clc",)),
    "AR/VR": (("mec", "cloudlets"), ("fog",)),
    "3D Gaming": (("mec",), ("cloudlets",)),
    "Remote Surgery": (("fog", "cloudlets"), ("mec",)),
}


def score(
    model: str,
    profile: UseCaseProfile,
    links: Mapping[str, tuple[Relation, ...]] = FEATURE_LINKS,
    features: Mapping[str, Mapping[str, Level]] = MODEL_FEATURES,
) -> int:
    """Sum over requirements of level * sum over features of relation * model level."""
    if model not in features:
        raise KeyError(f"no feature row for model {model!r}")
    row = features[model]
    total = 0
    for req, level in profile.levels().items():
        if req not in links or len(links[req]) != len(FEATURES):
            raise KeyError(f"missing feature links for {req!r}")
        inner = 0
        for feature, relation in zip(FEATURES, links[req]):
            source = FEATURE_SOURCE[feature]
            if source not in row:
                raise KeyError(f"missing {source!r} for model {model!r}")
            inner += int(relation) * int(row[source])
        total += int(level) * inner
    return total


def rank(profile: UseCaseProfile) -> list[tuple[str, int]]:
    scores = [(m, score(m, profile)) for m in SCORED_MODELS]
    return sorted(scores, key=lambda ms: (-ms[1], ms[0]))


def recommend(profile: UseCaseProfile | str) -> Composition:
    if isinstance(profile, str):
        if profile not in USE_CASES:
            raise KeyError(f"unknown use case {profile!r}; known: {sorted(USE_CASES)}")
        profile = USE_CASES[profile]
    ranked = rank(profile)
    scores = dict(ranked)
    if profile.name in RECOMMENDATIONS:
        return Composition(RECOMMENDATIONS[profile.name], "table", scores)
    groups = [(m,) for m, _ in ranked[:2]]
    if profile.context_location_awareness is RequirementLevel.CRUCIAL:
        groups.append(("d2d",))
    if profile.heterogeneous_protocols:
        groups.append(("clc",))
    return Composition(tuple(groups), "scored", scores)
