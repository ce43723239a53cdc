"""Volume sweep over the three models, comparison metrics and result files."""

from __future__ import annotations

import csv
import io
import json
import math
from collections import defaultdict
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Mapping, Sequence

from edgesim.model import MODELS, MotionFactor, ParameterError, ScenarioParams, TierAllocation, default_scenario
from edgesim.policy import PolicyConfig
from edgesim.sim import ConsistencyError, PointResult, RngState, run_scenario

CSV_COLUMNS = (
    "model",
    "volume_mb",
    "alpha",
    "transmission_s",
    "processing_s",
    "total_s",
    "v_tier1_mb",
    "v_tier2_mb",
    "v_cloud_mb",
)
RESULTS_SCHEMA_VERSION = 1


class GridMismatchError(ValueError):
    pass


def parse_alpha_mode(text: str) -> tuple[str, float | None]:
    """``"sampled"``, ``"midpoint"`` or ``"fixed=<v>"``."""
    if text in ("sampled", "midpoint"):
        return text, None
    if isinstance(text, str) and text.startswith("fixed="):
        try:
            value = float(text[len("fixed="):])
        except ValueError:
            raise ParameterError("alpha_mode", f"bad fixed value in {text!r}") from None
        if not (0 < value <= 1):
            raise ParameterError("alpha_mode", f"fixed alpha must be in (0, 1], got {value}")
        return "fixed", value
    raise ParameterError("alpha_mode", f"expected sampled, midpoint or fixed=<v>, got {text!r}")


@dataclass(frozen=True)
class SweepConfig:
    start_mb: float = 50.0
    end_mb: float = 2500.0
    step_mb: float = 50.0
    models: tuple[str, ...] = MODELS
    seed: int = 42
    alpha_mode: str = "sampled"
    repetitions: int = 1

    def __post_init__(self):
        for name in ("start_mb", "end_mb", "step_mb"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or isinstance(value, bool) or not math.isfinite(value):
                raise ParameterError(f"sweep.{name}", f"must be a number, got {value!r}")
            object.__setattr__(self, name, float(value))
        if self.start_mb < 0:
            raise ParameterError("sweep.start_mb", "must be >= 0")
        if self.start_mb > self.end_mb:
            raise ParameterError("sweep.end_mb", "must be >= start_mb")
        if self.step_mb <= 0:
            raise ParameterError("sweep.step_mb", "must be > 0")
        models = tuple(self.models)
        for m in models:
            if m not in MODELS:
                raise ParameterError("sweep.models", f"unknown model {m!r}")
        if len(set(models)) != len(models):
            raise ParameterError("sweep.models", "duplicate model")
        object.__setattr__(self, "models", models)
        if isinstance(self.seed, bool) or not isinstance(self.seed, int):
            raise ParameterError("sweep.seed", f"must be an integer, got {self.seed!r}")
        parse_alpha_mode(self.alpha_mode)
        if isinstance(self.repetitions, bool) or not isinstance(self.repetitions, int) or self.repetitions < 1:
            raise ParameterError("sweep.repetitions", f"must be an integer >= 1, got {self.repetitions!r}")

    def volumes(self) -> list[float]:
        # small slack so 50..2500 step 50 gives 50 points despite float division
        n = math.floor((self.end_mb - self.start_mb) / self.step_mb + 1e-9) + 1
        return [self.start_mb + i * self.step_mb for i in range(n)]


@dataclass
class SweepResult:
    config: SweepConfig
    points: list[PointResult] = field(default_factory=list)

    def series(self, model: str) -> list[PointResult]:
        return [p for p in self.points if p.model == model]


def _sort_key(p: PointResult):
    return (MODELS.index(p.model), p.volume_mb, p.repetition)


def _alpha_for(config: SweepConfig, params: ScenarioParams) -> MotionFactor | None:
    mode, value = parse_alpha_mode(config.alpha_mode)
    if mode == "fixed":
        return MotionFactor.fixed(value)
    if mode == "midpoint":
        return MotionFactor.midpoint(params.alpha_range)
    return None


def run_sweep(
    config: SweepConfig,
    scenarios: Mapping[str, ScenarioParams] | None = None,
    policies: Mapping[str, PolicyConfig] | None = None,
) -> SweepResult:
    """One simulated point per (model, volume, repetition).

    In sampled mode every point draws alpha from its own stream derived
    from (seed, model, volume index, repetition), so results do not
    depend on evaluation order.
    """
    scenarios = dict(scenarios or {})
    policies = dict(policies or {})
    root = RngState(config.seed)
    volumes = config.volumes()
    points = []
    for model in config.models:
        params = scenarios.get(model) or default_scenario(model)
        policy = policies.get(model)
        for rep in range(config.repetitions):
            for i, volume in enumerate(volumes):
                alpha = _alpha_for(config, params)
                rng = root.derive(model, i, rep) if alpha is None else None
                try:
                    points.append(
                        run_scenario(params, volume, rng, alpha=alpha, policy=policy, repetition=rep)
                    )
                except ConsistencyError as exc:
                    raise ConsistencyError(f"sweep point model={model} volume={volume} rep={rep}: {exc}") from exc
                except ParameterError as exc:
                    raise ParameterError(exc.field, f"sweep point model={model} volume={volume}: {exc}") from exc
    points.sort(key=_sort_key)
    return SweepResult(config, points)


def combine(sweeps: Sequence[SweepResult]) -> SweepResult:
    """Stack sweeps (e.g. one per seed) as successive repetitions."""
    if not sweeps:
        raise ValueError("nothing to combine")
    points = []
    offset = 0
    for s in sweeps:
        reps = 1 + max((p.repetition for p in s.points), default=-1)
        points.extend(replace(p, repetition=p.repetition + offset) for p in s.points)
        offset += reps
    points.sort(key=_sort_key)
    config = replace(sweeps[0].config, repetitions=max(offset, 1))
    return SweepResult(config, points)


@dataclass
class ComparisonMetrics:
    volumes_mb: list[float]
    fog_mec_ratio: list[float] | None = None
    mec_hybrid_reduction_percent: list[float] | None = None
    max_ratio: float | None = None
    max_reduction_percent: float | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def mean_latency(sweep: SweepResult, model: str) -> dict[float, float]:
    """Mean total latency per volume, averaged over repetitions."""
    groups = defaultdict(list)
    for p in sweep.series(model):
        groups[p.volume_mb].append(p.total_s)
    return {v: math.fsum(ts) / len(ts) for v, ts in sorted(groups.items())}


def _paired(a: dict[float, float], b: dict[float, float], names: str) -> list[float]:
    if list(a) != list(b):
        raise GridMismatchError(f"{names}: volume grids differ")
    return list(a)


def compare(sweep: SweepResult) -> ComparisonMetrics:
    series = {m: mean_latency(sweep, m) for m in MODELS}
    series = {m: s for m, s in series.items() if s}
    volumes: list[float] = []
    metrics = ComparisonMetrics(volumes_mb=volumes)
    if "fog" in series and "mec" in series:
        volumes[:] = _paired(series["fog"], series["mec"], "fog/mec")
        metrics.fog_mec_ratio = [series["fog"][v] / series["mec"][v] for v in volumes]
        metrics.max_ratio = max(metrics.fog_mec_ratio)
    if "mec" in series and "hybrid" in series:
        grid = _paired(series["mec"], series["hybrid"], "mec/hybrid")
        if volumes and volumes != grid:
            raise GridMismatchError("mec/hybrid: volume grids differ")
        volumes[:] = grid
        metrics.mec_hybrid_reduction_percent = [
            _reduction(series["mec"][v], series["hybrid"][v]) for v in grid
        ]
        metrics.max_reduction_percent = max(metrics.mec_hybrid_reduction_percent)
    if not volumes and series:
        volumes[:] = list(next(iter(series.values())))
    return metrics


def _reduction(mec: float, hybrid: float) -> float:
    if mec == 0:
        return 0.0
    return (mec - hybrid) / mec * 100.0


# --------------------------------------------------------------------------
# Files


def _tier_columns(p: PointResult) -> tuple[float, float, float]:
    edge = [v for name, v in p.allocation.per_tier if name != "cloud"]
    edge += [0.0] * (2 - len(edge))
    return edge[0], edge[1], p.allocation.volume("cloud")


def to_csv(sweep: SweepResult) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for p in sorted(sweep.points, key=_sort_key):
        numbers = (p.volume_mb, p.alpha_used, p.transmission_s, p.processing_s, p.total_s, *_tier_columns(p))
        writer.writerow([p.model, *(f"{x:.6f}" for x in numbers)])
    return buf.getvalue()


def _point_dict(p: PointResult) -> dict:
    return {
        "model": p.model,
        "volume_mb": p.volume_mb,
        "alpha": p.alpha_used,
        "repetition": p.repetition,
        "transmission_s": p.transmission_s,
        "processing_s": p.processing_s,
        "total_s": p.total_s,
        "allocation": p.allocation.as_dict(),
    }


def to_json(sweep: SweepResult, metrics: ComparisonMetrics | None) -> str:
    doc = {
        "schema_version": RESULTS_SCHEMA_VERSION,
        "config": {**asdict(sweep.config), "models": list(sweep.config.models)},
        "points": [_point_dict(p) for p in sorted(sweep.points, key=_sort_key)],
        "metrics": metrics.to_dict() if metrics is not None else None,
    }
    return json.dumps(doc, indent=2) + "\n"


def emit(sweep: SweepResult, metrics: ComparisonMetrics | None, fmt: str, path) -> Path:
    if fmt == "csv":
        text = to_csv(sweep)
    elif fmt == "json":
        text = to_json(sweep, metrics)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    path = Path(path)
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc.strerror or exc}") from exc
    return path


def load_results(path) -> SweepResult:
    """Read a CSV or JSON file written by :func:`emit`."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot read results from {path}: {exc.strerror or exc}") from exc
    if text.lstrip().startswith("{"):
        return _from_json(text)
    return _from_csv(text, path)


def _from_json(text: str) -> SweepResult:
    doc = json.loads(text)
    cfg = doc.get("config") or {}
    config = SweepConfig(**{**cfg, "models": tuple(cfg.get("models", MODELS))})
    points = [
        PointResult(
            model=d["model"],
            volume_mb=d["volume_mb"],
            alpha_used=d["alpha"],
            transmission_s=d["transmission_s"],
            processing_s=d["processing_s"],
            total_s=d["total_s"],
            allocation=TierAllocation(tuple(d["allocation"].items())),
            repetition=d.get("repetition", 0),
        )
        for d in doc["points"]
    ]
    return SweepResult(config, points)


def _from_csv(text: str, path: Path) -> SweepResult:
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
        raise ValueError(f"{path}: unexpected CSV header {reader.fieldnames}")
    seen = defaultdict(int)
    points = []
    for row in reader:
        model = row["model"]
        if model not in MODELS:
            raise ValueError(f"{path}: unknown model {model!r}")
        volume = float(row["volume_mb"])
        t1, t2, cloud = (float(row[c]) for c in ("v_tier1_mb", "v_tier2_mb", "v_cloud_mb"))
        names = default_scenario(model).tiers
        values = (t1, cloud) if len(names) == 2 else (t1, t2, cloud)
        rep = seen[(model, volume)]
        seen[(model, volume)] += 1
        points.append(PointResult(
            model=model,
            volume_mb=volume,
            alpha_used=float(row["alpha"]),
            transmission_s=float(row["transmission_s"]),
            processing_s=float(row["processing_s"]),
            total_s=float(row["total_s"]),
            allocation=TierAllocation(tuple(zip((t.name for t in names), values))),
            repetition=rep,
        ))
    models = tuple(m for m in MODELS if m in {p.model for p in points})
    volumes = sorted({p.volume_mb for p in points})
    if volumes:
        step = volumes[1] - volumes[0] if len(volumes) > 1 else 1.0
        config = SweepConfig(volumes[0], volumes[-1], step, models or MODELS)
    else:
        config = SweepConfig(models=models)
    return SweepResult(config, points)
