"""Experiment configuration: schema, validation, grid enumeration, cost model.

The configuration payload is a UTF-8 JSON document with top-level keys
``datasets``, ``sample_size``, ``seed``, ``grid``, ``thresholds``, ``weights``,
``providers``, ``output_dir`` (plus an optional ``settings`` object for
behavioral switches). Serialization is canonical: sorted keys, 2-space
indent, trailing newline — so parse -> serialize round-trips byte-identically.
"""

from __future__ import annotations

import enum
import itertools
import json
from dataclasses import dataclass, field, fields

from .errors import ConfigParseError, ConfigValidationError
from .hashing import fnv1a_64_text

SCHEMA_VERSION = 1

STORAGE_KINDS = ("memory_library", "persistent_store")
SEARCH_TYPES = ("similarity", "hybrid")
DISTANCE_METRICS = ("cosine", "euclidean", "inner_product")


class WeightLevel(str, enum.Enum):
    NO_RELEVANCE = "NoRelevance"
    LOW = "Low"
    MEDIUM = "Medium"
    HIGH = "High"


WEIGHT_VALUES = {
    WeightLevel.NO_RELEVANCE: 0,
    WeightLevel.LOW: 1,
    WeightLevel.MEDIUM: 3,
    WeightLevel.HIGH: 5,
}


def map_weight(level: WeightLevel | str) -> int:
    """Numeric value of a priority level: NoRelevance 0, Low 1, Medium 3, High 5."""
    return WEIGHT_VALUES[WeightLevel(level)]


# metric_id -> (category, direction). Direction is the orientation fed to the
# recommender; hallucination stores the 1 - contradicted/total form, which is
# high-is-better as recorded (presentation layers may invert it).
METRIC_REGISTRY: dict[str, tuple[str, str]] = {
    "hallucination": ("generation", "high_is_better"),
    "faithfulness": ("generation", "high_is_better"),
    "answer_relevancy": ("generation", "high_is_better"),
    "context_precision": ("retrieval", "high_is_better"),
    "context_recall": ("retrieval", "high_is_better"),
    "retrieval_latency_s": ("hardware", "low_is_better"),
    "generation_latency_s": ("hardware", "low_is_better"),
    "vram_mean_bytes": ("hardware", "low_is_better"),
    "tokens_per_second": ("hardware", "high_is_better"),
}

DEFAULT_WEIGHT_LEVEL = WeightLevel.MEDIUM


@dataclass(frozen=True)
class DatasetRef:
    name: str
    path: str | None = None  # None -> bundled fixture for registry datasets
    format: str = "json"  # "json" | "csv"

    def to_payload(self) -> dict:
        return {"name": self.name, "path": self.path, "format": self.format}


# Axis order here is the lexicographic enumeration order.
@dataclass(frozen=True)
class GridAxes:
    llms: tuple[str, ...] = ("mock-echo",)
    embedders: tuple[str, ...] = ("reference:64",)
    storage_kinds: tuple[str, ...] = ("memory_library",)
    search_types: tuple[str, ...] = ("similarity",)
    distance_metrics: tuple[str, ...] = ("cosine",)
    rerank: tuple[bool, ...] = (False,)
    chunk_sizes: tuple[int, ...] = (512,)
    chunk_overlaps: tuple[int, ...] = (64,)
    top_k: tuple[int, ...] = (4,)

    def axis_names(self) -> list[str]:
        return [f.name for f in fields(self)]

    def cardinality(self) -> int:
        n = 1
        for name in self.axis_names():
            n *= len(getattr(self, name))
        return n

    def to_payload(self) -> dict:
        return {name: list(getattr(self, name)) for name in self.axis_names()}


@dataclass(frozen=True)
class ThresholdSet:
    max_total_latency_s: float | None = None
    max_generation_latency_s: float | None = None
    max_retrieval_latency_s: float | None = None
    max_vram_bytes: int | None = None

    def to_payload(self) -> dict:
        return {
            "max_total_latency_s": self.max_total_latency_s,
            "max_generation_latency_s": self.max_generation_latency_s,
            "max_retrieval_latency_s": self.max_retrieval_latency_s,
            "max_vram_bytes": self.max_vram_bytes,
        }


@dataclass(frozen=True)
class MetricWeights:
    levels: tuple[tuple[str, WeightLevel], ...] = ()

    @classmethod
    def from_mapping(cls, mapping: dict[str, str]) -> "MetricWeights":
        levels = []
        for metric_id in METRIC_REGISTRY:
            raw = mapping.get(metric_id, DEFAULT_WEIGHT_LEVEL.value)
            try:
                level = WeightLevel(raw)
            except ValueError:
                raise ConfigValidationError(
                    f"unknown weight level {raw!r} for metric {metric_id!r}",
                    field=f"weights.{metric_id}",
                )
            levels.append((metric_id, level))
        for metric_id in mapping:
            if metric_id not in METRIC_REGISTRY:
                raise ConfigValidationError(
                    f"unknown metric {metric_id!r} in weights", field="weights"
                )
        return cls(levels=tuple(levels))

    def level(self, metric_id: str) -> WeightLevel:
        return dict(self.levels)[metric_id]

    def value(self, metric_id: str) -> int:
        return map_weight(self.level(metric_id))

    def to_payload(self) -> dict:
        return {metric_id: level.value for metric_id, level in self.levels}


DEFAULT_SETTINGS = {
    "answer_relevancy_operands": "question",  # "question" | "answer"
    "candidate_multiplier": 5,
    "n_potential_questions": 3,
    "telemetry_period_ms": 100,
    "temperature": 0.0,
    "top_k_decode": 1,
}


@dataclass(frozen=True)
class CombinationSpec:
    llm: str
    embedder: str
    storage_kind: str
    search_type: str
    distance_metric: str
    rerank: bool
    chunk_size: int
    chunk_overlap: int
    top_k: int

    def axis_tuple(self) -> tuple:
        return (
            self.llm,
            self.embedder,
            self.storage_kind,
            self.search_type,
            self.distance_metric,
            self.rerank,
            self.chunk_size,
            self.chunk_overlap,
            self.top_k,
        )

    def to_payload(self) -> dict:
        return {
            "llm": self.llm,
            "embedder": self.embedder,
            "storage_kind": self.storage_kind,
            "search_type": self.search_type,
            "distance_metric": self.distance_metric,
            "rerank": self.rerank,
            "chunk_size": self.chunk_size,
            "chunk_overlap": self.chunk_overlap,
            "top_k": self.top_k,
        }

    @property
    def combination_id(self) -> str:
        return f"{fnv1a_64_text(canonical_dumps(self.to_payload())):016x}"


@dataclass(frozen=True)
class ExperimentConfig:
    datasets: tuple[DatasetRef, ...]
    sample_size: int | str  # positive int or "all"
    random_seed: int
    grid: GridAxes
    thresholds: ThresholdSet
    weights: MetricWeights
    provider_endpoints: tuple[tuple[str, str], ...]
    output_dir: str
    settings: tuple[tuple[str, object], ...] = ()

    def setting(self, key: str):
        return dict(self.settings)[key]

    def to_payload(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "datasets": [d.to_payload() for d in self.datasets],
            "sample_size": self.sample_size,
            "seed": self.random_seed,
            "grid": self.grid.to_payload(),
            "thresholds": self.thresholds.to_payload(),
            "weights": self.weights.to_payload(),
            "providers": dict(self.provider_endpoints),
            "output_dir": self.output_dir,
            "settings": dict(self.settings),
        }


def canonical_dumps(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def serialize_config(config: ExperimentConfig) -> str:
    """Canonical pretty form: sorted keys, 2-space indent, trailing newline."""
    return json.dumps(config.to_payload(), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _require(condition: bool, message: str, field_name: str) -> None:
    if not condition:
        raise ConfigValidationError(message, field=field_name)


def _parse_grid(raw: dict) -> GridAxes:
    defaults = GridAxes()
    kwargs = {}
    for name in defaults.axis_names():
        values = raw.get(name)
        if values is None:
            kwargs[name] = getattr(defaults, name)
            continue
        _require(isinstance(values, list), f"grid.{name} must be a list", f"grid.{name}")
        _require(len(values) > 0, f"grid axis {name!r} is empty", f"grid.{name}")
        kwargs[name] = tuple(values)
    for name in raw:
        if name not in defaults.axis_names():
            raise ConfigValidationError(f"unknown grid axis {name!r}", field=f"grid.{name}")
    grid = GridAxes(**kwargs)

    for kind in grid.storage_kinds:
        _require(kind in STORAGE_KINDS, f"unknown storage kind {kind!r}", "grid.storage_kinds")
    for st in grid.search_types:
        _require(st in SEARCH_TYPES, f"unknown search type {st!r}", "grid.search_types")
    for metric in grid.distance_metrics:
        _require(
            metric in DISTANCE_METRICS, f"unknown distance metric {metric!r}", "grid.distance_metrics"
        )
    for size in grid.chunk_sizes:
        _require(isinstance(size, int) and size > 0, "chunk sizes must be positive ints", "grid.chunk_sizes")
    for overlap in grid.chunk_overlaps:
        _require(
            isinstance(overlap, int) and overlap >= 0,
            "chunk overlaps must be non-negative ints",
            "grid.chunk_overlaps",
        )
        for size in grid.chunk_sizes:
            _require(
                overlap < size,
                f"overlap must be < chunk size (overlap {overlap} vs size {size})",
                "grid.chunk_overlaps",
            )
    for k in grid.top_k:
        _require(isinstance(k, int) and k > 0, "top_k values must be positive ints", "grid.top_k")
    for flag in grid.rerank:
        _require(isinstance(flag, bool), "rerank values must be booleans", "grid.rerank")
    return grid


def _parse_thresholds(raw: dict) -> ThresholdSet:
    known = {
        "max_total_latency_s",
        "max_generation_latency_s",
        "max_retrieval_latency_s",
        "max_vram_bytes",
    }
    for key in raw:
        _require(key in known, f"unknown threshold {key!r}", f"thresholds.{key}")
    kwargs = {}
    for key in known:
        value = raw.get(key)
        if value is not None:
            _require(
                isinstance(value, (int, float)) and value > 0,
                f"threshold {key} must be positive",
                f"thresholds.{key}",
            )
        kwargs[key] = value
    return ThresholdSet(**kwargs)


def parse_config(payload: dict) -> ExperimentConfig:
    """Build a fully-populated config from a decoded payload dict.

    Missing optional sections fall back to documented defaults (all weights
    Medium, no thresholds, default grid axes).
    """
    _require(isinstance(payload, dict), "payload must be an object", "$")

    raw_datasets = payload.get("datasets")
    _require(
        isinstance(raw_datasets, list) and len(raw_datasets) > 0,
        "at least one dataset is required",
        "datasets",
    )
    datasets = []
    for i, entry in enumerate(raw_datasets):
        if isinstance(entry, str):
            datasets.append(DatasetRef(name=entry))
            continue
        _require(isinstance(entry, dict), "dataset entries must be objects or names", f"datasets[{i}]")
        _require("name" in entry, "dataset entry missing name", f"datasets[{i}].name")
        datasets.append(
            DatasetRef(
                name=entry["name"],
                path=entry.get("path"),
                format=entry.get("format", "json"),
            )
        )

    sample_size = payload.get("sample_size", "all")
    if sample_size != "all":
        _require(
            isinstance(sample_size, int) and sample_size > 0,
            'sample_size must be a positive integer or "all"',
            "sample_size",
        )

    seed = payload.get("seed", 0)
    _require(isinstance(seed, int), "seed must be an integer", "seed")

    grid = _parse_grid(payload.get("grid", {}) or {})
    thresholds = _parse_thresholds(payload.get("thresholds", {}) or {})
    weights = MetricWeights.from_mapping(payload.get("weights", {}) or {})

    providers = payload.get("providers", {}) or {}
    _require(isinstance(providers, dict), "providers must be a map", "providers")

    output_dir = payload.get("output_dir", "runs")
    _require(isinstance(output_dir, str) and output_dir, "output_dir must be a path string", "output_dir")

    settings = dict(DEFAULT_SETTINGS)
    raw_settings = payload.get("settings", {}) or {}
    for key, value in raw_settings.items():
        _require(key in DEFAULT_SETTINGS, f"unknown setting {key!r}", f"settings.{key}")
        settings[key] = value
    _require(
        settings["answer_relevancy_operands"] in ("question", "answer"),
        'answer_relevancy_operands must be "question" or "answer"',
        "settings.answer_relevancy_operands",
    )

    return ExperimentConfig(
        datasets=tuple(datasets),
        sample_size=sample_size,
        random_seed=seed,
        grid=grid,
        thresholds=thresholds,
        weights=weights,
        provider_endpoints=tuple(sorted(providers.items())),
        output_dir=output_dir,
        settings=tuple(sorted(settings.items())),
    )


def validate_config(raw: bytes | str) -> ExperimentConfig:
    """Parse and validate a raw JSON payload into a fully-populated config."""
    if isinstance(raw, bytes):
        try:
            raw = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ConfigParseError(f"payload is not UTF-8: {exc}", offset=exc.start)
    try:
        payload = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigParseError(f"malformed payload: {exc.msg}", offset=exc.pos)
    return parse_config(payload)


def enumerate_combinations(grid: GridAxes) -> list[CombinationSpec]:
    """All grid points in lexicographic order over the declared axis order."""
    axes = [getattr(grid, name) for name in grid.axis_names()]
    return [CombinationSpec(*values) for values in itertools.product(*axes)]


def estimate_cost(per_line_seconds: float, n_instances: int, n_combinations: int) -> float:
    """Projected runtime: seconds per line x instances x combinations.

    Warm-up time is excluded by contract; callers feed a post-warm-up
    per-line figure (history mean or calibration trial).
    """
    if per_line_seconds <= 0:
        raise ValueError("per_line_seconds must be positive")
    if n_instances <= 0:
        raise ValueError("n_instances must be positive")
    if n_combinations <= 0:
        raise ValueError("n_combinations must be positive")
    return per_line_seconds * n_instances * n_combinations
