"""Weighted multi-metric scoring and best-combination selection.

Per (metric i, combination j, instance k) cell: high-is-better metrics score
w_i * value; low-is-better metrics score w_i * (1 - normalized value), where
normalization extremes are global across the whole session. A combination's
composite is the mean of its defined weighted cells; the winner is the
argmax with a lexicographic tie-break over the combination's axis values.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .config import (
    METRIC_REGISTRY,
    CombinationSpec,
    ExperimentConfig,
    MetricWeights,
)
from .errors import RecommendationError


@dataclass(frozen=True)
class MetricDescriptor:
    metric_id: str
    category: str
    direction: str  # "high_is_better" | "low_is_better"
    weight: int

    def __post_init__(self):
        if self.direction not in ("high_is_better", "low_is_better"):
            raise ValueError(f"unknown direction {self.direction!r}")
        if self.weight < 0:
            raise ValueError("weight must be >= 0")


def descriptors_from_weights(weights: MetricWeights,
                             overrides: dict[str, str] | None = None) -> list[MetricDescriptor]:
    """Build the session's metric descriptors from configured weight levels."""
    overrides = overrides or {}
    out = []
    for metric_id, (category, direction) in METRIC_REGISTRY.items():
        out.append(
            MetricDescriptor(
                metric_id=metric_id,
                category=category,
                direction=overrides.get(metric_id, direction),
                weight=weights.value(metric_id),
            )
        )
    return out


@dataclass
class ScoreMatrix:
    """Defined metric values per (metric, combination, instance)."""

    # metric_id -> combination_id -> {instance k -> value}
    values: dict[str, dict[str, dict[int, float]]] = field(default_factory=dict)

    def record(self, metric_id: str, combination_id: str, instance: int, value: float) -> None:
        self.values.setdefault(metric_id, {}).setdefault(combination_id, {})[instance] = value

    def extremes(self, metric_id: str) -> tuple[float, float] | None:
        cells = [
            value
            for per_combo in self.values.get(metric_id, {}).values()
            for value in per_combo.values()
        ]
        if not cells:
            return None
        return min(cells), max(cells)

    def combination_ids(self) -> list[str]:
        ids = set()
        for per_combo in self.values.values():
            ids.update(per_combo.keys())
        return sorted(ids)

    def to_payload(self) -> dict:
        return {
            metric_id: {
                combo_id: {str(k): v for k, v in sorted(cells.items())}
                for combo_id, cells in sorted(per_combo.items())
            }
            for metric_id, per_combo in sorted(self.values.items())
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "ScoreMatrix":
        matrix = cls()
        for metric_id, per_combo in payload.items():
            for combo_id, cells in per_combo.items():
                for k, value in cells.items():
                    matrix.record(metric_id, combo_id, int(k), float(value))
        return matrix


def weighted_score(value: float, descriptor: MetricDescriptor,
                   min_i: float, max_i: float) -> float:
    """Weight-and-direction-adjusted score of one measured cell."""
    if descriptor.direction == "high_is_better":
        return descriptor.weight * value
    if max_i < min_i:
        raise ValueError("max must be >= min for low-is-better normalization")
    if value < min_i or value > max_i:
        raise ValueError(
            f"value {value} outside global extremes [{min_i}, {max_i}] for "
            f"{descriptor.metric_id}"
        )
    if max_i == min_i:
        return descriptor.weight * 1.0
    return descriptor.weight * (1.0 - (value - min_i) / (max_i - min_i))


def composite_scores(matrix: ScoreMatrix, descriptors: list[MetricDescriptor]
                     ) -> tuple[dict[str, float], dict[str, str]]:
    """Mean weighted score over all defined cells of each combination.

    Returns (composites, excluded) where excluded maps combinations with zero
    defined cells to the reason they left the ranking.
    """
    by_id = {d.metric_id: d for d in descriptors}
    sums: dict[str, float] = {}
    counts: dict[str, int] = {}
    for metric_id, per_combo in matrix.values.items():
        descriptor = by_id.get(metric_id)
        if descriptor is None:
            continue
        ext = matrix.extremes(metric_id)
        min_i, max_i = ext
        for combo_id, cells in per_combo.items():
            for value in cells.values():
                score = weighted_score(value, descriptor, min_i, max_i)
                sums[combo_id] = sums.get(combo_id, 0.0) + score
                counts[combo_id] = counts.get(combo_id, 0) + 1

    composites = {cid: sums[cid] / counts[cid] for cid in sums}
    excluded = {
        cid: "no defined metric cells"
        for cid in matrix.combination_ids()
        if cid not in composites
    }
    return composites, excluded


@dataclass
class RecommendationReport:
    composites: dict[str, float]
    ranking: list[str]  # combination ids, best first
    best_combination_id: str
    best_combination: CombinationSpec
    emitted_config_payload: dict
    contributions: dict[str, dict[str, float]]  # combination_id -> metric -> mean weighted score
    excluded: dict[str, str]
    undefined_cell_counts: dict[str, int]

    def to_payload(self) -> dict:
        return {
            "schema_version": 1,
            "composites": dict(sorted(self.composites.items())),
            "ranking": self.ranking,
            "best_combination_id": self.best_combination_id,
            "best_combination": self.best_combination.to_payload(),
            "emitted_config": self.emitted_config_payload,
            "contributions": {
                cid: dict(sorted(metrics.items()))
                for cid, metrics in sorted(self.contributions.items())
            },
            "excluded": dict(sorted(self.excluded.items())),
            "undefined_cell_counts": dict(sorted(self.undefined_cell_counts.items())),
        }


def emit_best_config(config: ExperimentConfig, winner: CombinationSpec) -> dict:
    """Ready-to-use payload: the session config with singleton winning axes."""
    payload = config.to_payload()
    payload["grid"] = {
        "llms": [winner.llm],
        "embedders": [winner.embedder],
        "storage_kinds": [winner.storage_kind],
        "search_types": [winner.search_type],
        "distance_metrics": [winner.distance_metric],
        "rerank": [winner.rerank],
        "chunk_sizes": [winner.chunk_size],
        "chunk_overlaps": [winner.chunk_overlap],
        "top_k": [winner.top_k],
    }
    return payload


def best_combination(composites: dict[str, float], specs: dict[str, CombinationSpec],
                     config: ExperimentConfig | None = None,
                     matrix: ScoreMatrix | None = None,
                     descriptors: list[MetricDescriptor] | None = None,
                     excluded: dict[str, str] | None = None,
                     undefined_cell_counts: dict[str, int] | None = None
                     ) -> RecommendationReport:
    """Argmax over composites; ties go to the lexicographically smallest spec."""
    if not composites:
        raise RecommendationError("no ranked combinations")

    def sort_key(cid: str):
        spec = specs[cid]
        return (-composites[cid], spec.axis_tuple())

    ranking = sorted(composites, key=sort_key)
    winner_id = ranking[0]
    winner = specs[winner_id]

    contributions: dict[str, dict[str, float]] = {}
    if matrix is not None and descriptors is not None:
        by_id = {d.metric_id: d for d in descriptors}
        for metric_id, per_combo in matrix.values.items():
            descriptor = by_id.get(metric_id)
            if descriptor is None:
                continue
            min_i, max_i = matrix.extremes(metric_id)
            for combo_id, cells in per_combo.items():
                scores = [weighted_score(v, descriptor, min_i, max_i) for v in cells.values()]
                contributions.setdefault(combo_id, {})[metric_id] = sum(scores) / len(scores)

    emitted = emit_best_config(config, winner) if config is not None else winner.to_payload()
    return RecommendationReport(
        composites=composites,
        ranking=ranking,
        best_combination_id=winner_id,
        best_combination=winner,
        emitted_config_payload=emitted,
        contributions=contributions,
        excluded=excluded or {},
        undefined_cell_counts=undefined_cell_counts or {},
    )


def recommend(matrix: ScoreMatrix, descriptors: list[MetricDescriptor],
              specs: dict[str, CombinationSpec], config: ExperimentConfig | None = None,
              undefined_cell_counts: dict[str, int] | None = None) -> RecommendationReport:
    composites, excluded = composite_scores(matrix, descriptors)
    return best_combination(
        composites, specs, config=config, matrix=matrix, descriptors=descriptors,
        excluded=excluded, undefined_cell_counts=undefined_cell_counts,
    )


def write_report(report: RecommendationReport, path) -> None:
    from pathlib import Path

    Path(path).write_text(
        json.dumps(report.to_payload(), indent=2, ensure_ascii=False, sort_keys=True) + "\n",
        encoding="utf-8",
    )
