"""Threshold-based pruning over cross-session latency/VRAM history.

Latency means are keyed two ways: generation by (llm, embedder) and
retrieval by the six retrieval-shaping fields. The chronologically first
trial of each key is a warm-up (model/tool load time) and is excluded from
means; a key with only its warm-up recorded never triggers a skip.
Thresholds prune on strict inequality: the historical value must exceed the
limit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .config import CombinationSpec, ThresholdSet


@dataclass(frozen=True, order=True)
class GenerationKey:
    llm_id: str
    embedder_id: str

    @classmethod
    def of(cls, combo: CombinationSpec) -> "GenerationKey":
        return cls(llm_id=combo.llm, embedder_id=combo.embedder)


@dataclass(frozen=True, order=True)
class RetrievalKey:
    embedder_id: str
    storage_kind: str
    search_type: str
    distance_metric: str
    chunk_size: int
    top_k: int

    @classmethod
    def of(cls, combo: CombinationSpec) -> "RetrievalKey":
        return cls(
            embedder_id=combo.embedder,
            storage_kind=combo.storage_kind,
            search_type=combo.search_type,
            distance_metric=combo.distance_metric,
            chunk_size=combo.chunk_size,
            top_k=combo.top_k,
        )


@dataclass
class KeyStats:
    mean: float | None  # None until a post-warm-up trial exists
    count: int  # post-warm-up trial count


@dataclass
class HistoryStats:
    generation: dict[GenerationKey, KeyStats] = field(default_factory=dict)
    retrieval: dict[RetrievalKey, KeyStats] = field(default_factory=dict)
    vram_max: dict[str, int] = field(default_factory=dict)  # combination_id -> bytes

    def to_payload(self) -> dict:
        return {
            "generation": [
                {"llm": k.llm_id, "embedder": k.embedder_id, "mean": s.mean, "count": s.count}
                for k, s in sorted(self.generation.items())
            ],
            "retrieval": [
                {
                    "embedder": k.embedder_id,
                    "storage_kind": k.storage_kind,
                    "search_type": k.search_type,
                    "distance_metric": k.distance_metric,
                    "chunk_size": k.chunk_size,
                    "top_k": k.top_k,
                    "mean": s.mean,
                    "count": s.count,
                }
                for k, s in sorted(self.retrieval.items())
            ],
            "vram_max": dict(sorted(self.vram_max.items())),
        }


@dataclass(frozen=True)
class PruneReason:
    threshold: str
    historical_value: float
    limit: float


@dataclass(frozen=True)
class PruneDecision:
    action: str  # "run" | "skip"
    reasons: tuple[PruneReason, ...] = ()

    @property
    def skip(self) -> bool:
        return self.action == "skip"


def _combo_from_entry(entry: dict) -> CombinationSpec:
    return CombinationSpec(**entry["combination"])


def update_history(log_entries: list[dict]) -> HistoryStats:
    """Recompute stats from the chronological trial log (the log is authoritative).

    Entries need ``combination`` (axis payload), ``status``, and the latency /
    VRAM fields. Warm-up exclusion drops each key's first ok trial from
    latency means and each combination's first ok trial from the VRAM max;
    interrupted trials always count toward VRAM (they record the breach that
    must keep pruning the combination).
    """
    gen_values: dict[GenerationKey, list[float]] = {}
    ret_values: dict[RetrievalKey, list[float]] = {}
    vram_values: dict[str, list[int]] = {}
    vram_breaches: dict[str, int] = {}

    for entry in log_entries:
        combo = _combo_from_entry(entry)
        combo_id = entry.get("combination_id") or combo.combination_id
        status = entry.get("status", "ok")
        vram = entry.get("vram_max_bytes")
        if status == "interrupted":
            if vram is not None:
                vram_breaches[combo_id] = max(vram_breaches.get(combo_id, 0), int(vram))
            continue
        if status != "ok":
            continue
        gen_latency = entry.get("generation_latency_s")
        if gen_latency is not None:
            gen_values.setdefault(GenerationKey.of(combo), []).append(float(gen_latency))
        ret_latency = entry.get("retrieval_latency_s")
        if ret_latency is not None:
            ret_values.setdefault(RetrievalKey.of(combo), []).append(float(ret_latency))
        if vram is not None:
            vram_values.setdefault(combo_id, []).append(int(vram))

    stats = HistoryStats()
    for key, values in gen_values.items():
        post = values[1:]  # first trial is warm-up
        stats.generation[key] = KeyStats(
            mean=sum(post) / len(post) if post else None, count=len(post)
        )
    for key, values in ret_values.items():
        post = values[1:]
        stats.retrieval[key] = KeyStats(
            mean=sum(post) / len(post) if post else None, count=len(post)
        )
    for combo_id, values in vram_values.items():
        post = values[1:]
        if post:
            stats.vram_max[combo_id] = max(post)
    for combo_id, breach in vram_breaches.items():
        stats.vram_max[combo_id] = max(stats.vram_max.get(combo_id, 0), breach)
    return stats


def should_skip(combination: CombinationSpec, history: HistoryStats,
                thresholds: ThresholdSet) -> PruneDecision:
    """Skip iff some defined historical mean/max strictly exceeds its threshold."""
    reasons: list[PruneReason] = []

    gen_stats = history.generation.get(GenerationKey.of(combination))
    ret_stats = history.retrieval.get(RetrievalKey.of(combination))
    gen_mean = gen_stats.mean if gen_stats else None
    ret_mean = ret_stats.mean if ret_stats else None

    if thresholds.max_generation_latency_s is not None and gen_mean is not None:
        if gen_mean > thresholds.max_generation_latency_s:
            reasons.append(
                PruneReason("generation latency", gen_mean, thresholds.max_generation_latency_s)
            )
    if thresholds.max_retrieval_latency_s is not None and ret_mean is not None:
        if ret_mean > thresholds.max_retrieval_latency_s:
            reasons.append(
                PruneReason("retrieval latency", ret_mean, thresholds.max_retrieval_latency_s)
            )
    if thresholds.max_total_latency_s is not None and gen_mean is not None and ret_mean is not None:
        total = gen_mean + ret_mean
        if total > thresholds.max_total_latency_s:
            reasons.append(PruneReason("total latency", total, thresholds.max_total_latency_s))
    if thresholds.max_vram_bytes is not None:
        vram = history.vram_max.get(combination.combination_id)
        if vram is not None and vram > thresholds.max_vram_bytes:
            reasons.append(PruneReason("vram", float(vram), float(thresholds.max_vram_bytes)))

    if reasons:
        return PruneDecision(action="skip", reasons=tuple(reasons))
    return PruneDecision(action="run")


def check_vram_interrupt(current_sample_vram: int | None, max_vram: int | None) -> bool:
    """True iff an observed VRAM sample strictly exceeds the configured limit."""
    if max_vram is None or current_sample_vram is None:
        return False
    return current_sample_vram > max_vram


class HistoryLog:
    """Append-only per-trial history log plus a recomputable snapshot."""

    def __init__(self, log_path: str | Path, snapshot_path: str | Path | None = None):
        self.log_path = Path(log_path)
        self.snapshot_path = (
            Path(snapshot_path)
            if snapshot_path is not None
            else self.log_path.with_name("history_snapshot.json")
        )

    def read_entries(self) -> list[dict]:
        if not self.log_path.exists():
            return []
        entries = []
        with open(self.log_path, encoding="utf-8") as f:
            for line in f:
                line = line.strip()
                if line:
                    entries.append(json.loads(line))
        return entries

    def append(self, entry: dict) -> None:
        self.log_path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.log_path, "a", encoding="utf-8") as f:
            f.write(json.dumps(entry, ensure_ascii=False) + "\n")
            f.flush()

    def stats(self) -> HistoryStats:
        return update_history(self.read_entries())

    def write_snapshot(self) -> HistoryStats:
        stats = self.stats()
        payload = {"schema_version": 1, "stats": stats.to_payload()}
        self.snapshot_path.write_text(
            json.dumps(payload, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
        )
        return stats
