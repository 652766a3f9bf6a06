"""Generate console test fixtures from the reference implementation.

Writes, under frontend/fixtures/:
  - parity_sessions.json: 50 sessions (score matrix + combination axis values
    + several weight scenarios each) with expected composites and winner
    computed by the service recommender, for the client-side re-weighting
    parity test.
  - radar_golden.json: one session's per-LLM radar series with the
    hallucination axis plotted as 1 - score.
  - progress_events.txt: a recorded progress event stream for the SSE
    parser and progress view-model tests.

Run from the repository root: python3 scripts/make_console_fixtures.py
"""

from __future__ import annotations

import json
import random
from pathlib import Path

import sys

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from ragebench.config import CombinationSpec  # noqa: E402
from ragebench.recommend import (  # noqa: E402
    MetricDescriptor,
    ScoreMatrix,
    composite_scores,
)

OUT_DIR = Path(__file__).resolve().parent.parent / "frontend" / "fixtures"

METRICS = [
    "hallucination",
    "faithfulness",
    "answer_relevancy",
    "context_precision",
    "context_recall",
]
DIRECTIONS = {
    "hallucination": "high_is_better",
    "faithfulness": "high_is_better",
    "answer_relevancy": "high_is_better",
    "context_precision": "high_is_better",
    "context_recall": "low_is_better",
}

LLMS = ["llama3.1:8b", "mistral:7b", "qwen2.5:7b"]
EMBEDDERS = ["reference:32", "reference:64"]


def random_spec(rng: random.Random) -> CombinationSpec:
    return CombinationSpec(
        llm=rng.choice(LLMS),
        embedder=rng.choice(EMBEDDERS),
        storage_kind=rng.choice(["memory_library", "persistent_store"]),
        search_type=rng.choice(["similarity", "hybrid"]),
        distance_metric=rng.choice(["cosine", "euclidean", "inner_product"]),
        rerank=rng.choice([False, True]),
        chunk_size=rng.choice([128, 256, 512]),
        chunk_overlap=rng.choice([0, 32]),
        top_k=rng.choice([1, 2, 4, 8]),
    )


def rank(composites: dict[str, float], specs: dict[str, CombinationSpec]) -> list[str]:
    return sorted(composites, key=lambda cid: (-composites[cid], specs[cid].axis_tuple()))


def make_session(rng: random.Random, tie: bool = False) -> dict:
    n_combos = rng.randint(2, 6)
    specs: dict[str, CombinationSpec] = {}
    while len(specs) < n_combos:
        spec = random_spec(rng)
        specs[spec.combination_id] = spec

    matrix = ScoreMatrix()
    ids = list(specs)
    for metric in METRICS:
        if tie:
            # Identical cell sequences make composites bitwise equal, so the
            # winner is decided purely by the axis-tuple tie-break.
            cells = [round(rng.uniform(0.0, 1.0), 6) for _ in range(3)]
            for cid in ids:
                for k, value in enumerate(cells):
                    matrix.record(metric, cid, k, value)
        else:
            for cid in ids:
                for k in range(rng.randint(1, 5)):
                    matrix.record(metric, cid, k, round(rng.uniform(0.0, 1.0), 6))

    scenarios = []
    weight_choices = [[0, 1, 3, 5], [1, 3, 5], [0, 5]]
    for choices in weight_choices:
        weights = {m: rng.choice(choices) for m in METRICS}
        descriptors = [
            MetricDescriptor(metric_id=m, category="generation",
                             direction=DIRECTIONS[m], weight=weights[m])
            for m in METRICS
        ]
        composites, excluded = composite_scores(matrix, descriptors)
        ranking = rank(composites, specs)
        scenarios.append({
            "weights": weights,
            "directions": DIRECTIONS,
            "expected_composites": {cid: composites[cid] for cid in sorted(composites)},
            "expected_ranking": ranking,
            "expected_winner": ranking[0],
            "expected_excluded": sorted(excluded),
        })

    return {
        "combinations": {cid: spec.to_payload() for cid, spec in specs.items()},
        "matrix": matrix.to_payload(),
        "scenarios": scenarios,
    }


def make_radar_golden(rng: random.Random) -> dict:
    """Per-LLM metric means with hallucination presented as 1 - score."""
    specs = [random_spec(rng) for _ in range(6)]
    matrix = ScoreMatrix()
    for spec in specs:
        for metric in METRICS:
            for k in range(4):
                matrix.record(metric, spec.combination_id, k,
                              round(rng.uniform(0.0, 1.0), 6))

    combos = {s.combination_id: s.to_payload() for s in specs}
    series = {}
    for llm in sorted({s.llm for s in specs}):
        axes = {}
        for metric in METRICS:
            cells = [
                v
                for cid, per_k in matrix.to_payload()[metric].items()
                if combos[cid]["llm"] == llm
                for v in per_k.values()
            ]
            mean = sum(cells) / len(cells)
            axes[metric] = (1.0 - mean) if metric == "hallucination" else mean
        series[llm] = axes

    return {
        "combinations": combos,
        "matrix": matrix.to_payload(),
        "expected_series": series,
        "reference_rings": {"High": 5, "Medium": 3, "Low": 1},
    }


def make_progress_events() -> str:
    frames = []
    snapshots = [
        {"phase": "running",
         "progress": {"a1": {"done": 1, "total": 3}, "b2": {"done": 0, "total": 3}},
         "skipped": {}, "warnings": []},
        {"phase": "running",
         "progress": {"a1": {"done": 3, "total": 3}, "b2": {"done": 1, "total": 3}},
         "skipped": {"c3": [{"threshold": "generation latency",
                             "mean": 12.5, "limit": 10.0}]},
         "warnings": []},
        {"phase": "running",
         "progress": {"a1": {"done": 3, "total": 3}, "b2": {"done": 3, "total": 3}},
         "skipped": {"c3": [{"threshold": "generation latency",
                             "mean": 12.5, "limit": 10.0}]},
         "warnings": []},
    ]
    for snap in snapshots:
        frames.append(f"event: progress\ndata: {json.dumps(snap)}\n\n")
    done = dict(snapshots[-1], phase="done")
    frames.append(f"event: done\ndata: {json.dumps(done)}\n\n")
    return "".join(frames)


def main() -> None:
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    rng = random.Random(42)
    sessions = [make_session(rng) for _ in range(48)]
    sessions += [make_session(rng, tie=True) for _ in range(2)]
    (OUT_DIR / "parity_sessions.json").write_text(
        json.dumps({"sessions": sessions}, indent=1, sort_keys=True) + "\n"
    )
    (OUT_DIR / "radar_golden.json").write_text(
        json.dumps(make_radar_golden(random.Random(7)), indent=1, sort_keys=True) + "\n"
    )
    (OUT_DIR / "progress_events.txt").write_text(make_progress_events())
    print(f"wrote fixtures to {OUT_DIR}")


if __name__ == "__main__":
    main()
