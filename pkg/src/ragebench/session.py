"""Session orchestration: enumerate, prune, execute trials, aggregate, recommend.

One session runs at a time. Trials execute serially so latency means and
telemetry attribute to a single combination. Indexes are cached per
(datasets, chunk params, embedder, storage kind) and shared across
combinations that differ only in search type, rerank, k, or LLM. All
artifacts land under ``output_dir/<session_id>/``; the cross-session history
log lives at ``output_dir/history.jsonl``.
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from .chunking import ChunkingParams, split_document
from .config import (
    CombinationSpec,
    ExperimentConfig,
    enumerate_combinations,
    estimate_cost,
    serialize_config,
)
from .datasets import Corpus, QARecord, fixture_path, load_corpus, sample_corpus
from .embedding import HTTPEmbeddingProvider, ReferenceEmbedder
from .errors import NotFoundError, ProviderError, RageBenchError
from .generation import (
    DecodeParams,
    HTTPLLMProvider,
    MockEchoProvider,
    ScriptedProvider,
    build_prompt,
    generate,
)
from .judging import HeuristicJudge, MetricScores, score_trial
from .pruning import HistoryLog, check_vram_interrupt, should_skip
from .recommend import RecommendationReport, ScoreMatrix, descriptors_from_weights, recommend
from .retrieval import FallbackReranker, HTTPReranker, RetrievalSpec, retrieve
from .store import LexicalIndex, StoredChunk, open_index, upsert_chunks
from .telemetry import LatencyBreakdown, run_sampler, summarize_samples

HARDWARE_METRICS = ("retrieval_latency_s", "generation_latency_s", "vram_mean_bytes",
                    "tokens_per_second")


class ProviderRegistry:
    """Resolves model identifiers to provider objects.

    ``reference:<dim>`` embedders and ``mock-*`` LLMs are built in; anything
    else needs an endpoint in the config's providers map (keys ``embeddings``,
    ``llm``, ``reranker``).
    """

    def __init__(self, endpoints: dict[str, str] | None = None, embedders=None,
                 llms=None, judge=None, reranker=None):
        self.endpoints = endpoints or {}
        self._embedders = embedders or {}
        self._llms = llms or {}
        self._judge = judge
        self._reranker = reranker

    def embedder(self, model_id: str):
        if model_id in self._embedders:
            return self._embedders[model_id]
        if model_id.startswith("reference:"):
            provider = ReferenceEmbedder(int(model_id.split(":", 1)[1]))
        else:
            endpoint = self.endpoints.get("embeddings")
            if endpoint is None:
                raise ProviderError(f"no embeddings endpoint configured for {model_id!r}")
            provider = HTTPEmbeddingProvider(model_id, endpoint)
        self._embedders[model_id] = provider
        return provider

    def llm(self, model_id: str):
        if model_id in self._llms:
            return self._llms[model_id]
        if model_id == "mock-echo":
            provider = MockEchoProvider()
        elif model_id == "mock-scripted":
            provider = ScriptedProvider({})
        else:
            endpoint = self.endpoints.get("llm")
            if endpoint is None:
                raise ProviderError(f"no llm endpoint configured for {model_id!r}")
            provider = HTTPLLMProvider(model_id, endpoint)
        self._llms[model_id] = provider
        return provider

    @property
    def judge(self):
        if self._judge is None:
            self._judge = HeuristicJudge()
        return self._judge

    @property
    def reranker(self):
        if self._reranker is None:
            endpoint = self.endpoints.get("reranker")
            self._reranker = (
                HTTPReranker("reranker", endpoint) if endpoint else FallbackReranker()
            )
        return self._reranker


@dataclass
class TrialRecord:
    session_id: str
    combination_id: str
    instance: int
    question: str
    ground_truth: str
    retrieved: list[dict]  # {chunk_id, score, provenance}
    answer: str
    metrics: MetricScores
    latency: LatencyBreakdown
    telemetry: dict | None
    tokens_generated: int
    tokens_per_second: float
    status: str  # "ok" | "failed" | "interrupted"
    warnings: list[str] = field(default_factory=list)
    breach_reason: str | None = None

    def to_payload(self) -> dict:
        return {
            "session_id": self.session_id,
            "combination_id": self.combination_id,
            "instance": self.instance,
            "question": self.question,
            "ground_truth": self.ground_truth,
            "retrieved": self.retrieved,
            "answer": self.answer,
            "metrics": self.metrics.to_payload(),
            "latency": self.latency.to_payload(),
            "telemetry": self.telemetry,
            "tokens_generated": self.tokens_generated,
            "tokens_per_second": self.tokens_per_second,
            "status": self.status,
            "warnings": self.warnings,
            "breach_reason": self.breach_reason,
        }


@dataclass
class SessionState:
    session_id: str
    config: ExperimentConfig
    phase: str = "planning"  # planning|indexing|running|aggregating|done|aborted
    planned: list[str] = field(default_factory=list)
    skipped: dict[str, list[dict]] = field(default_factory=dict)
    completed: list[str] = field(default_factory=list)
    failed: list[str] = field(default_factory=list)
    interrupted: list[str] = field(default_factory=list)
    progress: dict[str, tuple[int, int]] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)
    recommendation: RecommendationReport | None = None
    output_dir: Path | None = None
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def snapshot(self) -> dict:
        with self.lock:
            return {
                "session_id": self.session_id,
                "phase": self.phase,
                "planned": list(self.planned),
                "skipped": {cid: list(reasons) for cid, reasons in self.skipped.items()},
                "completed": list(self.completed),
                "failed": list(self.failed),
                "interrupted": list(self.interrupted),
                "progress": {cid: {"done": d, "total": t} for cid, (d, t) in self.progress.items()},
                "warnings": list(self.warnings),
            }


def _resolve_dataset_path(ref) -> Path:
    if ref.path is not None:
        return Path(ref.path)
    return fixture_path(ref.name)


def load_instances(config: ExperimentConfig) -> list[QARecord]:
    """Load and sample every configured dataset; concatenation in config order."""
    records: list[QARecord] = []
    for ref in config.datasets:
        corpus = load_corpus(_resolve_dataset_path(ref), format=ref.format, name=ref.name)
        if config.sample_size != "all":
            corpus = sample_corpus(corpus, config.sample_size, config.random_seed)
        records.extend(corpus.records)
    return records


class _IndexCache:
    """Builds chunk indexes once per (chunk params, embedder, storage kind)."""

    def __init__(self, instances: list[QARecord], providers: ProviderRegistry,
                 session_dir: Path):
        self.instances = instances
        self.providers = providers
        self.session_dir = session_dir
        self._vector: dict[tuple, object] = {}
        self._lexical: dict[tuple, LexicalIndex] = {}
        self._chunks: dict[tuple, list] = {}

    def _chunk_key(self, combo: CombinationSpec) -> tuple:
        return (combo.chunk_size, combo.chunk_overlap)

    def chunks(self, combo: CombinationSpec) -> list:
        key = self._chunk_key(combo)
        if key not in self._chunks:
            params = ChunkingParams(combo.chunk_size, combo.chunk_overlap)
            chunks = []
            for record in self.instances:
                chunks.extend(split_document(record.context, params, record.source_id))
            self._chunks[key] = chunks
        return self._chunks[key]

    def vector_index(self, combo: CombinationSpec):
        key = (*self._chunk_key(combo), combo.embedder, combo.storage_kind)
        if key in self._vector:
            return self._vector[key]
        embedder = self.providers.embedder(combo.embedder)
        chunks = self.chunks(combo)
        vectors = embedder.embed([c.text for c in chunks])
        dim = vectors[0].dim if vectors else getattr(embedder, "dim", 64)
        path = None
        if combo.storage_kind == "persistent_store":
            name = f"index_{combo.chunk_size}_{combo.chunk_overlap}_{combo.embedder}".replace(
                ":", "-").replace("/", "-")
            path = self.session_dir / f"{name}.rgvs"
        index = open_index(combo.storage_kind, dim, combo.distance_metric, path)
        upsert_chunks(index, [StoredChunk(chunk=c, vector=v) for c, v in zip(chunks, vectors)])
        self._vector[key] = index
        return index

    def lexical_index(self, combo: CombinationSpec) -> LexicalIndex:
        key = self._chunk_key(combo)
        if key not in self._lexical:
            index = LexicalIndex()
            for chunk in self.chunks(combo):
                index.add(chunk.chunk_id, chunk.text)
            self._lexical[key] = index
        return self._lexical[key]

    def close(self):
        for index in self._vector.values():
            index.close()


def _completed_pairs(trials_path: Path) -> set[tuple[str, int]]:
    done = set()
    if trials_path.exists():
        with open(trials_path, encoding="utf-8") as f:
            for line in f:
                line = line.strip()
                if not line:
                    continue
                record = json.loads(line)
                if record.get("status") in ("ok", "failed"):
                    done.add((record["combination_id"], record["instance"]))
    return done


def run_session(config: ExperimentConfig, providers: ProviderRegistry | None = None,
                session_id: str | None = None, sampler_factory=None,
                state: SessionState | None = None) -> SessionState:
    """Execute a full benchmark session and persist every artifact.

    Resumable: re-running with the same session id skips (combination,
    instance) pairs already present in the trial log.
    """
    providers = providers or ProviderRegistry(endpoints=dict(config.provider_endpoints))
    session_id = session_id or uuid.uuid4().hex[:12]
    sampler_factory = sampler_factory or run_sampler

    output_root = Path(config.output_dir)
    session_dir = output_root / session_id
    session_dir.mkdir(parents=True, exist_ok=True)
    trials_path = session_dir / "trials.jsonl"
    telemetry_path = session_dir / "telemetry.jsonl"
    history = HistoryLog(output_root / "history.jsonl")

    if state is None:
        state = SessionState(session_id=session_id, config=config)
    state.output_dir = session_dir
    (session_dir / "config.snapshot.json").write_text(serialize_config(config), encoding="utf-8")

    combos = enumerate_combinations(config.grid)
    specs = {c.combination_id: c for c in combos}
    history_stats = history.stats()

    with state.lock:
        state.planned = [c.combination_id for c in combos]
        state.phase = "planning"

    decisions = {}
    for combo in combos:
        decision = should_skip(combo, history_stats, config.thresholds)
        decisions[combo.combination_id] = decision
        if decision.skip:
            with state.lock:
                state.skipped[combo.combination_id] = [
                    {"threshold": r.threshold, "historical_value": r.historical_value,
                     "limit": r.limit}
                    for r in decision.reasons
                ]

    instances = load_instances(config)
    n_instances = len(instances)
    done_pairs = _completed_pairs(trials_path)

    cache = _IndexCache(instances, providers, session_dir)
    matrix = ScoreMatrix()
    undefined_cells: dict[str, int] = {}
    telemetry_file = open(telemetry_path, "a", encoding="utf-8")
    settings = dict(config.settings)
    decode_params = DecodeParams(
        temperature=float(settings["temperature"]), top_k=int(settings["top_k_decode"])
    )

    def telemetry_sink(sample):
        telemetry_file.write(json.dumps(sample.to_payload()) + "\n")

    def append_trial(record: TrialRecord):
        with open(trials_path, "a", encoding="utf-8") as f:
            f.write(json.dumps(record.to_payload(), ensure_ascii=False) + "\n")
            f.flush()

    def record_matrix(record: TrialRecord):
        if record.status != "ok":
            return
        cid, k = record.combination_id, record.instance
        for metric_id, value in record.metrics.to_payload().items():
            if value is None:
                undefined_cells[cid] = undefined_cells.get(cid, 0) + 1
            else:
                matrix.record(metric_id, cid, k, float(value))
        matrix.record("retrieval_latency_s", cid, k, record.latency.retrieval_latency_s)
        matrix.record("generation_latency_s", cid, k, record.latency.generation_latency_s)
        matrix.record("tokens_per_second", cid, k, record.tokens_per_second)
        vram_mean = (record.telemetry or {}).get("vram_mean")
        if vram_mean is not None:
            matrix.record("vram_mean_bytes", cid, k, float(vram_mean))
        else:
            undefined_cells[cid] = undefined_cells.get(cid, 0) + 1

    try:
        for combo in combos:
            cid = combo.combination_id
            if decisions[cid].skip:
                continue
            with state.lock:
                state.phase = "indexing"
                state.progress[cid] = (0, n_instances)

            try:
                vector_index = cache.vector_index(combo)
                lexical = cache.lexical_index(combo) if combo.search_type == "hybrid" else None
            except RageBenchError as exc:
                with state.lock:
                    state.failed.append(cid)
                    state.warnings.append(f"indexing failed for {cid}: {exc}")
                continue

            embedder = providers.embedder(combo.embedder)
            llm = providers.llm(combo.llm)
            retrieval_spec = RetrievalSpec(
                search_type=combo.search_type,
                metric=combo.distance_metric,
                top_k=combo.top_k,
                rerank=combo.rerank,
                candidate_multiplier=int(settings["candidate_multiplier"]),
            )

            with state.lock:
                state.phase = "running"
            combo_interrupted = False
            combo_failed = 0

            for k, record_in in enumerate(instances):
                if (cid, k) in done_pairs:
                    with state.lock:
                        done, total = state.progress[cid]
                        state.progress[cid] = (done + 1, total)
                    continue

                breach: list[int] = []

                def on_sample(sample, _breach=breach):
                    if check_vram_interrupt(sample.vram_bytes_used,
                                            config.thresholds.max_vram_bytes):
                        _breach.append(sample.vram_bytes_used)

                sampler = sampler_factory(
                    period_ms=int(settings["telemetry_period_ms"]),
                    sink=telemetry_sink,
                    on_sample=on_sample,
                )
                trial_warnings = list(getattr(sampler, "warnings", []))
                t0 = time.perf_counter()
                status = "ok"
                answer = ""
                tokens = 0
                tps = 0.0
                gen_latency = 0.0
                ret_latency = 0.0
                retrieved_payload: list[dict] = []
                metrics = MetricScores(None, None, None, None, None)

                try:
                    context = retrieve(
                        vector_index, embedder, record_in.question, retrieval_spec,
                        lexical_index=lexical, reranker=providers.reranker,
                    )
                    ret_latency = context.retrieval_latency_s
                    trial_warnings.extend(context.warnings)
                    retrieved_payload = [
                        {"chunk_id": item.chunk_id, "score": item.score,
                         "provenance": item.provenance}
                        for item in context.items
                    ]
                    if not breach:
                        prompt = build_prompt(record_in.question, context)
                        gen = generate(llm, prompt, decode_params)
                        answer = gen.answer_text
                        tokens = gen.tokens_generated
                        tps = gen.tokens_per_second
                        gen_latency = gen.generation_latency_s
                        judge = providers.judge
                        if hasattr(judge, "for_trial"):
                            judge = judge.for_trial(f"{cid}:{k}")
                        metrics = score_trial(
                            question=record_in.question,
                            expected_output=record_in.answer,
                            answer=answer,
                            contexts=context.texts(),
                            judge=judge,
                            embedder=embedder,
                            n_potential_questions=int(settings["n_potential_questions"]),
                            answer_relevancy_operands=str(
                                settings["answer_relevancy_operands"]
                            ),
                        )
                except ProviderError as exc:
                    status = "failed"
                    trial_warnings.append(str(exc))
                finally:
                    samples = sampler.stop()

                total_latency = time.perf_counter() - t0
                summary = summarize_samples(samples).to_payload() if samples else None
                breach_reason = None
                if breach:
                    status = "interrupted"
                    breach_reason = (
                        f"vram {max(breach)} bytes exceeded threshold "
                        f"{config.thresholds.max_vram_bytes}"
                    )

                record = TrialRecord(
                    session_id=session_id,
                    combination_id=cid,
                    instance=k,
                    question=record_in.question,
                    ground_truth=record_in.answer,
                    retrieved=retrieved_payload,
                    answer=answer,
                    metrics=metrics,
                    latency=LatencyBreakdown(
                        retrieval_latency_s=ret_latency,
                        generation_latency_s=gen_latency,
                        total_latency_s=total_latency,
                        overhead_s=max(0.0, total_latency - ret_latency - gen_latency),
                    ),
                    telemetry=summary,
                    tokens_generated=tokens,
                    tokens_per_second=tps,
                    status=status,
                    warnings=trial_warnings,
                    breach_reason=breach_reason,
                )
                append_trial(record)
                record_matrix(record)

                vram_max = (summary or {}).get("vram_max")
                if breach:
                    vram_max = max(breach)
                history.append({
                    "combination": combo.to_payload(),
                    "combination_id": cid,
                    "status": status,
                    "generation_latency_s": gen_latency if status == "ok" else None,
                    "retrieval_latency_s": ret_latency if status == "ok" else None,
                    "vram_max_bytes": vram_max,
                })

                with state.lock:
                    done, total = state.progress[cid]
                    state.progress[cid] = (done + 1, total)
                if status == "failed":
                    combo_failed += 1
                if status == "interrupted":
                    combo_interrupted = True
                    break

            with state.lock:
                if combo_interrupted:
                    state.interrupted.append(cid)
                    state.skipped.setdefault(cid, []).append(
                        {"threshold": "vram", "historical_value": float(max(breach)),
                         "limit": float(config.thresholds.max_vram_bytes)}
                    )
                elif combo_failed == n_instances and n_instances > 0:
                    state.failed.append(cid)
                else:
                    state.completed.append(cid)

        with state.lock:
            state.phase = "aggregating"
        history.write_snapshot()

        # Rebuild the matrix from the authoritative trial log so resumed
        # sessions aggregate earlier trials too.
        matrix = ScoreMatrix()
        undefined_cells = {}
        for payload in read_trials(session_dir):
            if payload.get("status") != "ok":
                continue
            cid, k = payload["combination_id"], payload["instance"]
            for metric_id, value in payload["metrics"].items():
                if value is None:
                    undefined_cells[cid] = undefined_cells.get(cid, 0) + 1
                else:
                    matrix.record(metric_id, cid, k, float(value))
            matrix.record("retrieval_latency_s", cid, k,
                          payload["latency"]["retrieval_latency_s"])
            matrix.record("generation_latency_s", cid, k,
                          payload["latency"]["generation_latency_s"])
            matrix.record("tokens_per_second", cid, k, payload["tokens_per_second"])
            vram_mean = (payload.get("telemetry") or {}).get("vram_mean")
            if vram_mean is not None:
                matrix.record("vram_mean_bytes", cid, k, float(vram_mean))
            else:
                undefined_cells[cid] = undefined_cells.get(cid, 0) + 1

        descriptors = descriptors_from_weights(config.weights)
        matrix_payload = matrix.to_payload()
        (session_dir / "score_matrix.json").write_text(
            json.dumps(matrix_payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        if matrix.combination_ids():
            report = recommend(matrix, descriptors, specs, config=config,
                               undefined_cell_counts=undefined_cells)
            from .recommend import write_report

            write_report(report, session_dir / "recommendation.json")
            (session_dir / "best_config.json").write_text(
                json.dumps(report.emitted_config_payload, indent=2, sort_keys=True,
                           ensure_ascii=False) + "\n",
                encoding="utf-8",
            )
            with state.lock:
                state.recommendation = report
        else:
            with state.lock:
                state.warnings.append("no completed trials; no recommendation emitted")

        with state.lock:
            state.phase = "done"
    except Exception:
        with state.lock:
            state.phase = "aborted"
        raise
    finally:
        telemetry_file.close()
        cache.close()
    return state


def estimate_session(config: ExperimentConfig, per_line_seconds: float | None = None,
                     history: HistoryLog | None = None) -> float:
    """Projected runtime over the post-pruning combination count.

    The per-line figure comes from history means when available, otherwise
    from the caller (a calibration trial). Zero remaining combinations
    projects zero seconds.
    """
    history = history or HistoryLog(Path(config.output_dir) / "history.jsonl")
    stats = history.stats()
    combos = enumerate_combinations(config.grid)
    remaining = [c for c in combos if not should_skip(c, stats, config.thresholds).skip]
    if not remaining:
        return 0.0

    if per_line_seconds is None:
        means = [s.mean for s in stats.generation.values() if s.mean is not None]
        ret_means = [s.mean for s in stats.retrieval.values() if s.mean is not None]
        if not means and not ret_means:
            raise ValueError("no history available; supply per_line_seconds from calibration")
        per_line_seconds = (sum(means) / len(means) if means else 0.0) + (
            sum(ret_means) / len(ret_means) if ret_means else 0.0
        )

    n_instances = 0
    for ref in config.datasets:
        corpus = load_corpus(_resolve_dataset_path(ref), format=ref.format, name=ref.name)
        n_instances += (
            len(corpus) if config.sample_size == "all" else min(config.sample_size, len(corpus))
        )
    return estimate_cost(per_line_seconds, n_instances, len(remaining))


def read_trials(session_dir: str | Path) -> list[dict]:
    trials_path = Path(session_dir) / "trials.jsonl"
    if not trials_path.exists():
        raise NotFoundError(f"no trial log in {session_dir}")
    records = []
    with open(trials_path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if line:
                records.append(json.loads(line))
    return records


def export_results(session_dir: str | Path, sink_path: str | Path) -> int:
    """Re-emit every trial record, one JSON object per line; deterministic."""
    records = read_trials(session_dir)
    with open(sink_path, "w", encoding="utf-8") as f:
        for record in records:
            f.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")
    return len(records)
