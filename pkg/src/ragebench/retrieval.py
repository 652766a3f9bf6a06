"""Similarity, hybrid, and reranked retrieval over a populated store."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .embedding import ReferenceEmbedder, cosine_similarity
from .errors import ProviderError
from .store import LexicalIndex, knn_search, lexical_search

RRF_CONSTANT = 60  # reciprocal rank fusion: score = sum 1/(60 + rank)


@dataclass(frozen=True)
class RetrievalSpec:
    search_type: str  # "similarity" | "hybrid"
    metric: str
    top_k: int
    rerank: bool = False
    candidate_multiplier: int = 5

    def __post_init__(self):
        if self.top_k < 1:
            raise ValueError("top_k must be >= 1")
        if self.candidate_multiplier < 1:
            raise ValueError("candidate_multiplier must be >= 1")


@dataclass(frozen=True)
class RetrievedItem:
    chunk_id: str
    text: str
    score: float
    provenance: str  # "dense" | "sparse" | "both"


@dataclass
class RetrievedContext:
    items: list[RetrievedItem]
    retrieval_latency_s: float
    warnings: list[str] = field(default_factory=list)

    def texts(self) -> list[str]:
        return [item.text for item in self.items]

    def chunk_ids(self) -> list[str]:
        return [item.chunk_id for item in self.items]


class FallbackReranker:
    """Deterministic reranker: cosine of reference embeddings of query/chunk."""

    model_id = "fallback-reference-reranker"

    def __init__(self, dim: int = 64):
        self._embedder = ReferenceEmbedder(dim)

    def score(self, query: str, documents: list[str]) -> list[float]:
        try:
            q = self._embedder.embed_one(query)
        except Exception:
            return [0.0] * len(documents)
        scores = []
        for doc in documents:
            try:
                scores.append(cosine_similarity(q, self._embedder.embed_one(doc)))
            except Exception:
                scores.append(0.0)
        return scores


class HTTPReranker:
    """Adapter for a reranker route: {query, documents[]} -> {scores[]}."""

    def __init__(self, model_id: str, endpoint: str, timeout_s: float = 30.0, retries: int = 2):
        self.model_id = model_id
        self.endpoint = endpoint
        self.timeout_s = timeout_s
        self.retries = retries

    def score(self, query: str, documents: list[str]) -> list[float]:
        import requests

        last_error = None
        for _ in range(self.retries + 1):
            try:
                response = requests.post(
                    self.endpoint,
                    json={"query": query, "documents": documents},
                    timeout=self.timeout_s,
                )
                response.raise_for_status()
                scores = response.json()["scores"]
                if len(scores) != len(documents):
                    raise ProviderError("reranker returned wrong number of scores")
                return [float(s) for s in scores]
            except ProviderError:
                raise
            except Exception as exc:  # noqa: BLE001 - transport boundary
                last_error = exc
        raise ProviderError(f"reranker unreachable: {last_error}", retries=self.retries)


def _embed_query(embedder, query_text: str):
    return embedder.embed([query_text])[0]


def similarity_retrieve(store, embedder, query_text: str, spec: RetrievalSpec) -> RetrievedContext:
    """Embed the query and run exact k-NN; latency covers embed + search."""
    start = time.perf_counter()
    query_vector = _embed_query(embedder, query_text)
    ranked = knn_search(store, query_vector, spec.top_k, spec.metric)
    latency = time.perf_counter() - start
    items = [
        RetrievedItem(chunk_id=cid, text=store.get(cid).chunk.text, score=score, provenance="dense")
        for cid, score in ranked
    ]
    return RetrievedContext(items=items, retrieval_latency_s=latency)


def hybrid_retrieve(store, embedder, query_text: str, spec: RetrievalSpec,
                    lexical_index: LexicalIndex) -> RetrievedContext:
    """Union of dense and sparse candidate pools fused by reciprocal rank.

    Each branch contributes its top (top_k x candidate_multiplier) ranking;
    fused score(d) = sum over branches of 1 / (RRF_CONSTANT + rank(d)),
    ranks 1-based. Ties broken by chunk_id ascending.
    """
    start = time.perf_counter()
    pool = spec.top_k * spec.candidate_multiplier
    query_vector = _embed_query(embedder, query_text)
    dense = knn_search(store, query_vector, pool, spec.metric)
    try:
        sparse = lexical_search(lexical_index, query_text, pool)
    except ValueError:
        sparse = []

    fused: dict[str, float] = {}
    provenance: dict[str, str] = {}
    for rank, (cid, _) in enumerate(dense, start=1):
        fused[cid] = fused.get(cid, 0.0) + 1.0 / (RRF_CONSTANT + rank)
        provenance[cid] = "dense"
    for rank, (cid, _) in enumerate(sparse, start=1):
        fused[cid] = fused.get(cid, 0.0) + 1.0 / (RRF_CONSTANT + rank)
        provenance[cid] = "both" if cid in provenance else "sparse"

    ranked = sorted(fused.items(), key=lambda item: (-item[1], item[0]))[: spec.top_k]
    latency = time.perf_counter() - start
    items = [
        RetrievedItem(chunk_id=cid, text=store.get(cid).chunk.text, score=score,
                      provenance=provenance[cid])
        for cid, score in ranked
    ]
    return RetrievedContext(items=items, retrieval_latency_s=latency)


def rerank(query_text: str, candidates: list[RetrievedItem], reranker) -> tuple[list[RetrievedItem], list[str]]:
    """Stable sort of candidates by reranker score, descending.

    Provider failure degrades to the input order with a recorded warning so
    the benchmark trial still completes.
    """
    if not candidates:
        raise ValueError("candidates must be non-empty")
    warnings: list[str] = []
    try:
        scores = reranker.score(query_text, [c.text for c in candidates])
    except ProviderError as exc:
        warnings.append(f"reranker failed, keeping retrieval order: {exc}")
        return list(candidates), warnings
    order = sorted(range(len(candidates)), key=lambda i: -scores[i])
    reranked = [
        RetrievedItem(
            chunk_id=candidates[i].chunk_id,
            text=candidates[i].text,
            score=scores[i],
            provenance=candidates[i].provenance,
        )
        for i in order
    ]
    return reranked, warnings


def retrieve(store, embedder, query_text: str, spec: RetrievalSpec,
             lexical_index: LexicalIndex | None = None, reranker=None) -> RetrievedContext:
    """Dispatch on search type, then optionally rerank the result."""
    if spec.search_type == "hybrid":
        if lexical_index is None:
            raise ValueError("hybrid retrieval requires a lexical index")
        context = hybrid_retrieve(store, embedder, query_text, spec, lexical_index)
    elif spec.search_type == "similarity":
        context = similarity_retrieve(store, embedder, query_text, spec)
    else:
        raise ValueError(f"unknown search type {spec.search_type!r}")

    if spec.rerank and context.items:
        start = time.perf_counter()
        context.items, warnings = rerank(query_text, context.items,
                                         reranker or FallbackReranker())
        context.retrieval_latency_s += time.perf_counter() - start
        context.warnings.extend(warnings)
    return context
