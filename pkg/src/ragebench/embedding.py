"""Embedding providers and similarity kernels.

Providers implement a single protocol: ``embed(texts) -> list of vectors``.
The deterministic reference embedder (hashed token bags, FNV-1a 64-bit,
L2-normalized) makes the whole pipeline testable without model servers.
All vectors are normalized at ingestion so inner-product search is
well-defined and the three metrics induce the same ranking.
"""

from __future__ import annotations

import re
import time
from dataclasses import dataclass

import numpy as np

from .errors import EmptyEmbeddingError, ProviderError
from .hashing import fnv1a_64_text

_TOKEN_RE = re.compile(r"[a-z0-9]+")


@dataclass(frozen=True)
class EmbeddingVector:
    values: tuple[float, ...]
    dim: int
    model_id: str

    def __post_init__(self):
        if len(self.values) != self.dim:
            raise ValueError("vector length does not match dim")

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.float64)


def tokenize(text: str) -> list[str]:
    """Lowercase, split on non-alphanumeric boundaries."""
    return _TOKEN_RE.findall(text.lower())


class ReferenceEmbedder:
    """Deterministic hashed bag-of-tokens embedder.

    Each token lands in bucket ``fnv1a_64(token) mod dim``; bucket counts are
    L2-normalized. Identical text always yields the identical vector.
    """

    def __init__(self, dim: int = 64):
        if dim < 2:
            raise ValueError("dim must be >= 2")
        self.dim = dim
        self.model_id = f"reference:{dim}"
        self.batch_size = 1024

    def embed_one(self, text: str) -> EmbeddingVector:
        tokens = tokenize(text)
        if not tokens:
            raise EmptyEmbeddingError(f"no alphanumeric tokens in {text!r}")
        counts = np.zeros(self.dim, dtype=np.float64)
        for token in tokens:
            counts[fnv1a_64_text(token) % self.dim] += 1.0
        counts /= np.linalg.norm(counts)
        return EmbeddingVector(values=tuple(counts.tolist()), dim=self.dim, model_id=self.model_id)

    def embed(self, texts: list[str]) -> list[EmbeddingVector]:
        return [self.embed_one(t) for t in texts]


def reference_embed(text: str, dim: int) -> EmbeddingVector:
    return ReferenceEmbedder(dim).embed_one(text)


class HTTPEmbeddingProvider:
    """Adapter for a model server exposing one embedding route.

    Request body: ``{"model": ..., "texts": [...]}``
    Response body: ``{"embeddings": [[...], ...]}``
    """

    def __init__(self, model_id: str, endpoint: str, batch_size: int = 64,
                 timeout_s: float = 30.0, retries: int = 2):
        self.model_id = model_id
        self.endpoint = endpoint
        self.batch_size = batch_size
        self.timeout_s = timeout_s
        self.retries = retries

    def embed(self, texts: list[str]) -> list[EmbeddingVector]:
        import requests

        vectors: list[EmbeddingVector] = []
        for i in range(0, len(texts), self.batch_size):
            batch = texts[i : i + self.batch_size]
            last_error = None
            for attempt in range(self.retries + 1):
                try:
                    response = requests.post(
                        self.endpoint,
                        json={"model": self.model_id, "texts": batch},
                        timeout=self.timeout_s,
                    )
                    response.raise_for_status()
                    rows = response.json()["embeddings"]
                    break
                except Exception as exc:  # noqa: BLE001 - transport boundary
                    last_error = exc
                    time.sleep(min(2**attempt * 0.1, 2.0))
            else:
                raise ProviderError(
                    f"embedding provider unreachable: {last_error}", retries=self.retries
                )
            dims = {len(row) for row in rows}
            if len(dims) != 1:
                raise ProviderError(f"dimension mismatch across batch: {sorted(dims)}")
            for row in rows:
                arr = np.asarray(row, dtype=np.float64)
                norm = np.linalg.norm(arr)
                if norm == 0 or not np.all(np.isfinite(arr)):
                    raise ProviderError("provider returned a degenerate vector")
                arr = arr / norm
                vectors.append(
                    EmbeddingVector(values=tuple(arr.tolist()), dim=len(row), model_id=self.model_id)
                )
        return vectors


def embed_texts(provider, texts: list[str]) -> list[EmbeddingVector]:
    """Embed texts in order through any provider; enforces batch consistency."""
    if not texts:
        raise ValueError("texts must be non-empty")
    for text in texts:
        if not text:
            raise ValueError("texts must each be non-empty")
    vectors = provider.embed(texts)
    if len(vectors) != len(texts):
        raise ProviderError("provider returned wrong number of vectors")
    dims = {v.dim for v in vectors}
    if len(dims) != 1:
        raise ProviderError(f"dimension mismatch across batch: {sorted(dims)}")
    return vectors


def _check_dims(x, y) -> tuple[np.ndarray, np.ndarray]:
    xa = x.as_array() if isinstance(x, EmbeddingVector) else np.asarray(x, dtype=np.float64)
    ya = y.as_array() if isinstance(y, EmbeddingVector) else np.asarray(y, dtype=np.float64)
    if xa.shape != ya.shape:
        raise ValueError(f"dimension mismatch: {xa.shape} vs {ya.shape}")
    return xa, ya


def cosine_similarity(x, y) -> float:
    xa, ya = _check_dims(x, y)
    nx, ny = np.linalg.norm(xa), np.linalg.norm(ya)
    if nx == 0 or ny == 0:
        raise ValueError("cosine similarity undefined for zero-norm vectors")
    return float(np.dot(xa, ya) / (nx * ny))


def euclidean_distance(x, y) -> float:
    xa, ya = _check_dims(x, y)
    return float(np.linalg.norm(xa - ya))


def inner_product(x, y) -> float:
    xa, ya = _check_dims(x, y)
    return float(np.dot(xa, ya))
