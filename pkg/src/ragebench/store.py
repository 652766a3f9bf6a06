"""Chunk storage: in-memory vector library, persistent vector store, BM25 index.

The two vector index kinds share one contract; the difference is the CRUD
surface. The memory library is volatile and rejects single-item deletion
(rebuild only). The persistent store is a single-file append-log replayed on
open and compacted on close, durable across process restarts.
"""

from __future__ import annotations

import json
import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .chunking import Chunk
from .embedding import EmbeddingVector, tokenize
from .errors import IndexError_, NotFoundError, UnsupportedOperationError

_MAGIC = b"RGVS"
_VERSION = 1
_OP_UPSERT = 1
_OP_DELETE = 2


@dataclass(frozen=True)
class StoredChunk:
    chunk: Chunk
    vector: EmbeddingVector

    @property
    def chunk_id(self) -> str:
        return self.chunk.chunk_id


class _BaseVectorIndex:
    kind: str

    def __init__(self, dim: int, metric: str = "cosine"):
        self.dim = dim
        self.metric = metric
        self._chunks: dict[str, StoredChunk] = {}

    @property
    def count(self) -> int:
        return len(self._chunks)

    def get(self, chunk_id: str) -> StoredChunk:
        try:
            return self._chunks[chunk_id]
        except KeyError:
            raise NotFoundError(f"unknown chunk id {chunk_id!r}")

    def items(self) -> list[StoredChunk]:
        return list(self._chunks.values())

    def _validate_batch(self, stored_chunks: list[StoredChunk]) -> None:
        seen = set()
        for sc in stored_chunks:
            if sc.vector.dim != self.dim:
                raise IndexError_(
                    f"vector dim {sc.vector.dim} does not match index dim {self.dim}"
                )
            if sc.chunk_id in seen:
                raise IndexError_(f"duplicate chunk id {sc.chunk_id!r} within batch")
            seen.add(sc.chunk_id)

    def upsert(self, stored_chunks: list[StoredChunk]) -> int:
        self._validate_batch(stored_chunks)
        for sc in stored_chunks:
            self._chunks[sc.chunk_id] = sc
        return len(stored_chunks)

    def delete(self, chunk_id: str) -> None:
        raise NotImplementedError


class MemoryVectorIndex(_BaseVectorIndex):
    """Volatile in-memory vector library; no single-item deletion."""

    kind = "memory_library"

    def delete(self, chunk_id: str) -> None:
        raise UnsupportedOperationError(
            "memory_library does not support item deletion; rebuild the index"
        )

    def close(self) -> None:
        pass


class PersistentVectorIndex(_BaseVectorIndex):
    """Append-log backed store with full CRUD, durable after each upsert."""

    kind = "persistent_store"

    def __init__(self, path: str | Path, dim: int, metric: str = "cosine"):
        super().__init__(dim, metric)
        self.path = Path(path)
        if self.path.exists() and self.path.stat().st_size > 0:
            self._replay()
            self._file = open(self.path, "ab")
        else:
            self._file = open(self.path, "wb")
            self._file.write(_MAGIC + struct.pack("<B", _VERSION))
            self._file.flush()

    def _replay(self) -> None:
        with open(self.path, "rb") as f:
            header = f.read(5)
            if header[:4] != _MAGIC:
                raise IndexError_(f"{self.path} is not a vector store file")
            if header[4] != _VERSION:
                raise IndexError_(f"unsupported store version {header[4]}")
            while True:
                op = f.read(1)
                if not op:
                    break
                chunk_id = self._read_block(f).decode("utf-8")
                if op[0] == _OP_DELETE:
                    self._chunks.pop(chunk_id, None)
                    continue
                meta = json.loads(self._read_block(f).decode("utf-8"))
                (vec_dim,) = struct.unpack("<I", f.read(4))
                values = struct.unpack(f"<{vec_dim}f", f.read(4 * vec_dim))
                chunk = Chunk(
                    text=meta["text"],
                    source_id=meta["source_id"],
                    ordinal=meta["ordinal"],
                    char_start=meta["char_start"],
                    char_end=meta["char_end"],
                )
                vector = EmbeddingVector(
                    values=tuple(float(v) for v in values),
                    dim=vec_dim,
                    model_id=meta["model_id"],
                )
                self._chunks[chunk_id] = StoredChunk(chunk=chunk, vector=vector)

    @staticmethod
    def _read_block(f) -> bytes:
        (length,) = struct.unpack("<I", f.read(4))
        return f.read(length)

    @staticmethod
    def _block(data: bytes) -> bytes:
        return struct.pack("<I", len(data)) + data

    def _write_upsert(self, sc: StoredChunk) -> None:
        meta = {
            "text": sc.chunk.text,
            "source_id": sc.chunk.source_id,
            "ordinal": sc.chunk.ordinal,
            "char_start": sc.chunk.char_start,
            "char_end": sc.chunk.char_end,
            "model_id": sc.vector.model_id,
        }
        record = (
            struct.pack("<B", _OP_UPSERT)
            + self._block(sc.chunk_id.encode("utf-8"))
            + self._block(json.dumps(meta, ensure_ascii=False).encode("utf-8"))
            + struct.pack("<I", sc.vector.dim)
            + struct.pack(f"<{sc.vector.dim}f", *sc.vector.values)
        )
        self._file.write(record)

    def upsert(self, stored_chunks: list[StoredChunk]) -> int:
        self._validate_batch(stored_chunks)
        for sc in stored_chunks:
            self._chunks[sc.chunk_id] = sc
            self._write_upsert(sc)
        self._file.flush()
        return len(stored_chunks)

    def delete(self, chunk_id: str) -> None:
        if chunk_id not in self._chunks:
            raise NotFoundError(f"unknown chunk id {chunk_id!r}")
        del self._chunks[chunk_id]
        self._file.write(struct.pack("<B", _OP_DELETE) + self._block(chunk_id.encode("utf-8")))
        self._file.flush()

    def close(self) -> None:
        """Compact the log to only live records and close the file."""
        if self._file.closed:
            return
        self._file.close()
        tmp = self.path.with_suffix(self.path.suffix + ".compact")
        self._file = open(tmp, "wb")
        self._file.write(_MAGIC + struct.pack("<B", _VERSION))
        for sc in sorted(self._chunks.values(), key=lambda s: s.chunk_id):
            self._write_upsert(sc)
        self._file.flush()
        self._file.close()
        tmp.replace(self.path)


def open_index(kind: str, dim: int, metric: str = "cosine", path: str | Path | None = None):
    if kind == "memory_library":
        return MemoryVectorIndex(dim, metric)
    if kind == "persistent_store":
        if path is None:
            raise ValueError("persistent_store requires a path")
        return PersistentVectorIndex(path, dim, metric)
    raise ValueError(f"unknown storage kind {kind!r}")


def knn_search(index, query_vector: EmbeddingVector, k: int, metric: str | None = None
               ) -> list[tuple[str, float]]:
    """Exact brute-force k-NN over the full index; no approximation.

    Ranked by similarity descending (cosine, inner_product) or distance
    ascending (euclidean); ties broken by chunk_id ascending.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    metric = metric or index.metric
    items = index.items()
    if not items:
        return []
    ids = [sc.chunk_id for sc in items]
    matrix = np.asarray([sc.vector.values for sc in items], dtype=np.float64)
    q = query_vector.as_array()
    if q.shape[0] != matrix.shape[1]:
        raise IndexError_("query dimension does not match index")

    if metric == "cosine":
        norms = np.linalg.norm(matrix, axis=1) * np.linalg.norm(q)
        scores = matrix @ q / norms
        order = sorted(range(len(ids)), key=lambda i: (-scores[i], ids[i]))
    elif metric == "inner_product":
        scores = matrix @ q
        order = sorted(range(len(ids)), key=lambda i: (-scores[i], ids[i]))
    elif metric == "euclidean":
        scores = np.linalg.norm(matrix - q, axis=1)
        order = sorted(range(len(ids)), key=lambda i: (scores[i], ids[i]))
    else:
        raise ValueError(f"unknown metric {metric!r}")
    return [(ids[i], float(scores[i])) for i in order[: min(k, len(ids))]]


BM25_K1 = 1.2
BM25_B = 0.75


class LexicalIndex:
    """BM25 inverted index (k1=1.2, b=0.75, non-negative idf variant).

    Tokenizer: lowercase, split on non-alphanumeric; no stemming, no
    stopwords. Ties broken by chunk_id ascending.
    """

    def __init__(self):
        self._postings: dict[str, dict[str, int]] = {}
        self._doc_lengths: dict[str, int] = {}

    @property
    def count(self) -> int:
        return len(self._doc_lengths)

    def add(self, chunk_id: str, text: str) -> None:
        tokens = tokenize(text)
        self._doc_lengths[chunk_id] = len(tokens)
        for token in tokens:
            bucket = self._postings.setdefault(token, {})
            bucket[chunk_id] = bucket.get(chunk_id, 0) + 1

    def postings(self, token: str) -> list[tuple[str, int]]:
        return sorted(self._postings.get(token, {}).items())

    def search(self, query_text: str, k: int) -> list[tuple[str, float]]:
        if not query_text.strip():
            raise ValueError("query must be non-empty")
        n_docs = self.count
        if n_docs == 0:
            return []
        avgdl = sum(self._doc_lengths.values()) / n_docs
        scores: dict[str, float] = {}
        for token in tokenize(query_text):
            bucket = self._postings.get(token)
            if not bucket:
                continue
            df = len(bucket)
            idf = math.log(1.0 + (n_docs - df + 0.5) / (df + 0.5))
            for chunk_id, tf in bucket.items():
                dl = self._doc_lengths[chunk_id]
                denom = tf + BM25_K1 * (1.0 - BM25_B + BM25_B * dl / avgdl)
                scores[chunk_id] = scores.get(chunk_id, 0.0) + idf * tf * (BM25_K1 + 1.0) / denom
        ranked = sorted(scores.items(), key=lambda item: (-item[1], item[0]))
        return ranked[:k]


def lexical_search(lexical_index: LexicalIndex, query_text: str, k: int) -> list[tuple[str, float]]:
    return lexical_index.search(query_text, k)


def delete_chunk(index, chunk_id: str) -> None:
    index.delete(chunk_id)


def upsert_chunks(index, stored_chunks: list[StoredChunk]) -> int:
    return index.upsert(stored_chunks)
