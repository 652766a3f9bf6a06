"""Independent hash-bag embedding reference: generates tests/data/embedding_golden.json.

Deliberately does NOT import the package. Re-implements the deterministic
reference embedding from first principles: lowercase, tokenize on
[a-z0-9]+, FNV-1a 64-bit hash each token into one of `dim` buckets, count,
then L2-normalize the bucket histogram.

Run from the repo root: python3 scripts/make_embedding_golden.py
"""

import json
import math
import re
from pathlib import Path

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
MASK = (1 << 64) - 1

SENTENCE = "retrieval augmented generation"
DIM = 64


def fnv1a(data: bytes) -> int:
    h = FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * FNV_PRIME) & MASK
    return h


def embed(text: str, dim: int) -> list[float]:
    buckets = [0.0] * dim
    for token in re.findall(r"[a-z0-9]+", text.lower()):
        buckets[fnv1a(token.encode("utf-8")) % dim] += 1.0
    norm = math.sqrt(sum(v * v for v in buckets))
    if norm == 0.0:
        raise ValueError("no tokens")
    return [v / norm for v in buckets]


def main():
    out = {"text": SENTENCE, "dim": DIM, "vector": embed(SENTENCE, DIM)}
    path = Path(__file__).resolve().parents[1] / "tests" / "data" / "embedding_golden.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(out, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
