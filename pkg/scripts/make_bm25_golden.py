"""Independent BM25 reference: generates tests/data/bm25_golden.json.

Deliberately does NOT import the package. Implements Okapi BM25 from the
textbook definition (k1=1.2, b=0.75, non-negative idf variant
ln(1 + (N - df + 0.5) / (df + 0.5))) so the committed scores serve as an
oracle for the package's lexical index.

Run from the repo root: python3 scripts/make_bm25_golden.py
"""

import json
import math
import re
from pathlib import Path

K1 = 1.2
B = 0.75

DOCS = [
    ("d00", "the quick brown fox jumps over the lazy dog"),
    ("d01", "a fast auburn fox leaped across a sleepy hound"),
    ("d02", "quick thinking saves the day for the quick fox"),
    ("d03", "dogs and foxes rarely share the same den"),
    ("d04", "the lazy dog sleeps all afternoon in the sun"),
    ("d05", "brown bears fish in the cold river every spring"),
    ("d06", "the river runs quick and cold past the old mill"),
    ("d07", "an old mill grinds grain for the whole village"),
    ("d08", "village dogs bark at the fox near the mill"),
    ("d09", "grain prices rose quickly after the dry summer"),
    ("d10", "summer rain finally reached the dry brown fields"),
    ("d11", "fields of wheat turn brown before the harvest"),
    ("d12", "the harvest festival brings the whole village together"),
    ("d13", "a quick brown sparrow darts over the wheat"),
    ("d14", "sparrows and foxes both visit the quiet farmyard"),
    ("d15", "the farmyard dog guards the gate at night"),
    ("d16", "night falls quickly over the quiet river valley"),
    ("d17", "the valley fox hunts mice under the autumn moon"),
    ("d18", "autumn winds scatter brown leaves across the lane"),
    ("d19", "the lane to the mill is muddy after rain"),
]

QUERIES = ["quick brown fox", "the lazy dog", "village mill", "rain"]


def tokenize(text):
    return re.findall(r"[a-z0-9]+", text.lower())


def bm25_scores(docs, query):
    toks = {cid: tokenize(text) for cid, text in docs}
    n = len(docs)
    avgdl = sum(len(t) for t in toks.values()) / n
    q_tokens = tokenize(query)
    df = {}
    for term in set(q_tokens):
        df[term] = sum(1 for t in toks.values() if term in t)
    scores = {}
    for cid, _ in docs:
        dl = len(toks[cid])
        s = 0.0
        for term in q_tokens:
            tf = toks[cid].count(term)
            if tf == 0 or df[term] == 0:
                continue
            idf = math.log(1.0 + (n - df[term] + 0.5) / (df[term] + 0.5))
            s += idf * tf * (K1 + 1.0) / (tf + K1 * (1.0 - B + B * dl / avgdl))
        if s > 0.0:
            scores[cid] = s
    return scores


def main():
    out = {
        "k1": K1,
        "b": B,
        "documents": [{"chunk_id": cid, "text": text} for cid, text in DOCS],
        "queries": [
            {"query": q, "scores": dict(sorted(bm25_scores(DOCS, q).items()))}
            for q in QUERIES
        ],
    }
    path = Path(__file__).resolve().parents[1] / "tests" / "data" / "bm25_golden.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(out, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
