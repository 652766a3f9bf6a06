"""Independent brute-force reference implementations used as test oracles.

These deliberately avoid the package's own scoring/search code paths: plain
loops, no numpy vectorization, no shared helpers.
"""

import math


def cosine_oracle(x, y):
    dot = sum(a * b for a, b in zip(x, y))
    nx = math.sqrt(sum(a * a for a in x))
    ny = math.sqrt(sum(b * b for b in y))
    return dot / (nx * ny)


def euclidean_oracle(x, y):
    return math.sqrt(sum((a - b) ** 2 for a, b in zip(x, y)))


def inner_product_oracle(x, y):
    return sum(a * b for a, b in zip(x, y))


def knn_oracle(stored, query, metric, k):
    """Full-scan sort: stored is a list of (chunk_id, vector). Returns ranked ids."""
    scored = []
    for chunk_id, vec in stored:
        if metric == "cosine":
            s = cosine_oracle(query, vec)
        elif metric == "inner_product":
            s = inner_product_oracle(query, vec)
        elif metric == "euclidean":
            s = euclidean_oracle(query, vec)
        else:
            raise ValueError(metric)
        scored.append((chunk_id, s))
    reverse = metric != "euclidean"
    if reverse:
        scored.sort(key=lambda t: (-t[1], t[0]))
    else:
        scored.sort(key=lambda t: (t[1], t[0]))
    return scored[:k]


def context_precision_oracle(flags):
    total = sum(flags)
    if total == 0:
        return 0.0
    acc = 0.0
    seen = 0
    for k, flag in enumerate(flags, start=1):
        if flag:
            seen += 1
            acc += seen / k
    return acc / total


def recommender_oracle(values, directions, weights):
    """Direct triple-loop scoring.

    values: metric -> combination -> list of instance values (may be empty)
    directions: metric -> "high_is_better" | "low_is_better"
    weights: metric -> numeric weight
    Returns (composites dict, winner_id or None). Ties break on the smaller
    combination id string (callers map ids so that this matches axis order).
    """
    extremes = {}
    for metric, per_combo in values.items():
        cells = [v for vs in per_combo.values() for v in vs]
        if cells:
            extremes[metric] = (min(cells), max(cells))

    sums = {}
    counts = {}
    for metric, per_combo in values.items():
        if metric not in extremes:
            continue
        lo, hi = extremes[metric]
        for combo, vs in per_combo.items():
            for v in vs:
                if directions[metric] == "high_is_better":
                    s = weights[metric] * v
                elif hi == lo:
                    s = weights[metric] * 1.0
                else:
                    s = weights[metric] * (1.0 - (v - lo) / (hi - lo))
                sums[combo] = sums.get(combo, 0.0) + s
                counts[combo] = counts.get(combo, 0) + 1

    composites = {c: sums[c] / counts[c] for c in sums}
    if not composites:
        return composites, None
    winner = min(composites, key=lambda c: (-composites[c], c))
    return composites, winner


def bm25_oracle(docs, query, k1=1.2, b=0.75):
    """docs: list of (chunk_id, text). Returns {chunk_id: score > 0}."""
    import re

    def tok(t):
        return re.findall(r"[a-z0-9]+", t.lower())

    toks = {cid: tok(text) for cid, text in docs}
    n = len(docs)
    avgdl = sum(len(t) for t in toks.values()) / n
    q = tok(query)
    scores = {}
    for cid, _ in docs:
        dl = len(toks[cid])
        s = 0.0
        for term in q:
            tf = toks[cid].count(term)
            df = sum(1 for t in toks.values() if term in t)
            if tf == 0 or df == 0:
                continue
            idf = math.log(1.0 + (n - df + 0.5) / (df + 0.5))
            s += idf * tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * dl / avgdl))
        if s > 0.0:
            scores[cid] = s
    return scores
