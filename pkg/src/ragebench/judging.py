"""Judge-verdict-driven quality metrics.

The five scores are pure functions of verdict vectors; judges (scripted
fixtures, the deterministic heuristic, or an HTTP model) only supply the
verdicts. Scores are in [0, 1] whenever defined; undefined cases raise
UndefinedMetricError and are recorded as null in trial records.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .embedding import cosine_similarity, tokenize
from .errors import UndefinedMetricError

_SENTENCE_SPLIT = re.compile(r"(?<=[.?!])\s+")


@dataclass(frozen=True)
class JudgeVerdicts:
    contradicted_flags: tuple[bool, ...]
    claim_support_flags: tuple[bool, ...]
    relevance_flags: tuple[bool, ...]  # retrieval rank order
    attributable_flags: tuple[bool, ...]
    potential_questions: tuple[str, ...]


@dataclass
class MetricScores:
    hallucination: float | None
    faithfulness: float | None
    answer_relevancy: float | None
    context_precision: float | None
    context_recall: float | None

    def to_payload(self) -> dict:
        return {
            "hallucination": self.hallucination,
            "faithfulness": self.faithfulness,
            "answer_relevancy": self.answer_relevancy,
            "context_precision": self.context_precision,
            "context_recall": self.context_recall,
        }


def decompose_answer(answer_text: str) -> list[str]:
    """Sentence segmentation on [.?!] followed by whitespace."""
    if not answer_text.strip():
        raise ValueError("answer text must be non-empty")
    parts = [p.strip() for p in _SENTENCE_SPLIT.split(answer_text.strip())]
    return [p for p in parts if p]


def hallucination_score(contradicted_flags: list[bool]) -> float:
    """1 - contradicted/total; higher means fewer contradicted contexts."""
    if not contradicted_flags:
        raise UndefinedMetricError("hallucination undefined with zero contexts")
    return 1.0 - sum(contradicted_flags) / len(contradicted_flags)


def faithfulness_score(claim_support_flags: list[bool]) -> float:
    if not claim_support_flags:
        raise UndefinedMetricError("faithfulness undefined with zero claims")
    return sum(claim_support_flags) / len(claim_support_flags)


def context_precision(relevance_flags: list[bool]) -> float:
    """Rank-weighted precision over the retrieved nodes.

    Sum over positions k of (relevant-up-to-k / k) for relevant nodes,
    divided by the total relevant count. Zero relevant nodes is pinned to 0.0.
    """
    if not relevance_flags:
        raise UndefinedMetricError("context precision undefined with zero nodes")
    total_relevant = sum(relevance_flags)
    if total_relevant == 0:
        return 0.0
    acc = 0.0
    seen_relevant = 0
    for k, flag in enumerate(relevance_flags, start=1):
        if flag:
            seen_relevant += 1
            acc += seen_relevant / k
    return acc / total_relevant


def context_recall(attributable_flags: list[bool]) -> float:
    if not attributable_flags:
        raise UndefinedMetricError("context recall undefined with zero statements")
    return sum(attributable_flags) / len(attributable_flags)


def answer_relevancy(question: str, answer: str, judge, embedder, n: int,
                     operands: str = "question") -> float:
    """Mean cosine between generated potential questions and the reference text.

    ``operands`` selects the comparison anchor: "question" compares against
    the original question (the estimator's intent); "answer" compares against
    the given answer. Clamped at 0 so the score shares the [0, 1] scale.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    potential = judge.potential_questions(question=question, answer=answer, n=n)
    if not potential:
        raise UndefinedMetricError("judge produced no potential questions")
    anchor_text = question if operands == "question" else answer
    try:
        anchor = embedder.embed([anchor_text])[0]
    except Exception as exc:
        raise UndefinedMetricError(f"could not embed anchor text: {exc}")
    total = 0.0
    for q in potential:
        try:
            total += cosine_similarity(anchor, embedder.embed([q])[0])
        except Exception:
            total += 0.0
    return max(0.0, total / len(potential))


class HeuristicJudge:
    """Deterministic token-overlap judge for offline end-to-end runs.

    Not a quality oracle; it exists so the metric pipeline and the
    orchestrator can run without a model server.
    """

    model_id = "heuristic-judge"

    @staticmethod
    def _overlap(a: str, b: str) -> float:
        ta, tb = set(tokenize(a)), set(tokenize(b))
        if not ta:
            return 0.0
        return len(ta & tb) / len(ta)

    def contradicted(self, contexts: list[str], expected_output: str) -> list[bool]:
        return [self._overlap(expected_output, c) == 0.0 for c in contexts]

    def claim_supported(self, claims: list[str], contexts: list[str]) -> list[bool]:
        joined = " ".join(contexts)
        return [self._overlap(claim, joined) >= 0.5 for claim in claims]

    def node_relevant(self, nodes: list[str], question: str, expected_output: str) -> list[bool]:
        reference = question + " " + expected_output
        return [self._overlap(node, reference) > 0.0 or self._overlap(reference, node) > 0.0
                for node in nodes]

    def statement_attributable(self, statements: list[str], contexts: list[str]) -> list[bool]:
        joined = " ".join(contexts)
        return [self._overlap(statement, joined) >= 0.5 for statement in statements]

    def potential_questions(self, question: str, answer: str, n: int) -> list[str]:
        base = " ".join(tokenize(answer)[:12]) or "unknown"
        return [f"what is {base}" for _ in range(n)]


class ScriptedJudge:
    """Fixture-driven judge keyed by (trial_id, task)."""

    model_id = "scripted-judge"

    def __init__(self, fixtures: dict):
        # fixtures: {trial_id: {task: verdicts}}
        self.fixtures = fixtures
        self.trial_id: str | None = None

    def for_trial(self, trial_id: str) -> "ScriptedJudge":
        clone = ScriptedJudge(self.fixtures)
        clone.trial_id = trial_id
        return clone

    def _lookup(self, task: str):
        try:
            return self.fixtures[self.trial_id][task]
        except KeyError:
            raise UndefinedMetricError(
                f"no scripted verdict for trial {self.trial_id!r}, task {task!r}"
            )

    def contradicted(self, contexts, expected_output):
        return list(self._lookup("contradiction"))[: len(contexts)]

    def claim_supported(self, claims, contexts):
        return list(self._lookup("claim_support"))[: len(claims)]

    def node_relevant(self, nodes, question, expected_output):
        return list(self._lookup("node_relevance"))[: len(nodes)]

    def statement_attributable(self, statements, contexts):
        return list(self._lookup("attribution"))[: len(statements)]

    def potential_questions(self, question, answer, n):
        return list(self._lookup("potential_questions"))[:n]


def score_trial(question: str, expected_output: str, answer: str, contexts: list[str],
                judge, embedder, n_potential_questions: int = 3,
                answer_relevancy_operands: str = "question") -> MetricScores:
    """Compute all five metrics for one trial; undefined metrics become None."""

    def guarded(fn):
        try:
            return fn()
        except UndefinedMetricError:
            return None

    contradicted = judge.contradicted(contexts, expected_output) if contexts else []
    hallucination = guarded(lambda: hallucination_score(contradicted))

    try:
        claims = decompose_answer(answer)
    except ValueError:
        claims = []
    supported = judge.claim_supported(claims, contexts) if claims else []
    faithfulness = guarded(lambda: faithfulness_score(supported))

    relevancy = guarded(
        lambda: answer_relevancy(
            question, answer, judge, embedder, n_potential_questions,
            operands=answer_relevancy_operands,
        )
    )

    relevant = judge.node_relevant(contexts, question, expected_output) if contexts else []
    precision = guarded(lambda: context_precision(relevant))

    try:
        statements = decompose_answer(expected_output)
    except ValueError:
        statements = []
    attributable = judge.statement_attributable(statements, contexts) if statements else []
    recall = guarded(lambda: context_recall(attributable))

    return MetricScores(
        hallucination=hallucination,
        faithfulness=faithfulness,
        answer_relevancy=relevancy,
        context_precision=precision,
        context_recall=recall,
    )
