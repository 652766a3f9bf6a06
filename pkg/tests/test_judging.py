import itertools

import pytest
from hypothesis import given, settings, strategies as st

from oracles import context_precision_oracle
from ragebench.embedding import ReferenceEmbedder
from ragebench.errors import UndefinedMetricError
from ragebench.judging import (
    HeuristicJudge,
    ScriptedJudge,
    answer_relevancy,
    context_precision,
    context_recall,
    decompose_answer,
    faithfulness_score,
    hallucination_score,
    score_trial,
)

flag_lists = st.lists(st.booleans(), min_size=1, max_size=12)


class TestHallucination:
    def test_hand_examples(self):
        assert hallucination_score([False] * 4) == 1.0
        assert hallucination_score([True] * 4) == 0.0
        assert hallucination_score([True, False, False, False]) == pytest.approx(0.75, abs=1e-9)

    def test_zero_contexts_undefined(self):
        with pytest.raises(UndefinedMetricError):
            hallucination_score([])


class TestFaithfulness:
    def test_hand_examples(self):
        assert faithfulness_score([True] * 3) == 1.0
        assert faithfulness_score([False] * 3) == 0.0
        assert faithfulness_score([True, True, True, False]) == pytest.approx(0.75, abs=1e-9)

    def test_zero_claims_undefined(self):
        with pytest.raises(UndefinedMetricError):
            faithfulness_score([])

    @settings(deadline=None)
    @given(flag_lists)
    def test_permutation_invariant(self, flags):
        assert faithfulness_score(flags) == faithfulness_score(list(reversed(flags)))


class TestContextPrecision:
    def test_hand_examples(self):
        assert context_precision([True, True, True]) == 1.0
        assert context_precision([False, False, False]) == 0.0
        assert context_precision([True, False, True]) == pytest.approx(
            (1 / 1 + 2 / 3) / 2, abs=1e-9
        )
        assert context_precision([True, False, True]) == pytest.approx(0.83333, abs=1e-5)

    def test_zero_nodes_undefined(self):
        with pytest.raises(UndefinedMetricError):
            context_precision([])

    def test_rank_sensitive_witness(self):
        assert context_precision([True, False]) != context_precision([False, True])

    def test_earlier_relevance_never_hurts_exhaustive(self):
        for length in range(0, 8):
            for suffix in itertools.product([False, True], repeat=length):
                high = context_precision([True, *suffix])
                low = context_precision([False, *suffix])
                assert high >= low

    def test_matches_direct_evaluator_exhaustive(self):
        for length in range(1, 9):
            for flags in itertools.product([False, True], repeat=length):
                assert context_precision(list(flags)) == pytest.approx(
                    context_precision_oracle(flags), abs=1e-12
                )


class TestContextRecall:
    def test_hand_examples(self):
        assert context_recall([True] * 4) == 1.0
        assert context_recall([False] * 5) == 0.0
        assert context_recall([True, True, False]) == pytest.approx(0.66667, abs=1e-5)

    def test_zero_statements_undefined(self):
        with pytest.raises(UndefinedMetricError):
            context_recall([])

    @settings(deadline=None)
    @given(flag_lists)
    def test_permutation_invariant(self, flags):
        assert context_recall(flags) == context_recall(list(reversed(flags)))


class ScriptedQuestionJudge:
    def __init__(self, questions):
        self._questions = questions

    def potential_questions(self, question, answer, n):
        return self._questions[:n]


class ScriptedEmbedder:
    """Maps exact texts to fixed vectors so cosines are controlled."""

    def __init__(self, table):
        self._table = table

    def embed(self, texts):
        from ragebench.embedding import EmbeddingVector

        return [
            EmbeddingVector(values=tuple(self._table[t]), dim=len(self._table[t]),
                            model_id="scripted")
            for t in texts
        ]


class TestAnswerRelevancy:
    def test_identical_questions_score_one(self):
        emb = ReferenceEmbedder(dim=32)
        judge = ScriptedQuestionJudge(["what is granite", "what is granite"])
        score = answer_relevancy("what is granite", "granite is rock", judge, emb, n=2)
        assert score == pytest.approx(1.0, abs=1e-6)

    def test_mocked_cosines_average(self):
        import math

        # anchor . q1 = 0.6, anchor . q2 = 0.8 on unit vectors.
        table = {
            "anchor": [1.0, 0.0],
            "q1": [0.6, math.sqrt(1 - 0.36)],
            "q2": [0.8, math.sqrt(1 - 0.64)],
        }
        judge = ScriptedQuestionJudge(["q1", "q2"])
        score = answer_relevancy("anchor", "answer", judge, ScriptedEmbedder(table), n=2)
        assert score == pytest.approx(0.7, abs=1e-9)

    def test_disjoint_tokens_clamped_to_zero(self):
        emb = ReferenceEmbedder(dim=64)
        # Tokens chosen so their hash buckets are disjoint from the anchor's.
        judge = ScriptedQuestionJudge(["zebra quark jolt"])
        score = answer_relevancy("what is granite", "a", judge, emb, n=1)
        assert score == 0.0

    def test_operand_switch_changes_anchor(self):
        import math

        table = {
            "the question": [1.0, 0.0],
            "the answer": [0.0, 1.0],
            "pq": [math.sqrt(0.5), math.sqrt(0.5)],
        }
        judge = ScriptedQuestionJudge(["pq"])
        emb = ScriptedEmbedder(table)
        q_score = answer_relevancy("the question", "the answer", judge, emb, n=1,
                                   operands="question")
        a_score = answer_relevancy("the question", "the answer", judge, emb, n=1,
                                   operands="answer")
        assert q_score == pytest.approx(a_score, abs=1e-9)  # symmetric fixture
        table["pq"] = [1.0, 0.0]
        assert answer_relevancy("the question", "the answer", judge, emb, n=1,
                                operands="question") == pytest.approx(1.0)
        assert answer_relevancy("the question", "the answer", judge, emb, n=1,
                                operands="answer") == pytest.approx(0.0)

    def test_no_questions_undefined(self):
        judge = ScriptedQuestionJudge([])
        with pytest.raises(UndefinedMetricError):
            answer_relevancy("q", "a", judge, ReferenceEmbedder(dim=16), n=1)


class TestDecompose:
    def test_two_sentences(self):
        assert decompose_answer("A. B.") == ["A.", "B."]

    def test_single_claim(self):
        assert decompose_answer("One sentence") == ["One sentence"]

    def test_golden_paragraph(self):
        paragraph = (
            "Granite forms slowly. Does it contain quartz? Yes! "
            "It is widely used in construction."
        )
        assert decompose_answer(paragraph) == [
            "Granite forms slowly.",
            "Does it contain quartz?",
            "Yes!",
            "It is widely used in construction.",
        ]

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            decompose_answer("   ")


class TestRanges:
    @settings(deadline=None)
    @given(flag_lists, flag_lists, flag_lists, flag_lists)
    def test_all_defined_scores_in_unit_interval(self, a, b, c, d):
        for score in (
            hallucination_score(a),
            faithfulness_score(b),
            context_precision(c),
            context_recall(d),
        ):
            assert 0.0 <= score <= 1.0


class TestScriptedJudge:
    FIXTURES = {
        "t1": {
            "contradiction": [False, True, False, False],
            "claim_support": [True, True, False],
            "node_relevance": [True, False, True],
            "attribution": [True, False],
            "potential_questions": ["what is granite", "define granite"],
        }
    }

    def test_scores_equal_direct_formula(self):
        judge = ScriptedJudge(self.FIXTURES).for_trial("t1")
        verdicts = self.FIXTURES["t1"]
        assert hallucination_score(judge.contradicted(["c"] * 4, "e")) == \
            hallucination_score(verdicts["contradiction"])
        assert faithfulness_score(judge.claim_supported(["x"] * 3, ["c"])) == \
            faithfulness_score(verdicts["claim_support"])
        assert context_precision(judge.node_relevant(["n"] * 3, "q", "e")) == \
            context_precision(verdicts["node_relevance"])
        assert context_recall(judge.statement_attributable(["s"] * 2, ["c"])) == \
            context_recall(verdicts["attribution"])


class TestScoreTrial:
    def test_full_trial_with_heuristic_judge(self):
        emb = ReferenceEmbedder(dim=64)
        scores = score_trial(
            question="What is granite?",
            expected_output="Granite is a coarse grained igneous rock.",
            answer="Granite is a coarse grained igneous rock.",
            contexts=["Granite is a coarse grained igneous rock formed from magma."],
            judge=HeuristicJudge(),
            embedder=emb,
            n_potential_questions=2,
        )
        payload = scores.to_payload()
        assert set(payload) == {
            "hallucination",
            "faithfulness",
            "answer_relevancy",
            "context_precision",
            "context_recall",
        }
        for value in payload.values():
            assert value is None or 0.0 <= value <= 1.0
        assert payload["hallucination"] == 1.0
        assert payload["faithfulness"] == 1.0
