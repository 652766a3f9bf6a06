import random

import pytest

from oracles import recommender_oracle
from ragebench.config import CombinationSpec, GridAxes, MetricWeights, enumerate_combinations
from ragebench.errors import RecommendationError
from ragebench.recommend import (
    MetricDescriptor,
    ScoreMatrix,
    best_combination,
    composite_scores,
    descriptors_from_weights,
    recommend,
    weighted_score,
)


def desc(metric_id="m", direction="high_is_better", weight=3, category="generation"):
    return MetricDescriptor(metric_id=metric_id, category=category,
                            direction=direction, weight=weight)


class TestDescriptors:
    def test_invalid_direction(self):
        with pytest.raises(ValueError):
            desc(direction="sideways")

    def test_negative_weight(self):
        with pytest.raises(ValueError):
            desc(weight=-1)

    def test_from_weights_covers_registry(self):
        descriptors = descriptors_from_weights(MetricWeights.from_mapping({}))
        ids = {d.metric_id for d in descriptors}
        assert "hallucination" in ids and "vram_mean_bytes" in ids
        assert len(descriptors) == 9
        by_id = {d.metric_id: d for d in descriptors}
        assert by_id["vram_mean_bytes"].direction == "low_is_better"
        assert by_id["tokens_per_second"].direction == "high_is_better"


class TestWeightedScore:
    def test_high_is_better(self):
        assert weighted_score(0.8, desc(weight=5), 0.0, 1.0) == pytest.approx(4.0)

    def test_low_is_better_hand_example(self):
        d = desc(direction="low_is_better", weight=3)
        assert weighted_score(200.0, d, 100.0, 300.0) == pytest.approx(1.5)

    def test_degenerate_extremes(self):
        d = desc(direction="low_is_better", weight=4)
        assert weighted_score(7.0, d, 7.0, 7.0) == pytest.approx(4.0)

    def test_value_outside_extremes_rejected(self):
        d = desc(direction="low_is_better", weight=1)
        with pytest.raises(ValueError):
            weighted_score(400.0, d, 100.0, 300.0)


class TestScoreMatrix:
    def test_record_and_extremes(self):
        m = ScoreMatrix()
        m.record("lat", "c1", 0, 5.0)
        m.record("lat", "c2", 0, 15.0)
        assert m.extremes("lat") == (5.0, 15.0)
        assert m.extremes("other") is None

    def test_round_trip_payload(self):
        m = ScoreMatrix()
        m.record("a", "c1", 0, 0.5)
        m.record("a", "c1", 1, 0.25)
        m.record("b", "c2", 0, 3.0)
        again = ScoreMatrix.from_payload(m.to_payload())
        assert again.to_payload() == m.to_payload()


def random_matrix(rng, n_combos, n_metrics, n_instances):
    combos = [f"c{j}" for j in range(n_combos)]
    metrics = [f"m{i}" for i in range(n_metrics)]
    directions = {m: rng.choice(["high_is_better", "low_is_better"]) for m in metrics}
    weights = {m: rng.choice([0, 1, 3, 5]) for m in metrics}
    values = {m: {} for m in metrics}
    matrix = ScoreMatrix()
    for m in metrics:
        for c in combos:
            cells = []
            for k in range(rng.randrange(0, n_instances + 1)):
                v = rng.uniform(0, 10)
                cells.append(v)
                matrix.record(m, c, k, v)
            values[m][c] = cells
    descriptors = [
        MetricDescriptor(metric_id=m, category="generation",
                         direction=directions[m], weight=weights[m])
        for m in metrics
    ]
    return matrix, descriptors, values, directions, weights


class TestCompositeAgainstOracle:
    def test_random_sessions(self):
        rng = random.Random(99)
        for _ in range(200):
            matrix, descriptors, values, directions, weights = random_matrix(
                rng, rng.randint(1, 5), rng.randint(1, 6), 10
            )
            composites, _ = composite_scores(matrix, descriptors)
            oracle_comps, _ = recommender_oracle(values, directions, weights)
            assert set(composites) == set(oracle_comps)
            for cid in composites:
                assert composites[cid] == pytest.approx(oracle_comps[cid], abs=1e-12)

    def test_combination_without_cells_excluded(self):
        m = ScoreMatrix()
        m.record("a", "c1", 0, 1.0)
        m.values.setdefault("a", {}).setdefault("c2", {})
        composites, excluded = composite_scores(m, [desc(metric_id="a")])
        assert "c1" in composites
        assert "c2" not in composites
        assert "c2" in excluded


def combos_by_id(n):
    grid = GridAxes(top_k=tuple(range(1, n + 1)))
    combos = enumerate_combinations(grid)
    return {c.combination_id: c for c in combos}


class TestBestCombination:
    def test_argmax(self):
        specs = combos_by_id(3)
        ids = sorted(specs, key=lambda cid: specs[cid].top_k)
        composites = {ids[0]: 1.0, ids[1]: 3.0, ids[2]: 2.0}
        report = best_combination(composites, specs)
        assert report.best_combination_id == ids[1]
        assert report.ranking[0] == ids[1]

    def test_tie_breaks_lexicographically_on_axes(self):
        specs = combos_by_id(3)
        composites = {cid: 1.0 for cid in specs}
        report = best_combination(composites, specs)
        assert report.best_combination.top_k == 1

    def test_empty_rejected(self):
        with pytest.raises(RecommendationError):
            best_combination({}, {})


class TestWeightScalingInvariance:
    def test_ranking_invariant_under_positive_scaling(self):
        rng = random.Random(123)
        for _ in range(200):
            matrix, descriptors, values, directions, weights = random_matrix(
                rng, rng.randint(2, 5), rng.randint(1, 6), 8
            )
            c = rng.uniform(0.01, 100.0)
            composites, _ = composite_scores(matrix, descriptors)
            if not composites:
                continue
            scaled_descriptors = [
                MetricDescriptor(metric_id=d.metric_id, category=d.category,
                                 direction=d.direction, weight=d.weight * c)
                for d in descriptors
            ]
            scaled_composites, _ = composite_scores(matrix, scaled_descriptors)
            order = sorted(composites, key=lambda cid: (-composites[cid], cid))
            scaled_order = sorted(scaled_composites,
                                  key=lambda cid: (-scaled_composites[cid], cid))
            assert order == scaled_order
            for cid in composites:
                assert scaled_composites[cid] == pytest.approx(
                    composites[cid] * c, rel=1e-12, abs=1e-12
                )


class TestRecommendReport:
    def test_emitted_config_is_singleton_grid(self, make_config):
        config = make_config(grid={"top_k": [2, 4], "chunk_sizes": [128, 256],
                                   "chunk_overlaps": [16]})
        combos = enumerate_combinations(config.grid)
        specs = {c.combination_id: c for c in combos}
        matrix = ScoreMatrix()
        for j, c in enumerate(combos):
            matrix.record("faithfulness", c.combination_id, 0, j / 10)
        descriptors = [desc(metric_id="faithfulness", weight=3)]
        report = recommend(matrix, descriptors, specs, config=config)
        grid = report.emitted_config_payload["grid"]
        for axis, values in grid.items():
            assert len(values) == 1, axis
        winner = report.best_combination
        assert grid["top_k"] == [winner.top_k]
        assert grid["chunk_sizes"] == [winner.chunk_size]

    def test_payload_shape(self):
        specs = combos_by_id(2)
        matrix = ScoreMatrix()
        for cid in specs:
            matrix.record("m", cid, 0, 0.5)
        report = recommend(matrix, [desc(metric_id="m")], specs)
        payload = report.to_payload()
        assert payload["schema_version"] == 1
        assert payload["best_combination_id"] in specs
        assert set(payload["composites"]) == set(specs)
        assert payload["contributions"]
