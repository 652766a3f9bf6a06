import itertools

import pytest

from ragebench.config import CombinationSpec, ThresholdSet
from ragebench.pruning import (
    GenerationKey,
    HistoryLog,
    RetrievalKey,
    check_vram_interrupt,
    should_skip,
    update_history,
)

GB = 1024**3


def combo(llm="llm-a", embedder="emb-a", **kw):
    defaults = dict(
        llm=llm,
        embedder=embedder,
        storage_kind="memory_library",
        search_type="similarity",
        distance_metric="cosine",
        rerank=False,
        chunk_size=256,
        chunk_overlap=32,
        top_k=4,
    )
    defaults.update(kw)
    return CombinationSpec(**defaults)


def entry(c, gen=None, ret=None, vram=None, status="ok"):
    e = {"combination": c.to_payload(), "status": status}
    if gen is not None:
        e["generation_latency_s"] = gen
    if ret is not None:
        e["retrieval_latency_s"] = ret
    if vram is not None:
        e["vram_max_bytes"] = vram
    return e


class TestKeys:
    def test_generation_key_fields(self):
        c = combo()
        assert GenerationKey.of(c) == GenerationKey(llm_id="llm-a", embedder_id="emb-a")

    def test_retrieval_key_ignores_llm_and_overlap(self):
        a = combo(llm="x", chunk_overlap=8)
        b = combo(llm="y", chunk_overlap=16)
        assert RetrievalKey.of(a) == RetrievalKey.of(b)

    def test_retrieval_key_distinguishes_chunk_size(self):
        assert RetrievalKey.of(combo(chunk_size=128)) != RetrievalKey.of(combo(chunk_size=256))


class TestUpdateHistory:
    def test_warm_up_only_key_has_no_mean(self):
        stats = update_history([entry(combo(), gen=30.0)])
        key = GenerationKey.of(combo())
        assert stats.generation[key].mean is None
        assert stats.generation[key].count == 0

    def test_first_trial_excluded_from_mean(self):
        c = combo()
        stats = update_history([entry(c, gen=30.0), entry(c, gen=10.0), entry(c, gen=20.0)])
        assert stats.generation[GenerationKey.of(c)].mean == pytest.approx(15.0)
        assert stats.generation[GenerationKey.of(c)].count == 2

    def test_permuting_non_first_trials_keeps_mean(self):
        c = combo()
        a = update_history([entry(c, ret=5.0), entry(c, ret=1.0), entry(c, ret=3.0)])
        b = update_history([entry(c, ret=5.0), entry(c, ret=3.0), entry(c, ret=1.0)])
        key = RetrievalKey.of(c)
        assert a.retrieval[key].mean == b.retrieval[key].mean

    def test_interrupted_trials_always_count_toward_vram(self):
        c = combo()
        stats = update_history([entry(c, vram=9 * GB, status="interrupted")])
        assert stats.vram_max[c.combination_id] == 9 * GB

    def test_failed_trials_ignored(self):
        c = combo()
        stats = update_history([entry(c, gen=5.0, status="failed")])
        assert GenerationKey.of(c) not in stats.generation


class TestShouldSkip:
    def test_skip_with_reason(self):
        c = combo()
        stats = update_history([entry(c, gen=1.0), entry(c, gen=12.0)])
        decision = should_skip(c, stats, ThresholdSet(max_generation_latency_s=10.0))
        assert decision.skip
        reason = decision.reasons[0]
        assert reason.threshold == "generation latency"
        assert reason.historical_value == pytest.approx(12.0)
        assert reason.limit == 10.0

    def test_empty_history_runs(self):
        decision = should_skip(combo(), update_history([]), ThresholdSet(
            max_generation_latency_s=1.0, max_retrieval_latency_s=1.0,
            max_total_latency_s=1.0, max_vram_bytes=1,
        ))
        assert not decision.skip

    def test_boundary_is_strict(self):
        c = combo()
        stats = update_history([entry(c, gen=1.0), entry(c, gen=10.0)])
        assert not should_skip(c, stats, ThresholdSet(max_generation_latency_s=10.0)).skip

    def test_warm_up_only_never_skips(self):
        c = combo()
        stats = update_history([entry(c, gen=99.0, ret=99.0)])
        thresholds = ThresholdSet(
            max_generation_latency_s=1.0, max_retrieval_latency_s=1.0, max_total_latency_s=1.0
        )
        assert not should_skip(c, stats, thresholds).skip

    def test_vram_skip(self):
        c = combo()
        stats = update_history([entry(c, vram=9 * GB, status="interrupted")])
        assert should_skip(c, stats, ThresholdSet(max_vram_bytes=8 * GB)).skip

    def test_soundness_and_completeness_exhaustive(self):
        """skip iff some defined mean strictly exceeds its threshold."""
        c = combo()
        threshold = 10.0
        grid = [None, 5.0, 10.0, 15.0]
        for gen_mean, ret_mean in itertools.product(grid, grid):
            entries = []
            if gen_mean is not None:
                entries += [entry(c, gen=99.0), entry(c, gen=gen_mean)]
            if ret_mean is not None:
                entries += [entry(c, ret=99.0), entry(c, ret=ret_mean)]
            stats = update_history(entries)
            thresholds = ThresholdSet(
                max_generation_latency_s=threshold,
                max_retrieval_latency_s=threshold,
                max_total_latency_s=2 * threshold,
            )
            expect = (
                (gen_mean is not None and gen_mean > threshold)
                or (ret_mean is not None and ret_mean > threshold)
                or (
                    gen_mean is not None
                    and ret_mean is not None
                    and gen_mean + ret_mean > 2 * threshold
                )
            )
            decision = should_skip(c, stats, thresholds)
            assert decision.skip == expect, (gen_mean, ret_mean)
            if decision.skip:
                assert decision.reasons

    def test_fig_style_scenario_pairing_pruned(self):
        """Two embedders under one LLM; only the slow pairing's combinations skip."""
        slow = combo(embedder="emb-slow")
        fast = combo(embedder="emb-fast")
        entries = [
            entry(slow, gen=1.0), entry(slow, gen=25.0), entry(slow, gen=27.0),
            entry(fast, gen=1.0), entry(fast, gen=2.0), entry(fast, gen=3.0),
        ]
        stats = update_history(entries)
        thresholds = ThresholdSet(max_generation_latency_s=10.0)
        # Any combination sharing the slow (llm, embedder) pairing skips,
        # regardless of its other axes.
        assert should_skip(slow, stats, thresholds).skip
        assert should_skip(combo(embedder="emb-slow", top_k=8), stats, thresholds).skip
        assert should_skip(combo(embedder="emb-slow", search_type="hybrid"),
                           stats, thresholds).skip
        assert not should_skip(fast, stats, thresholds).skip
        assert not should_skip(combo(embedder="emb-fast", top_k=8), stats, thresholds).skip


class TestVramInterrupt:
    def test_hand_examples(self):
        assert check_vram_interrupt(int(9.1 * GB), 8 * GB)
        assert not check_vram_interrupt(int(7.9 * GB), 8 * GB)

    def test_unobservable_never_interrupts(self):
        assert not check_vram_interrupt(None, 8 * GB)
        assert not check_vram_interrupt(9 * GB, None)

    def test_boundary_strict(self):
        assert not check_vram_interrupt(8 * GB, 8 * GB)


class TestHistoryLog:
    def test_append_and_stats(self, tmp_path):
        log = HistoryLog(tmp_path / "history.jsonl")
        c = combo()
        log.append(entry(c, gen=4.0))
        log.append(entry(c, gen=6.0))
        stats = log.stats()
        assert stats.generation[GenerationKey.of(c)].mean == pytest.approx(6.0)

    def test_snapshot_recomputable_from_log(self, tmp_path):
        log = HistoryLog(tmp_path / "history.jsonl")
        c = combo()
        log.append(entry(c, gen=4.0, ret=1.0))
        log.append(entry(c, gen=6.0, ret=2.0))
        snap_stats = log.write_snapshot()
        assert log.snapshot_path.exists()
        assert snap_stats.to_payload() == update_history(log.read_entries()).to_payload()

    def test_missing_log_is_empty(self, tmp_path):
        log = HistoryLog(tmp_path / "none.jsonl")
        assert log.read_entries() == []
        assert log.stats().generation == {}
