"""Resource sampling during trials: CPU, RAM, and (when present) VRAM.

One sampler runs at a time, owned by the active trial, so usage attributes
to a single combination. Machines without a GPU downgrade gracefully: samples
simply lack the vram field and VRAM thresholds become unenforceable (with a
recorded warning), never an error.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field

import psutil

DEFAULT_PERIOD_MS = 100


def _probe_gpu():
    """Return a VRAM reader callable or None when no GPU API is available."""
    try:
        import pynvml  # type: ignore

        pynvml.nvmlInit()
        handle = pynvml.nvmlDeviceGetHandleByIndex(0)

        def read() -> int:
            info = pynvml.nvmlDeviceGetMemoryInfo(handle)
            return int(info.used)

        return read
    except Exception:
        return None


@dataclass(frozen=True)
class TelemetrySample:
    timestamp_monotonic_s: float
    cpu_percent: float
    process_rss_bytes: int
    system_ram_bytes_used: int
    vram_bytes_used: int | None = None

    def to_payload(self) -> dict:
        return {
            "timestamp_monotonic_s": self.timestamp_monotonic_s,
            "cpu_percent": self.cpu_percent,
            "process_rss_bytes": self.process_rss_bytes,
            "system_ram_bytes_used": self.system_ram_bytes_used,
            "vram_bytes_used": self.vram_bytes_used,
        }


@dataclass
class TelemetrySummary:
    sample_count: int
    cpu_percent_mean: float
    cpu_percent_max: float
    process_rss_mean: float
    process_rss_max: int
    system_ram_mean: float
    system_ram_max: int
    vram_mean: float | None
    vram_max: int | None
    vram_available: bool

    def to_payload(self) -> dict:
        return {
            "sample_count": self.sample_count,
            "cpu_percent_mean": self.cpu_percent_mean,
            "cpu_percent_max": self.cpu_percent_max,
            "process_rss_mean": self.process_rss_mean,
            "process_rss_max": self.process_rss_max,
            "system_ram_mean": self.system_ram_mean,
            "system_ram_max": self.system_ram_max,
            "vram_mean": self.vram_mean,
            "vram_max": self.vram_max,
            "vram_available": self.vram_available,
        }


@dataclass
class LatencyBreakdown:
    retrieval_latency_s: float
    generation_latency_s: float
    total_latency_s: float
    overhead_s: float = 0.0

    def to_payload(self) -> dict:
        return {
            "retrieval_latency_s": self.retrieval_latency_s,
            "generation_latency_s": self.generation_latency_s,
            "total_latency_s": self.total_latency_s,
            "overhead_s": self.overhead_s,
        }


def summarize_samples(samples: list[TelemetrySample]) -> TelemetrySummary:
    """Exact arithmetic mean and max per sampled field."""
    if not samples:
        raise ValueError("cannot summarize zero samples")
    cpu = [s.cpu_percent for s in samples]
    rss = [s.process_rss_bytes for s in samples]
    ram = [s.system_ram_bytes_used for s in samples]
    vram = [s.vram_bytes_used for s in samples if s.vram_bytes_used is not None]
    return TelemetrySummary(
        sample_count=len(samples),
        cpu_percent_mean=sum(cpu) / len(cpu),
        cpu_percent_max=max(cpu),
        process_rss_mean=sum(rss) / len(rss),
        process_rss_max=max(rss),
        system_ram_mean=sum(ram) / len(ram),
        system_ram_max=max(ram),
        vram_mean=sum(vram) / len(vram) if vram else None,
        vram_max=max(vram) if vram else None,
        vram_available=bool(vram),
    )


class SamplerHandle:
    def __init__(self, thread: threading.Thread, stop_event: threading.Event,
                 samples: list[TelemetrySample], warnings: list[str]):
        self._thread = thread
        self._stop_event = stop_event
        self.samples = samples
        self.warnings = warnings

    def stop(self) -> list[TelemetrySample]:
        """Stop sampling and flush; idempotent."""
        if not self._stop_event.is_set():
            self._stop_event.set()
            self._thread.join()
        return self.samples


def run_sampler(period_ms: int = DEFAULT_PERIOD_MS, sink=None, on_sample=None) -> SamplerHandle:
    """Start a background sampler emitting one sample per period until stopped.

    ``sink`` receives each sample (e.g. an append-only file writer);
    ``on_sample`` is a callback used for in-run threshold checks.
    """
    if period_ms < 10:
        raise ValueError("period must be >= 10 ms")
    warnings: list[str] = []
    vram_reader = _probe_gpu()
    if vram_reader is None:
        warnings.append("vram-unavailable: no GPU management API; VRAM thresholds unenforceable")
    process = psutil.Process()
    samples: list[TelemetrySample] = []
    stop_event = threading.Event()

    def loop():
        process.cpu_percent(None)  # prime the percent counter
        while not stop_event.is_set():
            stop_event.wait(period_ms / 1000.0)
            vram = None
            if vram_reader is not None:
                try:
                    vram = vram_reader()
                except Exception:
                    vram = None
            sample = TelemetrySample(
                timestamp_monotonic_s=time.monotonic(),
                cpu_percent=process.cpu_percent(None),
                process_rss_bytes=process.memory_info().rss,
                system_ram_bytes_used=psutil.virtual_memory().used,
                vram_bytes_used=vram,
            )
            samples.append(sample)
            if sink is not None:
                sink(sample)
            if on_sample is not None:
                on_sample(sample)

    thread = threading.Thread(target=loop, name="ragebench-telemetry", daemon=True)
    thread.start()
    return SamplerHandle(thread, stop_event, samples, warnings)


class FakeSampler:
    """Test double with the SamplerHandle surface, fed scripted samples."""

    def __init__(self, scripted: list[TelemetrySample], warnings: list[str] | None = None,
                 on_sample=None):
        self.samples = list(scripted)
        self.warnings = warnings or []
        if on_sample is not None:
            for sample in self.samples:
                on_sample(sample)

    def stop(self) -> list[TelemetrySample]:
        return self.samples
