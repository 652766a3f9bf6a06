/** Chart view-models for the Result Analysis page.
 *
 * Each producer turns exported result payloads into plain data that a chart
 * library can render directly; nothing here needs a live session.
 */

import type { CombinationPayload, MatrixPayload } from "./types.js";

export const METRIC_AXES = [
  "hallucination",
  "faithfulness",
  "answer_relevancy",
  "context_precision",
  "context_recall",
] as const;

/** Weight levels drawn as continuous reference rings on the radar. */
export const REFERENCE_RINGS: Record<string, number> = {
  High: 5,
  Medium: 3,
  Low: 1,
};

export type RadarSeries = Record<string, Record<string, number>>;

/** Per-LLM metric means; hallucination is presented inverted (1 - score) so
 * every radar axis reads "larger is better". */
export function radarSeries(
  matrix: MatrixPayload,
  combinations: Record<string, CombinationPayload>,
): RadarSeries {
  const llms = [...new Set(Object.values(combinations).map((c) => c.llm))].sort();
  const series: RadarSeries = {};
  for (const llm of llms) {
    const axes: Record<string, number> = {};
    for (const metric of METRIC_AXES) {
      const cells: number[] = [];
      for (const [comboId, perInstance] of Object.entries(matrix[metric] ?? {})) {
        if (combinations[comboId]?.llm !== llm) continue;
        cells.push(...Object.values(perInstance));
      }
      if (cells.length === 0) continue;
      const mean = cells.reduce((s, v) => s + v, 0) / cells.length;
      axes[metric] = metric === "hallucination" ? 1.0 - mean : mean;
    }
    series[llm] = axes;
  }
  return series;
}

export interface LatencyBar {
  combinationId: string;
  generationLatencyS: number;
  retrievalLatencyS: number;
  vramMaxBytes: number | null;
  tokensPerSecond: number | null;
}

export interface LatencyChart {
  bars: LatencyBar[];
  /** Dashed line; always the configured threshold value, never derived. */
  vramThresholdLine: number | null;
}

export interface TrialRow {
  combination_id: string;
  latency: { generation_latency_s: number; retrieval_latency_s: number };
  telemetry: { vram_max_bytes: number | null };
  tokens_per_second: number | null;
}

export function latencyChart(
  rows: TrialRow[],
  vramThresholdBytes: number | null,
): LatencyChart {
  const grouped = new Map<string, TrialRow[]>();
  for (const row of rows) {
    const bucket = grouped.get(row.combination_id) ?? [];
    bucket.push(row);
    grouped.set(row.combination_id, bucket);
  }
  const bars: LatencyBar[] = [];
  for (const [comboId, trials] of [...grouped.entries()].sort()) {
    const mean = (xs: number[]) => xs.reduce((s, v) => s + v, 0) / xs.length;
    const vram = trials
      .map((t) => t.telemetry.vram_max_bytes)
      .filter((v): v is number => v !== null);
    const tps = trials
      .map((t) => t.tokens_per_second)
      .filter((v): v is number => v !== null);
    bars.push({
      combinationId: comboId,
      generationLatencyS: mean(trials.map((t) => t.latency.generation_latency_s)),
      retrievalLatencyS: mean(trials.map((t) => t.latency.retrieval_latency_s)),
      vramMaxBytes: vram.length ? Math.max(...vram) : null,
      tokensPerSecond: tps.length ? mean(tps) : null,
    });
  }
  return { bars, vramThresholdLine: vramThresholdBytes };
}

export interface TraceEvent {
  timestampS: number;
  model: string;
}

/** Trace counts per time bin per model; bin width defaults to 1 s and is
 * adjustable in the view. */
export function binTraceCounts(
  events: TraceEvent[],
  binSeconds = 1,
): Record<string, number[]> {
  if (binSeconds <= 0) throw new Error("binSeconds must be positive");
  if (events.length === 0) return {};
  const maxBin = Math.floor(
    Math.max(...events.map((e) => e.timestampS)) / binSeconds,
  );
  const series: Record<string, number[]> = {};
  for (const event of events) {
    const counts = (series[event.model] ??= new Array(maxBin + 1).fill(0));
    const bin = Math.floor(event.timestampS / binSeconds);
    counts[bin] = (counts[bin] ?? 0) + 1;
  }
  return series;
}

export interface GraphNode {
  id: string;
  axis: string;
  label: string;
}

export interface GraphEdge {
  from: string;
  to: string;
}

/** Node-edge pipeline diagram of the winning combination (pan/zoom handled
 * by the rendering layer). */
export function bestCombinationGraph(combo: CombinationPayload): {
  nodes: GraphNode[];
  edges: GraphEdge[];
} {
  const stages: [string, string][] = [
    ["chunking", `size ${combo.chunk_size} / overlap ${combo.chunk_overlap}`],
    ["embedder", combo.embedder],
    ["storage", combo.storage_kind],
    ["search", `${combo.search_type} (${combo.distance_metric}, k=${combo.top_k})`],
    ["rerank", combo.rerank ? "on" : "off"],
    ["llm", combo.llm],
  ];
  const nodes = stages.map(([axis, label]) => ({ id: axis, axis, label }));
  const edges = stages.slice(1).map(([axis], i) => ({
    from: stages[i]![0],
    to: axis,
  }));
  return { nodes, edges };
}
