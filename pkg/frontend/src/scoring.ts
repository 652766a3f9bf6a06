/** Client-side re-ranking over a downloaded score matrix.
 *
 * Numerically mirrors the service's recommender: high-is-better cells score
 * weight * value; low-is-better cells score weight * (1 - (v - min)/(max - min))
 * with global per-metric extremes (degenerate max == min scores weight * 1).
 * A combination's composite is the mean of its defined weighted cells and the
 * winner is the composite argmax with a lexicographic axis-tuple tie-break.
 */

import type { CombinationPayload, MatrixPayload, MetricDescriptor } from "./types.js";

export type AxisTuple = (string | number)[];

export function axisTuple(combo: CombinationPayload): AxisTuple {
  return [
    combo.llm,
    combo.embedder,
    combo.storage_kind,
    combo.search_type,
    combo.distance_metric,
    combo.rerank ? 1 : 0,
    combo.chunk_size,
    combo.chunk_overlap,
    combo.top_k,
  ];
}

/** Element-wise comparison; strings by code unit, matching the service's sort. */
export function compareAxisTuples(a: AxisTuple, b: AxisTuple): number {
  const n = Math.min(a.length, b.length);
  for (let i = 0; i < n; i++) {
    const x = a[i]!;
    const y = b[i]!;
    if (x < y) return -1;
    if (x > y) return 1;
  }
  return a.length - b.length;
}

export function metricExtremes(
  matrix: MatrixPayload,
  metricId: string,
): { min: number; max: number } | null {
  let min = Infinity;
  let max = -Infinity;
  let seen = false;
  for (const cells of Object.values(matrix[metricId] ?? {})) {
    for (const value of Object.values(cells)) {
      seen = true;
      if (value < min) min = value;
      if (value > max) max = value;
    }
  }
  return seen ? { min, max } : null;
}

export function weightedScore(
  value: number,
  descriptor: MetricDescriptor,
  min: number,
  max: number,
): number {
  if (descriptor.direction === "high_is_better") {
    return descriptor.weight * value;
  }
  if (max < min) throw new Error("max must be >= min");
  if (value < min || value > max) {
    throw new Error(`value ${value} outside global extremes [${min}, ${max}]`);
  }
  if (max === min) return descriptor.weight * 1.0;
  return descriptor.weight * (1.0 - (value - min) / (max - min));
}

export interface CompositeResult {
  composites: Record<string, number>;
  /** Combinations present in the matrix but with zero defined weighted cells. */
  excluded: string[];
}

export function compositeScores(
  matrix: MatrixPayload,
  descriptors: MetricDescriptor[],
): CompositeResult {
  const byId = new Map(descriptors.map((d) => [d.metricId, d]));
  const sums: Record<string, number> = {};
  const counts: Record<string, number> = {};
  const allIds = new Set<string>();

  for (const [metricId, perCombo] of Object.entries(matrix)) {
    for (const comboId of Object.keys(perCombo)) allIds.add(comboId);
    const descriptor = byId.get(metricId);
    if (!descriptor) continue;
    const ext = metricExtremes(matrix, metricId);
    if (!ext) continue;
    for (const [comboId, cells] of Object.entries(perCombo)) {
      for (const value of Object.values(cells)) {
        const score = weightedScore(value, descriptor, ext.min, ext.max);
        sums[comboId] = (sums[comboId] ?? 0) + score;
        counts[comboId] = (counts[comboId] ?? 0) + 1;
      }
    }
  }

  const composites: Record<string, number> = {};
  for (const [comboId, sum] of Object.entries(sums)) {
    composites[comboId] = sum / counts[comboId]!;
  }
  const excluded = [...allIds].filter((id) => !(id in composites)).sort();
  return { composites, excluded };
}

export function rankCombinations(
  composites: Record<string, number>,
  combinations: Record<string, CombinationPayload>,
): string[] {
  return Object.keys(composites).sort((a, b) => {
    const diff = composites[b]! - composites[a]!;
    if (diff !== 0) return diff;
    return compareAxisTuples(axisTuple(combinations[a]!), axisTuple(combinations[b]!));
  });
}

export interface Recommendation {
  winner: string;
  ranking: string[];
  composites: Record<string, number>;
  excluded: string[];
}

/** Full what-if pass: re-weight, re-rank, pick the winner. */
export function recommend(
  matrix: MatrixPayload,
  descriptors: MetricDescriptor[],
  combinations: Record<string, CombinationPayload>,
): Recommendation {
  const { composites, excluded } = compositeScores(matrix, descriptors);
  const ranking = rankCombinations(composites, combinations);
  if (ranking.length === 0) throw new Error("no ranked combinations");
  return { winner: ranking[0]!, ranking, composites, excluded };
}
