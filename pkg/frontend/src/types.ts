/** Shared payload shapes mirroring the service's published JSON schemas. */

export type Direction = "high_is_better" | "low_is_better";

export interface MetricDescriptor {
  metricId: string;
  direction: Direction;
  /** Numeric weight; the four selectable levels map to 0 / 1 / 3 / 5. */
  weight: number;
}

/** metric id -> combination id -> instance ordinal (as string) -> value. */
export type MatrixPayload = Record<string, Record<string, Record<string, number>>>;

export interface CombinationPayload {
  llm: string;
  embedder: string;
  storage_kind: string;
  search_type: string;
  distance_metric: string;
  rerank: boolean;
  chunk_size: number;
  chunk_overlap: number;
  top_k: number;
}

export interface ProgressCounter {
  done: number;
  total: number;
}

export interface SkipReason {
  threshold: string;
  mean?: number;
  limit?: number;
}

export interface SessionSnapshot {
  phase: string;
  progress: Record<string, ProgressCounter>;
  skipped: Record<string, SkipReason[]>;
  warnings: string[];
}

export interface FieldError {
  field: string;
  message: string;
  offset?: number;
}

export const WEIGHT_LEVELS = ["NoRelevance", "Low", "Medium", "High"] as const;
export type WeightLevel = (typeof WEIGHT_LEVELS)[number];

export const WEIGHT_VALUES: Record<WeightLevel, number> = {
  NoRelevance: 0,
  Low: 1,
  Medium: 3,
  High: 5,
};
