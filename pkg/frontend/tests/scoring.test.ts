import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import {
  axisTuple,
  compareAxisTuples,
  compositeScores,
  recommend,
  weightedScore,
} from "../src/scoring.js";
import type {
  CombinationPayload,
  Direction,
  MatrixPayload,
  MetricDescriptor,
} from "../src/types.js";

interface Scenario {
  weights: Record<string, number>;
  directions: Record<string, Direction>;
  expected_composites: Record<string, number>;
  expected_ranking: string[];
  expected_winner: string;
  expected_excluded: string[];
}

interface Session {
  combinations: Record<string, CombinationPayload>;
  matrix: MatrixPayload;
  scenarios: Scenario[];
}

const fixture = JSON.parse(
  readFileSync(join(__dirname, "..", "fixtures", "parity_sessions.json"), "utf8"),
) as { sessions: Session[] };

function descriptors(scenario: Scenario): MetricDescriptor[] {
  return Object.keys(scenario.directions).map((metricId) => ({
    metricId,
    direction: scenario.directions[metricId]!,
    weight: scenario.weights[metricId]!,
  }));
}

describe("re-weighting parity with the service recommender", () => {
  it("reproduces composites, ranking, and winner on all 50 fixture sessions", () => {
    expect(fixture.sessions.length).toBe(50);
    let scenarios = 0;
    for (const session of fixture.sessions) {
      for (const scenario of session.scenarios) {
        const result = recommend(
          session.matrix,
          descriptors(scenario),
          session.combinations,
        );
        expect(Object.keys(result.composites).sort()).toEqual(
          Object.keys(scenario.expected_composites).sort(),
        );
        for (const [comboId, expected] of Object.entries(
          scenario.expected_composites,
        )) {
          expect(Math.abs(result.composites[comboId]! - expected)).toBeLessThanOrEqual(
            1e-9,
          );
        }
        expect(result.ranking).toEqual(scenario.expected_ranking);
        expect(result.winner).toBe(scenario.expected_winner);
        expect(result.excluded).toEqual(scenario.expected_excluded);
        scenarios += 1;
      }
    }
    expect(scenarios).toBe(150);
  });

  it("all-zero weights flatten the ranking to composites of 0", () => {
    const session = fixture.sessions[0]!;
    const scenario = session.scenarios[0]!;
    const zeroed = descriptors(scenario).map((d) => ({ ...d, weight: 0 }));
    const result = recommend(session.matrix, zeroed, session.combinations);
    for (const value of Object.values(result.composites)) {
      expect(value).toBe(0);
    }
  });
});

describe("weighted score", () => {
  it("scores high-is-better cells as weight * value", () => {
    const d: MetricDescriptor = {
      metricId: "m",
      direction: "high_is_better",
      weight: 5,
    };
    expect(weightedScore(0.75, d, 0, 1)).toBeCloseTo(3.75, 12);
  });

  it("normalizes low-is-better cells against the global extremes", () => {
    const d: MetricDescriptor = {
      metricId: "m",
      direction: "low_is_better",
      weight: 3,
    };
    // 200 in [100, 300] -> 3 * (1 - 0.5) = 1.5
    expect(weightedScore(200, d, 100, 300)).toBeCloseTo(1.5, 12);
  });

  it("scores degenerate extremes as weight * 1", () => {
    const d: MetricDescriptor = {
      metricId: "m",
      direction: "low_is_better",
      weight: 3,
    };
    expect(weightedScore(7, d, 7, 7)).toBe(3);
  });
});

describe("axis tuple ordering", () => {
  const base: CombinationPayload = {
    llm: "a",
    embedder: "b",
    storage_kind: "memory_library",
    search_type: "similarity",
    distance_metric: "cosine",
    rerank: false,
    chunk_size: 128,
    chunk_overlap: 0,
    top_k: 1,
  };

  it("breaks ties on the earliest differing axis", () => {
    const other = { ...base, top_k: 2 };
    expect(compareAxisTuples(axisTuple(base), axisTuple(other))).toBeLessThan(0);
  });

  it("positive weight scaling leaves the ranking unchanged", () => {
    for (const session of fixture.sessions.slice(0, 10)) {
      const scenario = session.scenarios[1]!;
      const base = descriptors(scenario);
      const scaled = base.map((d) => ({ ...d, weight: d.weight * 17.5 }));
      const a = recommend(session.matrix, base, session.combinations);
      const b = recommend(session.matrix, scaled, session.combinations);
      expect(b.ranking).toEqual(a.ranking);
    }
  });
});

describe("composite scores", () => {
  it("ignores metrics without descriptors", () => {
    const matrix: MatrixPayload = {
      known: { c1: { "0": 1.0 } },
      unknown: { c1: { "0": 0.0 }, c2: { "0": 0.5 } },
    };
    const { composites, excluded } = compositeScores(matrix, [
      { metricId: "known", direction: "high_is_better", weight: 1 },
    ]);
    expect(composites).toEqual({ c1: 1.0 });
    expect(excluded).toEqual(["c2"]);
  });
});
