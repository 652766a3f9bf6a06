import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { ProgressViewModel } from "../src/progress.js";
import { SSEParser } from "../src/sse.js";
import type { SessionSnapshot } from "../src/types.js";

const recorded = readFileSync(
  join(__dirname, "..", "fixtures", "progress_events.txt"),
  "utf8",
);

function snapshots(): SessionSnapshot[] {
  return new SSEParser().feed(recorded).map((e) => JSON.parse(e.data));
}

describe("progress view-model", () => {
  it("counters never decrease across the recorded event stream", () => {
    const vm = new ProgressViewModel();
    for (const snap of snapshots()) vm.apply(snap);
    const totals = vm.totalsHistory;
    expect(totals).toEqual([...totals].sort((a, b) => a - b));
  });

  it("renders pruned combinations as struck-out rows with the reason", () => {
    const vm = new ProgressViewModel();
    for (const snap of snapshots()) vm.apply(snap);
    const struck = vm.rows().filter((r) => r.struck);
    expect(struck).toHaveLength(1);
    expect(struck[0]!.combinationId).toBe("c3");
    expect(struck[0]!.reason).toContain("generation latency");
    expect(struck[0]!.reason).toContain("10");
  });

  it("offers the result-analysis redirect only after the terminal event", () => {
    const vm = new ProgressViewModel();
    const snaps = snapshots();
    vm.apply(snaps[0]!);
    expect(vm.terminal).toBe(false);
    expect(vm.redirectTarget).toBeNull();
    for (const snap of snaps) vm.apply(snap);
    expect(vm.terminal).toBe(true);
    expect(vm.redirectTarget).toBe("result-analysis");
  });

  it("tracks the stale badge", () => {
    const vm = new ProgressViewModel();
    vm.setStale(true);
    expect(vm.stale).toBe(true);
    vm.setStale(false);
    expect(vm.stale).toBe(false);
  });
});
