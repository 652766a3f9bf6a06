/** Live progress page view-model: per-combination bars, struck-out pruned
 * rows with their threshold reasons, and a terminal redirect affordance. */

import type { SessionSnapshot } from "./types.js";

export interface ProgressRow {
  combinationId: string;
  done: number;
  total: number;
  struck: boolean;
  reason: string | null;
}

export class ProgressViewModel {
  private snapshot: SessionSnapshot | null = null;
  /** Sum of done counters per applied snapshot, for the monotonicity check. */
  readonly totalsHistory: number[] = [];
  stale = false;

  apply(snapshot: SessionSnapshot): void {
    this.snapshot = snapshot;
    this.totalsHistory.push(
      Object.values(snapshot.progress).reduce((s, p) => s + p.done, 0),
    );
  }

  setStale(stale: boolean): void {
    this.stale = stale;
  }

  rows(): ProgressRow[] {
    if (!this.snapshot) return [];
    const rows: ProgressRow[] = [];
    for (const [comboId, counter] of Object.entries(this.snapshot.progress).sort()) {
      rows.push({
        combinationId: comboId,
        done: counter.done,
        total: counter.total,
        struck: false,
        reason: null,
      });
    }
    for (const [comboId, reasons] of Object.entries(this.snapshot.skipped).sort()) {
      const first = reasons[0];
      rows.push({
        combinationId: comboId,
        done: 0,
        total: 0,
        struck: true,
        reason: first
          ? `${first.threshold}${first.limit !== undefined ? ` (limit ${first.limit})` : ""}`
          : "pruned",
      });
    }
    return rows;
  }

  get terminal(): boolean {
    return this.snapshot?.phase === "done" || this.snapshot?.phase === "aborted";
  }

  /** Where the UI should offer to navigate once the session ends. */
  get redirectTarget(): string | null {
    if (!this.terminal) return null;
    return this.snapshot!.phase === "done" ? "result-analysis" : "logs";
  }
}
