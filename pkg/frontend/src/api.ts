/** Thin typed client for the benchmark service's HTTP routes.
 *
 * The fetch implementation is injectable so tests run without a server.
 */

import type { FieldError, SessionSnapshot } from "./types.js";

export type FetchLike = (
  url: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<{ status: number; json(): Promise<unknown> }>;

export class ValidationFailure extends Error {
  constructor(readonly errors: FieldError[]) {
    super(errors.map((e) => `${e.field}: ${e.message}`).join("; "));
  }
}

export class SessionConflict extends Error {}

export interface SessionHandle {
  session_id: string;
  links: Record<string, string>;
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike,
  ) {}

  private async get<T>(path: string): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path);
    if (response.status === 409) throw new SessionConflict(path);
    if (response.status >= 400) throw new Error(`${path} failed: ${response.status}`);
    return (await response.json()) as T;
  }

  async createSession(payload: unknown): Promise<SessionHandle> {
    const response = await this.fetchImpl(`${this.baseUrl}/sessions`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
    if (response.status === 422) {
      const body = (await response.json()) as { errors: FieldError[] };
      throw new ValidationFailure(body.errors);
    }
    if (response.status === 409) throw new SessionConflict("another session is running");
    if (response.status !== 202) throw new Error(`unexpected status ${response.status}`);
    return (await response.json()) as SessionHandle;
  }

  getSnapshot(sessionId: string): Promise<SessionSnapshot> {
    return this.get(`/sessions/${sessionId}`);
  }

  getResults(
    sessionId: string,
    page = 1,
    pageSize = 50,
  ): Promise<{ total: number; records: unknown[] }> {
    return this.get(
      `/sessions/${sessionId}/results?page=${page}&page_size=${pageSize}`,
    );
  }

  getRecommendation(sessionId: string): Promise<Record<string, unknown>> {
    return this.get(`/sessions/${sessionId}/recommendation`);
  }

  getMatrix(sessionId: string): Promise<Record<string, unknown>> {
    return this.get(`/sessions/${sessionId}/matrix`);
  }

  getConfigSchema(): Promise<Record<string, unknown>> {
    return this.get("/schema/config");
  }
}
