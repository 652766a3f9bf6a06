/** Incremental server-sent-events parsing and a reconnecting stream reader.
 *
 * The transport is injectable (any async iterable of text chunks) so tests
 * can script streams and drops without a network.
 */

export interface SSEEvent {
  event: string;
  data: string;
}

/** Feed arbitrary text chunks; complete events come out as they terminate. */
export class SSEParser {
  private buffer = "";

  feed(chunk: string): SSEEvent[] {
    this.buffer += chunk;
    const events: SSEEvent[] = [];
    let sep: number;
    while ((sep = this.buffer.indexOf("\n\n")) !== -1) {
      const frame = this.buffer.slice(0, sep);
      this.buffer = this.buffer.slice(sep + 2);
      const parsed = parseFrame(frame);
      if (parsed) events.push(parsed);
    }
    return events;
  }
}

function parseFrame(frame: string): SSEEvent | null {
  let event = "message";
  const data: string[] = [];
  for (const line of frame.split("\n")) {
    if (line.startsWith("event:")) event = line.slice(6).trim();
    else if (line.startsWith("data:")) data.push(line.slice(5).trim());
  }
  if (data.length === 0) return null;
  return { event, data: data.join("\n") };
}

export type ChunkSource = () => AsyncIterable<string>;

export interface StreamOptions {
  /** Events after which the stream is complete and must not reconnect. */
  terminalEvents?: string[];
  maxReconnects?: number;
  onEvent: (event: SSEEvent) => void;
  /** Called when the connection state changes; stale=true while dropped. */
  onStale?: (stale: boolean) => void;
}

/** Read an SSE stream, auto-reconnecting on drops with a stale flag for the
 * UI badge. Resolves once a terminal event arrives or reconnects run out. */
export async function readEventStream(
  connect: ChunkSource,
  options: StreamOptions,
): Promise<{ terminal: SSEEvent | null; reconnects: number }> {
  const terminalEvents = options.terminalEvents ?? ["done", "aborted"];
  const maxReconnects = options.maxReconnects ?? 5;
  let reconnects = 0;

  for (;;) {
    const parser = new SSEParser();
    try {
      for await (const chunk of connect()) {
        for (const event of parser.feed(chunk)) {
          options.onEvent(event);
          if (terminalEvents.includes(event.event)) {
            options.onStale?.(false);
            return { terminal: event, reconnects };
          }
        }
      }
    } catch {
      // Fall through to the reconnect path below.
    }
    // Stream ended without a terminal event: mark stale and retry.
    options.onStale?.(true);
    if (reconnects >= maxReconnects) return { terminal: null, reconnects };
    reconnects += 1;
  }
}
