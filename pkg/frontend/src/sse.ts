// Server-sent events over a streaming fetch. EventSource would also work in
// the browser, but a fetch-based parser behaves identically under node and
// jsdom, which keeps the E2E path honest.

export interface SseEvent {
  name: string;
  data: Record<string, unknown>;
}

export interface Subscription {
  done: Promise<void>;
  close(): void;
}

export function parseSseChunk(buffer: string): { events: SseEvent[]; rest: string } {
  const events: SseEvent[] = [];
  const blocks = buffer.split("\n\n");
  const rest = blocks.pop() ?? "";
  for (const block of blocks) {
    let name = "message";
    let data = "";
    for (const line of block.split("\n")) {
      if (line.startsWith("event:")) {
        name = line.slice(6).trim();
      } else if (line.startsWith("data:")) {
        data += line.slice(5).trim();
      }
    }
    events.push({ name, data: data ? JSON.parse(data) : {} });
  }
  return { events, rest };
}

export function subscribeEvents(
  url: string,
  onEvent: (ev: SseEvent) => void,
  fetchImpl: typeof fetch = fetch,
): Subscription {
  const controller = new AbortController();
  const done = (async () => {
    const resp = await fetchImpl(url, { signal: controller.signal });
    if (!resp.ok || !resp.body) {
      throw new Error(`event stream failed: ${resp.status}`);
    }
    const reader = resp.body.getReader();
    const decoder = new TextDecoder();
    let buffer = "";
    for (;;) {
      const { value, done: eof } = await reader.read();
      if (eof) break;
      buffer += decoder.decode(value, { stream: true });
      const { events, rest } = parseSseChunk(buffer);
      buffer = rest;
      for (const ev of events) onEvent(ev);
    }
  })();
  return {
    done: done.catch((err) => {
      if (!controller.signal.aborted) throw err;
    }),
    close: () => controller.abort(),
  };
}
