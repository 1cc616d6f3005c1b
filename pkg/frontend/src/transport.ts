/** Session bootstrap and the persistent message channel.
 *
 * fetch and WebSocket implementations are injectable so tests can run the
 * client under node against a mock server.
 */

import type { EventMessage, EventName, ServerMessage, SessionPayload } from "./types.js";

export interface TransportOptions {
  baseUrl?: string;
  dashboard?: string;
  fetchFn?: typeof fetch;
  webSocketFactory?: (url: string) => WebSocket;
}

export interface Channel {
  sessionId: string;
  document: SessionPayload["document"];
  send(model: string, event: EventName, payload: unknown): void;
  onMessage(handler: (msg: ServerMessage) => void): void;
  onDrop(handler: () => void): void;
  close(): void;
}

function wsUrl(baseUrl: string, sessionId: string): string {
  const u = new URL(baseUrl);
  u.protocol = u.protocol === "https:" ? "wss:" : "ws:";
  u.pathname = "/ws";
  u.search = `?session=${encodeURIComponent(sessionId)}`;
  return u.toString();
}

export async function openChannel(options: TransportOptions = {}): Promise<Channel> {
  const baseUrl = options.baseUrl ?? window.location.origin;
  const dashboard = options.dashboard ?? "cleansing";
  const fetchFn = options.fetchFn ?? fetch;
  const makeSocket = options.webSocketFactory ?? ((url: string) => new WebSocket(url));

  const resp = await fetchFn(`${baseUrl}/api/session?dashboard=${encodeURIComponent(dashboard)}`, {
    method: "POST",
  });
  if (!resp.ok) {
    throw new Error(`session request failed: HTTP ${resp.status}`);
  }
  const session = (await resp.json()) as SessionPayload;

  const socket = makeSocket(wsUrl(baseUrl, session.session_id));
  const messageHandlers: Array<(msg: ServerMessage) => void> = [];
  const dropHandlers: Array<() => void> = [];

  socket.onmessage = (ev: MessageEvent) => {
    const msg = JSON.parse(String(ev.data)) as ServerMessage;
    for (const handler of messageHandlers) handler(msg);
  };
  socket.onclose = () => {
    for (const handler of dropHandlers) handler();
  };

  await new Promise<void>((resolve, reject) => {
    if (socket.readyState === 1) return resolve();
    socket.onopen = () => resolve();
    socket.onerror = () => reject(new Error("websocket connection failed"));
  });

  return {
    sessionId: session.session_id,
    document: session.document,
    send(model, event, payload) {
      const msg: EventMessage = { kind: "event", model, event, payload };
      socket.send(JSON.stringify(msg));
    },
    onMessage(handler) {
      messageHandlers.push(handler);
    },
    onDrop(handler) {
      dropHandlers.push(handler);
    },
    close() {
      socket.onclose = null;
      socket.close();
    },
  };
}
