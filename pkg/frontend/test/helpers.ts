/** Shared test plumbing: fixture loading and a mock wire server. */

import { createServer, IncomingMessage, Server, ServerResponse } from "node:http";
import { readFileSync } from "node:fs";
import { AddressInfo } from "node:net";
import { WebSocketServer, WebSocket as NodeWebSocket } from "ws";

import type { DocumentPayload, PatchMessage } from "../src/types.js";

export function fixture<T>(name: string): T {
  const url = new URL(`../../test/fixtures/${name}`, import.meta.url);
  return JSON.parse(readFileSync(url, "utf-8")) as T;
}

export const bootstrapDocument = (): DocumentPayload => fixture<DocumentPayload>("document.json");

export const patchSequence = (): PatchMessage[] => [
  fixture<PatchMessage>("patch_filter_rb.json"),
  fixture<PatchMessage>("patch_select_row0.json"),
  fixture<PatchMessage>("patch_select_point0.json"),
  fixture<PatchMessage>("patch_verdict_test_only.json"),
];

export interface MockServer {
  baseUrl: string;
  sessionsCreated: number;
  received: Array<Record<string, unknown>>;
  /** push a raw message to every connected channel */
  broadcast(msg: unknown): void;
  close(): Promise<void>;
}

/** HTTP + websocket stand-in speaking the exact wire schema.
 *
 * Replies to every event with the next patch from the canned sequence, so a
 * client driving the canned interaction stays revision-consistent.
 */
export async function startMockServer(): Promise<MockServer> {
  const doc = bootstrapDocument();
  const patches = patchSequence();
  let patchIndex = 0;
  const received: Array<Record<string, unknown>> = [];
  const sockets = new Set<NodeWebSocket>();

  const http: Server = createServer((req: IncomingMessage, res: ServerResponse) => {
    if (req.method === "POST" && req.url?.startsWith("/api/session")) {
      mock.sessionsCreated += 1;
      patchIndex = 0; // a refetched session restarts the canned stream
      res.setHeader("content-type", "application/json");
      res.end(JSON.stringify({ session_id: `s${mock.sessionsCreated}`, document: doc }));
      return;
    }
    res.statusCode = 404;
    res.end("not found");
  });

  const wss = new WebSocketServer({ server: http, path: "/ws" });
  wss.on("connection", (socket: NodeWebSocket) => {
    sockets.add(socket);
    socket.on("message", (data: Buffer) => {
      const msg = JSON.parse(data.toString());
      received.push(msg);
      const patch = patches[patchIndex];
      if (patch) {
        patchIndex += 1;
        socket.send(JSON.stringify(patch));
      } else {
        socket.send(JSON.stringify({ kind: "error", code: "NoHandler", detail: "fixture stream exhausted" }));
      }
    });
    socket.on("close", () => sockets.delete(socket));
  });

  await new Promise<void>((resolve) => http.listen(0, "127.0.0.1", resolve));
  const port = (http.address() as AddressInfo).port;

  const mock: MockServer = {
    baseUrl: `http://127.0.0.1:${port}`,
    sessionsCreated: 0,
    received,
    broadcast(msg: unknown) {
      for (const socket of sockets) socket.send(JSON.stringify(msg));
    },
    close: () =>
      new Promise<void>((resolve) => {
        for (const socket of sockets) socket.terminate();
        wss.close(() => http.close(() => resolve()));
      }),
  };
  return mock;
}

export function nodeWebSocketFactory(url: string): WebSocket {
  return new NodeWebSocket(url) as unknown as WebSocket;
}

export async function settle(ms = 25): Promise<void> {
  await new Promise((resolve) => setTimeout(resolve, ms));
}
