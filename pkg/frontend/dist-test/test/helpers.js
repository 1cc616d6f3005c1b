/** Shared test plumbing: fixture loading and a mock wire server. */
import { createServer } from "node:http";
import { readFileSync } from "node:fs";
import { WebSocketServer, WebSocket as NodeWebSocket } from "ws";
export function fixture(name) {
    const url = new URL(`../../test/fixtures/${name}`, import.meta.url);
    return JSON.parse(readFileSync(url, "utf-8"));
}
export const bootstrapDocument = () => fixture("document.json");
export const patchSequence = () => [
    fixture("patch_filter_rb.json"),
    fixture("patch_select_row0.json"),
    fixture("patch_select_point0.json"),
    fixture("patch_verdict_test_only.json"),
];
/** HTTP + websocket stand-in speaking the exact wire schema.
 *
 * Replies to every event with the next patch from the canned sequence, so a
 * client driving the canned interaction stays revision-consistent.
 */
export async function startMockServer() {
    const doc = bootstrapDocument();
    const patches = patchSequence();
    let patchIndex = 0;
    const received = [];
    const sockets = new Set();
    const http = createServer((req, res) => {
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
    wss.on("connection", (socket) => {
        sockets.add(socket);
        socket.on("message", (data) => {
            const msg = JSON.parse(data.toString());
            received.push(msg);
            const patch = patches[patchIndex];
            if (patch) {
                patchIndex += 1;
                socket.send(JSON.stringify(patch));
            }
            else {
                socket.send(JSON.stringify({ kind: "error", code: "NoHandler", detail: "fixture stream exhausted" }));
            }
        });
        socket.on("close", () => sockets.delete(socket));
    });
    await new Promise((resolve) => http.listen(0, "127.0.0.1", resolve));
    const port = http.address().port;
    const mock = {
        baseUrl: `http://127.0.0.1:${port}`,
        sessionsCreated: 0,
        received,
        broadcast(msg) {
            for (const socket of sockets)
                socket.send(JSON.stringify(msg));
        },
        close: () => new Promise((resolve) => {
            for (const socket of sockets)
                socket.terminate();
            wss.close(() => http.close(() => resolve()));
        }),
    };
    return mock;
}
export function nodeWebSocketFactory(url) {
    return new NodeWebSocket(url);
}
export async function settle(ms = 25) {
    await new Promise((resolve) => setTimeout(resolve, ms));
}
