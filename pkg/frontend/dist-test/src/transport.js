/** Session bootstrap and the persistent message channel.
 *
 * fetch and WebSocket implementations are injectable so tests can run the
 * client under node against a mock server.
 */
function wsUrl(baseUrl, sessionId) {
    const u = new URL(baseUrl);
    u.protocol = u.protocol === "https:" ? "wss:" : "ws:";
    u.pathname = "/ws";
    u.search = `?session=${encodeURIComponent(sessionId)}`;
    return u.toString();
}
export async function openChannel(options = {}) {
    const baseUrl = options.baseUrl ?? window.location.origin;
    const dashboard = options.dashboard ?? "cleansing";
    const fetchFn = options.fetchFn ?? fetch;
    const makeSocket = options.webSocketFactory ?? ((url) => new WebSocket(url));
    const resp = await fetchFn(`${baseUrl}/api/session?dashboard=${encodeURIComponent(dashboard)}`, {
        method: "POST",
    });
    if (!resp.ok) {
        throw new Error(`session request failed: HTTP ${resp.status}`);
    }
    const session = (await resp.json());
    const socket = makeSocket(wsUrl(baseUrl, session.session_id));
    const messageHandlers = [];
    const dropHandlers = [];
    socket.onmessage = (ev) => {
        const msg = JSON.parse(String(ev.data));
        for (const handler of messageHandlers)
            handler(msg);
    };
    socket.onclose = () => {
        for (const handler of dropHandlers)
            handler();
    };
    await new Promise((resolve, reject) => {
        if (socket.readyState === 1)
            return resolve();
        socket.onopen = () => resolve();
        socket.onerror = () => reject(new Error("websocket connection failed"));
    });
    return {
        sessionId: session.session_id,
        document: session.document,
        send(model, event, payload) {
            const msg = { kind: "event", model, event, payload };
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
