"""HTTP + websocket transport: sessions, the event/patch channel, static client.

Endpoints:

- ``GET  /``                     static client bundle (or a built-in stub page)
- ``GET  /healthz``              liveness probe
- ``POST /api/session?dashboard=NAME``  -> {"session_id", "document"}
- ``GET  /ws?session=SESSION_ID``       persistent JSON message channel

Wire messages are UTF-8 JSON objects discriminated by "kind":

- client -> server  {"kind":"event","model":ID,"event":...,"payload":...}
- server -> client  {"kind":"patch","revision":N,"ops":[{"model","prop","value"}]}
                    {"kind":"error","code":STRING,"detail":STRING}
                    {"kind":"close","reason":STRING}

Every session owns one isolated dashboard/document; events within a session
are processed strictly in arrival order. Errors are answered in-band and the
channel stays open, except UnknownSession which closes it.
"""

from __future__ import annotations

import asyncio
import json
import secrets
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

from aiohttp import WSMsgType, web

from .cleansing import DEFAULT_ACTIVITY_URL_TEMPLATE, CleansingDashboard
from .dashboard import Dashboard, build_dashboard
from .document import EVENTS, UiEvent, serialize_document
from .errors import ElqaError, MalformedMessage, UnknownDashboard, UnknownSession
from .store import Repository

DEFAULT_SESSION_TTL_S = 1800.0

SESSIONS_KEY = web.AppKey("sessions", "SessionManager")

_STUB_PAGE = """<!doctype html>
<html><head><meta charset="utf-8"><title>elqadash</title></head>
<body><h1>elqadash server</h1>
<p>No client bundle is installed. Build the frontend (see README) or talk to
<code>POST /api/session</code> and <code>/ws</code> directly.</p>
</body></html>
"""


@dataclass
class Session:
    session_id: str
    dashboard: Dashboard
    created_at: float
    last_active_at: float
    lock: asyncio.Lock = field(default_factory=asyncio.Lock)
    ws: web.WebSocketResponse | None = None


class SessionManager:
    """Session registry plus the dashboard builders available to clients."""

    def __init__(
        self,
        builders: dict[str, Callable[[], Dashboard]],
        ttl_s: float = DEFAULT_SESSION_TTL_S,
        clock: Callable[[], float] = time.time,
    ):
        self.builders = builders
        self.ttl_s = ttl_s
        self.clock = clock
        self.sessions: dict[str, Session] = {}

    def create_session(self, dashboard_name: str) -> Session:
        builder = self.builders.get(dashboard_name)
        if builder is None:
            raise UnknownDashboard(dashboard_name)
        now = self.clock()
        session = Session(
            session_id=secrets.token_urlsafe(16),
            dashboard=builder(),
            created_at=now,
            last_active_at=now,
        )
        self.sessions[session.session_id] = session
        return session

    def get(self, session_id: str | None) -> Session:
        session = self.sessions.get(session_id or "")
        if session is None:
            raise UnknownSession(str(session_id))
        return session

    async def expire_sessions(self, now: float | None = None, ttl_s: float | None = None) -> int:
        """Drop sessions idle longer than the ttl; 0 means never expire."""
        ttl = self.ttl_s if ttl_s is None else ttl_s
        if ttl == 0:
            return 0
        now = self.clock() if now is None else now
        expired = [s for s in self.sessions.values() if now - s.last_active_at > ttl]
        for session in expired:
            del self.sessions[session.session_id]
            ws = session.ws
            if ws is not None and not ws.closed:
                try:
                    await ws.send_str(json.dumps({"kind": "close", "reason": "expired"}))
                    await ws.close()
                except ConnectionError:
                    pass
        return len(expired)


def parse_event(raw: str | bytes) -> UiEvent:
    """Validate one inbound wire message into a UiEvent."""
    try:
        obj = json.loads(raw)
    except (ValueError, UnicodeDecodeError) as e:
        raise MalformedMessage(f"not valid JSON: {e}") from None
    if not isinstance(obj, dict) or obj.get("kind") != "event":
        raise MalformedMessage("expected an object with kind='event'")
    model = obj.get("model")
    event = obj.get("event")
    if not isinstance(model, str) or event not in EVENTS or "payload" not in obj:
        raise MalformedMessage("event needs string 'model', valid 'event', and 'payload'")
    return UiEvent(model_id=model, event=event, payload=obj["payload"])


async def handle_event(mgr: SessionManager, session_id: str, raw: str | bytes) -> dict:
    """Process one inbound message; always returns one outbound message."""
    session = mgr.get(session_id)  # UnknownSession propagates
    try:
        ui_event = parse_event(raw)
    except MalformedMessage as e:
        return {"kind": "error", "code": e.code, "detail": str(e)}
    async with session.lock:
        session.last_active_at = mgr.clock()
        try:
            patch = session.dashboard.input_change(ui_event)
        except ElqaError as e:
            return {"kind": "error", "code": e.code, "detail": str(e)}
    return patch.to_wire()


def build_app(
    repo: Repository,
    activity_url_template: str = DEFAULT_ACTIVITY_URL_TEMPLATE,
    session_ttl_s: float = DEFAULT_SESSION_TTL_S,
    client_dir: str | Path | None = None,
    dashboards: dict[str, Callable[[], Dashboard]] | None = None,
    expiry_interval_s: float = 60.0,
) -> web.Application:
    if dashboards is None:
        dashboards = {
            "cleansing": lambda: build_dashboard(
                CleansingDashboard, repo, activity_url_template=activity_url_template
            )
        }
    mgr = SessionManager(dashboards, ttl_s=session_ttl_s)
    app = web.Application()
    app[SESSIONS_KEY] = mgr

    async def healthz(request: web.Request) -> web.Response:
        return web.Response(text="ok")

    async def index(request: web.Request) -> web.Response:
        if client_dir is not None:
            index_path = Path(client_dir) / "index.html"
            if index_path.exists():
                return web.FileResponse(index_path)
        return web.Response(text=_STUB_PAGE, content_type="text/html")

    async def create_session(request: web.Request) -> web.Response:
        name = request.query.get("dashboard", "")
        try:
            session = mgr.create_session(name)
        except UnknownDashboard as e:
            return web.json_response({"error": e.code, "detail": str(e)}, status=404)
        return web.json_response(
            {
                "session_id": session.session_id,
                "document": serialize_document(session.dashboard.document),
            }
        )

    async def ws_channel(request: web.Request) -> web.WebSocketResponse:
        ws = web.WebSocketResponse()
        await ws.prepare(request)
        session_id = request.query.get("session")
        try:
            session = mgr.get(session_id)
        except UnknownSession as e:
            await ws.send_str(json.dumps({"kind": "error", "code": e.code, "detail": str(e)}))
            await ws.send_str(json.dumps({"kind": "close", "reason": "unknown session"}))
            await ws.close()
            return ws
        session.ws = ws
        async for msg in ws:
            if msg.type == WSMsgType.TEXT or msg.type == WSMsgType.BINARY:
                try:
                    reply = await handle_event(mgr, session_id, msg.data)
                except UnknownSession as e:
                    await ws.send_str(json.dumps({"kind": "error", "code": e.code, "detail": str(e)}))
                    await ws.send_str(json.dumps({"kind": "close", "reason": "unknown session"}))
                    break
                await ws.send_str(json.dumps(reply))
            elif msg.type == WSMsgType.ERROR:
                break
        await ws.close()
        if session.ws is ws:
            session.ws = None
        return ws

    app.router.add_get("/healthz", healthz)
    app.router.add_get("/", index)
    app.router.add_post("/api/session", create_session)
    app.router.add_get("/ws", ws_channel)
    if client_dir is not None and Path(client_dir).is_dir():
        app.router.add_static("/static", str(client_dir))

    if expiry_interval_s > 0 and session_ttl_s > 0:

        async def expiry_loop(app: web.Application):
            async def run():
                while True:
                    await asyncio.sleep(expiry_interval_s)
                    await mgr.expire_sessions()

            task = asyncio.create_task(run())
            yield
            task.cancel()
            try:
                await task
            except asyncio.CancelledError:
                pass

        app.cleanup_ctx.append(expiry_loop)
    return app


def serve(
    repo: Repository,
    port: int,
    activity_url_template: str = DEFAULT_ACTIVITY_URL_TEMPLATE,
    session_ttl_s: float = DEFAULT_SESSION_TTL_S,
    client_dir: str | Path | None = None,
) -> None:
    """Blocking entry point used by the CLI."""
    app = build_app(
        repo,
        activity_url_template=activity_url_template,
        session_ttl_s=session_ttl_s,
        client_dir=client_dir,
    )
    web.run_app(app, port=port)
