"""Headless wire client: bootstraps a session and mirrors the server document.

Used by the end-to-end tests and handy for scripting against a running
server. The client applies every received patch to its bootstrap snapshot,
so after each round trip its document must equal the server's bit for bit.
"""

from __future__ import annotations

import json
from typing import Any

from .document import Document, Patch, apply_patch, deserialize_document
from .errors import ElqaError


class ServerMessage(ElqaError):
    """An in-band error message received from the server."""

    def __init__(self, code: str, detail: str):
        super().__init__(f"{code}: {detail}")
        self.remote_code = code
        self.detail = detail


class HeadlessClient:
    """Drives a dashboard session over HTTP + websocket.

    Works against any object with aiohttp's ``post(path)`` and
    ``ws_connect(path)`` methods (a real ClientSession with an absolute base
    URL, or an aiohttp test client).
    """

    def __init__(self, http: Any, dashboard: str = "cleansing"):
        self.http = http
        self.dashboard = dashboard
        self.session_id: str | None = None
        self.document: Document | None = None
        self._ws = None

    async def bootstrap(self) -> Document:
        resp = await self.http.post(f"/api/session?dashboard={self.dashboard}")
        if resp.status != 200:
            body = await resp.text()
            raise ServerMessage("UnknownDashboard", body)
        payload = await resp.json()
        self.session_id = payload["session_id"]
        self.document = deserialize_document(payload["document"])
        self._ws = await self.http.ws_connect(f"/ws?session={self.session_id}")
        return self.document

    async def send_event(self, model: str, event: str, payload: Any) -> dict:
        """Send one event and wait for its reply message.

        A patch reply is applied to the local document; an error reply raises
        ServerMessage.
        """
        if self._ws is None:
            raise RuntimeError("bootstrap() first")
        await self._ws.send_str(
            json.dumps({"kind": "event", "model": model, "event": event, "payload": payload})
        )
        msg = await self._ws.receive()
        reply = json.loads(msg.data)
        if reply["kind"] == "patch":
            apply_patch(self.document, Patch.from_wire(reply))
        elif reply["kind"] == "error":
            raise ServerMessage(reply["code"], reply.get("detail", ""))
        return reply

    def columns(self, source_id: str) -> dict[str, list]:
        return self.document.node(source_id).properties["columns"]

    async def close(self) -> None:
        if self._ws is not None:
            await self._ws.close()
            self._ws = None
