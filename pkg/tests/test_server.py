import asyncio
import json
import random

import pytest
from aiohttp.test_utils import TestClient, TestServer

from elqadash.document import document_json
from elqadash.headless import HeadlessClient, ServerMessage
from elqadash.server import SESSIONS_KEY, build_app, handle_event, parse_event
from elqadash.errors import MalformedMessage, UnknownSession
from event_driver import random_event


def run(coro):
    return asyncio.run(coro)


async def start(repo, **kwargs):
    app = build_app(repo, expiry_interval_s=0, **kwargs)
    client = TestClient(TestServer(app))
    await client.start_server()
    return client, app[SESSIONS_KEY]


class TestSessions:
    def test_unknown_dashboard_404(self, synth_repo):
        async def go():
            client, _ = await start(synth_repo)
            resp = await client.post("/api/session?dashboard=nope")
            assert resp.status == 404
            body = await resp.json()
            assert body["error"] == "UnknownDashboard"
            resp = await client.post("/api/session")
            assert resp.status == 404
            await client.close()

        run(go())

    def test_cleansing_session_bootstrap(self, synth_repo):
        async def go():
            client, mgr = await start(synth_repo)
            resp = await client.post("/api/session?dashboard=cleansing")
            assert resp.status == 200
            body = await resp.json()
            assert body["document"]["revision"] == 0
            models = body["document"]["models"]
            for mid in (
                "type_select", "circuits_source", "circuits_table", "cap_source",
                "cap_plot", "activity_tap", "detail_panel", "verdict_select",
            ):
                assert mid in models
            assert body["session_id"] in mgr.sessions
            await client.close()

        run(go())

    def test_two_sessions_are_isolated(self, synth_repo):
        async def go():
            client, mgr = await start(synth_repo)
            a = HeadlessClient(client)
            b = HeadlessClient(client)
            await a.bootstrap()
            await b.bootstrap()
            assert a.session_id != b.session_id
            await a.send_event("type_select", "value_change", "RB")
            doc_b = mgr.sessions[b.session_id].dashboard.document
            assert doc_b.revision == 0
            assert doc_b.get("type_select", "value") == "(all)"
            assert a.document.get("type_select", "value") == "RB"
            await a.close()
            await b.close()
            await client.close()

        run(go())

    def test_healthz_and_index(self, synth_repo):
        async def go():
            client, _ = await start(synth_repo)
            assert (await client.get("/healthz")).status == 200
            resp = await client.get("/")
            assert resp.status == 200
            assert "text/html" in resp.headers["Content-Type"]
            await client.close()

        run(go())


class TestWireProtocol:
    def test_parse_event_rejects_garbage(self):
        with pytest.raises(MalformedMessage):
            parse_event(b"\xff not json")
        with pytest.raises(MalformedMessage):
            parse_event(json.dumps({"kind": "event", "model": 1, "event": "tap", "payload": 0}))
        with pytest.raises(MalformedMessage):
            parse_event(json.dumps({"kind": "event", "model": "x", "event": "hover", "payload": 0}))
        with pytest.raises(MalformedMessage):
            parse_event(json.dumps({"kind": "patch"}))

    def test_valid_event_gives_one_patch(self, synth_repo):
        async def go():
            client, _ = await start(synth_repo)
            hc = HeadlessClient(client)
            await hc.bootstrap()
            reply = await hc.send_event("type_select", "value_change", "RB")
            assert reply["kind"] == "patch"
            assert reply["revision"] == 1
            await hc.close()
            await client.close()

        run(go())

    def test_malformed_bytes_keep_channel_open(self, synth_repo):
        async def go():
            client, _ = await start(synth_repo)
            hc = HeadlessClient(client)
            await hc.bootstrap()
            await hc._ws.send_str("{{{not json")
            msg = json.loads((await hc._ws.receive()).data)
            assert msg == {"kind": "error", "code": "MalformedMessage", "detail": msg["detail"]}
            # channel still works afterwards
            reply = await hc.send_event("type_select", "value_change", "RB")
            assert reply["kind"] == "patch"
            await hc.close()
            await client.close()

        run(go())

    def test_handler_errors_reported_in_band(self, synth_repo):
        async def go():
            client, _ = await start(synth_repo)
            hc = HeadlessClient(client)
            await hc.bootstrap()
            with pytest.raises(ServerMessage) as err:
                await hc.send_event("ghost_model", "value_change", "x")
            assert err.value.remote_code == "NoHandler"
            with pytest.raises(ServerMessage) as err:
                await hc.send_event("type_select", "value_change", "NOPE")
            assert err.value.remote_code == "InvalidPayload"
            # document untouched, channel alive
            reply = await hc.send_event("type_select", "value_change", "RB")
            assert reply["revision"] == 1
            await hc.close()
            await client.close()

        run(go())

    def test_unknown_session_on_connect_closes(self, synth_repo):
        async def go():
            client, _ = await start(synth_repo)
            ws = await client.ws_connect("/ws?session=bogus")
            first = json.loads((await ws.receive()).data)
            assert first["code"] == "UnknownSession"
            second = json.loads((await ws.receive()).data)
            assert second["kind"] == "close"
            await ws.close()
            await client.close()

        run(go())

    def test_ordering_and_gapless_revisions(self, synth_repo):
        async def go():
            client, mgr = await start(synth_repo)
            hc = HeadlessClient(client)
            await hc.bootstrap()
            revisions = []
            rnd = random.Random(3)
            dash = mgr.sessions[hc.session_id].dashboard
            for _ in range(20):
                ev = random_event(rnd, dash)
                reply = await hc.send_event(ev.model_id, ev.event, ev.payload)
                revisions.append(reply["revision"])
            assert revisions == list(range(1, 21))
            assert document_json(hc.document) == document_json(dash.document)
            await hc.close()
            await client.close()

        run(go())


class TestExpiry:
    def test_no_idle_sessions(self, synth_repo):
        async def go():
            client, mgr = await start(synth_repo)
            mgr.create_session("cleansing")
            assert await mgr.expire_sessions(now=mgr.clock(), ttl_s=1800) == 0
            await client.close()

        run(go())

    def test_idle_session_expires_and_events_fail(self, synth_repo):
        async def go():
            client, mgr = await start(synth_repo)
            hc = HeadlessClient(client)
            await hc.bootstrap()
            now = mgr.sessions[hc.session_id].last_active_at
            count = await mgr.expire_sessions(now=now + 1801, ttl_s=1800)
            assert count == 1
            closing = json.loads((await hc._ws.receive()).data)
            assert closing == {"kind": "close", "reason": "expired"}
            with pytest.raises(UnknownSession):
                await handle_event(mgr, hc.session_id, json.dumps(
                    {"kind": "event", "model": "type_select", "event": "value_change", "payload": "RB"}
                ))
            await client.close()

        run(go())

    def test_ttl_zero_never_expires(self, synth_repo):
        async def go():
            client, mgr = await start(synth_repo, session_ttl_s=0)
            hc = HeadlessClient(client)
            await hc.bootstrap()
            now = mgr.sessions[hc.session_id].last_active_at
            assert await mgr.expire_sessions(now=now + 10**9) == 0
            assert hc.session_id in mgr.sessions
            await hc.close()
            await client.close()

        run(go())


class TestCrossSessionIsolation:
    def test_interleaved_sessions_stay_independent(self, synth_repo):
        async def go():
            client, mgr = await start(synth_repo)
            clients = [HeadlessClient(client) for _ in range(3)]
            for hc in clients:
                await hc.bootstrap()
            rnd = random.Random(17)
            for _ in range(30):
                hc = rnd.choice(clients)
                dash = mgr.sessions[hc.session_id].dashboard
                ev = random_event(rnd, dash)
                await hc.send_event(ev.model_id, ev.event, ev.payload)
                # every mirror matches its own server document after each event
                for other in clients:
                    server_doc = mgr.sessions[other.session_id].dashboard.document
                    assert document_json(other.document) == document_json(server_doc)
            for hc in clients:
                await hc.close()
            await client.close()

        run(go())
