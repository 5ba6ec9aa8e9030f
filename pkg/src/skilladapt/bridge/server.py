"""WebSocket host for the bridge protocol.

Each client gets a bounded topic queue (depth 64, drop-oldest) so a
stalled browser can never block the engine or the simulation loop.
Service requests run in worker threads, so pipelined requests may
complete out of order; the envelope id keeps correlation.
"""

from __future__ import annotations

import asyncio
import contextlib

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from ..errors import BindFailure
from .envelope import (TOPICS, BridgeRouter, error_envelope, topic_envelope)

QUEUE_DEPTH = 64
HEARTBEAT_SECONDS = 5.0


class _Client:
    def __init__(self, loop):
        self.loop = loop
        self.queue: asyncio.Queue = asyncio.Queue(maxsize=QUEUE_DEPTH)
        self.subscriptions: set[str] = set()

    def offer(self, envelope: dict):
        """Thread-safe enqueue with drop-oldest on overflow."""
        self.loop.call_soon_threadsafe(self._offer, envelope)

    def _offer(self, envelope: dict):
        if self.queue.full():
            with contextlib.suppress(asyncio.QueueEmpty):
                self.queue.get_nowait()
        self.queue.put_nowait(envelope)


def create_app(engine) -> FastAPI:
    app = FastAPI(title="skilladapt bridge")
    router = BridgeRouter(engine)
    clients: set[_Client] = set()

    def on_topic(topic, payload):
        env = topic_envelope(topic, payload)
        for client in list(clients):
            if topic in client.subscriptions:
                client.offer(env)

    engine.subscribe(on_topic)

    @app.get("/healthz")
    def healthz():
        return {"ok": True, "services": 16, "topics": list(TOPICS)}

    @app.websocket("/ws")
    async def ws_endpoint(websocket: WebSocket):
        await websocket.accept()
        client = _Client(asyncio.get_running_loop())
        clients.add(client)
        send_lock = asyncio.Lock()
        pending: set[asyncio.Task] = set()

        async def send(envelope: dict):
            async with send_lock:
                await websocket.send_json(envelope)

        async def drain_topics():
            while True:
                env = await client.queue.get()
                await send(env)

        async def serve_request(raw: dict):
            response = await asyncio.to_thread(router.handle_request, raw)
            await send(response)

        drainer = asyncio.create_task(drain_topics())
        try:
            while True:
                try:
                    raw = await websocket.receive_json()
                except (ValueError, KeyError):
                    await send(error_envelope(0, "", "BadPayload",
                                              "frame is not valid JSON"))
                    continue
                msg_type = raw.get("type") if isinstance(raw, dict) else None
                if msg_type == "subscribe":
                    topic = raw.get("name", "")
                    if topic in TOPICS:
                        client.subscriptions.add(topic)
                        await send({"type": "service_response",
                                    "id": raw.get("id", 0), "name": topic,
                                    "payload": {"subscribed": True}, "v": 1})
                    else:
                        await send(error_envelope(
                            raw.get("id", 0), str(topic), "UnknownTopic",
                            f"unknown topic {topic!r}"))
                elif msg_type == "unsubscribe":
                    client.subscriptions.discard(raw.get("name", ""))
                    await send({"type": "service_response",
                                "id": raw.get("id", 0),
                                "name": raw.get("name", ""),
                                "payload": {"subscribed": False}, "v": 1})
                else:
                    task = asyncio.create_task(serve_request(raw))
                    pending.add(task)
                    task.add_done_callback(pending.discard)
        except WebSocketDisconnect:
            pass
        finally:
            drainer.cancel()
            for task in pending:
                task.cancel()
            clients.discard(client)

    return app


def serve(engine, host="127.0.0.1", port=8765):
    """Run the bridge server; blocks until interrupted."""
    import uvicorn

    app = create_app(engine)
    config = uvicorn.Config(app, host=host, port=port, log_level="warning",
                            ws_ping_interval=HEARTBEAT_SECONDS,
                            ws_ping_timeout=HEARTBEAT_SECONDS * 2)
    server = uvicorn.Server(config)
    try:
        server.run()
    except OSError as e:
        raise BindFailure(f"cannot bind {host}:{port}: {e}") from e
    return server
