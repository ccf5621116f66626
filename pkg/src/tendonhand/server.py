"""WebSocket transport for the teleop session.

One session per server; every client receives the per-tick State
broadcast, and messages a client sends are handled in the tick loop's
thread of control (an asyncio task owns the session).
"""

from __future__ import annotations

import asyncio
import contextlib
import json

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .teleop import TeleopSession


def build_app(session: TeleopSession) -> FastAPI:
    clients: set[WebSocket] = set()
    inbox: asyncio.Queue = asyncio.Queue()

    async def broadcast(msg: dict):
        data = json.dumps(msg)
        dead = []
        for ws in clients:
            try:
                await ws.send_text(data)
            except Exception:
                dead.append(ws)
        for ws in dead:
            clients.discard(ws)

    async def control_loop():
        dt = session.dt
        while True:
            while not inbox.empty():
                msg = inbox.get_nowait()
                for out in session.handle_message(msg):
                    await broadcast(out)
            session.tick()
            await broadcast(session.state_message())
            await asyncio.sleep(dt)

    @contextlib.asynccontextmanager
    async def lifespan(app: FastAPI):
        task = asyncio.create_task(control_loop())
        try:
            yield
        finally:
            task.cancel()

    app = FastAPI(title="tendonhand teleop service", lifespan=lifespan)

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket):
        await ws.accept()
        clients.add(ws)
        try:
            while True:
                text = await ws.receive_text()
                try:
                    msg = json.loads(text)
                except json.JSONDecodeError:
                    await ws.send_text(json.dumps(
                        {"type": "error", "message": "invalid JSON"}))
                    continue
                await inbox.put(msg)
        except WebSocketDisconnect:
            pass
        finally:
            clients.discard(ws)

    @app.get("/healthz")
    async def healthz():
        return {"ok": True, "time": session.plant.state.time}

    return app


def serve(session: TeleopSession, host: str = "127.0.0.1", port: int = 8765):
    import uvicorn

    uvicorn.run(build_app(session), host=host, port=port, log_level="warning")
