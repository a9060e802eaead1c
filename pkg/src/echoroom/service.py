"""Live session service: JSON text frames over a WebSocket.

Each connection owns an independent session built from the same scenario.
After every client message the server replies with the engine events, then
the prompt and accessibility elements when they changed, then a state
digest. Malformed or invalid messages produce an error message and leave
the session usable.
"""

from __future__ import annotations

import asyncio
import json

from websockets.asyncio.server import serve as ws_serve
from websockets.exceptions import ConnectionClosed

from .events import AnnouncementEvent, Event, HapticEvent
from .scenario import Scenario, SchemaError, apply_step, build_session, parse_step
from .scene import Config
from .session import SCHEMA_VERSION, SessionError


def _dumps(data: dict) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


def _event_message(event: Event) -> dict:
    if isinstance(event, AnnouncementEvent):
        return {"type": "announcement", "at": round(event.at, 6), "tag": event.tag, "text": event.text}
    assert isinstance(event, HapticEvent)
    return {"type": "haptic", "at": round(event.at, 6), "kind": event.kind}


def _translate(msg: dict):
    """Client message -> script step; tick is wait's wire-level name."""
    if not isinstance(msg, dict) or not isinstance(msg.get("type"), str):
        raise SchemaError("message must be an object with a type field", "message")
    kind = msg["type"]
    args = {k: v for k, v in msg.items() if k != "type"}
    if kind == "tick":
        if "dt" not in args or set(args) != {"dt"}:
            raise SchemaError("tick takes exactly dt", "message")
        return parse_step({"op": "wait", "seconds": args["dt"]}, where="message")
    return parse_step({"op": kind, **args}, where="message")


class SessionConnection:
    """Drives one session for one client; transport-agnostic for testing."""

    def __init__(self, scenario: Scenario, config: Config):
        self.session = build_session(scenario, config)
        self.scenario_name = scenario.name
        self._last_prompt: dict | None = None
        self._last_elements: list[dict] | None = None

    def greeting(self) -> list[dict]:
        out = [{"type": "hello", "schema_version": SCHEMA_VERSION, "scenario": self.scenario_name}]
        out.extend(self._view_updates(initial=True))
        out.append({"type": "state", "digest": self.session.digest()})
        return out

    def handle(self, raw: str) -> list[dict]:
        out: list[dict] = []
        try:
            msg = json.loads(raw)
        except json.JSONDecodeError as e:
            msg = None
            out.append({"type": "error", "code": "bad_message", "text": f"invalid JSON: {e.msg}"})
        if msg is not None:
            try:
                apply_step(self.session, _translate(msg))
            except SchemaError as e:
                out.append({"type": "error", "code": "bad_message", "text": str(e)})
            except SessionError as e:
                out.append({"type": "error", "code": e.code, "text": e.text})
        for event in self.session.drain_events():
            out.append(_event_message(event))
        out.extend(self._view_updates())
        out.append({"type": "state", "digest": self.session.digest()})
        return out

    def _view_updates(self, initial: bool = False) -> list[dict]:
        out: list[dict] = []
        prompt = self.session.current_prompt()
        prompt_msg = (
            {"type": "prompt", "question": None, "options": []}
            if prompt is None
            else {"type": "prompt", "question": prompt.question, "options": list(prompt.options)}
        )
        if initial or prompt_msg != self._last_prompt:
            out.append(prompt_msg)
            self._last_prompt = prompt_msg
        elements = [el.to_dict() for el in self.session.elements()]
        if initial or elements != self._last_elements:
            out.append({"type": "elements", "elements": elements})
            self._last_elements = elements
        return out


async def serve_forever(
    scenario: Scenario,
    config: Config,
    port: int,
    host: str = "127.0.0.1",
) -> None:
    """Accept connections until cancelled; one isolated session each."""

    async def handler(websocket) -> None:
        conn = SessionConnection(scenario, config)
        try:
            for message in conn.greeting():
                await websocket.send(_dumps(message))
            async for raw in websocket:
                for message in conn.handle(raw):
                    await websocket.send(_dumps(message))
        except ConnectionClosed:
            # Client went away mid-exchange; the session simply ends.
            return

    async with ws_serve(handler, host, port) as server:
        bound = server.sockets[0].getsockname()[1] if server.sockets else port
        print(f"listening on ws://{host}:{bound}", flush=True)
        await asyncio.get_running_loop().create_future()
