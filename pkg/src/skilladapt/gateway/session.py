"""Chat session: conversation state plus query handling against a backend."""

from __future__ import annotations

import json
import time as _time
from dataclasses import dataclass, field

from ..errors import (BackendUnreachable, MalformedBackendResponse,
                      SkillError)
from .dispatch import DispatchRecord, dispatch
from .schemas import ToolCall, ToolRegistry, validate_call


@dataclass
class ChatTurn:
    role: str                       # user | assistant | tool
    text: str
    tool_calls: list = field(default_factory=list)
    timestamp: float = field(default_factory=_time.time)

    def to_dict(self):
        return {"role": self.role, "text": self.text,
                "tool_calls": [c.to_dict() if isinstance(c, DispatchRecord)
                               else c for c in self.tool_calls],
                "timestamp": self.timestamp}


def _parse_tool_calls(raw_calls):
    calls = []
    for rc in raw_calls:
        try:
            fn = rc["function"]
            args = fn["arguments"]
            if isinstance(args, str):
                args = json.loads(args)
            calls.append(ToolCall(fn["name"], args, origin="llm"))
        except (KeyError, TypeError, json.JSONDecodeError) as e:
            raise MalformedBackendResponse(f"bad tool call: {e}") from e
    return calls


@dataclass
class ChatSession:
    registry: ToolRegistry
    engine: object
    backend: object                 # callable(messages, schemas) -> response
    turns: list = field(default_factory=list)
    records: list = field(default_factory=list)   # append-only audit trail
    on_notification: object = None

    def _messages(self):
        msgs = []
        for t in self.turns:
            if t.role in ("user", "assistant"):
                msgs.append({"role": t.role, "content": t.text})
        return msgs

    def handle_query(self, text: str) -> ChatTurn:
        """Run one user query through the backend, validate and dispatch
        any returned tool calls in order (stopping at the first rejection),
        and append the assistant turn."""
        if not text or not text.strip():
            raise ValueError("query text must be non-empty")
        t_start = _time.monotonic()
        self.turns.append(ChatTurn("user", text))
        try:
            response = self.backend(self._messages(),
                                    self.registry.json_schemas())
            calls = _parse_tool_calls(
                response["message"].get("tool_calls") or [])
            reply = response["message"].get("content") or ""
        except (BackendUnreachable, MalformedBackendResponse) as e:
            turn = ChatTurn("assistant",
                            f"[backend error] {e.__class__.__name__}: {e}")
            self.turns.append(turn)
            self._notify(turn)
            return turn

        outcomes = []
        stopped = False
        for call in calls:
            if stopped:
                rec = DispatchRecord(call, "rejected",
                                     "skipped after earlier rejection")
            else:
                rec = dispatch(self.registry, call, self.engine)
                if rec.outcome == "rejected":
                    stopped = True
            rec.wall_time_s = _time.monotonic() - t_start
            self.records.append(rec)
            outcomes.append(rec)

        lines = [reply] if reply else []
        for rec in outcomes:
            if rec.outcome == "applied":
                lines.append(f"[applied] {rec.call.tool}")
            else:
                lines.append(f"[rejected] {rec.call.tool}: {rec.reason}")
        turn = ChatTurn("assistant", "\n".join(lines) or "(no reply)",
                        tool_calls=outcomes)
        self.turns.append(turn)
        self._notify(turn)
        return turn

    def _notify(self, turn):
        if self.on_notification is not None:
            self.on_notification(turn)

    def last_answer(self) -> str:
        for t in reversed(self.turns):
            if t.role == "assistant":
                return t.text
        return ""
