"""Routing of validated tool calls onto the engine."""

from __future__ import annotations

import time as _time
from dataclasses import dataclass, field

from ..errors import SkillError
from .schemas import ToolCall, ToolRegistry, validate_call


@dataclass
class DispatchRecord:
    call: ToolCall
    outcome: str                   # applied | rejected
    reason: str = ""
    resulting_ids: list = field(default_factory=list)
    wall_time_s: float = 0.0

    def to_dict(self):
        return {
            "tool": self.call.tool,
            "args": self.call.args,
            "origin": self.call.origin,
            "outcome": self.outcome,
            "reason": self.reason,
            "resulting_ids": self.resulting_ids,
            "wall_time_s": self.wall_time_s,
        }


def dispatch(registry: ToolRegistry, call: ToolCall, engine
             ) -> DispatchRecord:
    """Apply a validated call to the engine; engine errors surface as
    rejected records, never as exceptions."""
    t0 = _time.monotonic()
    result = validate_call(registry, call)
    if not result.ok:
        return DispatchRecord(call, "rejected", result.reason,
                              wall_time_s=_time.monotonic() - t0)
    a = call.args
    try:
        ids = []
        if call.tool == "AddViaPoints":
            ids = [engine.add_via_point_at(a["time"], a["pos"],
                                           source="language")]
        elif call.tool == "AddRepulsion":
            ids = engine.add_repulsion(a["pos"], a["radius"])
        elif call.tool == "SlowDown":
            engine.apply_time_scale(a["percentage"], a["t_start"],
                                    a["t_end"], "slow")
        elif call.tool == "SpeedUp":
            engine.apply_time_scale(a["percentage"], a["t_start"],
                                    a["t_end"], "fast")
        elif call.tool == "SetVelocity":
            engine.set_velocity(a["velocity"])
        elif call.tool == "SetForce":
            engine.set_force(a["force"])
        elif call.tool == "SetStiffness":
            engine.set_stiffness(a["stiffness"])
        elif call.tool == "SetExecState":
            engine.set_exec_state(a["state"])
        else:  # registry and dispatcher out of sync
            raise SkillError(f"no dispatch route for {call.tool}")
        return DispatchRecord(call, "applied", resulting_ids=list(ids),
                              wall_time_s=_time.monotonic() - t0)
    except SkillError as e:
        return DispatchRecord(call, "rejected", str(e),
                              wall_time_s=_time.monotonic() - t0)
