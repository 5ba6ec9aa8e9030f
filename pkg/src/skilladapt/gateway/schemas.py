"""Typed, bounded tool definitions and call validation.

Every adaptation reachable from natural language goes through one of the
registered tools; arguments are validated against the declared bounds
before anything touches a skill model.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import MissingParam, OutOfBounds, UnknownTool


@dataclass
class ToolParam:
    name: str
    kind: str                  # number | integer | string | array
    unit: str = ""
    bounds: tuple | None = None    # (min, max) for numerics
    choices: tuple | None = None   # enum for strings
    length: int | None = None      # fixed length for arrays
    required: bool = True

    def validate(self, value):
        if self.kind in ("number", "integer"):
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise OutOfBounds(self.name, value, "numeric")
            if self.bounds is not None:
                lo, hi = self.bounds
                if not (lo <= value <= hi):
                    raise OutOfBounds(self.name, value, [lo, hi])
        elif self.kind == "string":
            if not isinstance(value, str):
                raise OutOfBounds(self.name, value, "string")
            if self.choices is not None and value not in self.choices:
                raise OutOfBounds(self.name, value, list(self.choices))
        elif self.kind == "array":
            try:
                items = list(value)
            except TypeError:
                raise OutOfBounds(self.name, value, "array")
            if self.length is not None and len(items) != self.length:
                raise OutOfBounds(self.name, value,
                                  f"array of length {self.length}")
            for v in items:
                if not isinstance(v, (int, float)) or isinstance(v, bool):
                    raise OutOfBounds(self.name, v, "numeric array element")

    def json_schema(self):
        if self.kind == "array":
            return {"type": "array", "items": {"type": "number"},
                    "minItems": self.length, "maxItems": self.length}
        if self.kind == "string":
            sch = {"type": "string"}
            if self.choices:
                sch["enum"] = list(self.choices)
            return sch
        sch = {"type": self.kind}
        if self.bounds is not None:
            sch["minimum"], sch["maximum"] = self.bounds
        return sch


@dataclass
class ToolSchema:
    name: str
    description: str
    params: list[ToolParam]
    target_skill: str          # kmp | ergodic

    def json_schema(self):
        """OpenAI-style function schema."""
        return {
            "type": "function",
            "function": {
                "name": self.name,
                "description": self.description,
                "parameters": {
                    "type": "object",
                    "properties": {p.name: p.json_schema()
                                   for p in self.params},
                    "required": [p.name for p in self.params if p.required],
                },
            },
        }


@dataclass
class ToolCall:
    tool: str
    args: dict
    origin: str = "test"       # llm | test | ui


@dataclass
class ValidationResult:
    ok: bool
    error: Exception | None = None

    @property
    def reason(self):
        return "" if self.ok else str(self.error)


class ToolRegistry:
    def __init__(self):
        self._tools: dict[str, ToolSchema] = {}

    def register(self, schema: ToolSchema):
        if schema.name in self._tools:
            raise ValueError(f"tool {schema.name!r} already registered")
        self._tools[schema.name] = schema

    def get(self, name):
        if name not in self._tools:
            raise UnknownTool(name)
        return self._tools[name]

    def names(self):
        return list(self._tools)

    def __len__(self):
        return len(self._tools)

    def json_schemas(self):
        return [t.json_schema() for t in self._tools.values()]


def register_builtin_tools() -> ToolRegistry:
    """The eight built-in adaptation tools with their validated bounds."""
    reg = ToolRegistry()
    reg.register(ToolSchema(
        "AddViaPoints",
        "Insert a trajectory via-point at a normalized time with a "
        "Cartesian position.",
        [ToolParam("time", "number", bounds=(0.0, 1.0)),
         ToolParam("pos", "array", unit="m", length=3)],
        "kmp"))
    reg.register(ToolSchema(
        "AddRepulsion",
        "Push the trajectory out of a spherical obstacle.",
        [ToolParam("pos", "array", unit="m", length=3),
         ToolParam("radius", "number", unit="m", bounds=(1e-6, 1.0))],
        "kmp"))
    reg.register(ToolSchema(
        "SlowDown",
        "Reduce traversal speed by a percentage on a normalized time "
        "window.",
        [ToolParam("percentage", "number", unit="%", bounds=(1.0, 100.0)),
         ToolParam("t_start", "number", bounds=(0.0, 1.0)),
         ToolParam("t_end", "number", bounds=(0.0, 1.0))],
        "kmp"))
    reg.register(ToolSchema(
        "SpeedUp",
        "Increase traversal speed by a percentage on a normalized time "
        "window.",
        [ToolParam("percentage", "number", unit="%", bounds=(1.0, 100.0)),
         ToolParam("t_start", "number", bounds=(0.0, 1.0)),
         ToolParam("t_end", "number", bounds=(0.0, 1.0))],
        "kmp"))
    reg.register(ToolSchema(
        "SetVelocity",
        "Set the coverage controller velocity limit.",
        [ToolParam("velocity", "number", bounds=(3.0, 16.0))],
        "ergodic"))
    reg.register(ToolSchema(
        "SetForce",
        "Set the contact normal force setpoint.",
        [ToolParam("force", "number", unit="N", bounds=(5.0, 30.0))],
        "ergodic"))
    reg.register(ToolSchema(
        "SetStiffness",
        "Set the surface-tangential translational stiffness.",
        [ToolParam("stiffness", "number", unit="N/m",
                   bounds=(500.0, 2000.0))],
        "ergodic"))
    reg.register(ToolSchema(
        "SetExecState",
        "Pause or resume coverage execution.",
        [ToolParam("state", "string", choices=("pause", "resume"))],
        "ergodic"))
    return reg


def validate_call(registry: ToolRegistry, call: ToolCall) -> ValidationResult:
    """Check existence, required args and bounds; never mutates anything."""
    try:
        schema = registry.get(call.tool)
        for p in schema.params:
            if p.name not in call.args:
                if p.required:
                    raise MissingParam(f"{call.tool}: {p.name}")
                continue
            p.validate(call.args[p.name])
        return ValidationResult(True)
    except (UnknownTool, MissingParam, OutOfBounds) as e:
        return ValidationResult(False, e)
