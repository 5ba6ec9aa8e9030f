"""Wire protocol for the engine/UI channel.

One JSON document per frame. Envelope fields: type, id, name, payload, v.
The router here is transport-free so it can be exercised directly in
tests; the WebSocket server wraps it.
"""

from __future__ import annotations

from typing import Any, Literal

from pydantic import BaseModel, Field, ValidationError

from ..errors import (BadPayload, SkillError, UnknownService, UnknownTopic)

PROTOCOL_VERSION = 1

MOTION_SERVICES = (
    "list_demonstrations",
    "get_demonstration",
    "get_model",
    "get_updated_model",
    "start_execution",
    "stop_execution",
    "add_via_point",
    "adapt_via_point",
    "delete_via_point",
    "set_hid_enabled",
    "get_hid_state",
    "apply_time_scale",
    "add_repulsion",
)
LLM_SERVICES = (
    "set_llm_input_query",
    "get_llm_answer",
    "transcribe_speech",
)
SERVICES = MOTION_SERVICES + LLM_SERVICES
TOPICS = ("execution_status", "llm_notification")


class BridgeEnvelope(BaseModel):
    type: Literal["service_request", "service_response", "topic_publish",
                  "subscribe", "unsubscribe", "error"]
    id: int = 0
    name: str = ""
    payload: Any = None
    v: int = Field(default=PROTOCOL_VERSION)


def response_envelope(request_id: int, name: str, payload) -> dict:
    return {"type": "service_response", "id": request_id, "name": name,
            "payload": payload, "v": PROTOCOL_VERSION}


def error_envelope(request_id: int, name: str, code: str, message: str
                   ) -> dict:
    return {"type": "error", "id": request_id, "name": name,
            "payload": {"code": code, "message": message},
            "v": PROTOCOL_VERSION}


def topic_envelope(topic: str, payload) -> dict:
    if topic not in TOPICS:
        raise UnknownTopic(topic)
    return {"type": "topic_publish", "id": 0, "name": topic,
            "payload": payload, "v": PROTOCOL_VERSION}


def _require(payload, *keys):
    if not isinstance(payload, dict):
        raise BadPayload("payload must be an object")
    for k in keys:
        if k not in payload:
            raise BadPayload(f"missing field {k!r}")
    return payload


def _demo_payload(demo) -> dict:
    return {
        "t": [float(s.t) for s in demo.samples],
        "pos": [[float(x) for x in s.pos] for s in demo.samples],
        "quat": [[float(x) for x in s.quat] for s in demo.samples],
        "wrench": [None if s.wrench is None else
                   [float(x) for x in s.wrench] for s in demo.samples],
    }


def _svc_list_demonstrations(engine, payload):
    return {"names": engine.list_demonstrations()}


def _svc_get_demonstration(engine, payload):
    p = _require(payload, "name")
    return _demo_payload(engine.get_demonstration(p["name"]))


def _svc_get_model(engine, payload):
    return engine.get_model()


def _svc_get_updated_model(engine, payload):
    return engine.get_updated_model()


def _svc_start_execution(engine, payload):
    engine.start_execution()
    return {"started": True}


def _svc_stop_execution(engine, payload):
    engine.stop_execution()
    return {"stopped": True}


def _svc_add_via_point(engine, payload):
    p = _require(payload, "pos")
    if "index" in p:
        via_id = engine.add_via_point_by_index(int(p["index"]), p["pos"])
    elif "time" in p:
        via_id = engine.add_via_point_at(float(p["time"]), p["pos"],
                                         source="graphical")
    else:
        raise BadPayload("need either 'index' or 'time'")
    return {"id": via_id}


def _svc_adapt_via_point(engine, payload):
    p = _require(payload, "id", "pos")
    engine.adapt_via_point(int(p["id"]), p["pos"])
    return {}


def _svc_delete_via_point(engine, payload):
    p = _require(payload, "id")
    engine.delete_via_point(int(p["id"]))
    return {}


def _svc_set_hid_enabled(engine, payload):
    p = _require(payload, "enabled")
    engine.set_hid_enabled(bool(p["enabled"]))
    return {}


def _svc_get_hid_state(engine, payload):
    return engine.get_hid_state()


def _svc_apply_time_scale(engine, payload):
    p = _require(payload, "percentage", "t_start", "t_end", "mode")
    profile = engine.apply_time_scale(float(p["percentage"]),
                                      float(p["t_start"]),
                                      float(p["t_end"]), p["mode"])
    return {"knots": [float(k) for k in profile.knots],
            "factors": [float(f) for f in profile.factors],
            "total_duration": float(profile.total_duration())}


def _svc_add_repulsion(engine, payload):
    p = _require(payload, "pos", "radius")
    ids = engine.add_repulsion(p["pos"], float(p["radius"]))
    return {"ids": list(ids)}


def _svc_set_llm_input_query(engine, payload):
    p = _require(payload, "text")
    return engine.set_llm_input_query(p["text"])


def _svc_get_llm_answer(engine, payload):
    return engine.get_llm_answer()


def _svc_transcribe_speech(engine, payload):
    return engine.transcribe_speech()


_HANDLERS = {
    "list_demonstrations": _svc_list_demonstrations,
    "get_demonstration": _svc_get_demonstration,
    "get_model": _svc_get_model,
    "get_updated_model": _svc_get_updated_model,
    "start_execution": _svc_start_execution,
    "stop_execution": _svc_stop_execution,
    "add_via_point": _svc_add_via_point,
    "adapt_via_point": _svc_adapt_via_point,
    "delete_via_point": _svc_delete_via_point,
    "set_hid_enabled": _svc_set_hid_enabled,
    "get_hid_state": _svc_get_hid_state,
    "apply_time_scale": _svc_apply_time_scale,
    "add_repulsion": _svc_add_repulsion,
    "set_llm_input_query": _svc_set_llm_input_query,
    "get_llm_answer": _svc_get_llm_answer,
    "transcribe_speech": _svc_transcribe_speech,
}

assert set(_HANDLERS) == set(SERVICES)


class BridgeRouter:
    """Transport-independent request handling: dict in, dict out."""

    def __init__(self, engine):
        self.engine = engine

    def handle_request(self, raw: dict) -> dict:
        try:
            env = BridgeEnvelope.model_validate(raw)
        except ValidationError as e:
            rid = raw.get("id", 0) if isinstance(raw, dict) else 0
            name = raw.get("name", "") if isinstance(raw, dict) else ""
            return error_envelope(rid if isinstance(rid, int) else 0,
                                  str(name), "BadPayload", str(e))
        if env.type != "service_request":
            return error_envelope(env.id, env.name, "BadPayload",
                                  f"unexpected envelope type {env.type!r}")
        handler = _HANDLERS.get(env.name)
        if handler is None:
            return error_envelope(env.id, env.name, "UnknownService",
                                  f"unknown service {env.name!r}")
        try:
            payload = handler(self.engine, env.payload)
        except SkillError as e:
            return error_envelope(env.id, env.name,
                                  e.__class__.__name__, str(e))
        except (TypeError, ValueError, KeyError) as e:
            return error_envelope(env.id, env.name, "BadPayload", str(e))
        return response_envelope(env.id, env.name, payload)
