"""Chat backends: a deterministic rule-based mock for offline use and an
HTTP client speaking the chat-completions function-calling wire format.

Backend contract: callable(messages, tool_schemas) -> response dict shaped
like {"message": {"role": "assistant", "content": str|None,
"tool_calls": [{"id": str, "type": "function", "function":
{"name": str, "arguments": json-string}}]}}.
"""

from __future__ import annotations

import json
import re

import httpx

from ..errors import BackendUnreachable, MalformedBackendResponse

_NUM = r"[-+]?\d+(?:\.\d+)?"


def _tool_call(name, args, idx=0):
    return {
        "id": f"call_{idx}",
        "type": "function",
        "function": {"name": name, "arguments": json.dumps(args)},
    }


def _response(text, calls=None):
    return {"message": {"role": "assistant", "content": text,
                        "tool_calls": calls or []}}


def _window(text):
    m = re.search(rf"between\s+({_NUM})\s*%\s+and\s+({_NUM})\s*%", text)
    if m:
        return float(m.group(1)) / 100.0, float(m.group(2)) / 100.0
    m = re.search(rf"between\s+({_NUM})\s+and\s+({_NUM})", text)
    if m:
        return float(m.group(1)), float(m.group(2))
    if "start" in text:
        return 0.0, 0.3
    if "end" in text:
        return 0.7, 1.0
    if "middle" in text:
        return 0.35, 0.65
    return 0.0, 1.0


def _percentage(text):
    m = re.search(rf"by\s+({_NUM})\s*(?:%|percent)", text)
    if m:
        return float(m.group(1))
    if "half" in text or "double" in text:
        return 50.0 if "half" in text else 100.0
    return 30.0


def mock_backend(messages, tool_schemas):
    """Keyword/number rule table covering the canonical test utterances.

    A pure function of its inputs; unknown utterances get a text-only
    reply.
    """
    user = ""
    for m in reversed(messages):
        if m.get("role") == "user":
            user = m.get("content", "")
            break
    text = user.lower().strip()

    if re.search(r"\bpause\b", text):
        return _response("Pausing execution.",
                         [_tool_call("SetExecState", {"state": "pause"})])
    if re.search(r"\bresume\b|\bcontinue\b", text):
        return _response("Resuming execution.",
                         [_tool_call("SetExecState", {"state": "resume"})])

    if "slow" in text:
        lo, hi = _window(text)
        p = _percentage(text)
        return _response(
            f"Slowing down by {p:g}% between {lo:g} and {hi:g}.",
            [_tool_call("SlowDown",
                        {"percentage": p, "t_start": lo, "t_end": hi})])
    if "speed" in text or "faster" in text:
        lo, hi = _window(text)
        p = _percentage(text)
        return _response(
            f"Speeding up by {p:g}% between {lo:g} and {hi:g}.",
            [_tool_call("SpeedUp",
                        {"percentage": p, "t_start": lo, "t_end": hi})])

    if "avoid" in text:
        nums = [float(x) for x in re.findall(_NUM, text)]
        radius = 0.1
        m = re.search(rf"radius\s+({_NUM})", text)
        if m:
            radius = float(m.group(1))
            nums = nums[:-1]
        pos = nums[:3] if len(nums) >= 3 else [0.5, 0.0, 0.0]
        return _response(
            f"Adding repulsion at {pos} with radius {radius:g} m.",
            [_tool_call("AddRepulsion", {"pos": pos, "radius": radius})])

    if "via" in text or "waypoint" in text:
        m = re.search(
            rf"(?:time|t)\s*=?\s*({_NUM}).*?"
            rf"(?:position|pos|at)\s*=?\s*({_NUM})[ ,]+({_NUM})[ ,]+({_NUM})",
            text)
        if m:
            t_val = float(m.group(1))
            pos = [float(m.group(i)) for i in (2, 3, 4)]
            return _response(
                f"Adding a via-point at time {t_val:g}.",
                [_tool_call("AddViaPoints", {"time": t_val, "pos": pos})])

    m = re.search(rf"force\s+(?:to|of)?\s*({_NUM})", text)
    if m:
        return _response(f"Setting force to {m.group(1)} N.",
                         [_tool_call("SetForce",
                                     {"force": float(m.group(1))})])
    m = re.search(rf"velocity\s+(?:to|of)?\s*({_NUM})", text)
    if m:
        return _response(f"Setting velocity to {m.group(1)}.",
                         [_tool_call("SetVelocity",
                                     {"velocity": float(m.group(1))})])
    m = re.search(rf"stiffness\s+(?:to|of)?\s*({_NUM})", text)
    if m:
        return _response(f"Setting stiffness to {m.group(1)} N/m.",
                         [_tool_call("SetStiffness",
                                     {"stiffness": float(m.group(1))})])

    return _response("I can adjust speed, via-points, obstacles and "
                     "coverage setpoints; please tell me what to change.")


class HttpBackend:
    """Client for an OpenAI-compatible chat-completions endpoint with
    function calling."""

    def __init__(self, url, model="local", timeout=60.0, api_key=None):
        self.url = url.rstrip("/")
        self.model = model
        self.timeout = timeout
        self.api_key = api_key

    def __call__(self, messages, tool_schemas):
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        body = {"model": self.model, "messages": messages,
                "tools": tool_schemas}
        try:
            resp = httpx.post(f"{self.url}/v1/chat/completions", json=body,
                              headers=headers, timeout=self.timeout)
            resp.raise_for_status()
        except httpx.HTTPError as e:
            raise BackendUnreachable(str(e)) from e
        try:
            data = resp.json()
            message = data["choices"][0]["message"]
            return {"message": {
                "role": "assistant",
                "content": message.get("content"),
                "tool_calls": message.get("tool_calls") or [],
            }}
        except (KeyError, IndexError, ValueError) as e:
            raise MalformedBackendResponse(str(e)) from e
