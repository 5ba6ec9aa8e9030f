from .envelope import (BridgeEnvelope, BridgeRouter, MOTION_SERVICES,
                       LLM_SERVICES, SERVICES, TOPICS, PROTOCOL_VERSION,
                       error_envelope, response_envelope, topic_envelope)
from .server import create_app, serve

__all__ = [
    "BridgeEnvelope", "BridgeRouter", "MOTION_SERVICES", "LLM_SERVICES",
    "SERVICES", "TOPICS", "PROTOCOL_VERSION", "error_envelope",
    "response_envelope", "topic_envelope", "create_app", "serve",
]
