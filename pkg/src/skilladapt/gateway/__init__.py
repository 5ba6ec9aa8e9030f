from .schemas import (ToolParam, ToolSchema, ToolCall, ToolRegistry,
                      ValidationResult, register_builtin_tools,
                      validate_call)
from .dispatch import DispatchRecord, dispatch
from .backends import mock_backend, HttpBackend
from .session import ChatSession, ChatTurn

__all__ = [
    "ToolParam", "ToolSchema", "ToolCall", "ToolRegistry",
    "ValidationResult", "register_builtin_tools", "validate_call",
    "DispatchRecord", "dispatch", "mock_backend", "HttpBackend",
    "ChatSession", "ChatTurn",
]
