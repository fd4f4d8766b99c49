"""Estimation protocols: two-agent, multi-agent and interactive."""

from .interactive import BoardEntry, InteractiveResult, interactive_run
from .messages import AgentMessage, MessageKind, ServerEstimate, deserialize_payload, serialize_payload
from .multi_agent import multi_agent_decode, multi_agent_encode, run_multi_agent
from .params import SchemeParamsMulti, SchemeParamsTwoAgent, multi_agent_params, two_agent_params
from .two_agent import plug_in_estimate, run_two_agent, two_agent_decode, two_agent_encode

__all__ = [
    "AgentMessage",
    "BoardEntry",
    "InteractiveResult",
    "MessageKind",
    "SchemeParamsMulti",
    "SchemeParamsTwoAgent",
    "ServerEstimate",
    "deserialize_payload",
    "interactive_run",
    "multi_agent_decode",
    "multi_agent_encode",
    "multi_agent_params",
    "plug_in_estimate",
    "run_multi_agent",
    "run_two_agent",
    "serialize_payload",
    "two_agent_decode",
    "two_agent_encode",
    "two_agent_params",
]
