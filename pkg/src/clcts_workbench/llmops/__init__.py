"""Chat-model operations: prompt rendering, truncation, language checks,
the wrong-language retry protocol, retrieve-then-summarize, and the
LLM-as-judge flow, over pluggable record/replay transports."""

from __future__ import annotations

from .langdetect import detect_language
from .prompts import PromptKind, available_templates, render_prompt, template_text
from .protocol import (
    Attempt,
    JudgeResult,
    SummaryResult,
    TRUNCATION_BUDGETS,
    invalid_output_report,
    judge_summary,
    retrieve_then_summarize,
    summarize_with_retry,
    truncate_for_model,
)
from .transport import (
    ChatRequest,
    HttpChatTransport,
    RecordingTransport,
    ReplayTransport,
    ScriptedTransport,
    Transport,
)

__all__ = [
    "Attempt",
    "ChatRequest",
    "HttpChatTransport",
    "JudgeResult",
    "PromptKind",
    "RecordingTransport",
    "ReplayTransport",
    "ScriptedTransport",
    "SummaryResult",
    "TRUNCATION_BUDGETS",
    "Transport",
    "available_templates",
    "detect_language",
    "invalid_output_report",
    "judge_summary",
    "render_prompt",
    "retrieve_then_summarize",
    "summarize_with_retry",
    "template_text",
    "truncate_for_model",
]
