"""Direct-manipulation editing engine for LLM-backed documents.

Turns pointing gestures (text selections, SVG element picks, canvas
locations) into engineered prompts, applies the completions, and keeps
per-session history and a toolbar of reusable prompts.
"""

from __future__ import annotations

from . import errors
from .document import (
    ChangeSet,
    Document,
    Selection,
    SvgElementId,
    SvgPoint,
    TextChange,
    TextSpan,
    diff_svg,
    diff_text,
    normalize_selection,
    splice_text,
)
from .orchestrator import EditSession, OperationResult
from .prompt import ComposedPrompt, LiteralText, ObjectWord, Slot

__all__ = [
    "ChangeSet",
    "ComposedPrompt",
    "Document",
    "EditSession",
    "LiteralText",
    "ObjectWord",
    "OperationResult",
    "Selection",
    "Slot",
    "SvgElementId",
    "SvgPoint",
    "TextChange",
    "TextSpan",
    "diff_svg",
    "diff_text",
    "errors",
    "normalize_selection",
    "splice_text",
]
