"""Reusable prompt tools: abstraction, instantiation, and the registry.

Submitting a prompt turns it into a toolbar entry. Object-words become
numbered slots; invoking the tool later fills the slots with fresh
nouns (or, for selection-applied tools, runs the template against a new
selection).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Literal

from .document import ObjectRef, SvgPoint, TextSpan, ref_kind
from .errors import ArityMismatch, NounKindMismatch, UnknownTool
from .prompt import ComposedPrompt, ObjectWord, Slot, tool_label

ToolKind = Literal["selectionApplied", "slotted", "global"]


def fallback_display(ref: ObjectRef) -> str:
    if isinstance(ref, TextSpan):
        return f"[{ref.start}, {ref.end})"
    if isinstance(ref, SvgPoint):
        return f"({ref.x}, {ref.y})"
    return ref.id


@dataclass(frozen=True, slots=True)
class Tool:
    id: str
    label: str
    template: ComposedPrompt
    kind: ToolKind
    arity: int = 0
    created_at: float = field(default_factory=time.time)

    def __post_init__(self) -> None:
        slots = len(self.template.slots)
        if self.kind == "slotted":
            if self.arity != slots or self.arity < 1:
                raise ValueError("slotted tool arity must equal its slot count")
        else:
            if slots or self.arity:
                raise ValueError(f"{self.kind} tools take no slots")
        if self.kind != "selectionApplied" and self.template.object_words:
            raise ValueError("abstracted templates hold no object-words")


def abstract_tool(prompt: ComposedPrompt, had_selection: bool, tool_id: str = "t0") -> Tool:
    """Template for ``prompt``: object-words become slots in order.

    ``had_selection`` marks prompts submitted with an active selection;
    without object-words those become selection-applied tools.
    """
    if prompt.slots:
        raise ValueError("prompt is already a template")
    words = prompt.object_words
    if words:
        counter = iter(range(len(words)))
        segments = tuple(
            Slot(next(counter)) if isinstance(s, ObjectWord) else s for s in prompt.segments
        )
        return Tool(tool_id, tool_label(prompt), ComposedPrompt(segments), "slotted", len(words))
    kind: ToolKind = "selectionApplied" if had_selection else "global"
    return Tool(tool_id, tool_label(prompt), prompt, kind)


def instantiate_tool(
    tool: Tool,
    nouns: tuple[ObjectRef, ...],
    displays: tuple[str, ...] | None = None,
) -> ComposedPrompt:
    """Fill a tool's template with ``nouns``.

    Slotted tools take exactly ``arity`` nouns of one document kind;
    selection-applied and global tools take none (their nouns arrive as
    a selection, or not at all).
    """
    if tool.kind != "slotted":
        if nouns:
            raise ArityMismatch(f"{tool.kind} tool takes no nouns")
        return tool.template
    if len(nouns) != tool.arity:
        raise ArityMismatch(f"tool takes {tool.arity} nouns, got {len(nouns)}")
    kinds = {ref_kind(n) for n in nouns}
    if len(kinds) > 1:
        raise NounKindMismatch("nouns mix text and svg references")
    if displays is not None and len(displays) != len(nouns):
        raise ValueError("one display per noun")

    filled: list = []
    for segment in tool.template.segments:
        if isinstance(segment, Slot):
            ref = nouns[segment.index]
            display = displays[segment.index] if displays else fallback_display(ref)
            filled.append(ObjectWord(ref, display))
        else:
            filled.append(segment)
    return ComposedPrompt(tuple(filled))


class ToolRegistry:
    """Ordered tools with sequential ids; re-registering a duplicate
    returns the existing entry."""

    def __init__(self) -> None:
        self._tools: list[Tool] = []

    def __iter__(self):
        return iter(self._tools)

    def __len__(self) -> int:
        return len(self._tools)

    def get(self, tool_id: str) -> Tool:
        for tool in self._tools:
            if tool.id == tool_id:
                return tool
        raise UnknownTool(f"no tool {tool_id!r}")

    def register(self, prompt: ComposedPrompt, had_selection: bool) -> tuple[Tool, bool]:
        """Abstract ``prompt`` and add it; returns (tool, created)."""
        candidate = abstract_tool(prompt, had_selection, tool_id=f"t{len(self._tools)}")
        for existing in self._tools:
            if (
                existing.label == candidate.label
                and existing.kind == candidate.kind
                and existing.template == candidate.template
            ):
                return existing, False
        self._tools.append(candidate)
        return candidate, True
