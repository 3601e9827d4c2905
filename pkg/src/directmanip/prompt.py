"""Composed prompts: literal text, object-words, and template slots.

A prompt is a sequence of segments. Object-words are references
(selections, element ids, canvas points) standing in noun position;
slots are the holes left behind when a prompt is abstracted into a
reusable tool.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from . import svg as svgmod
from .document import Document, ObjectRef, SvgElementId, SvgPoint, TextSpan, slice_span
from .errors import InvalidPosition


@dataclass(frozen=True, slots=True)
class LiteralText:
    text: str

    def __post_init__(self) -> None:
        if not self.text:
            raise ValueError("literal segments must be non-empty")


@dataclass(frozen=True, slots=True)
class ObjectWord:
    ref: ObjectRef
    display: str

    def __post_init__(self) -> None:
        if not self.display:
            raise ValueError("object-word display must be non-empty")


@dataclass(frozen=True, slots=True)
class Slot:
    index: int

    def __post_init__(self) -> None:
        if self.index < 0:
            raise ValueError("slot index must be non-negative")


PromptSegment = Union[LiteralText, ObjectWord, Slot]


@dataclass(frozen=True, slots=True)
class ComposedPrompt:
    """Normalized segment sequence: adjacent literals merged, slot
    indices unique and contiguous from zero."""

    segments: tuple[PromptSegment, ...] = ()

    def __post_init__(self) -> None:
        merged: list[PromptSegment] = []
        for segment in self.segments:
            if (
                isinstance(segment, LiteralText)
                and merged
                and isinstance(merged[-1], LiteralText)
            ):
                merged[-1] = LiteralText(merged[-1].text + segment.text)
            else:
                merged.append(segment)
        object.__setattr__(self, "segments", tuple(merged))

        indices = sorted(s.index for s in self.segments if isinstance(s, Slot))
        if indices != list(range(len(indices))):
            raise ValueError(f"slot indices must be contiguous from 0, got {indices}")

    @property
    def object_words(self) -> tuple[ObjectWord, ...]:
        return tuple(s for s in self.segments if isinstance(s, ObjectWord))

    @property
    def slots(self) -> tuple[Slot, ...]:
        return tuple(s for s in self.segments if isinstance(s, Slot))

    @property
    def literal_text(self) -> str:
        return "".join(s.text for s in self.segments if isinstance(s, LiteralText))


def extract_nouns(prompt: ComposedPrompt) -> tuple[ObjectRef, ...]:
    """Object-word references in order of appearance, duplicates kept."""
    return tuple(word.ref for word in prompt.object_words)


def tool_label(prompt: ComposedPrompt) -> str:
    """Human-readable label: literal text with every object-word or slot
    shown as ``?``, single-spaced at segment boundaries, whitespace
    collapsed."""
    label = ""
    for segment in prompt.segments:
        part = segment.text if isinstance(segment, LiteralText) else "?"
        if label and not label[-1].isspace() and not part[0].isspace():
            label += " "
        label += part
    return " ".join(label.split())


def display_for_ref(doc: Document, ref: ObjectRef) -> str:
    """Chip text for a reference: selected text (truncated), element tag
    and id, or point coordinates."""
    if isinstance(ref, TextSpan):
        text = slice_span(doc.content, ref)
        return text if len(text) <= 20 else text[:20] + "…"
    if isinstance(ref, SvgElementId):
        tag = "element"
        if doc.kind == "svg":
            found = svgmod.elements_by_id(svgmod.parse_svg(doc.content)).get(ref.id)
            if found is not None:
                tag = found.tag
        return f"{tag} {ref.id}"
    return f"({ref.x}, {ref.y})"


# --- insertion ------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class InsertAt:
    """Drop between characters: byte ``offset`` within literal segment
    ``segment``."""

    segment: int
    offset: int


@dataclass(frozen=True, slots=True)
class OnWord:
    """Drop onto a word: the maximal non-whitespace run around byte
    ``offset`` of literal segment ``segment`` is replaced."""

    segment: int
    offset: int


InsertPosition = Union[InsertAt, OnWord]


def _char_index(text: str, byte_offset: int) -> int:
    data = text.encode("utf-8")
    if byte_offset < 0 or byte_offset > len(data):
        raise InvalidPosition(f"offset {byte_offset} out of range")
    if byte_offset < len(data) and (data[byte_offset] & 0xC0) == 0x80:
        raise InvalidPosition(f"offset {byte_offset} splits a character")
    return len(data[:byte_offset].decode("utf-8"))


def _spaced(left: str, right: str) -> tuple[str, str]:
    if left and not left[-1].isspace():
        left += " "
    if right and not right[0].isspace():
        right = " " + right
    return left, right


def insert_object_word(
    prompt: ComposedPrompt,
    position: InsertPosition,
    ref: ObjectRef,
    display: str,
) -> ComposedPrompt:
    """New prompt with an object-word dropped at ``position``.

    ``InsertAt`` splits the literal at the offset; ``OnWord`` replaces
    the word under the offset. A single space is ensured on each
    non-empty side.
    """
    if not prompt.segments:
        if position == InsertAt(0, 0):
            return ComposedPrompt((ObjectWord(ref, display),))
        raise InvalidPosition("prompt is empty; only InsertAt(0, 0) applies")

    index = position.segment
    if not 0 <= index < len(prompt.segments):
        raise InvalidPosition(f"no segment {index}")
    target = prompt.segments[index]
    if not isinstance(target, LiteralText):
        raise InvalidPosition("insertion position must be inside a literal segment")

    at = _char_index(target.text, position.offset)
    if isinstance(position, InsertAt):
        left, right = target.text[:at], target.text[at:]
    else:
        if at >= len(target.text) or target.text[at].isspace():
            raise InvalidPosition("offset is not on a word")
        lo = at
        while lo > 0 and not target.text[lo - 1].isspace():
            lo -= 1
        hi = at
        while hi < len(target.text) and not target.text[hi].isspace():
            hi += 1
        left, right = target.text[:lo], target.text[hi:]

    left, right = _spaced(left, right)
    middle: list[PromptSegment] = []
    if left:
        middle.append(LiteralText(left))
    middle.append(ObjectWord(ref, display))
    if right:
        middle.append(LiteralText(right))
    return ComposedPrompt(
        prompt.segments[:index] + tuple(middle) + prompt.segments[index + 1 :]
    )
