"""Turning editing actions into chat-completion requests.

Four request shapes, one per operation family:

* localized rewrite — the document with the target replaced by a
  ``<blank>`` marker, plus the target's old text and the instruction;
* text references — selected spans wrapped in unique ``N]`` delimiter
  tokens the instruction can name;
* svg references — the instruction names element ids (and points) in
  the canonical SVG source;
* global rewrite — the whole document plus the bare instruction.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import svg as svgmod
from .document import (
    Document,
    ObjectRef,
    Selection,
    SvgElementId,
    SvgPoint,
    TextSpan,
    check_span,
    slice_span,
    splice_str,
)
from .errors import (
    EmptyInstruction,
    KindMismatch,
    NoObjectWords,
    NotCanonical,
    OverlappingSelection,
    UnknownElement,
)
from .prompt import ComposedPrompt, LiteralText, ObjectWord, Slot

DEFAULT_MODEL = "gpt-3.5-turbo"


@dataclass(frozen=True, slots=True)
class Message:
    role: str
    content: str


@dataclass(frozen=True, slots=True)
class EngineeredRequest:
    messages: tuple[Message, ...]
    model: str = DEFAULT_MODEL
    temperature: float = 0.0

    @property
    def user_content(self) -> str:
        return self.messages[-1].content


def _request(content: str, model: str, temperature: float) -> EngineeredRequest:
    return EngineeredRequest((Message("user", content),), model, temperature)


# --- delimiters -----------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class DelimiterAssignment:
    """Spans (ascending) paired with their delimiter tokens."""

    entries: tuple[tuple[TextSpan, str], ...]

    def token_for(self, span: TextSpan) -> str:
        for candidate, token in self.entries:
            if candidate == span:
                return token
        raise KeyError(span)


def allocate_delimiters(
    doc: Document, spans: list[TextSpan] | tuple[TextSpan, ...], *, base: int = 0
) -> DelimiterAssignment:
    """Assign each span a token ``N]`` absent from the document content,
    N strictly increasing in span order."""
    entries = []
    n = base
    for span in sorted(spans):
        while f"{n}]" in doc.content:
            n += 1
        entries.append((span, f"{n}]"))
        n += 1
    return DelimiterAssignment(tuple(entries))


def wrap_spans(doc: Document, assignment: DelimiterAssignment) -> str:
    """Document content with each assigned span wrapped as
    ``token + text + token``, spliced back to front."""
    content = doc.content
    for span, token in sorted(assignment.entries, reverse=True):
        content = splice_str(content, span, token + slice_span(doc.content, span) + token)
    return content


def _wrap_unambiguously(doc: Document, spans: list[TextSpan]) -> tuple[str, DelimiterAssignment]:
    # Token juxtaposition with neighbouring digits can fabricate extra
    # occurrences; re-scan and rebase until every token appears exactly
    # twice.
    base = 0
    for _ in range(64):
        assignment = allocate_delimiters(doc, spans, base=base)
        wrapped = wrap_spans(doc, assignment)
        if all(wrapped.count(token) == 2 for _, token in assignment.entries):
            return wrapped, assignment
        base = max(int(token[:-1]) for _, token in assignment.entries) + 1
    raise RuntimeError("could not allocate unambiguous delimiters")


# --- shared helpers ---------------------------------------------------------------


def _clean_instruction(text: str) -> str:
    cleaned = text.strip()
    if not cleaned:
        raise EmptyInstruction("prompt has no instruction text")
    return cleaned


def _ref_phrase(ref: ObjectRef, doc: Document) -> str:
    if isinstance(ref, SvgElementId):
        return f'element with id "{ref.id}"'
    if isinstance(ref, SvgPoint):
        return f"({ref.x}, {ref.y})"
    return f'"{slice_span(doc.content, ref)}"'


def instruction_text(doc: Document, prompt: ComposedPrompt) -> str:
    """Prompt rendered to plain instruction text: literals verbatim,
    object-words as reference phrases."""
    parts: list[str] = []
    for segment in prompt.segments:
        if isinstance(segment, LiteralText):
            parts.append(segment.text)
        elif isinstance(segment, ObjectWord):
            parts.append(_ref_phrase(segment.ref, doc))
        else:
            raise ValueError("prompt still contains unfilled slots")
    return _clean_instruction("".join(parts))


def _location_suffix(points: tuple[SvgPoint, ...]) -> str:
    return "".join(f"\n\nApply at location ({p.x}, {p.y})" for p in points)


def feedback_targets(selection: Selection, prompt: ComposedPrompt) -> tuple[ObjectRef, ...]:
    """References an operation will touch: selection refs then prompt
    nouns, first occurrence each."""
    targets: list[ObjectRef] = []
    for ref in selection.refs + tuple(w.ref for w in prompt.object_words):
        if ref not in targets:
            targets.append(ref)
    return tuple(targets)


# --- templates ---------------------------------------------------------------------


def engineer_localized(
    doc: Document,
    target: TextSpan | SvgElementId,
    instruction: str,
    *,
    model: str = DEFAULT_MODEL,
    temperature: float = 0.0,
) -> EngineeredRequest:
    """Blank-out rewrite of one target, full document as context."""
    instruction = _clean_instruction(instruction)
    if isinstance(target, TextSpan):
        if doc.kind != "text":
            raise KindMismatch("span targets require a text document")
        check_span(doc.content, target)
        content = doc.content
        span = target
    else:
        if doc.kind != "svg":
            raise KindMismatch("element targets require an svg document")
        if not svgmod.is_canonical(doc.content):
            raise NotCanonical("localized svg edits require canonical content")
        content = doc.content
        span = svgmod.element_span(svgmod.parse_svg(content), target.id)

    old_text = slice_span(content, span)
    blanked = splice_str(content, span, "<blank>")
    message = (
        f"{blanked}\n\n"
        f"<blank>: {old_text}\n\n"
        f"INSTRUCTION: {instruction}\n\n"
        f"Rewrite <blank>. Follow INSTRUCTION\n\n"
        f"<blank>:"
    )
    return _request(message, model, temperature)


def engineer_text_refs(
    doc: Document,
    prompt: ComposedPrompt,
    *,
    model: str = DEFAULT_MODEL,
    temperature: float = 0.0,
) -> EngineeredRequest:
    """Whole-text rewrite where the instruction names delimited spans."""
    if doc.kind != "text":
        raise KindMismatch("text-reference prompts require a text document")
    spans: list[TextSpan] = []
    for word in prompt.object_words:
        if not isinstance(word.ref, TextSpan):
            raise KindMismatch("text-reference prompts take span object-words only")
        check_span(doc.content, word.ref)
        if word.ref not in spans:
            spans.append(word.ref)
    if not spans:
        raise NoObjectWords("prompt names no spans")
    ordered = sorted(spans)
    for a, b in zip(ordered, ordered[1:]):
        if b.start < a.end:
            raise OverlappingSelection(f"referenced spans {a} and {b} overlap")

    wrapped, assignment = _wrap_unambiguously(doc, ordered)
    parts: list[str] = []
    for segment in prompt.segments:
        if isinstance(segment, LiteralText):
            parts.append(segment.text)
        elif isinstance(segment, ObjectWord):
            assert isinstance(segment.ref, TextSpan)
            parts.append(f"text delimited by {assignment.token_for(segment.ref)}")
        else:
            raise ValueError("prompt still contains unfilled slots")
    rendered = _clean_instruction("".join(parts))
    message = f"{wrapped}\n\n{rendered}\n\nKeep rest of the text identical"
    return _request(message, model, temperature)


def engineer_svg_refs(
    doc: Document,
    prompt: ComposedPrompt,
    *,
    location: tuple[SvgPoint, ...] = (),
    model: str = DEFAULT_MODEL,
    temperature: float = 0.0,
) -> EngineeredRequest:
    """Whole-SVG rewrite where the instruction names element ids and
    points."""
    if doc.kind != "svg":
        raise KindMismatch("svg-reference prompts require an svg document")
    words = prompt.object_words
    if not words:
        raise NoObjectWords("prompt names no elements or points")
    known = svgmod.element_ids(svgmod.parse_svg(doc.content))
    parts: list[str] = []
    for segment in prompt.segments:
        if isinstance(segment, LiteralText):
            parts.append(segment.text)
        elif isinstance(segment, ObjectWord):
            ref = segment.ref
            if isinstance(ref, TextSpan):
                raise KindMismatch("svg-reference prompts take element and point object-words")
            if isinstance(ref, SvgElementId) and ref.id not in known:
                raise UnknownElement(f"no element with id {ref.id!r}")
            parts.append(_ref_phrase(ref, doc))
        else:
            raise ValueError("prompt still contains unfilled slots")
    rendered = _clean_instruction("".join(parts))
    message = (
        f"{doc.content}\n\nReturn modified SVG code to {rendered}"
        f"{_location_suffix(location)}"
    )
    return _request(message, model, temperature)


def engineer_global(
    doc: Document,
    prompt: ComposedPrompt,
    *,
    location: tuple[SvgPoint, ...] = (),
    model: str = DEFAULT_MODEL,
    temperature: float = 0.0,
) -> EngineeredRequest:
    """Whole-document rewrite from a bare instruction."""
    if any(isinstance(s, (ObjectWord, Slot)) for s in prompt.segments):
        raise ValueError("global prompts carry literal text only")
    if location and doc.kind != "svg":
        raise KindMismatch("location context applies to svg documents")
    instruction = _clean_instruction(prompt.literal_text)
    what = "text" if doc.kind == "text" else "SVG code"
    message = (
        f"{doc.content}\n\n{instruction}\n\n"
        f"Return only the full modified {what}, nothing else"
        f"{_location_suffix(location)}"
    )
    return _request(message, model, temperature)
