"""Session orchestration: routing actions to templates, applying
completions, and keeping history and the toolbar consistent.

An operation runs as: normalize the selection, classify, engineer one
request per target, join all completions, validate payloads, then
mutate — document, history entry, and toolbar registration happen
together or not at all. Localized operations may succeed partially (per
target); everything else is atomic by construction.
"""

from __future__ import annotations

import re
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Literal, Union

from . import svg as svgmod
from .backend import Backend
from .document import (
    ChangeSet,
    DocKind,
    Document,
    ObjectRef,
    Selection,
    SvgElementId,
    SvgPoint,
    TextChange,
    TextSpan,
    byte_length,
    diff_svg,
    diff_text,
    normalize_selection,
    ref_kind,
    splice_str,
)
from .engineering import (
    DEFAULT_MODEL,
    engineer_global,
    engineer_localized,
    engineer_svg_refs,
    engineer_text_refs,
    feedback_targets,
    instruction_text,
)
from .errors import (
    ArityMismatch,
    Busy,
    Cancelled,
    EmptyPayload,
    EngineError,
    BackendError,
    InvalidResponse,
    NounKindMismatch,
    NotSvg,
    OverlappingSelection,
    ParseError,
    SvgNotFound,
)
from .history import History, HistoryEntry
from .prompt import ComposedPrompt, display_for_ref, tool_label
from .tools import Tool, ToolRegistry, instantiate_tool

OperationKind = Literal["localized", "textRefs", "svgRefs", "global", "toolInvocation"]

_EMPTY_SELECTION = Selection(())


@dataclass(frozen=True, slots=True)
class TargetStatus:
    ref: ObjectRef
    ok: bool
    detail: str = ""


@dataclass(frozen=True, slots=True)
class OperationResult:
    document: Document
    changes: ChangeSet
    kind: OperationKind
    label: str
    created_tool_id: str | None
    target_status: tuple[TargetStatus, ...]
    elapsed: float


def classify(doc_kind: DocKind, selection: Selection, prompt: ComposedPrompt) -> OperationKind:
    """Decide the operation family.

    Span or element references in the selection make the edit
    localized; otherwise object-words in the prompt pick the reference
    template for the document kind; a bare prompt rewrites globally.
    Point refs only ever contribute location context.
    """
    if any(isinstance(r, (TextSpan, SvgElementId)) for r in selection.refs):
        return "localized"
    if prompt.object_words:
        return "textRefs" if doc_kind == "text" else "svgRefs"
    return "global"


_SVG_TAG = re.compile(r"<svg[\s>/]|</svg\s*>")


def _extract_svg_block(payload: str) -> str:
    start = payload.find("<svg")
    if start < 0:
        raise SvgNotFound("response contains no <svg> element")
    depth = 0
    for found in _SVG_TAG.finditer(payload, start):
        if found.group(0).startswith("</"):
            depth -= 1
            if depth == 0:
                return payload[start : found.end()]
        else:
            depth += 1
    raise SvgNotFound("response has an unterminated <svg> element")


def extract_payload(raw: str, *, localized: bool, doc_kind: DocKind) -> str:
    """Usable payload from a model response.

    Strips whitespace, one surrounding code fence, one surrounding
    matched quote pair, and (for localized responses) an echoed
    ``<blank>:`` prefix. Whole-svg responses are cut down to the first
    balanced ``<svg>…</svg>`` block.
    """
    payload = raw.strip()
    if payload.startswith("```") and payload.endswith("```"):
        newline = payload.find("\n")
        if 0 < newline < len(payload) - 3:
            payload = payload[newline + 1 : -3].strip()
    if len(payload) >= 2 and payload[0] == payload[-1] and payload[0] in ("'", '"'):
        payload = payload[1:-1].strip()
    if localized and payload.startswith("<blank>:"):
        payload = payload[len("<blank>:") :].strip()
    if not localized and doc_kind == "svg":
        payload = _extract_svg_block(payload)
    if not payload:
        raise EmptyPayload("response carries no payload")
    return payload


def _check_cancel(cancel: threading.Event | None) -> None:
    if cancel is not None and cancel.is_set():
        raise Cancelled("operation cancelled")


class EditSession:
    """One document, its toolbar, and its history behind a busy guard.

    At most one mutating operation runs at a time; concurrent attempts
    raise :class:`Busy` instead of queueing.
    """

    def __init__(
        self,
        document: Document,
        backend: Backend,
        *,
        model: str = DEFAULT_MODEL,
        temperature: float = 0.0,
    ):
        self.document = document
        self.backend = backend
        self.model = model
        self.temperature = temperature
        self.tools = ToolRegistry()
        self.history = History(document)
        self._busy = False
        self._cancel_current: threading.Event | None = None
        self._lock = threading.Lock()

    @classmethod
    def create(
        cls,
        kind: DocKind,
        content: str,
        backend: Backend,
        *,
        model: str = DEFAULT_MODEL,
        temperature: float = 0.0,
    ) -> "EditSession":
        """Session over fresh content; svg is canonicalized on entry."""
        if kind == "svg":
            _, content = svgmod.canonicalize(content)
        return cls(Document(kind, content, 0), backend, model=model, temperature=temperature)

    @property
    def busy(self) -> bool:
        return self._busy

    @contextmanager
    def _exclusive(self, cancel: threading.Event | None = None):
        """Claim the session for one operation, registering its cancel
        event atomically with the busy flag so a rejected concurrent
        attempt can never clobber the running operation's event."""
        with self._lock:
            if self._busy:
                raise Busy("an operation is already in flight")
            self._busy = True
            self._cancel_current = cancel
        try:
            yield
        finally:
            with self._lock:
                self._busy = False
                self._cancel_current = None

    def cancel_current(self) -> bool:
        """Signal the operation in flight, if any; returns whether one
        was signalled."""
        with self._lock:
            event = self._cancel_current
        if event is None:
            return False
        event.set()
        return True

    # --- public operations -------------------------------------------------

    def execute(
        self,
        prompt: ComposedPrompt,
        selection: Selection = _EMPTY_SELECTION,
        cancel: threading.Event | None = None,
    ) -> OperationResult:
        with self._exclusive(cancel):
            return self._run(prompt, selection, cancel, override_kind=None)

    def invoke_tool(
        self,
        tool_id: str,
        nouns: tuple[ObjectRef, ...] = (),
        cancel: threading.Event | None = None,
    ) -> OperationResult:
        with self._exclusive(cancel):
            tool = self.tools.get(tool_id)
            prompt, selection = self._tool_call(tool, tuple(nouns))
            return self._run(prompt, selection, cancel, override_kind="toolInvocation")

    def preview(
        self, prompt: ComposedPrompt, selection: Selection = _EMPTY_SELECTION
    ) -> tuple[ObjectRef, ...]:
        """References the operation would touch (for hover feedback)."""
        return feedback_targets(normalize_selection(self.document, selection), prompt)

    def undo(self) -> Document:
        with self._exclusive():
            self.document = self.history.undo()
            return self.document

    def redo(self) -> Document:
        with self._exclusive():
            self.document = self.history.redo()
            return self.document

    # --- internals -----------------------------------------------------------

    def _tool_call(
        self, tool: Tool, nouns: tuple[ObjectRef, ...]
    ) -> tuple[ComposedPrompt, Selection]:
        for noun in nouns:
            if ref_kind(noun) != self.document.kind:
                raise NounKindMismatch(
                    f"{type(noun).__name__} noun cannot apply to a {self.document.kind} document"
                )
        if tool.kind == "selectionApplied":
            if not nouns:
                raise ArityMismatch("selection-applied tool needs at least one noun")
            if any(isinstance(n, SvgPoint) for n in nouns):
                raise NounKindMismatch("points cannot be rewrite targets")
            return tool.template, Selection(nouns)
        displays = None
        if tool.kind == "slotted" and len(nouns) == tool.arity:
            displays = tuple(display_for_ref(self.document, n) for n in nouns)
        return instantiate_tool(tool, nouns, displays), _EMPTY_SELECTION

    def _run(
        self,
        prompt: ComposedPrompt,
        selection: Selection,
        cancel: threading.Event | None,
        override_kind: OperationKind | None,
    ) -> OperationResult:
        started = time.monotonic()
        if prompt.slots:
            raise ValueError("cannot execute a prompt with unfilled slots")
        doc = self.document
        sel = normalize_selection(doc, selection)
        kind = classify(doc.kind, sel, prompt)

        statuses: tuple[TargetStatus, ...] = ()
        if kind == "localized":
            new_doc, changes, statuses = self._localized(doc, sel, prompt, cancel)
        else:
            new_doc, changes = self._whole(doc, sel, prompt, kind, cancel)
        _check_cancel(cancel)

        label = tool_label(prompt)
        self.history.record(HistoryEntry(label, doc, new_doc, time.time()))
        self.document = new_doc
        had_selection = any(not isinstance(r, SvgPoint) for r in sel.refs)
        tool, created = self.tools.register(prompt, had_selection)
        return OperationResult(
            document=new_doc,
            changes=changes,
            kind=override_kind or kind,
            label=label,
            created_tool_id=tool.id if created else None,
            target_status=statuses,
            elapsed=time.monotonic() - started,
        )

    def _complete(self, request: "object", cancel: threading.Event | None) -> str:
        """Backend call that only ever raises :class:`EngineError`."""
        try:
            return self.backend.complete(request, cancel)
        except EngineError:
            raise
        except Exception as exc:  # noqa: BLE001 - misbehaving backend
            raise BackendError(str(exc)) from exc

    def _fan_out(
        self,
        requests: list[tuple[ObjectRef, "object"]],
        cancel: threading.Event | None,
    ) -> dict[ObjectRef, Union[str, EngineError]]:
        """Run all requests, joining every future before returning."""
        results: dict[ObjectRef, Union[str, EngineError]] = {}
        with ThreadPoolExecutor(max_workers=min(8, len(requests))) as pool:
            futures = [
                (key, pool.submit(self._complete, request, cancel))
                for key, request in requests
            ]
            for key, future in futures:
                try:
                    results[key] = future.result()
                except EngineError as exc:
                    results[key] = exc
        return results

    def _localized(
        self,
        doc: Document,
        sel: Selection,
        prompt: ComposedPrompt,
        cancel: threading.Event | None,
    ) -> tuple[Document, ChangeSet, tuple[TargetStatus, ...]]:
        instruction = instruction_text(doc, prompt)
        if doc.kind == "text":
            targets: list[ObjectRef] = [r for r in sel.refs if isinstance(r, TextSpan)]
            spans = {r: r for r in targets}
        else:
            targets = [r for r in sel.refs if isinstance(r, SvgElementId)]
            tree = svgmod.parse_svg(doc.content)
            all_spans = svgmod.element_spans(tree)
            spans = {r: all_spans[r.id] for r in targets}
            ordered = sorted(spans.values())
            for a, b in zip(ordered, ordered[1:]):
                if b.start < a.end:
                    raise OverlappingSelection("selected elements nest within each other")

        requests = [
            (
                ref,
                engineer_localized(
                    doc,
                    ref,
                    instruction,
                    model=self.model,
                    temperature=self.temperature,
                ),
            )
            for ref in targets
        ]
        outcomes = self._fan_out(requests, cancel)
        _check_cancel(cancel)

        replacements: dict[ObjectRef, str] = {}
        statuses: list[TargetStatus] = []
        first_error: EngineError | None = None

        def failed(ref: ObjectRef, error: EngineError) -> None:
            nonlocal first_error
            if isinstance(error, Cancelled):
                raise error
            if first_error is None:
                first_error = error
            statuses.append(TargetStatus(ref, False, f"{error.code}: {error}"))

        for ref in targets:
            outcome = outcomes[ref]
            if isinstance(outcome, EngineError):
                failed(ref, outcome)
                continue
            try:
                payload = extract_payload(outcome, localized=True, doc_kind=doc.kind)
            except EngineError as exc:
                failed(ref, exc)
                continue
            if doc.kind == "svg":
                candidate = splice_str(doc.content, spans[ref], payload)
                try:
                    svgmod.parse_svg(candidate)
                except (ParseError, NotSvg) as exc:
                    failed(ref, InvalidResponse(f"replacement breaks the document: {exc}"))
                    continue
            replacements[ref] = payload
            statuses.append(TargetStatus(ref, True))

        if not replacements:
            assert first_error is not None
            raise first_error

        content = doc.content
        for ref in sorted(replacements, key=lambda r: spans[r], reverse=True):
            content = splice_str(content, spans[ref], replacements[ref])

        if doc.kind == "text":
            delta = 0
            changed: list[TextChange] = []
            for ref in targets:
                if ref not in replacements:
                    continue
                span = spans[ref]
                width = byte_length(replacements[ref])
                changed.append(
                    TextChange(TextSpan(span.start + delta, span.start + delta + width), "replaced")
                )
                delta += width - len(span)
            new_doc = Document("text", content, doc.version + 1)
            return new_doc, ChangeSet("text", spans=tuple(changed)), tuple(statuses)

        try:
            tree = svgmod.assign_ids(svgmod.parse_svg(content))
        except (ParseError, NotSvg) as exc:
            raise InvalidResponse(f"combined replacements break the document: {exc}") from exc
        new_doc = Document("svg", svgmod.serialize_svg(tree), doc.version + 1)
        return new_doc, diff_svg(doc, new_doc), tuple(statuses)

    def _whole(
        self,
        doc: Document,
        sel: Selection,
        prompt: ComposedPrompt,
        kind: OperationKind,
        cancel: threading.Event | None,
    ) -> tuple[Document, ChangeSet]:
        points = tuple(r for r in sel.refs if isinstance(r, SvgPoint))
        if kind == "textRefs":
            request = engineer_text_refs(
                doc, prompt, model=self.model, temperature=self.temperature
            )
        elif kind == "svgRefs":
            request = engineer_svg_refs(
                doc, prompt, location=points, model=self.model, temperature=self.temperature
            )
        else:
            request = engineer_global(
                doc, prompt, location=points, model=self.model, temperature=self.temperature
            )

        raw = self._complete(request, cancel)
        payload = extract_payload(raw, localized=False, doc_kind=doc.kind)

        if doc.kind == "text":
            new_doc = Document("text", payload, doc.version + 1)
            return new_doc, diff_text(doc, new_doc)

        try:
            tree = svgmod.assign_ids(svgmod.parse_svg(payload))
        except (ParseError, NotSvg) as exc:
            raise InvalidResponse(f"response svg does not parse: {exc}") from exc
        new_doc = Document("svg", svgmod.serialize_svg(tree), doc.version + 1)
        return new_doc, diff_svg(doc, new_doc)
