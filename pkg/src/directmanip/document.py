"""Document state, selections, splicing, and change computation.

A document is an immutable value: ``kind`` ("text" or "svg"), UTF-8
``content``, and a monotonically increasing ``version``. All offsets in
this module are byte offsets into the UTF-8 encoding of ``content``;
spans are half-open ``[start, end)`` and must land on character
boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Union

from .errors import (
    InvalidSpan,
    KindMismatch,
    NotCanonical,
    OverlappingSelection,
    UnknownElement,
)

DocKind = Literal["text", "svg"]
ChangeKind = Literal["inserted", "replaced"]


@dataclass(frozen=True, slots=True)
class Document:
    kind: DocKind
    content: str
    version: int = 0

    def __post_init__(self) -> None:
        if self.kind not in ("text", "svg"):
            raise ValueError(f"unknown document kind {self.kind!r}")
        if self.version < 0:
            raise ValueError("version must be non-negative")


@dataclass(frozen=True, slots=True, order=True)
class TextSpan:
    """Half-open byte range ``[start, end)`` into a text document."""

    start: int
    end: int

    def __post_init__(self) -> None:
        if self.start < 0 or self.end < self.start:
            raise InvalidSpan(f"bad span [{self.start}, {self.end})")

    def __len__(self) -> int:
        return self.end - self.start


@dataclass(frozen=True, slots=True)
class SvgElementId:
    id: str

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("element id must be non-empty")


@dataclass(frozen=True, slots=True)
class SvgPoint:
    x: int
    y: int


ObjectRef = Union[TextSpan, SvgElementId, SvgPoint]


def ref_kind(ref: ObjectRef) -> DocKind:
    """Document kind a reference can point into."""
    return "text" if isinstance(ref, TextSpan) else "svg"


@dataclass(frozen=True, slots=True)
class Selection:
    """Ordered references into one document; may be empty."""

    refs: tuple[ObjectRef, ...] = ()


@dataclass(frozen=True, slots=True)
class TextChange:
    span: TextSpan
    kind: ChangeKind


@dataclass(frozen=True, slots=True)
class ChangeSet:
    """What an operation touched, expressed against the *new* document.

    Text changes carry spans in the new content; svg changes carry the
    ids of added, removed, and modified elements.
    """

    kind: DocKind
    spans: tuple[TextChange, ...] = ()
    added: frozenset[str] = field(default_factory=frozenset)
    removed: frozenset[str] = field(default_factory=frozenset)
    modified: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        if self.kind == "text":
            if self.added or self.removed or self.modified:
                raise ValueError("text change set cannot carry element ids")
            prev = 0
            for change in self.spans:
                if change.span.start < prev:
                    raise ValueError("change spans must be ascending and disjoint")
                prev = change.span.end
        else:
            if self.spans:
                raise ValueError("svg change set cannot carry text spans")
            if (self.added & self.removed) or (self.added & self.modified) or (
                self.removed & self.modified
            ):
                raise ValueError("added/removed/modified must be disjoint")

    @property
    def is_empty(self) -> bool:
        return not (self.spans or self.added or self.removed or self.modified)


# --- byte-offset helpers ------------------------------------------------------


def _is_boundary(data: bytes, offset: int) -> bool:
    if offset == 0 or offset == len(data):
        return True
    # UTF-8 continuation bytes are 0b10xxxxxx.
    return (data[offset] & 0xC0) != 0x80


def check_span(content: str, span: TextSpan) -> None:
    """Raise :class:`InvalidSpan` unless ``span`` is in bounds and on
    character boundaries of ``content``."""
    data = content.encode("utf-8")
    if span.end > len(data):
        raise InvalidSpan(f"span [{span.start}, {span.end}) beyond end {len(data)}")
    for offset in (span.start, span.end):
        if not _is_boundary(data, offset):
            raise InvalidSpan(f"offset {offset} splits a character")


def slice_span(content: str, span: TextSpan) -> str:
    """Text covered by ``span``."""
    check_span(content, span)
    return content.encode("utf-8")[span.start : span.end].decode("utf-8")


def splice_str(content: str, span: TextSpan, replacement: str) -> str:
    """Replace the bytes of ``span`` in ``content`` with ``replacement``."""
    check_span(content, span)
    data = content.encode("utf-8")
    return (data[: span.start] + replacement.encode("utf-8") + data[span.end :]).decode(
        "utf-8"
    )


def byte_length(text: str) -> int:
    return len(text.encode("utf-8"))


def splice_text(doc: Document, span: TextSpan, replacement: str) -> Document:
    """New document with ``span`` replaced; version advances by one.

    Only text documents can be spliced directly — svg documents change
    through parse/serialize so their content stays canonical.
    """
    if doc.kind != "text":
        raise KindMismatch("splice_text applies to text documents")
    return Document("text", splice_str(doc.content, span, replacement), doc.version + 1)


# --- selection normalization --------------------------------------------------


def normalize_selection(doc: Document, selection: Selection) -> Selection:
    """Validate and canonicalize a selection against ``doc``.

    Text selections come out deduplicated and sorted ascending; svg
    selections keep first-occurrence order. Raises on spans that are out
    of bounds or overlapping, ids that do not resolve, and references of
    the wrong kind for the document.
    """
    for ref in selection.refs:
        if ref_kind(ref) != doc.kind:
            raise KindMismatch(f"{type(ref).__name__} cannot point into a {doc.kind} document")

    if doc.kind == "text":
        spans: list[TextSpan] = []
        for ref in selection.refs:
            assert isinstance(ref, TextSpan)
            check_span(doc.content, ref)
            if len(ref) == 0:
                raise InvalidSpan("selected span must be non-empty")
            if ref not in spans:
                spans.append(ref)
        spans.sort()
        for a, b in zip(spans, spans[1:]):
            if b.start < a.end:
                raise OverlappingSelection(f"spans {a} and {b} overlap")
        return Selection(tuple(spans))

    from . import svg  # deferred: svg builds on this module

    known_ids = svg.element_ids(svg.parse_svg(doc.content))
    refs: list[ObjectRef] = []
    for ref in selection.refs:
        if isinstance(ref, SvgElementId) and ref.id not in known_ids:
            raise UnknownElement(f"no element with id {ref.id!r}")
        if ref not in refs:
            refs.append(ref)
    return Selection(tuple(refs))


# --- text diff ----------------------------------------------------------------


def _common_affixes(a: str, b: str) -> tuple[int, int]:
    prefix = 0
    limit = min(len(a), len(b))
    while prefix < limit and a[prefix] == b[prefix]:
        prefix += 1
    suffix = 0
    while suffix < limit - prefix and a[-1 - suffix] == b[-1 - suffix]:
        suffix += 1
    return prefix, suffix


def _myers_matches(a: str, b: str) -> list[tuple[int, int]]:
    """Index pairs (i, j), a[i] == b[j], of a maximal common subsequence.

    Standard O(ND) greedy forward search with a per-depth trace for
    backtracking.
    """
    n, m = len(a), len(b)
    if n == 0 or m == 0:
        return []
    frontier: dict[int, int] = {1: 0}
    trace: list[dict[int, int]] = []
    depth = -1
    for d in range(n + m + 1):
        trace.append(dict(frontier))
        for k in range(-d, d + 1, 2):
            if k == -d or (k != d and frontier.get(k - 1, -1) < frontier.get(k + 1, -1)):
                x = frontier.get(k + 1, 0)
            else:
                x = frontier.get(k - 1, 0) + 1
            y = x - k
            while x < n and y < m and a[x] == b[y]:
                x += 1
                y += 1
            frontier[k] = x
            if x >= n and y >= m:
                depth = d
                break
        if depth >= 0:
            break
    assert depth >= 0

    matches: list[tuple[int, int]] = []
    x, y = n, m
    for d in range(depth, -1, -1):
        v = trace[d]
        k = x - y
        if k == -d or (k != d and v.get(k - 1, -1) < v.get(k + 1, -1)):
            prev_k = k + 1
        else:
            prev_k = k - 1
        prev_x = v.get(prev_k, 0)
        prev_y = prev_x - prev_k
        # Walk the diagonal (matching) run back to the head of this step.
        while x > prev_x and y > prev_y:
            matches.append((x - 1, y - 1))
            x -= 1
            y -= 1
        if d > 0:
            x, y = prev_x, prev_y
    matches.reverse()
    return matches


def _char_to_byte_offsets(text: str) -> list[int]:
    offsets = [0]
    total = 0
    for ch in text:
        total += len(ch.encode("utf-8"))
        offsets.append(total)
    return offsets


def diff_text(old: Document, new: Document) -> ChangeSet:
    """Character-level diff; spans cover exactly the new content's
    unmatched characters.

    Regions where old-side characters were consumed are ``replaced``,
    pure additions are ``inserted``. Pure deletions have no new-side
    extent and produce no span.
    """
    if old.kind != "text" or new.kind != "text":
        raise KindMismatch("diff_text applies to text documents")
    a, b = old.content, new.content
    prefix, suffix = _common_affixes(a, b)
    core_matches = _myers_matches(a[prefix : len(a) - suffix], b[prefix : len(b) - suffix])
    matches = (
        [(i, i) for i in range(prefix)]
        + [(i + prefix, j + prefix) for i, j in core_matches]
        + [(len(a) - suffix + t, len(b) - suffix + t) for t in range(suffix)]
    )

    changes: list[tuple[int, int, ChangeKind]] = []
    prev_i, prev_j = 0, 0
    for i, j in matches + [(len(a), len(b))]:
        if j > prev_j:
            kind: ChangeKind = "replaced" if i > prev_i else "inserted"
            changes.append((prev_j, j, kind))
        prev_i, prev_j = i + 1, j + 1

    offsets = _char_to_byte_offsets(b)
    spans = tuple(
        TextChange(TextSpan(offsets[lo], offsets[hi]), kind) for lo, hi, kind in changes
    )
    return ChangeSet("text", spans=spans)


def diff_svg(old: Document, new: Document) -> ChangeSet:
    """Element-identity diff of two canonical svg documents."""
    if old.kind != "svg" or new.kind != "svg":
        raise KindMismatch("diff_svg applies to svg documents")

    from . import svg

    for doc in (old, new):
        if not svg.is_canonical(doc.content):
            raise NotCanonical("diff_svg requires canonical svg content")

    before = svg.elements_by_id(svg.parse_svg(old.content))
    after = svg.elements_by_id(svg.parse_svg(new.content))
    added = frozenset(after) - frozenset(before)
    removed = frozenset(before) - frozenset(after)
    modified = frozenset(
        eid for eid in frozenset(before) & frozenset(after) if before[eid] != after[eid]
    )
    return ChangeSet("svg", added=added, removed=removed, modified=modified)
