"""SVG parsing, id assignment, and canonical serialization.

The engine needs every drawable element to be addressable (stable ``id``)
and locatable (a byte range in the serialized form), so SVG documents are
kept in a canonical text layout: one element per line, two-space
indentation, explicit closing tags, attributes in source order. Parsing
accepts a practical XML subset — elements, attributes, character data,
comments, processing instructions — and drops everything that is not
element structure.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .document import TextSpan
from .errors import NotSvg, ParseError, UnknownElement

_NAMED_ENTITIES = {"amp": "&", "lt": "<", "gt": ">", "quot": '"', "apos": "'"}


@dataclass(frozen=True, slots=True)
class SvgElement:
    tag: str
    attrs: tuple[tuple[str, str], ...] = ()
    children: tuple["SvgElement", ...] = ()
    text: str | None = None

    def attr(self, name: str) -> str | None:
        for key, value in self.attrs:
            if key == name:
                return value
        return None

    def with_attr(self, name: str, value: str) -> "SvgElement":
        """Copy with ``name`` set: replaced in place if present, appended
        otherwise."""
        for i, (key, _) in enumerate(self.attrs):
            if key == name:
                attrs = self.attrs[:i] + ((name, value),) + self.attrs[i + 1 :]
                return replace(self, attrs=attrs)
        return replace(self, attrs=self.attrs + ((name, value),))


@dataclass(frozen=True, slots=True)
class SvgTree:
    root: SvgElement


def _walk(element: SvgElement):
    yield element
    for child in element.children:
        yield from _walk(child)


def element_ids(tree: SvgTree) -> set[str]:
    return {e.attr("id") for e in _walk(tree.root) if e.attr("id") is not None}


def elements_by_id(tree: SvgTree) -> dict[str, SvgElement]:
    """First occurrence wins; on canonical trees ids are unique anyway."""
    out: dict[str, SvgElement] = {}
    for element in _walk(tree.root):
        eid = element.attr("id")
        if eid is not None and eid not in out:
            out[eid] = element
    return out


# --- parsing ------------------------------------------------------------------


def _is_name_start(ch: str) -> bool:
    return bool(ch) and (ch.isalpha() or ch in "_:")


def _is_name_char(ch: str) -> bool:
    return bool(ch) and (ch.isalnum() or ch in "-._:")


class _Parser:
    def __init__(self, source: str):
        self.src = source
        self.pos = 0

    def _fail(self, message: str, at: int | None = None) -> None:
        pos = self.pos if at is None else at
        raise ParseError(message, len(self.src[:pos].encode("utf-8")))

    def _peek(self) -> str:
        return self.src[self.pos] if self.pos < len(self.src) else ""

    def _starts(self, token: str) -> bool:
        return self.src.startswith(token, self.pos)

    def _expect(self, token: str) -> None:
        if not self._starts(token):
            self._fail(f"expected {token!r}")
        self.pos += len(token)

    def _skip_ws(self) -> int:
        start = self.pos
        while self._peek().isspace():
            self.pos += 1
        return self.pos - start

    def _skip_until(self, token: str, label: str) -> None:
        end = self.src.find(token, self.pos)
        if end < 0:
            self._fail(f"unterminated {label}")
        self.pos = end + len(token)

    def _skip_misc(self) -> None:
        """Whitespace, comments, PIs, and doctype between elements."""
        while True:
            self._skip_ws()
            if self._starts("<!--"):
                self._skip_until("-->", "comment")
            elif self._starts("<?"):
                self._skip_until("?>", "processing instruction")
            elif self._starts("<!DOCTYPE") or self._starts("<!doctype"):
                self._skip_until(">", "doctype")
            else:
                return

    def _name(self, label: str) -> str:
        start = self.pos
        if not _is_name_start(self._peek()):
            self._fail(f"expected {label}")
        self.pos += 1
        while _is_name_char(self._peek()):
            self.pos += 1
        return self.src[start : self.pos]

    def _entity(self) -> str:
        # self.pos is on '&'; invalid sequences pass through literally.
        end = self.src.find(";", self.pos + 1, self.pos + 12)
        if end < 0:
            self.pos += 1
            return "&"
        body = self.src[self.pos + 1 : end]
        decoded: str | None = None
        if body in _NAMED_ENTITIES:
            decoded = _NAMED_ENTITIES[body]
        elif body.startswith("#"):
            digits = body[1:]
            try:
                code = int(digits[1:], 16) if digits[:1] in ("x", "X") else int(digits)
                decoded = chr(code)
            except (ValueError, OverflowError):
                decoded = None
        if decoded is None:
            self.pos += 1
            return "&"
        self.pos = end + 1
        return decoded

    def _chars_until(self, stops: str) -> str:
        out: list[str] = []
        while True:
            ch = self._peek()
            if not ch or ch in stops:
                return "".join(out)
            if ch == "&":
                out.append(self._entity())
            else:
                out.append(ch)
                self.pos += 1

    def _quoted(self) -> str:
        quote = self._peek()
        if quote not in ("'", '"'):
            self._fail("expected quoted attribute value")
        self.pos += 1
        value = self._chars_until(quote)
        if self._peek() != quote:
            self._fail("unterminated attribute value")
        self.pos += 1
        return value

    def _element(self) -> SvgElement:
        self._expect("<")
        tag = self._name("element name")
        attrs: list[tuple[str, str]] = []
        seen: set[str] = set()
        while True:
            had_ws = self._skip_ws()
            ch = self._peek()
            if not ch:
                self._fail(f"unexpected end of input in <{tag}>")
            if ch in (">", "/"):
                break
            if not had_ws:
                self._fail("expected whitespace before attribute")
            at = self.pos
            name = self._name("attribute name")
            if name in seen:
                self._fail(f"duplicate attribute {name!r}", at=at)
            seen.add(name)
            self._skip_ws()
            self._expect("=")
            self._skip_ws()
            attrs.append((name, self._quoted()))
        if self._starts("/>"):
            self.pos += 2
            return SvgElement(tag, tuple(attrs))
        self._expect(">")

        children: list[SvgElement] = []
        chunks: list[str] = []
        while True:
            if self.pos >= len(self.src):
                self._fail(f"unexpected end of input inside <{tag}>")
            if self._starts("</"):
                at = self.pos
                self.pos += 2
                closing = self._name("closing tag name")
                if closing != tag:
                    self._fail(f"mismatched closing tag </{closing}> for <{tag}>", at=at)
                self._skip_ws()
                self._expect(">")
                break
            if self._starts("<!--"):
                self._skip_until("-->", "comment")
            elif self._starts("<?"):
                self._skip_until("?>", "processing instruction")
            elif self._starts("<!"):
                self._fail("unsupported markup declaration")
            elif self._peek() == "<":
                children.append(self._element())
            else:
                chunks.append(self._chars_until("<"))

        text: str | None = None
        if not children:
            joined = "".join(chunks)
            if joined.strip():
                text = joined
        return SvgElement(tag, tuple(attrs), tuple(children), text)

    def parse(self) -> SvgTree:
        self._skip_misc()
        if not self._peek():
            self._fail("no element found")
        root = self._element()
        self._skip_misc()
        if self._peek():
            self._fail("content after root element")
        if root.tag != "svg":
            raise NotSvg(f"root element is <{root.tag}>, not <svg>")
        return SvgTree(root)


def parse_svg(source: str) -> SvgTree:
    """Parse ``source`` into an element tree.

    Raises :class:`ParseError` (with a byte offset) on malformed input
    and :class:`NotSvg` when the root element is not ``svg``.
    """
    return _Parser(source).parse()


# --- id assignment --------------------------------------------------------------


def assign_ids(tree: SvgTree) -> SvgTree:
    """Give every non-root element a unique id.

    Existing ids are preserved at their first occurrence in document
    order; later duplicates and id-less elements receive ``c{n}`` with a
    counter that skips taken names. Idempotent on its own output.
    """
    kept: set[str] = set()
    for element in _walk(tree.root):
        eid = element.attr("id")
        if eid is not None and eid not in kept:
            kept.add(eid)

    taken = set(kept)
    claimed: set[str] = set()
    counter = 0

    def next_id() -> str:
        nonlocal counter
        while f"c{counter}" in taken:
            counter += 1
        fresh = f"c{counter}"
        taken.add(fresh)
        return fresh

    def rebuild(element: SvgElement, is_root: bool) -> SvgElement:
        eid = element.attr("id")
        keeps = eid is not None and eid not in claimed
        if keeps:
            claimed.add(eid)  # type: ignore[arg-type]
        out = element
        if not is_root and not keeps:
            out = element.with_attr("id", next_id())
        children = tuple(rebuild(child, False) for child in out.children)
        return replace(out, children=children)

    return SvgTree(rebuild(tree.root, True))


# --- serialization ----------------------------------------------------------------


def _escape_text(value: str) -> str:
    return value.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _escape_attr(value: str) -> str:
    return _escape_text(value).replace('"', "&quot;")


def _render(tree: SvgTree) -> tuple[str, dict[str, TextSpan]]:
    parts: list[str] = []
    spans: dict[str, TextSpan] = {}
    pos = 0

    def emit(chunk: str) -> None:
        nonlocal pos
        parts.append(chunk)
        pos += len(chunk.encode("utf-8"))

    def walk(element: SvgElement, depth: int) -> None:
        indent = "  " * depth
        emit(indent)
        start = pos
        attrs = "".join(f' {name}="{_escape_attr(value)}"' for name, value in element.attrs)
        emit(f"<{element.tag}{attrs}>")
        if element.children:
            for child in element.children:
                emit("\n")
                walk(child, depth + 1)
            emit(f"\n{indent}")
        elif element.text is not None and element.text.strip():
            emit(_escape_text(element.text))
        emit(f"</{element.tag}>")
        eid = element.attr("id")
        if eid is not None:
            spans[eid] = TextSpan(start, pos)

    walk(tree.root, 0)
    return "".join(parts), spans


def serialize_svg(tree: SvgTree) -> str:
    """Canonical text form: one element per line, two-space indentation,
    explicit closing tags. ``parse_svg`` of the result reproduces the
    tree."""
    return _render(tree)[0]


def element_spans(tree: SvgTree) -> dict[str, TextSpan]:
    """Byte range of every id-bearing element in the canonical form,
    excluding leading indentation."""
    return _render(tree)[1]


def element_span(tree: SvgTree, element_id: str) -> TextSpan:
    spans = element_spans(tree)
    if element_id not in spans:
        raise UnknownElement(f"no element with id {element_id!r}")
    return spans[element_id]


def is_canonical(content: str) -> bool:
    """True when ``content`` is exactly the canonical serialization of a
    fully id-assigned tree."""
    try:
        tree = parse_svg(content)
    except (ParseError, NotSvg):
        return False
    return assign_ids(tree) == tree and serialize_svg(tree) == content


def canonicalize(source: str) -> tuple[SvgTree, str]:
    """Parse, assign ids, and serialize. Fixed point after one pass."""
    tree = assign_ids(parse_svg(source))
    return tree, serialize_svg(tree)
