"""Shared fixtures: sample documents, scripted backends, and helpers.

The text fixtures are two public-domain paragraphs chosen because they
exercise multi-byte punctuation, repeated words, and enough length for
randomized span selection. The svg fixtures are small flat drawings
with and without preset ids.
"""

from __future__ import annotations

import threading
import time
from pathlib import Path

import pytest
from hypothesis import settings

from directmanip.document import Document, TextSpan
from directmanip.errors import Cancelled
from directmanip.svg import canonicalize

settings.register_profile("suite", deadline=None, max_examples=120)
settings.load_profile("suite")

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = Path(__file__).parent / "golden"

ALICE_P1 = (
    "Alice was beginning to get very tired of sitting by her sister on the bank, "
    "and of having nothing to do: once or twice she had peeped into the book her "
    "sister was reading, but it had no pictures or conversations in it, “and "
    "what is the use of a book,” thought Alice “without pictures or "
    "conversations?”"
)

ALICE_P2 = (
    "So she was considering in her own mind (as well as she could, for the hot "
    "day made her feel very sleepy and stupid), whether the pleasure of making a "
    "daisy-chain would be worth the trouble of getting up and picking the "
    "daisies, when suddenly a White Rabbit with pink eyes ran close by her."
)

ALICE = ALICE_P1 + "\n\n" + ALICE_P2

TWO_CIRCLES = (
    '<svg width="300" height="150">'
    '<circle cx="133" cy="33" r="5" id="c0"></circle>'
    '<circle cx="151" cy="20" r="5" id="c1"></circle>'
    "</svg>"
)

FLOWER = """<svg width="300" height="300">
  <circle cx="150" cy="80" r="24" fill="black" id="c0"></circle>
  <circle cx="121" cy="101" r="24" fill="black" id="c1"></circle>
  <circle cx="132" cy="135" r="24" fill="black" id="c2"></circle>
  <circle cx="168" cy="135" r="24" fill="black" id="c3"></circle>
  <circle cx="179" cy="101" r="24" fill="black" id="c4"></circle>
  <circle cx="150" cy="108" r="16" fill="white" id="c5"></circle>
</svg>"""

SMILEY = (
    '<svg width="200" height="200">'
    '<circle cx="100" cy="100" r="80" fill="yellow"/>'
    '<circle cx="70" cy="80" r="10" fill="black"/>'
    '<circle cx="130" cy="80" r="10" fill="black"/>'
    '<path d="M 60 130 Q 100 170 140 130" stroke="black" fill="none"/>'
    "</svg>"
)


def span_of(content: str, needle: str, occurrence: int = 0) -> TextSpan:
    """Byte span of the nth occurrence of ``needle`` in ``content``."""
    data = content.encode("utf-8")
    target = needle.encode("utf-8")
    at = -1
    for _ in range(occurrence + 1):
        at = data.find(target, at + 1)
        if at < 0:
            raise AssertionError(f"{needle!r} (occurrence {occurrence}) not in content")
    return TextSpan(at, at + len(target))


def blank_line(message: str, marker: str = "<blank>: ") -> str:
    """Old-target text carried by a localized request message."""
    head, sep, rest = message.partition("\n\n" + marker)
    assert sep, f"no {marker!r} section in message"
    old, sep, _ = rest.partition("\n\nINSTRUCTION: ")
    assert sep, "no instruction section in message"
    return old


class ScriptedBackend:
    """Backend that answers with ``script(user_content)``; thread-safe
    as long as the script is."""

    def __init__(self, script):
        self.script = script
        self.requests = []
        self._lock = threading.Lock()

    def complete(self, request, cancel=None):
        if cancel is not None and cancel.is_set():
            raise Cancelled("operation cancelled")
        with self._lock:
            self.requests.append(request)
        return self.script(request.user_content)


class GatingBackend:
    """Backend that blocks until released (or cancelled) — for busy and
    cancellation flows."""

    def __init__(self, response: str = "GATED", limit: float = 10.0):
        self.started = threading.Event()
        self.release = threading.Event()
        self.response = response
        self.limit = limit

    def complete(self, request, cancel=None):
        self.started.set()
        deadline = time.monotonic() + self.limit
        while time.monotonic() < deadline:
            if cancel is not None and cancel.is_set():
                raise Cancelled("operation cancelled")
            if self.release.wait(0.005):
                return self.response
        raise AssertionError("gating backend was never released or cancelled")


SVG_TAGS = ("circle", "rect", "line", "path", "polygon", "text", "g")
_ATTR_NAMES = ("x", "y", "width", "height", "stroke", "fill", "d", "data-v", "label")
_ATTR_VALUES = (
    "12",
    "300",
    "black",
    "none",
    "a&b",
    '<q> "quoted" </q>',
    "héllo 世界",
    "M 10 10 L 20 20",
    "5 < 6 & 7 > 2",
)
_PRESET_IDS = ("a", "b", "dup", "c0", "c2")


def random_svg_tree(rng, max_depth: int = 3):
    """Random element tree over the drawable tag set: group nesting up
    to ``max_depth``, escape-worthy attribute values, preset ids with
    deliberate duplicates, and text content on leaf text elements."""
    from directmanip.svg import SvgElement, SvgTree

    def build(depth: int) -> SvgElement:
        tag = rng.choice(SVG_TAGS)
        names = rng.sample(_ATTR_NAMES, rng.randrange(0, 4))
        attrs = [(name, rng.choice(_ATTR_VALUES)) for name in names]
        if rng.random() < 0.35:
            attrs.append(("id", rng.choice(_PRESET_IDS)))
        children: tuple = ()
        text = None
        if tag == "g" and depth < max_depth:
            children = tuple(build(depth + 1) for _ in range(rng.randrange(0, 4)))
        elif tag == "text" and rng.random() < 0.8:
            text = rng.choice(("hello", "a & b", "x < y > z", "héllo 世界", "?!"))
        return SvgElement(tag, tuple(attrs), children, text)

    root_attrs = [("width", "300"), ("height", "200")]
    if rng.random() < 0.2:
        root_attrs.append(("id", rng.choice(_PRESET_IDS)))
    children = tuple(build(1) for _ in range(rng.randrange(1, 7)))
    return SvgTree(SvgElement("svg", tuple(root_attrs), children))


@pytest.fixture
def alice_doc() -> Document:
    return Document("text", ALICE)


@pytest.fixture
def flower_doc() -> Document:
    _, content = canonicalize(FLOWER)
    assert content == FLOWER  # the fixture is written in canonical form
    return Document("svg", content)


@pytest.fixture
def two_circles_doc() -> Document:
    _, content = canonicalize(TWO_CIRCLES)
    return Document("svg", content)
