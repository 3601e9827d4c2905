"""Exception hierarchy shared by all engine modules.

Every failure the engine can signal is an :class:`EngineError` subclass so
the HTTP layer can map them to status codes uniformly (the class name is
the wire-level error code).
"""

from __future__ import annotations


class EngineError(Exception):
    """Base class for engine-level failures."""

    @property
    def code(self) -> str:
        return type(self).__name__


# --- document / selection ---------------------------------------------------

class InvalidSpan(EngineError):
    """Span out of bounds, reversed, or not on a character boundary."""


class OverlappingSelection(EngineError):
    """Two selected text spans overlap (or nest)."""


class UnknownElement(EngineError):
    """An element id does not resolve to exactly one element."""


class KindMismatch(EngineError):
    """Operation applied to a document or reference of the wrong kind."""


class NotCanonical(EngineError):
    """SVG content is not in the canonical serialization."""


# --- svg parsing ------------------------------------------------------------

class ParseError(EngineError):
    """Malformed XML. ``position`` is the byte offset of the failure."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (byte {position})")
        self.position = position


class NotSvg(EngineError):
    """Well-formed XML whose root element is not ``svg``."""


# --- prompt composition -----------------------------------------------------

class InvalidPosition(EngineError):
    """Insertion position does not identify a literal offset or word."""


class EmptyInstruction(EngineError):
    """The prompt carries no instruction text."""


class NoObjectWords(EngineError):
    """A reference template was requested for a prompt without object-words."""


# --- backend ----------------------------------------------------------------

class BackendError(EngineError):
    """Base class for completion-backend failures."""


class Timeout(BackendError):
    """The remote call did not complete within the configured timeout."""


class RemoteError(BackendError):
    """Non-success HTTP response from the remote endpoint."""

    def __init__(self, status: int, body: str):
        super().__init__(f"remote returned status {status}")
        self.status = status
        self.body = body


class NoRuleMatched(BackendError):
    """No mock rule matched the request (misconfigured rules)."""


class FormatError(EngineError):
    """Malformed mock-rules file. ``line`` is 1-based."""

    def __init__(self, message: str, line: int):
        super().__init__(f"{message} (line {line})")
        self.line = line


class Cancelled(EngineError):
    """The cancel signal fired before a result was produced."""


# --- tools ------------------------------------------------------------------

class ArityMismatch(EngineError):
    """Noun count does not match the tool's slot count."""


class NounKindMismatch(EngineError):
    """A noun's kind is incompatible with the tool or document."""


class UnknownTool(EngineError):
    """Tool id not present in the registry."""


# --- history ----------------------------------------------------------------

class StaleSnapshot(EngineError):
    """Recorded entry's before-state is not the current document."""


class NothingToUndo(EngineError):
    """Undo requested with an empty undo stack."""


class NothingToRedo(EngineError):
    """Redo requested with an empty redo stack."""


# --- orchestration ----------------------------------------------------------

class Busy(EngineError):
    """An operation is already in flight on this session."""


class EmptyPayload(EngineError):
    """The backend response contained no usable payload."""


class SvgNotFound(EngineError):
    """No ``<svg>…</svg>`` block found in a response expected to carry one."""


class InvalidResponse(EngineError):
    """The response payload failed validation (e.g. unparseable SVG)."""


# --- service ----------------------------------------------------------------

class UnknownSession(EngineError):
    """Session id not present on the server."""
