"""Operation-granular undo/redo over document snapshots."""

from __future__ import annotations

from dataclasses import dataclass

from .document import Document
from .errors import NothingToRedo, NothingToUndo, StaleSnapshot


@dataclass(frozen=True, slots=True)
class HistoryEntry:
    label: str
    before: Document
    after: Document
    timestamp: float

    def __post_init__(self) -> None:
        if self.before.version >= self.after.version:
            raise ValueError("an entry must advance the document version")


class History:
    """Two-stack snapshot history anchored to the current document.

    Recording requires the entry's before-state to be the document the
    history currently points at, and clears the redo stack.
    """

    def __init__(self, initial: Document):
        self._current = initial
        self._undo: list[HistoryEntry] = []
        self._redo: list[HistoryEntry] = []

    @property
    def current(self) -> Document:
        return self._current

    @property
    def can_undo(self) -> bool:
        return bool(self._undo)

    @property
    def can_redo(self) -> bool:
        return bool(self._redo)

    @property
    def entries(self) -> tuple[HistoryEntry, ...]:
        return tuple(self._undo)

    def record(self, entry: HistoryEntry) -> None:
        if entry.before != self._current:
            raise StaleSnapshot("entry does not start from the current document")
        self._undo.append(entry)
        self._redo.clear()
        self._current = entry.after

    def undo(self) -> Document:
        if not self._undo:
            raise NothingToUndo("undo stack is empty")
        entry = self._undo.pop()
        self._redo.append(entry)
        self._current = entry.before
        return entry.before

    def redo(self) -> Document:
        if not self._redo:
            raise NothingToRedo("redo stack is empty")
        entry = self._redo.pop()
        self._undo.append(entry)
        self._current = entry.after
        return entry.after
