"""Completion backends: a deterministic rules-driven mock and a remote
chat-completions client.

The mock backend answers from a rules file so every flow can run
offline and reproducibly. Rules are tried in order; the file must end
with an empty-substring catch-all so no request can fall through.

Rules file format — records separated by a line of exactly ``---``::

    match-substring: <blank>: pictures
    response:
      illustrations
    ---
    match-pattern: synonym for (\\w+)
    response:
      \\1
    ---
    match-substring:
    response:
      OK

Each record has one ``match-substring:`` or ``match-pattern:`` line and
one ``response:`` line followed by a two-space-indented block. Pattern
rules match with ``re.search`` and their responses expand group
backreferences.
"""

from __future__ import annotations

import os
import re
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Literal, Union

import httpx

from .engineering import DEFAULT_MODEL, EngineeredRequest
from .errors import (
    BackendError,
    Cancelled,
    FormatError,
    NoRuleMatched,
    RemoteError,
    Timeout,
)

API_KEY_ENV = "DIRECTMANIP_API_KEY"
_RETRIES = 2
_BACKOFF_BASE = 0.5


@dataclass(frozen=True, slots=True)
class MockRule:
    kind: Literal["substring", "pattern"]
    match: str
    response: str
    line: int = 0

    def respond(self, content: str) -> str | None:
        if self.kind == "substring":
            return self.response if self.match in content else None
        found = re.search(self.match, content)
        if found is None:
            return None
        return found.expand(self.response)


@dataclass(frozen=True, slots=True)
class BackendConfig:
    mode: Literal["mock", "remote"] = "mock"
    mock_rules_path: str | None = None
    endpoint_url: str | None = None
    api_key: str | None = None
    model: str = DEFAULT_MODEL
    temperature: float = 0.0
    timeout: float = 60.0

    def __post_init__(self) -> None:
        if self.mode not in ("mock", "remote"):
            raise ValueError(f"unknown backend mode {self.mode!r}")
        if self.mode == "mock" and not self.mock_rules_path:
            raise ValueError("mock backend requires a rules file")
        if self.mode == "remote" and not self.endpoint_url:
            raise ValueError("remote backend requires an endpoint url")


def load_mock_rules(path: str | Path) -> tuple[MockRule, ...]:
    """Parse a rules file. Raises FormatError (with a 1-based line
    number) on structural problems, including a missing final
    catch-all."""
    lines = Path(path).read_text("utf-8").split("\n")
    rules: list[MockRule] = []

    kind: str | None = None
    match: str | None = None
    match_line = 0
    block: list[str] | None = None

    def finalize(at: int) -> None:
        nonlocal kind, match, block, match_line
        if kind is None and block is None:
            return
        if kind is None or match is None:
            raise FormatError("record has no match line", at)
        if block is None:
            raise FormatError("record has no response", at)
        while block and block[-1] == "":
            block.pop()
        if kind == "pattern":
            try:
                re.compile(match)
            except re.error as exc:
                raise FormatError(f"bad pattern: {exc}", match_line) from exc
        rules.append(MockRule(kind, match, "\n".join(block), match_line))  # type: ignore[arg-type]
        kind = match = None
        block = None

    def field_value(line: str, prefix: str) -> str:
        rest = line[len(prefix):]
        return rest[1:] if rest.startswith(" ") else rest

    for i, line in enumerate(lines, start=1):
        if line == "---":
            finalize(i)
        elif block is not None and (line.startswith("  ") or line == ""):
            block.append(line[2:] if line.startswith("  ") else "")
        elif line.startswith("match-substring:") or line.startswith("match-pattern:"):
            if kind is not None:
                raise FormatError("record has two match lines", i)
            if block is not None:
                raise FormatError("expected --- between records", i)
            prefix = "match-substring:" if line.startswith("match-substring:") else "match-pattern:"
            kind = "substring" if prefix == "match-substring:" else "pattern"
            match = field_value(line, prefix)
            match_line = i
        elif line == "response:" or line.startswith("response: "):
            if kind is None:
                raise FormatError("response before match line", i)
            if line != "response:":
                raise FormatError("response text goes on indented lines", i)
            block = []
        elif line == "" or line.startswith("#"):
            continue
        else:
            raise FormatError(f"unrecognized line {line!r}", i)
    finalize(len(lines))

    if not rules:
        raise FormatError("rules file defines no rules", 1)
    last = rules[-1]
    if last.kind != "substring" or last.match != "":
        raise FormatError(
            "last rule must be an empty match-substring catch-all", last.line
        )
    return tuple(rules)


def _check_cancel(cancel: threading.Event | None) -> None:
    if cancel is not None and cancel.is_set():
        raise Cancelled("operation cancelled")


class MockBackend:
    def __init__(self, rules: tuple[MockRule, ...]):
        self.rules = rules

    @classmethod
    def from_file(cls, path: str | Path) -> "MockBackend":
        return cls(load_mock_rules(path))

    def complete(self, request: EngineeredRequest, cancel: threading.Event | None = None) -> str:
        _check_cancel(cancel)
        content = request.user_content
        for rule in self.rules:
            response = rule.respond(content)
            if response is not None:
                return response
        raise NoRuleMatched("no rule matched the request")


class RemoteBackend:
    """POSTs to ``{endpoint}/chat/completions`` with bearer auth.

    Transport failures are retried twice with exponential backoff;
    non-success HTTP statuses are not retried. The API key is read from
    the config or the DIRECTMANIP_API_KEY environment variable and never
    logged or echoed.
    """

    def __init__(self, config: BackendConfig):
        assert config.endpoint_url
        self.url = config.endpoint_url.rstrip("/") + "/chat/completions"
        self.timeout = config.timeout
        self._api_key = config.api_key or os.environ.get(API_KEY_ENV)
        if not self._api_key:
            raise ValueError(f"remote backend requires an API key (set {API_KEY_ENV})")

    def complete(self, request: EngineeredRequest, cancel: threading.Event | None = None) -> str:
        body = {
            "model": request.model,
            "temperature": request.temperature,
            "messages": [{"role": m.role, "content": m.content} for m in request.messages],
        }
        headers = {}
        if self._api_key:
            headers["Authorization"] = f"Bearer {self._api_key}"

        failure: BackendError | None = None
        for attempt in range(_RETRIES + 1):
            _check_cancel(cancel)
            if attempt:
                time.sleep(_BACKOFF_BASE * 2 ** (attempt - 1))
                _check_cancel(cancel)
            try:
                response = httpx.post(
                    self.url, json=body, headers=headers, timeout=self.timeout
                )
            except httpx.TimeoutException as exc:
                failure = Timeout(f"no response within {self.timeout}s")
                failure.__cause__ = exc
                continue
            except httpx.TransportError as exc:
                failure = BackendError(f"transport failure: {exc}")
                continue
            if response.status_code // 100 != 2:
                raise RemoteError(response.status_code, response.text)
            try:
                content = response.json()["choices"][0]["message"]["content"]
            except (ValueError, LookupError, TypeError) as exc:
                raise BackendError("malformed completion payload") from exc
            if not isinstance(content, str):
                raise BackendError("completion content is not text")
            return content
        assert failure is not None
        raise failure


Backend = Union[MockBackend, RemoteBackend]


def make_backend(config: BackendConfig) -> Backend:
    if config.mode == "mock":
        assert config.mock_rules_path
        return MockBackend.from_file(config.mock_rules_path)
    return RemoteBackend(config)


def complete(
    request: EngineeredRequest,
    config: BackendConfig,
    cancel: threading.Event | None = None,
) -> str:
    """One-shot completion against a fresh backend for ``config``."""
    return make_backend(config).complete(request, cancel)
