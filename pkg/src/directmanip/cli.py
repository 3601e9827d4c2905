"""Command line entry point: serve the editing API over HTTP.

The API key for remote backends comes from the DIRECTMANIP_API_KEY
environment variable; there is no flag for it and it is never printed.
"""

from __future__ import annotations

import argparse
import sys

import uvicorn

from .backend import BackendConfig, make_backend
from .engineering import DEFAULT_MODEL
from .errors import EngineError
from .service import create_app


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="directmanip",
        description="Serve the direct-manipulation editing API.",
    )
    parser.add_argument("--port", type=int, default=8787, help="listen port (default 8787)")
    parser.add_argument(
        "--backend",
        choices=("mock", "remote"),
        default="mock",
        help="completion backend (default mock)",
    )
    parser.add_argument(
        "--mock-rules",
        metavar="FILE",
        help="rules file for the mock backend",
    )
    parser.add_argument(
        "--endpoint",
        metavar="URL",
        help="chat-completions base URL for the remote backend",
    )
    parser.add_argument("--model", default=DEFAULT_MODEL, help=f"model name (default {DEFAULT_MODEL})")
    parser.add_argument(
        "--temperature", type=float, default=0.0, help="sampling temperature (default 0)"
    )
    parser.add_argument(
        "--snapshot-dir",
        metavar="DIR",
        help="write per-session JSON snapshots here on shutdown",
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.backend == "mock" and not args.mock_rules:
        print("error: --backend mock requires --mock-rules", file=sys.stderr)
        return 2
    if args.backend == "remote" and not args.endpoint:
        print("error: --backend remote requires --endpoint", file=sys.stderr)
        return 2

    config = BackendConfig(
        mode=args.backend,
        mock_rules_path=args.mock_rules,
        endpoint_url=args.endpoint,
        model=args.model,
        temperature=args.temperature,
    )
    try:
        backend = make_backend(config)
    except (EngineError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    app = create_app(
        backend,
        model=config.model,
        temperature=config.temperature,
        snapshot_dir=args.snapshot_dir,
    )
    uvicorn.run(app, host="127.0.0.1", port=args.port, log_level="info")
    return 0


if __name__ == "__main__":
    sys.exit(main())
