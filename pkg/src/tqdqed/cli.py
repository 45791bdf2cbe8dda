"""Command-line entry point: ``tqdqed <command> [--config PATH] [--out DIR] [--set k=v] [--seed N]``."""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .experiments import COMMANDS, ConfigError, build_config, load_config_file, run_command


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tqdqed", description="TQD qubit / cavity simulations")
    parser.add_argument("--version", action="version", version=f"tqdqed {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, help="YAML config; frequencies in Hz")
        p.add_argument("--out", type=Path, default=Path("."), help="output directory")
        p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                       help="override a config entry, e.g. sweep.grid=[2,4]")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--dump-config", action="store_true", help="write the resolved config and exit")
    return parser


def _fail(kind: str, message: str, code: int) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message}, sort_keys=True) + "\n")
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        user = load_config_file(args.config) if args.config else None
        cfg = build_config(args.command, user, args.overrides, args.seed)
    except (ConfigError, OSError, ValueError, TypeError) as exc:
        return _fail(type(exc).__name__, str(exc), 2)

    out = args.out
    try:
        out.mkdir(parents=True, exist_ok=True)
        if not os.access(out, os.W_OK):
            raise PermissionError(f"output directory {out} is not writable")
    except OSError as exc:
        return _fail(type(exc).__name__, str(exc), 2)

    if args.dump_config:
        import yaml

        (out / f"{args.command}_config.yaml").write_text(yaml.safe_dump(cfg, sort_keys=True))
        return 0

    try:
        files = run_command(args.command, cfg)
    except ConfigError as exc:
        return _fail(type(exc).__name__, str(exc), 2)
    except Exception as exc:  # noqa: BLE001 - any failure is reported as JSON
        return _fail(type(exc).__name__, str(exc), 1)

    for name, text in files.items():
        (out / name).write_text(text, encoding="utf-8")
    for name in files:
        print(out / name)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
