"""Command line: ``vanishcert certify|crosscheck|catalog``."""
from __future__ import annotations

import argparse
import dataclasses
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .config import load_config
from .errors import CertError, ConfigError
from .jsonio import dumps
from .lie_core import list_catalog
from .pipeline import EXIT_ERROR, error_payload, run_certify, run_crosscheck

LOG_LEVELS = {"quiet": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}


def _setup_logging() -> None:
    level = os.environ.get("CERT_LOG", "quiet").lower()
    logging.basicConfig(level=LOG_LEVELS.get(level, logging.ERROR), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def _emit(payload: dict, out: str | None) -> None:
    text = dumps(payload)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load(args):
    config = load_config(args.config)
    if getattr(args, "seed", None) is not None:
        if not 0 <= args.seed < 2**64:
            raise ConfigError("--seed must be in [0, 2^64)")
        config = dataclasses.replace(config, seed=args.seed)
    return config


def cmd_certify(args) -> int:
    try:
        config = _load(args)
    except CertError as exc:
        _emit(error_payload(exc), args.out)
        return EXIT_ERROR
    _, payload, code = run_certify(config)
    _emit(payload, args.out or config.output)
    return code


def cmd_crosscheck(args) -> int:
    try:
        config = _load(args)
    except CertError as exc:
        _emit(error_payload(exc), args.out)
        return EXIT_ERROR
    _, payload, code = run_crosscheck(config)
    _emit(payload, args.out or config.output)
    return code


def cmd_catalog(args) -> int:
    _emit({"tool_version": __version__, "families": list_catalog()}, None)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vanishcert", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("certify", help="compute T^p certificates")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_certify)
    p = sub.add_parser("crosscheck", help="compare spectra with the root-system criteria")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_crosscheck)
    p = sub.add_parser("catalog", help="list supported algebra families")
    p.set_defaults(func=cmd_catalog)
    return parser


def main(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CertError as exc:  # pragma: no cover - pipelines already map these
        _emit(error_payload(exc), None)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
