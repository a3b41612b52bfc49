"""
Argument parsing for the ``coxperc`` command.

    coxperc COMMAND [KIND] [--config FILE] [--preset NAME] [--threads N]
            [--log-level LEVEL] [--KEY VALUE ...]

Any ``--KEY VALUE`` pair not listed above overrides the run configuration
key ``KEY`` (dashes are read as underscores); values use YAML scalar syntax,
so ``--lambda_list "[0.1, 0.2]"`` gives a list.
"""

import argparse
import sys
from typing import Dict, List, Optional, Sequence, Tuple

from ..utils import configure_logging, get_config
from .commands import COMMANDS, EXIT_CONFIG, execute

FRONT_END_KEYS = ("config", "preset", "threads", "log_level")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coxperc",
        description="Cox percolation on Delaunay street systems: simulations and inequality checks.",
    )
    parser.add_argument("command", choices=COMMANDS, help="Command to run")
    parser.add_argument("kind", nargs="?", default=None, help="Inequality kind (verify) or plot kind (plot)")
    parser.add_argument("--config", dest="config_path", default=None, help="Flat key: value run file")
    parser.add_argument("--preset", default=None, help="Named preset from presets.yaml")
    parser.add_argument("--threads", type=int, default=None, help="Worker threads (results do not depend on it)")
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")
    return parser


def parse_overrides(extra: Sequence[str]) -> Dict[str, str]:
    """
    Turn ``["--n", "10", "--lambda=0.3"]`` into ``{"n": "10", "lambda": "0.3"}``.

    Raises:
        ValueError: A token is not a ``--key`` or a key has no value
    """
    overrides: Dict[str, str] = {}
    tokens = list(extra)
    i = 0
    while i < len(tokens):
        token = tokens[i]
        if not token.startswith("--") or len(token) == 2:
            raise ValueError(f"Expected --key value, got '{token}'")
        key, sep, value = token[2:].partition("=")
        if not sep:
            if i + 1 >= len(tokens):
                raise ValueError(f"Missing value for --{key}")
            value = tokens[i + 1]
            i += 1
        overrides[key.replace("-", "_")] = value
        i += 1
    return overrides


def parse_command_line(argv: Optional[Sequence[str]] = None) -> Tuple[argparse.Namespace, Dict[str, str]]:
    """
    Split the command line into the parsed front-end options and the
    configuration overrides.

    Positional tokens come first; every later token belongs to a
    ``--key value`` pair, so an override value is never mistaken for the kind.
    """
    parser = build_parser()
    tokens = list(sys.argv[1:] if argv is None else argv)
    split = next((i for i, token in enumerate(tokens) if token.startswith("-")), len(tokens))
    head, tail = tokens[:split], tokens[split:]
    if any(token in ("-h", "--help") for token in tail):
        parser.parse_args(["--help"])
    try:
        pairs = parse_overrides(tail)
    except ValueError as e:
        parser.error(str(e))

    front = []
    for key in FRONT_END_KEYS:
        if key in pairs:
            front.extend([f"--{key.replace('_', '-')}", pairs.pop(key)])
    args = parser.parse_args(head + front)
    if args.threads is not None:
        pairs["threads"] = str(args.threads)
    return args, pairs


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point; returns the process exit code."""
    try:
        args, overrides = parse_command_line(argv)
    except SystemExit as e:
        return EXIT_CONFIG if e.code else 0

    try:
        configure_logging(get_config().get_logging_config(), level=args.log_level)
    except ValueError as e:
        print(f"coxperc: {e}", file=sys.stderr)
        return EXIT_CONFIG
    return execute(args.command, args.config_path, overrides, preset=args.preset, argument=args.kind)
