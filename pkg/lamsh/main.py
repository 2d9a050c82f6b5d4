import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from lamsh.core.config import settings
from lamsh.engine.typesys import ResolutionMode
from lamsh.shell.repl import repl_loop
from lamsh.shell.session import DumpOptions, Session

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=settings.PROJECT_NAME,
        description="A shell whose lines are typed lambda-calculus expressions.",
    )
    parser.add_argument("script", nargs="?", help="script to run instead of the interactive shell")
    parser.add_argument("-c", "--command", help="evaluate a single line and exit")
    parser.add_argument("--rc", help=f"startup script (default: $LAMSH_RC or {settings.DEFAULT_RC})")
    parser.add_argument("--no-rc", action="store_true", help="skip the startup script")
    parser.add_argument("--no-prelude", action="store_true", help="start from an empty environment")
    parser.add_argument("--dump-ast", action="store_true", help="print the parsed tree of each line")
    parser.add_argument("--dump-rewritten", action="store_true", help="print each line after operator rewriting")
    parser.add_argument("--dump-types", action="store_true", help="print each line's typed tree")
    parser.add_argument(
        "--log-level",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help=f"logging level (default: {settings.LOG_LEVEL})",
    )
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK

    if args.log_level:
        logging.getLogger().setLevel(args.log_level)

    dump = DumpOptions(ast=args.dump_ast, rewritten=args.dump_rewritten, types=args.dump_types)
    interactive = args.script is None and args.command is None
    mode = ResolutionMode.REPL if interactive or args.command is not None else ResolutionMode.SCRIPT
    session = Session(mode=mode, dump=dump, prelude=not args.no_prelude)

    # DEBUG: Log startup mode (main.py:main)
    logger.info(f"[MAIN] {settings.PROJECT_NAME} starting in {mode.value} mode")

    if not args.no_rc:
        session.load_rc(Path(args.rc).expanduser() if args.rc else settings.rc_path)

    if args.command is not None:
        return session.run_lines([args.command])
    if args.script is not None:
        try:
            return session.run_script(args.script)
        except OSError as e:
            sys.stderr.write(f"{settings.PROJECT_NAME}: cannot read {args.script}: {e.strerror or e}\n")
            return EXIT_USAGE
    return repl_loop(session)


if __name__ == "__main__":
    sys.exit(main())
