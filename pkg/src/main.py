import argparse
import sys
from typing import List, Optional

from config import configure_logging, get_settings
from commands import accept, audit, gen, learn, run_command, solve, trials
from services.optimizer import OptimizerFactory


def _privacy_flags(p: argparse.ArgumentParser, alpha: float = 0.3, eps: float = 1.0) -> None:
    p.add_argument("--alpha", type=float, default=alpha)
    p.add_argument("--beta", type=float, default=0.2)
    p.add_argument("--eps", type=float, default=eps)
    p.add_argument("--delta", type=float, default=0.01)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--optimizer", choices=OptimizerFactory.available(), default=None,
                   help="private optimizer backend (default: DFL_OPTIMIZER)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dpfeas", description="Private linear feasibility and halfspace learning")
    parser.add_argument("--log-level", default=None, help="overrides DFL_LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a realizable instance")
    p.add_argument("kind", choices=("feasibility", "labeled"))
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--X", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--general-position", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(handler=gen)

    p = sub.add_parser("solve", help="privately find a deep point of a feasibility instance")
    p.add_argument("--in", dest="input", default=None)
    _privacy_flags(p)
    p.add_argument("--out", default=None)
    p.set_defaults(handler=solve)

    p = sub.add_parser("learn", help="privately learn a halfspace from labeled points")
    p.add_argument("--in", dest="input", default=None)
    _privacy_flags(p)
    p.add_argument("--noise", action="store_true", help="perturb into general position first")
    p.add_argument("--out", default=None)
    p.set_defaults(handler=learn)

    p = sub.add_parser("audit", help="check the exponential mechanism's privacy on a quality-vector pair")
    p.add_argument("--in", dest="input", default=None)
    p.add_argument("--eps", type=float, default=None, help="overrides eps in the request")
    p.add_argument("--out", default=None)
    p.set_defaults(handler=audit)

    p = sub.add_parser("trials", help="seeded Monte-Carlo runs, one CSV row per trial")
    p.add_argument("kind", choices=("solve", "learn"))
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--X", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    _privacy_flags(p)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--workers", type=int, default=None, help="overrides DFL_WORKERS")
    p.add_argument("--no-general-position", dest="general_position", action="store_false")
    p.add_argument("--no-timing", dest="timing", action="store_false", help="write 0 in the millis column")
    p.add_argument("--out", default=None)
    p.set_defaults(handler=trials)

    p = sub.add_parser("accept", help="run the acceptance suite")
    p.add_argument("--scale", type=float, default=1.0, help="multiplier on every check's case count")
    p.add_argument("--only", type=int, nargs="+", default=None, help="check numbers to run")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(handler=accept)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        level = args.log_level or get_settings().log_level
    except ValueError as e:
        print(f"invalid configuration: {e}", file=sys.stderr)
        return 2
    configure_logging(level)
    return run_command(args.handler, args)


if __name__ == "__main__":
    sys.exit(main())
