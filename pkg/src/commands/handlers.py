"""Subcommand handlers. Each takes the parsed arguments and returns an exit code."""
import json
import logging
import sys
from pathlib import Path
from typing import Callable, Optional

from pydantic import ValidationError

from schemas import (
    AuditReport,
    AuditRequest,
    DeepPointRunRecord,
    FeasibilityInstance,
    HalfspaceModel,
    LabeledInstance,
)
from services.acceptance import run_acceptance
from services.deep_point import find_deep_point
from services.dp_core import RandomSource, dp_ratio_audit, max_log_ratio
from services.experiments import (
    ExperimentConfig,
    generate_feasibility_instance,
    generate_labeled_instance,
    run_trials,
    success_rate,
    write_trials_csv,
)
from services.halfspace import learn_halfspace_run, learn_halfspace_with_noise
from services.optimizer import OptimizerFactory

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INVALID = 2


def _read(path: Optional[str]) -> str:
    if path is None or path == "-":
        return sys.stdin.read()
    return Path(path).read_text()


def _write(text: str, path: Optional[str]) -> None:
    if path is None or path == "-":
        sys.stdout.write(text + "\n")
        return
    Path(path).write_text(text + "\n")
    logger.info("wrote %s", path)


def gen(args) -> int:
    rng = RandomSource(args.seed)
    if args.kind == "feasibility":
        S = generate_feasibility_instance(args.d, args.X, args.m, rng)
        doc = FeasibilityInstance.from_domain(S)
    else:
        points = generate_labeled_instance(args.d, args.X, args.m, rng, args.general_position)
        doc = LabeledInstance.from_domain(points, args.X)
    _write(doc.model_dump_json(), args.out)
    return EXIT_OK


def solve(args) -> int:
    S = FeasibilityInstance.model_validate_json(_read(args.input)).to_domain()
    optimizer = OptimizerFactory.get_optimizer(args.optimizer)
    run = find_deep_point(S, args.alpha, args.beta, args.eps, args.delta, RandomSource(args.seed), optimizer)
    record = DeepPointRunRecord.from_domain(run, S)
    _write(record.model_dump_json(indent=2), args.out)
    logger.info("depth %d/%d, composed privacy (%.4f, %.3g) %s budget", record.depth, record.size,
                record.accounted.eps, record.accounted.delta, "within" if record.within_budget else "above")
    return EXIT_OK


def learn(args) -> int:
    instance = LabeledInstance.model_validate_json(_read(args.input))
    points = instance.to_domain()
    optimizer = OptimizerFactory.get_optimizer(args.optimizer)
    rng = RandomSource(args.seed)
    if args.noise:
        run = learn_halfspace_with_noise(points, args.alpha, args.beta, args.eps, args.delta, rng, optimizer)
    else:
        run = learn_halfspace_run(points, args.alpha, args.beta, args.eps, args.delta, rng, optimizer, X=instance.X)
    model = HalfspaceModel.from_domain(run.hypothesis, points)
    _write(model.model_dump_json(), args.out)
    logger.info("val %d/%d, composed privacy (%.4f, %.3g) %s budget", model.val, len(points),
                run.accounted.eps, run.accounted.delta, "within" if run.within_budget else "above")
    return EXIT_OK


def audit(args) -> int:
    request = AuditRequest.model_validate_json(_read(args.input))
    eps = args.eps if args.eps is not None else request.eps
    q, q_prime = request.qualities()
    ratio = max_log_ratio(q, q_prime, eps)
    report = AuditReport(passed=dp_ratio_audit(q, q_prime, eps), eps=eps, max_log_ratio=float(ratio))
    _write(report.model_dump_json(), args.out)
    return EXIT_OK if report.passed else EXIT_FAILURE


def trials(args) -> int:
    cfg = ExperimentConfig(
        kind=args.kind, d=args.d, X=args.X, m=args.m, alpha=args.alpha, beta=args.beta, eps=args.eps,
        delta=args.delta, trials=args.trials, seed=args.seed, optimizer=args.optimizer,
        general_position=args.general_position, timing=args.timing,
    )
    rows = run_trials(cfg, args.workers)
    if args.out is None or args.out == "-":
        write_trials_csv(rows, sys.stdout)
    else:
        with open(args.out, "w", newline="") as out:
            write_trials_csv(rows, out)
    logger.info("success rate %.3f over %d trials", success_rate(rows), len(rows))
    return EXIT_OK


def accept(args) -> int:
    results = run_acceptance(args.scale, args.only, args.seed)
    for result in results:
        print(result.line())
    failed = [r.number for r in results if not r.passed]
    if failed:
        logger.error("acceptance checks failed: %s", failed)
        return EXIT_FAILURE
    return EXIT_OK


def run_command(handler: Callable[..., int], args) -> int:
    """Run a handler, mapping invalid input to 2 and anything else unexpected to 1."""
    try:
        return handler(args)
    except (ValidationError, json.JSONDecodeError) as e:
        logger.error("invalid document: %s", e)
        return EXIT_INVALID
    except ValueError as e:
        logger.error("%s", e)
        return EXIT_INVALID
    except Exception as e:
        logger.exception("unexpected failure: %s", e)
        return EXIT_FAILURE
