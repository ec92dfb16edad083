"""Private deep-point search: fix one coordinate at a time with a private maximizer."""
import logging
import math
import time
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from .dp_core import PrivacyLedger, PrivacyParams, RandomSource, advanced_composition
from .errors import PrivacyParameterError
from .exact_arith import RatVector
from .geometry import ConstraintSet
from .optimizer import OptimizerFactory, OptimizerParams, PrivateOptimizer, private_qc_max
from .quasiconcave import DomainElement, build_decreasing_list, domain_spec, enumerate_domain

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IterationRecord:
    i: int
    r: float
    domain_size: int
    chosen: DomainElement
    achieved: int
    threshold: float
    millis: int


@dataclass
class DeepPointRun:
    alpha: float
    beta: float
    eps: float
    delta: float
    iterations: List[IterationRecord] = field(default_factory=list)
    point: RatVector = ()
    accounted: Optional[PrivacyParams] = None
    ledger: PrivacyLedger = field(default_factory=PrivacyLedger)
    backend: str = ""

    @property
    def within_budget(self) -> bool:
        return self.accounted is not None and self.accounted.within(PrivacyParams(self.eps, self.delta))

    @property
    def witnesses(self) -> Tuple[DomainElement, ...]:
        return tuple(rec.chosen for rec in self.iterations)


@dataclass(frozen=True)
class Schedule:
    """Per-iteration parameters of the coordinate-wise search."""
    d: int
    size: int
    alpha: float
    beta: float
    eps: float
    delta: float

    @property
    def alpha_step(self) -> float:
        return self.alpha / (2 * self.d * (self.d + 1))

    @property
    def beta_step(self) -> float:
        return self.beta / self.d

    @property
    def eps_step(self) -> float:
        return self.eps / (2 * math.sqrt(2 * self.d * math.log(2 / self.delta)))

    @property
    def delta_step(self) -> float:
        return self.delta / (2 * self.d)

    def r(self, i: int) -> float:
        return (1 - self.alpha_step) ** (i - 1) * self.size

    def params(self, i: int) -> OptimizerParams:
        return OptimizerParams(self.r(i), self.alpha_step, self.beta_step, self.eps_step, self.delta_step)


def validate_parameters(alpha: float, beta: float, eps: float, delta: float) -> None:
    if not 0 < alpha <= 1:
        raise PrivacyParameterError(f"alpha must lie in (0, 1], got {alpha}")
    if not 0 < beta <= 1:
        raise PrivacyParameterError(f"beta must lie in (0, 1], got {beta}")
    if not eps > 0:
        raise PrivacyParameterError(f"eps must be positive, got {eps}")
    if not 0 < delta < 0.5:
        raise PrivacyParameterError(f"delta must lie in (0, 1/2), got {delta}")


def deep_point_accounting(d: int, eps: float, delta: float) -> PrivacyParams:
    """Advanced composition of the d per-coordinate maximizations with delta' = delta/2."""
    schedule = Schedule(d, 1, 1.0, 1.0, eps, delta)
    return advanced_composition(d, schedule.eps_step, schedule.delta_step, delta / 2)


def find_deep_point(S: ConstraintSet, alpha: float, beta: float, eps: float, delta: float,
                    rng: RandomSource, optimizer: Optional[PrivateOptimizer] = None,
                    cap: Optional[int] = None) -> DeepPointRun:
    """Privately find a point of depth at least (1 - alpha)|S| when S is realizable and large enough.

    The run never inspects feasibility; on a non-realizable S it still
    returns a point.
    """
    validate_parameters(alpha, beta, eps, delta)
    if not S.items:
        raise ValueError("cannot search for a deep point of an empty constraint set")
    optimizer = optimizer or OptimizerFactory.get_optimizer()
    schedule = Schedule(S.d, len(S), alpha, beta, eps, delta)
    run = DeepPointRun(alpha, beta, eps, delta, backend=optimizer.name)

    prefix: Tuple[DomainElement, ...] = ()
    for i in range(1, S.d + 1):
        started = time.perf_counter()
        t_prev = prefix[-1].t if prefix else 1
        domain = enumerate_domain(domain_spec(S.d, S.X, i, t_prev), cap)
        L = build_decreasing_list(S, prefix)
        params = schedule.params(i)
        threshold = optimizer.threshold(len(domain), params)
        result = private_qc_max(L, domain, params, rng.child(i), optimizer)
        run.ledger.spend(f"coordinate-{i}", params.eps, params.delta)
        prefix += (result.chosen,)
        record = IterationRecord(i, params.r, len(domain), result.chosen, result.achieved_quality,
                                 threshold, int((time.perf_counter() - started) * 1000))
        run.iterations.append(record)
        logger.info("coordinate %d: r=%.2f domain=%d chose %s with Q=%d (threshold %.1f)",
                    i, record.r, record.domain_size, record.chosen.value, record.achieved, threshold)
        if params.r < threshold:
            logger.debug("coordinate %d: r below the backend threshold, utility not promised", i)

    run.point = tuple(e.value for e in prefix)
    run.accounted = deep_point_accounting(S.d, eps, delta)
    if not run.within_budget:
        logger.warning("composed privacy (%.4f, %.3g) exceeds the requested (%s, %s)",
                       run.accounted.eps, run.accounted.delta, eps, delta)
    return run


def sufficient_size(d: int, X: int, alpha: float, beta: float, eps: float, delta: float,
                    optimizer: Optional[PrivateOptimizer] = None) -> int:
    """Smallest |S| with r_i above the backend threshold at every coordinate.

    Domain sizes are bounded by their (s, t) pair counts, so the result is
    an upper estimate.
    """
    validate_parameters(alpha, beta, eps, delta)
    optimizer = optimizer or OptimizerFactory.get_optimizer()
    size = 1
    for i in range(1, d + 1):
        schedule = Schedule(d, size, alpha, beta, eps, delta)
        spec = domain_spec(d, X, i)
        threshold = optimizer.threshold(spec.pair_count, schedule.params(i))
        size = max(size, math.ceil(threshold / (1 - schedule.alpha_step) ** (i - 1)))
    return size
