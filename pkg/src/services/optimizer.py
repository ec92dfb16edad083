import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Type

from config import get_settings
from .dp_core import RandomSource, ScoredCandidate, exponential_mechanism
from .errors import PrivacyParameterError
from .quasiconcave import DecreasingPointList, DomainElement, q_eval

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OptimizerParams:
    """Promised maximum r and the (alpha, beta, eps, delta) of one private maximization."""
    r: float
    alpha: float
    beta: float
    eps: float
    delta: float = 0.0

    def __post_init__(self):
        if not self.r > 0:
            raise PrivacyParameterError(f"promised maximum r must be positive, got {self.r}")
        if not 0 < self.alpha <= 0.5:
            raise PrivacyParameterError(f"alpha must lie in (0, 1/2], got {self.alpha}")
        if not 0 < self.beta <= 1:
            raise PrivacyParameterError(f"beta must lie in (0, 1], got {self.beta}")
        if not self.eps > 0:
            raise PrivacyParameterError(f"eps must be positive, got {self.eps}")
        if not 0 <= self.delta < 1:
            raise PrivacyParameterError(f"delta must lie in [0, 1), got {self.delta}")


@dataclass(frozen=True)
class OptimizerResult:
    chosen: DomainElement
    achieved_quality: int
    backend: str


def log_star(n: int) -> int:
    """Iterated base-2 logarithm: how many ceil(log2) steps take n down to 1."""
    count = 0
    while n > 1:
        n = (n - 1).bit_length()
        count += 1
    return count


def baseline_threshold(domain_size: int, p: OptimizerParams) -> float:
    """Smallest r for which the Exponential Mechanism meets the (1 - alpha) r promise w.p. 1 - beta."""
    if domain_size < 1:
        raise ValueError("domain must be nonempty")
    return max(0.0, (2 / (p.eps * p.alpha)) * math.log(domain_size / p.beta))


def recconcave_threshold(domain_size: int, p: OptimizerParams) -> float:
    """Requirement of the recursive quasi-concave optimizer; reported only, natural log."""
    if p.delta <= 0:
        raise PrivacyParameterError("the recursive threshold needs delta > 0")
    ls = log_star(domain_size)
    if ls == 0:
        return 0.0
    return 8 ** ls * (12 * ls) / (p.alpha * p.eps) * math.log(192 * ls ** 2 / (p.beta * p.delta))


class PrivateOptimizer(ABC):
    """Private maximizer of a quasi-concave quality over an explicit finite domain."""

    name = "abstract"

    @abstractmethod
    def maximize(self, L: DecreasingPointList, domain: Sequence[DomainElement],
                 p: OptimizerParams, rng: RandomSource) -> OptimizerResult:
        pass

    @abstractmethod
    def threshold(self, domain_size: int, p: OptimizerParams) -> float:
        """Lower bound on r under which the utility promise holds."""
        pass


class ExpMechOptimizer(PrivateOptimizer):
    """Exponential Mechanism over the whole domain, quality read from the breakpoint list."""

    name = "expmech"

    def maximize(self, L, domain, p, rng):
        if not domain:
            raise ValueError("cannot optimize over an empty domain")
        cands = [ScoredCandidate(e, q_eval(L, e.value)) for e in domain]
        picked = exponential_mechanism(cands, p.eps, rng)
        return OptimizerResult(picked.payload, int(picked.quality), self.name)

    def threshold(self, domain_size, p):
        return baseline_threshold(domain_size, p)


class OptimizerFactory:
    """Factory for private optimizer backends."""

    _backends: Dict[str, Type[PrivateOptimizer]] = {
        ExpMechOptimizer.name: ExpMechOptimizer,
    }

    @staticmethod
    def available():
        return sorted(OptimizerFactory._backends)

    @staticmethod
    def get_optimizer(name: Optional[str] = None) -> PrivateOptimizer:
        """Backend by name, defaulting to DFL_OPTIMIZER."""
        name = (name or get_settings().optimizer).lower()
        backend = OptimizerFactory._backends.get(name)
        if backend is None:
            raise ValueError(f"unknown optimizer backend {name!r}; available: {', '.join(OptimizerFactory.available())}")
        return backend()


def private_qc_max(L: DecreasingPointList, domain: Sequence[DomainElement], p: OptimizerParams,
                   rng: RandomSource, optimizer: Optional[PrivateOptimizer] = None) -> OptimizerResult:
    optimizer = optimizer or OptimizerFactory.get_optimizer()
    result = optimizer.maximize(L, domain, p, rng)
    logger.debug("%s picked %s with Q=%d over %d elements", result.backend, result.chosen.value,
                 result.achieved_quality, len(domain))
    return result
