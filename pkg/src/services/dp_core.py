"""Seeded randomness, the Exponential Mechanism and privacy accounting."""
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, List, Optional, Sequence, Tuple, Union

import gmpy2
import numpy as np
from gmpy2 import mpfr

from config import get_settings
from .errors import DimensionMismatchError, PrivacyParameterError

logger = logging.getLogger(__name__)

AUDIT_SLACK = 1e-15

Number = Union[int, float, Fraction]


@dataclass(frozen=True)
class PrivacyParams:
    eps: float
    delta: float = 0.0

    def __post_init__(self):
        if not self.eps >= 0 or math.isinf(self.eps):
            raise PrivacyParameterError(f"eps must be finite and nonnegative, got {self.eps}")
        if not 0 <= self.delta < 1:
            raise PrivacyParameterError(f"delta must lie in [0, 1), got {self.delta}")

    def within(self, budget: "PrivacyParams") -> bool:
        return self.eps <= budget.eps and self.delta <= budget.delta


class RandomSource:
    """Deterministic random stream identified by (seed, stream).

    Child streams extend the spawn key, so independent components draw from
    disjoint sequences without sharing a generator.
    """

    def __init__(self, seed: int, stream: Sequence[int] = ()):
        if seed < 0 or seed >= 2 ** 64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = int(seed)
        self.stream = tuple(int(s) for s in stream)
        sequence = np.random.SeedSequence(self.seed, spawn_key=self.stream)
        self._generator = np.random.Generator(np.random.PCG64(sequence))

    def child(self, index: int) -> "RandomSource":
        return RandomSource(self.seed, self.stream + (index,))

    def random_bits(self, bits: int) -> int:
        nbytes = (bits + 7) // 8
        value = int.from_bytes(self._generator.bytes(nbytes), "big")
        return value >> (8 * nbytes - bits)

    def below(self, n: int) -> int:
        """Uniform integer in [0, n)."""
        if n <= 0:
            raise ValueError("range must be nonempty")
        if n < 2 ** 62:
            return int(self._generator.integers(0, n))
        bits = n.bit_length()
        while True:
            value = self.random_bits(bits)
            if value < n:
                return value

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi]."""
        return lo + self.below(hi - lo + 1)

    def choice(self, items: Sequence[Any]) -> Any:
        return items[self.below(len(items))]

    def __repr__(self) -> str:
        return f"RandomSource(seed={self.seed}, stream={self.stream})"


@dataclass(frozen=True)
class ScoredCandidate:
    payload: Any
    quality: Fraction

    def __post_init__(self):
        if isinstance(self.quality, float) and not math.isfinite(self.quality):
            raise ValueError("quality must be finite")
        object.__setattr__(self, "quality", Fraction(self.quality))


def _precision(precision_bits: Optional[int]) -> int:
    bits = precision_bits if precision_bits is not None else get_settings().precision_bits
    if bits < 100:
        raise ValueError(f"exponential mechanism needs at least 100 bits of precision, got {bits}")
    return bits


def _mpq(value: Number):
    value = Fraction(value)
    return gmpy2.mpq(value.numerator, value.denominator)


def _check_eps(eps: Number) -> None:
    if not eps >= 0 or (isinstance(eps, float) and math.isinf(eps)):
        raise PrivacyParameterError(f"eps must be finite and nonnegative, got {eps}")


def exp_mech_outcome_probs(cands: Sequence[ScoredCandidate], eps: Number,
                           precision_bits: Optional[int] = None) -> List[mpfr]:
    """Sampling distribution of the Exponential Mechanism, exp(eps*q/2) normalized."""
    if not cands:
        raise ValueError("exponential mechanism needs at least one candidate")
    _check_eps(eps)
    bits = _precision(precision_bits)
    top = max(c.quality for c in cands)
    with gmpy2.local_context(gmpy2.context(), precision=bits):
        half_eps = mpfr(_mpq(eps)) / 2
        weights = [gmpy2.exp(half_eps * mpfr(_mpq(c.quality - top))) for c in cands]
        total = gmpy2.fsum(weights)
        return [w / total for w in weights]


def exponential_mechanism(cands: Sequence[ScoredCandidate], eps: Number, rng: RandomSource,
                          precision_bits: Optional[int] = None) -> ScoredCandidate:
    """Sample a candidate with probability proportional to exp(eps * quality / 2)."""
    bits = _precision(precision_bits)
    probs = exp_mech_outcome_probs(cands, eps, bits)
    if len(cands) == 1:
        return cands[0]
    with gmpy2.local_context(gmpy2.context(), precision=bits):
        u = mpfr(rng.random_bits(bits)) / mpfr(2) ** bits
        cumulative = mpfr(0)
        for cand, p in zip(cands, probs):
            cumulative += p
            if u < cumulative:
                return cand
    return cands[-1]


def max_log_ratio(q: Sequence[Number], q_prime: Sequence[Number], eps: Number,
                  precision_bits: Optional[int] = None) -> mpfr:
    """Largest |ln p_i - ln p'_i| between the mechanism's outcome distributions on q and q'."""
    if len(q) != len(q_prime):
        raise DimensionMismatchError(f"quality vectors of length {len(q)} and {len(q_prime)}")
    if any(abs(Fraction(a) - Fraction(b)) > 1 for a, b in zip(q, q_prime)):
        raise PrivacyParameterError("quality vectors are not sensitivity-1 neighbors")
    bits = _precision(precision_bits)
    p = exp_mech_outcome_probs([ScoredCandidate(i, v) for i, v in enumerate(q)], eps, bits)
    p_prime = exp_mech_outcome_probs([ScoredCandidate(i, v) for i, v in enumerate(q_prime)], eps, bits)
    with gmpy2.local_context(gmpy2.context(), precision=bits):
        return max(abs(gmpy2.log(a) - gmpy2.log(b)) for a, b in zip(p, p_prime))


def dp_ratio_audit(q: Sequence[Number], q_prime: Sequence[Number], eps: Number,
                   precision_bits: Optional[int] = None) -> bool:
    """True iff every outcome probability ratio between q and q' stays within e^eps."""
    return max_log_ratio(q, q_prime, eps, precision_bits) <= _mpq(eps) + mpfr(AUDIT_SLACK)


def basic_composition(params: Sequence[PrivacyParams]) -> PrivacyParams:
    return PrivacyParams(sum(p.eps for p in params), sum(p.delta for p in params))


def advanced_composition(k: int, eps0: float, delta0: float, delta_prime: float) -> PrivacyParams:
    """k-fold adaptive composition: eps = sqrt(2k ln(1/delta')) eps0 + 2k eps0^2, delta = k delta0 + delta'."""
    if k < 1:
        raise PrivacyParameterError(f"number of compositions must be positive, got {k}")
    if not eps0 > 0:
        raise PrivacyParameterError(f"eps0 must be positive, got {eps0}")
    if not 0 < delta_prime <= 1:
        raise PrivacyParameterError(f"delta' must lie in (0, 1], got {delta_prime}")
    if not 0 <= delta0 <= 1:
        raise PrivacyParameterError(f"delta0 must lie in [0, 1], got {delta0}")
    eps = math.sqrt(2 * k * math.log(1 / delta_prime)) * eps0 + 2 * k * eps0 ** 2
    return PrivacyParams(eps, k * delta0 + delta_prime)


@dataclass
class PrivacyLedger:
    """Ordered record of every mechanism invocation of one run."""
    spends: List[Tuple[str, PrivacyParams]] = field(default_factory=list)

    def spend(self, label: str, eps: float, delta: float = 0.0) -> PrivacyParams:
        params = PrivacyParams(eps, delta)
        self.spends.append((label, params))
        logger.debug("privacy spend %s: eps=%s delta=%s", label, eps, delta)
        return params

    def extend(self, other: "PrivacyLedger", prefix: str = "") -> None:
        self.spends.extend((prefix + label, p) for label, p in other.spends)

    def basic(self) -> PrivacyParams:
        return basic_composition([p for _, p in self.spends])

    def advanced(self, delta_prime: float) -> PrivacyParams:
        """Advanced composition over all spends, each bounded by the largest one."""
        if not self.spends:
            return PrivacyParams(0.0, 0.0)
        eps0 = max(p.eps for _, p in self.spends)
        delta0 = max(p.delta for _, p in self.spends)
        return advanced_composition(len(self.spends), eps0, delta0, delta_prime)

    def __len__(self) -> int:
        return len(self.spends)
