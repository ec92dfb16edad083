"""Private halfspace learning by reduction to deep points of the dual constraints.

A labeled point (x, y) becomes the constraint (y*x, y*w): a coefficient
vector a satisfies it exactly when hs_{a,w} puts x on the side its label
asks for (up to the boundary). Three offsets w in {-1, 0, 1} cover every
halfspace up to positive scaling.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, factorial, isqrt
from typing import Dict, List, Optional, Sequence, Tuple

from .deep_point import DeepPointRun, deep_point_accounting, find_deep_point, validate_parameters
from .dp_core import (
    PrivacyLedger,
    PrivacyParams,
    RandomSource,
    ScoredCandidate,
    basic_composition,
    exponential_mechanism,
)
from .errors import DimensionMismatchError
from .geometry import Constraint, ConstraintSet, Hypothesis, LabeledPoint, val
from .optimizer import PrivateOptimizer

logger = logging.getLogger(__name__)

OFFSETS = (-1, 0, 1)
# float sums of the per-branch deltas
DELTA_SLACK = 1e-12


def _dimension(points: Sequence[LabeledPoint]) -> int:
    if not points:
        raise ValueError("labeled dataset is empty")
    d = len(points[0].x)
    if any(len(p.x) != d for p in points):
        raise DimensionMismatchError("labeled points differ in dimension")
    return d


def grid_bound(points: Sequence[LabeledPoint]) -> int:
    """Smallest X >= 1 with every coordinate in [-X, X]."""
    return max([1] + [ceil(abs(v)) for p in points for v in p.x])


def dualize(points: Sequence[LabeledPoint], w: int, X: Optional[int] = None) -> ConstraintSet:
    """Dual constraints (y*x, y*w), one per labeled point."""
    if w not in OFFSETS:
        raise ValueError(f"offset must be one of {OFFSETS}, got {w}")
    d = _dimension(points)
    items = []
    for p in points:
        if any(v.denominator != 1 for v in p.x):
            raise ValueError(f"dualize needs integral coordinates, got {p.x}")
        if not any(p.x):
            raise ValueError("a point at the origin has no dual constraint")
        items.append(Constraint(tuple(p.y * int(v) for v in p.x), p.y * w))
    return ConstraintSet(tuple(items), d, X if X is not None else grid_bound(points))


@dataclass
class LearnerRun:
    hypothesis: Hypothesis
    branches: Dict[int, DeepPointRun] = field(default_factory=dict)
    candidates: List[Tuple[Hypothesis, int]] = field(default_factory=list)
    ledger: PrivacyLedger = field(default_factory=PrivacyLedger)
    fallback: bool = False
    requested: Optional[PrivacyParams] = None

    @property
    def accounted(self) -> PrivacyParams:
        """Basic composition of what each branch actually composed to, plus the selection."""
        return self.ledger.basic()

    @property
    def over_budget_branches(self) -> List[int]:
        return [w for w, run in self.branches.items() if not run.within_budget]

    @property
    def within_budget(self) -> bool:
        if self.requested is None or self.over_budget_branches:
            return False
        return self.accounted.within(PrivacyParams(self.requested.eps, self.requested.delta + DELTA_SLACK))


def learner_accounting(d: int, eps: float, delta: float) -> PrivacyParams:
    """Three deep-point runs at (eps/4, delta/3) and the selection at eps/4, composed."""
    branch = deep_point_accounting(d, eps / 4, delta / 3)
    return basic_composition([branch] * len(OFFSETS) + [PrivacyParams(eps / 4, 0.0)])


def learn_halfspace_run(points: Sequence[LabeledPoint], alpha: float, beta: float, eps: float,
                        delta: float, rng: RandomSource, optimizer: Optional[PrivateOptimizer] = None,
                        cap: Optional[int] = None, X: Optional[int] = None) -> LearnerRun:
    """Deep point per offset, then an Exponential Mechanism pick by val."""
    validate_parameters(alpha, beta, eps, delta)
    d = _dimension(points)
    branches: Dict[int, DeepPointRun] = {}
    ledger = PrivacyLedger()
    candidates: List[Tuple[Hypothesis, int]] = []
    for index, w in enumerate(OFFSETS):
        dual = dualize(points, w, X)
        run = find_deep_point(dual, alpha / 2, beta / 2, eps / 4, delta / 3, rng.child(index), optimizer, cap)
        branches[w] = run
        ledger.spend(f"deep-point w={w}", run.accounted.eps, run.accounted.delta)
        if not any(run.point):
            logger.warning("offset %d produced a zero coefficient vector; dropping it", w)
            continue
        h = Hypothesis(run.point, w)
        candidates.append((h, val(points, h)))
        logger.info("offset %d: candidate %s with val %d/%d", w, h.a, candidates[-1][1], len(points))

    fallback = not candidates
    if fallback:
        unit = tuple(1 if j == 0 else 0 for j in range(d))
        h = Hypothesis(unit, 0)
        candidates.append((h, val(points, h)))
        logger.warning("every offset was degenerate; falling back to the first axis")

    picked = exponential_mechanism([ScoredCandidate(h, score) for h, score in candidates],
                                   eps / 4, rng.child(len(OFFSETS)))
    ledger.spend("select", eps / 4, 0.0)
    learner = LearnerRun(picked.payload, branches, candidates, ledger, fallback, PrivacyParams(eps, delta))
    if not learner.within_budget:
        logger.warning("composed privacy (%.4f, %.3g) exceeds the requested (%s, %s); offsets above budget: %s",
                       learner.accounted.eps, learner.accounted.delta, eps, delta, learner.over_budget_branches)
    return learner


def learn_halfspace(points: Sequence[LabeledPoint], alpha: float, beta: float, eps: float, delta: float,
                    rng: RandomSource, optimizer: Optional[PrivateOptimizer] = None,
                    cap: Optional[int] = None, X: Optional[int] = None) -> Hypothesis:
    return learn_halfspace_run(points, alpha, beta, eps, delta, rng, optimizer, cap, X).hypothesis


def margin_bound(d: int, X: int) -> int:
    """X' = 2 d^2 (d!)^(d^3) X^(d^6)."""
    if d < 1 or X < 1:
        raise ValueError("margin bound needs d >= 1 and X >= 1")
    return 2 * d * d * factorial(d) ** (d ** 3) * X ** (d ** 6)


def _ceil_sqrt(n: int) -> int:
    root = isqrt(n)
    return root if root * root == n else root + 1


@dataclass(frozen=True)
class NoiseGrid:
    """Noise values [±Delta]/DeltaPrime for each coordinate."""
    Delta: int
    DeltaPrime: int

    @classmethod
    def for_dataset(cls, d: int, s: int, X: int, beta: float) -> "NoiseGrid":
        if not 0 < beta <= 1:
            raise ValueError(f"beta must lie in (0, 1], got {beta}")
        delta = ceil(Fraction(d * s ** d) / (2 * Fraction(beta)))
        return cls(delta, 2 * delta * margin_bound(d, X) * _ceil_sqrt(d))

    @property
    def size(self) -> int:
        return 2 * self.Delta + 1

    def value(self, k: int) -> Fraction:
        return Fraction(k, self.DeltaPrime)


def add_noise(points: Sequence[LabeledPoint], beta: float, s: int, X: int,
              rng: RandomSource) -> Tuple[List[LabeledPoint], NoiseGrid]:
    """Perturb every coordinate by an independent uniform draw from the noise grid."""
    d = _dimension(points)
    grid = NoiseGrid.for_dataset(d, s, X, beta)
    noisy = []
    for p in points:
        z = [grid.value(rng.randint(-grid.Delta, grid.Delta)) for _ in range(d)]
        noisy.append(LabeledPoint(tuple(v + dz for v, dz in zip(p.x, z)), p.y))
    return noisy, grid


def rescale_to_grid(points: Sequence[LabeledPoint], grid: NoiseGrid, X: int) -> Tuple[List[LabeledPoint], int]:
    """Stretch by DeltaPrime onto the integer grid [±DeltaPrime(X + Delta)]."""
    X_tilde = grid.DeltaPrime * (X + grid.Delta)
    out = []
    for p in points:
        scaled = tuple(v * grid.DeltaPrime for v in p.x)
        if any(v.denominator != 1 for v in scaled):
            raise ValueError(f"point {p.x} is not on the noise grid")
        if any(abs(v) > X_tilde for v in scaled):
            raise ValueError(f"point {p.x} falls outside [-{X_tilde}, {X_tilde}] after rescaling")
        out.append(LabeledPoint(scaled, p.y))
    return out, X_tilde


def empirical_error(points: Sequence[LabeledPoint], h: Hypothesis) -> Fraction:
    if not points:
        return Fraction(0)
    return 1 - Fraction(val(points, h), len(points))


def learn_halfspace_with_noise(points: Sequence[LabeledPoint], alpha: float, beta: float, eps: float,
                               delta: float, rng: RandomSource, optimizer: Optional[PrivateOptimizer] = None,
                               cap: Optional[int] = None) -> LearnerRun:
    """Noise into general position, learn on the rescaled grid, map back.

    The rescaled domains are enormous, so with the explicit backend this
    raises DomainTooLargeError for all but toy inputs.
    """
    _dimension(points)
    X = grid_bound(points)
    noisy, grid = add_noise(points, beta / 4, len(points), X, rng.child(0))
    scaled, X_tilde = rescale_to_grid(noisy, grid, X)
    logger.info("noise grid Delta=%d DeltaPrime=%d, rescaled bound %d", grid.Delta, grid.DeltaPrime, X_tilde)
    run = learn_halfspace_run(scaled, alpha / 20, beta / 4, eps, delta, rng.child(1), optimizer, cap, X_tilde)
    # back to original coordinates
    run.hypothesis = Hypothesis(tuple(v * grid.DeltaPrime for v in run.hypothesis.a), run.hypothesis.w)
    return run
