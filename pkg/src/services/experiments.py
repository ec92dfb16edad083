"""Instance generators and the seeded trial runner."""
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import astuple, dataclass
from fractions import Fraction
from itertools import combinations
from math import ceil
from typing import IO, List, Optional, Sequence, Tuple

import pandas as pd

from config import get_settings
from .deep_point import find_deep_point
from .dp_core import RandomSource
from .errors import RejectionBudgetError
from .exact_arith import RatMatrix, RatVector, determinant, dot
from .geometry import Constraint, ConstraintSet, Hypothesis, LabeledPoint, box_constraints, depth, val
from .halfspace import learn_halfspace
from .optimizer import OptimizerFactory

logger = logging.getLogger(__name__)

# resolution of the hidden feasible point grid
HIDDEN_POINT_RESOLUTION = 8

CSV_COLUMNS = ("trial", "seed", "d", "X", "m", "alpha", "beta", "eps", "delta",
               "achieved", "threshold", "success", "millis")


def _budget(m: int, rejection_factor: Optional[int]) -> int:
    factor = rejection_factor if rejection_factor is not None else get_settings().rejection_factor
    return factor * max(m, 1)


def _nonzero_vector(d: int, X: int, rng: RandomSource) -> Tuple[int, ...]:
    while True:
        a = tuple(rng.randint(-X, X) for _ in range(d))
        if any(a):
            return a


def generate_feasibility_instance_with_witness(d: int, X: int, m: int, rng: RandomSource,
                                               rejection_factor: Optional[int] = None) -> Tuple[ConstraintSet, RatVector]:
    """Realizable instance: m random constraints satisfied at a hidden point, plus the 2d box constraints."""
    if d < 1 or X < 1 or m < 0:
        raise ValueError(f"need d >= 1, X >= 1 and m >= 0, got d={d}, X={X}, m={m}")
    g = HIDDEN_POINT_RESOLUTION
    hidden = tuple(Fraction(rng.randint(-X * g, X * g), g) for _ in range(d))
    kept: List[Constraint] = []
    attempts = 0
    budget = _budget(m, rejection_factor)
    while len(kept) < m:
        attempts += 1
        if attempts > budget:
            raise RejectionBudgetError(f"kept {len(kept)} of {m} constraints after {budget} attempts")
        c = Constraint(_nonzero_vector(d, X, rng), rng.randint(-X, X))
        if c.holds_at(hidden):
            kept.append(c)
    S = ConstraintSet(tuple(kept) + box_constraints(d, X), d, X)
    logger.debug("generated %d constraints in %d attempts", len(S), attempts)
    return S, hidden


def random_constraint_set(d: int, X: int, m: int, rng: RandomSource) -> ConstraintSet:
    """m independent uniform constraints, realizable or not."""
    items = tuple(Constraint(_nonzero_vector(d, X, rng), rng.randint(-X, X)) for _ in range(m))
    return ConstraintSet(items, d, X)


def generate_feasibility_instance(d: int, X: int, m: int, rng: RandomSource,
                                  rejection_factor: Optional[int] = None) -> ConstraintSet:
    return generate_feasibility_instance_with_witness(d, X, m, rng, rejection_factor)[0]


def _keeps_general_position(points: List[RatVector], candidate: RatVector, d: int) -> bool:
    """No d of the existing points span a hyperplane through the candidate."""
    if candidate in points:
        return False
    for subset in combinations(points, d):
        rows = tuple(tuple(p[j] - candidate[j] for j in range(d)) for p in subset)
        if determinant(RatMatrix(rows)) == 0:
            return False
    return True


def generate_labeled_instance_with_truth(d: int, X: int, m: int, rng: RandomSource,
                                         require_general_position: bool = False,
                                         rejection_factor: Optional[int] = None) -> Tuple[List[LabeledPoint], Hypothesis]:
    """Grid points labeled by a hidden halfspace, none on its boundary or at the origin."""
    if d < 1 or X < 1 or m < 0:
        raise ValueError(f"need d >= 1, X >= 1 and m >= 0, got d={d}, X={X}, m={m}")
    truth = Hypothesis(_nonzero_vector(d, X, rng), rng.choice((-1, 0, 1)))
    xs: List[RatVector] = []
    points: List[LabeledPoint] = []
    attempts = 0
    budget = _budget(m, rejection_factor)
    while len(points) < m:
        attempts += 1
        if attempts > budget:
            raise RejectionBudgetError(f"sampled {len(points)} of {m} labeled points after {budget} attempts")
        x = tuple(Fraction(rng.randint(-X, X)) for _ in range(d))
        if not any(x) or dot(truth.a, x) == truth.w:
            continue
        if require_general_position and not _keeps_general_position(xs, x, d):
            continue
        xs.append(x)
        points.append(LabeledPoint(x, truth.predict(x)))
    return points, truth


def generate_labeled_instance(d: int, X: int, m: int, rng: RandomSource, require_general_position: bool = False,
                              rejection_factor: Optional[int] = None) -> List[LabeledPoint]:
    return generate_labeled_instance_with_truth(d, X, m, rng, require_general_position, rejection_factor)[0]


def success_threshold(alpha: float, size: int) -> int:
    """ceil((1 - alpha) * size), with alpha read as the decimal it was written as."""
    return ceil((1 - Fraction(str(alpha))) * size)


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    d: int
    X: int
    m: int
    alpha: float
    beta: float
    eps: float
    delta: float
    trials: int = 1
    seed: int = 0
    optimizer: Optional[str] = None
    general_position: bool = True
    timing: bool = True

    def __post_init__(self):
        if self.kind not in ("solve", "learn"):
            raise ValueError(f"experiment kind must be 'solve' or 'learn', got {self.kind!r}")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.m < 1:
            raise ValueError("m must be at least 1")


@dataclass(frozen=True)
class TrialRow:
    trial: int
    seed: int
    d: int
    X: int
    m: int
    alpha: float
    beta: float
    eps: float
    delta: float
    achieved: int
    threshold: int
    success: bool
    millis: int


def run_trial(cfg: ExperimentConfig, trial: int) -> TrialRow:
    """One fresh instance and one run, seeded by cfg.seed + trial."""
    seed = cfg.seed + trial
    rng = RandomSource(seed)
    optimizer = OptimizerFactory.get_optimizer(cfg.optimizer)
    started = time.perf_counter()
    if cfg.kind == "solve":
        S = generate_feasibility_instance(cfg.d, cfg.X, cfg.m, rng.child(0))
        run = find_deep_point(S, cfg.alpha, cfg.beta, cfg.eps, cfg.delta, rng.child(1), optimizer)
        achieved, size = depth(S, run.point), len(S)
    else:
        points = generate_labeled_instance(cfg.d, cfg.X, cfg.m, rng.child(0), cfg.general_position)
        h = learn_halfspace(points, cfg.alpha, cfg.beta, cfg.eps, cfg.delta, rng.child(1), optimizer, X=cfg.X)
        achieved, size = val(points, h), len(points)
    millis = int((time.perf_counter() - started) * 1000) if cfg.timing else 0
    threshold = success_threshold(cfg.alpha, size)
    return TrialRow(trial, seed, cfg.d, cfg.X, cfg.m, cfg.alpha, cfg.beta, cfg.eps, cfg.delta,
                    achieved, threshold, achieved >= threshold, millis)


def run_trials(cfg: ExperimentConfig, workers: Optional[int] = None) -> List[TrialRow]:
    workers = workers if workers is not None else get_settings().workers
    indices = list(range(cfg.trials))
    if workers > 1 and cfg.trials > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(run_trial, [cfg] * cfg.trials, indices))
    else:
        rows = [run_trial(cfg, t) for t in indices]
    logger.info("%s trials: %d/%d succeeded", cfg.kind, sum(r.success for r in rows), len(rows))
    return rows


def success_rate(rows: Sequence[TrialRow]) -> float:
    """Fraction of successful trials, 0.0 for no trials."""
    return sum(r.success for r in rows) / len(rows) if rows else 0.0


def trials_frame(rows: Sequence[TrialRow]) -> pd.DataFrame:
    frame = pd.DataFrame([astuple(row) for row in rows], columns=list(CSV_COLUMNS))
    frame["success"] = frame["success"].astype(int)
    return frame


def write_trials_csv(rows: Sequence[TrialRow], out: IO[str]) -> None:
    trials_frame(rows).to_csv(out, index=False, lineterminator="\n")

