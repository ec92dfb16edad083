"""Constraints, halfspaces, depth and the exact geometric oracles.

Everything here is exact. A constraint (a, w) is the closed halfspace
<a, x> >= w; a negative label needs the strict complement.

The cdepth and Q oracles live inside the public box U = [-X, X]^d of an
instance: hulls are hulls of {x in U : depth(x) >= k}. The box facets are
added to the arrangement so every level set is a finite union of polytopes
whose vertices are arrangement vertices.
"""
import logging
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import combinations
from math import gcd
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import cdd

from .errors import DimensionMismatchError
from .exact_arith import RatMatrix, RatVector, determinant, dot, row_reduce, solve_unique, vector

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Constraint:
    """One integer constraint <a, x> >= w."""
    a: Tuple[int, ...]
    w: int

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(int(v) for v in self.a))
        object.__setattr__(self, "w", int(self.w))
        if not any(self.a):
            raise ValueError("constraint coefficient vector must be nonzero")

    @property
    def d(self) -> int:
        return len(self.a)

    def holds_at(self, x: Sequence) -> bool:
        return dot(self.a, x) >= self.w

    def hyperplane_key(self) -> Tuple[Tuple[int, ...], int]:
        """Primitive, sign-fixed form of the boundary hyperplane <a, x> = w."""
        g = gcd(*self.a, self.w)
        a = tuple(v // g for v in self.a)
        w = self.w // g
        lead = next(v for v in a if v != 0)
        if lead < 0:
            a = tuple(-v for v in a)
            w = -w
        return a, w


@dataclass(frozen=True)
class ConstraintSet:
    """A multiset of constraints over [±X]^d (a feasibility instance)."""
    items: Tuple[Constraint, ...]
    d: int
    X: int

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        if self.d < 1:
            raise ValueError(f"dimension must be positive, got {self.d}")
        if self.X < 1:
            raise ValueError(f"grid bound X must be positive, got {self.X}")
        for c in self.items:
            if c.d != self.d:
                raise DimensionMismatchError(f"constraint of dimension {c.d} in a {self.d}-dimensional instance")
            if abs(c.w) > self.X or any(abs(v) > self.X for v in c.a):
                raise ValueError(f"constraint {c.a}, {c.w} exceeds the grid bound X={self.X}")

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[int]], d: int, X: int) -> "ConstraintSet":
        """Build from rows [a_1, ..., a_d, w]."""
        items = []
        for row in rows:
            if len(row) != d + 1:
                raise DimensionMismatchError(f"constraint row {list(row)} does not have d+1={d + 1} entries")
            items.append(Constraint(tuple(row[:d]), row[d]))
        return cls(tuple(items), d, X)

    def __len__(self) -> int:
        return len(self.items)

    @cached_property
    def distinct(self) -> Tuple[Tuple[Constraint, int], ...]:
        """Distinct constraints with their multiplicities."""
        return tuple(Counter(self.items).items())

    def replace(self, index: int, constraint: Constraint) -> "ConstraintSet":
        """Neighboring instance with one entry swapped."""
        items = list(self.items)
        items[index] = constraint
        return ConstraintSet(tuple(items), self.d, self.X)


@dataclass(frozen=True)
class LabeledPoint:
    x: RatVector
    y: int

    def __post_init__(self):
        object.__setattr__(self, "x", vector(self.x))
        if self.y not in (-1, 1):
            raise ValueError(f"label must be -1 or +1, got {self.y}")


@dataclass(frozen=True)
class Hypothesis:
    """The halfspace <a, x> >= w, classifying points inside as +1."""
    a: RatVector
    w: Fraction = field(default=Fraction(0))

    def __post_init__(self):
        object.__setattr__(self, "a", vector(self.a))
        object.__setattr__(self, "w", Fraction(self.w))
        if not any(self.a):
            raise ValueError("hypothesis coefficient vector must be nonzero")

    def contains(self, x: Sequence) -> bool:
        return dot(self.a, x) >= self.w

    def predict(self, x: Sequence) -> int:
        return 1 if self.contains(x) else -1


def box_constraints(d: int, X: int) -> Tuple[Constraint, ...]:
    """The 2d constraints x_j >= -X and -x_j >= -X."""
    out = []
    for j in range(d):
        unit = tuple(1 if i == j else 0 for i in range(d))
        out.append(Constraint(unit, -X))
        out.append(Constraint(tuple(-v for v in unit), -X))
    return tuple(out)


def in_box(x: Sequence, X: int) -> bool:
    """True iff x lies in the closed box [-X, X]^d."""
    return all(-X <= v <= X for v in x)


def depth(S: ConstraintSet, x: Sequence) -> int:
    """Number of constraints of S (with multiplicity) satisfied at x."""
    if len(x) != S.d:
        raise DimensionMismatchError(f"point of dimension {len(x)} for a {S.d}-dimensional instance")
    return sum(mult for c, mult in S.distinct if c.holds_at(x))


# Fourier-Motzkin

Row = Tuple[Tuple[Fraction, ...], Fraction, bool]


def _normalize_row(coeffs: Sequence[Fraction], rhs: Fraction, strict: bool) -> Row:
    lead = next((abs(c) for c in coeffs if c != 0), None)
    if lead is None or lead == 1:
        return tuple(coeffs), rhs, strict
    return tuple(c / lead for c in coeffs), rhs / lead, strict


def fourier_motzkin_feasible(rows: Iterable[Tuple[Sequence, object, bool]]) -> bool:
    """Decide whether a system of rows sum_j c_j x_j >= b (or > b when strict) has a real solution.

    Variables are eliminated one at a time, pairing every lower bound with
    every upper bound. Rows are normalized and deduplicated after each step.
    """
    current = set()
    width = None
    for coeffs, rhs, strict in rows:
        coeffs = vector(coeffs)
        if width is None:
            width = len(coeffs)
        elif len(coeffs) != width:
            raise DimensionMismatchError("rows of different widths")
        current.add(_normalize_row(coeffs, Fraction(rhs), bool(strict)))
    if width is None:
        return True

    remaining = set(range(width))
    while True:
        constant = [r for r in current if not any(r[0])]
        for _, rhs, strict in constant:
            if (strict and not 0 > rhs) or (not strict and not 0 >= rhs):
                return False
        current.difference_update(constant)
        if not current or not remaining:
            return True

        # eliminate the variable with the fewest generated rows
        def cost(j):
            pos = sum(1 for r in current if r[0][j] > 0)
            neg = sum(1 for r in current if r[0][j] < 0)
            return pos * neg - pos - neg

        j = min(remaining, key=cost)
        remaining.discard(j)
        lower = [r for r in current if r[0][j] > 0]
        upper = [r for r in current if r[0][j] < 0]
        nxt = {r for r in current if r[0][j] == 0}
        for lc, lb, ls in lower:
            for uc, ub, us in upper:
                p, n = lc[j], -uc[j]
                coeffs = tuple(lv / p + uv / n for lv, uv in zip(lc, uc))
                nxt.add(_normalize_row(coeffs, lb / p + ub / n, ls or us))
        current = nxt


def is_realizable(S: ConstraintSet) -> bool:
    """True iff some point satisfies every constraint of S."""
    return fourier_motzkin_feasible((c.a, c.w, False) for c, _ in S.distinct)


def is_realizable_points(points: Sequence[LabeledPoint]) -> bool:
    """True iff some halfspace with w in {-1, 0, 1} classifies every point correctly.

    Positives need <a, x> >= w, negatives <a, x> < w.
    """
    if not points:
        return True
    for w in (-1, 0, 1):
        rows = []
        for p in points:
            if p.y == 1:
                rows.append((p.x, w, False))
            else:
                rows.append((tuple(-v for v in p.x), -w, True))
        if fourier_motzkin_feasible(rows):
            return True
    return False


# Convex hull membership

def _cross(o: RatVector, a: RatVector, b: RatVector) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def planar_hull(points: Iterable[RatVector]) -> List[RatVector]:
    """Extreme points of a planar point set (monotone chain, collinear points dropped)."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts
    upper: List[RatVector] = []
    for p in pts:
        while len(upper) > 1 and _cross(upper[-2], upper[-1], p) >= 0:
            upper.pop()
        upper.append(p)
    lower: List[RatVector] = []
    for p in reversed(pts):
        while len(lower) > 1 and _cross(lower[-2], lower[-1], p) >= 0:
            lower.pop()
        lower.append(p)
    return upper + lower[1:-1]


def _extreme_candidates(points: List[RatVector], d: int) -> List[RatVector]:
    if d == 1:
        return [min(points), max(points)]
    if d == 2:
        return planar_hull(points)
    return points


def barycentric(x: RatVector, combo: Sequence[RatVector]) -> Optional[RatVector]:
    """Unique weights l with sum l_k p_k = x and sum l_k = 1, or None."""
    size = len(combo)
    rows = [[p[j] for p in combo] for j in range(len(x))]
    rows.append([1] * size)
    return solve_unique(rows, list(x) + [1])


def caratheodory_membership(x: Sequence, points: Iterable[Sequence]) -> bool:
    """Exact test of x in ConvexHull(points).

    Tries every subset of at most d+1 points for nonnegative barycentric
    coordinates. In one and two dimensions the subsets are drawn from the
    extreme points only.
    """
    x = vector(x)
    pts = list(dict.fromkeys(vector(p) for p in points))
    if not pts:
        return False
    d = len(x)
    if any(len(p) != d for p in pts):
        raise DimensionMismatchError("hull points and query point differ in dimension")
    if x in pts:
        return True
    for j in range(d):
        if x[j] < min(p[j] for p in pts) or x[j] > max(p[j] for p in pts):
            return False

    candidates = _extreme_candidates(pts, d)
    for size in range(1, min(d + 1, len(candidates)) + 1):
        for combo in combinations(candidates, size):
            lam = barycentric(x, combo)
            if lam is not None and all(v >= 0 for v in lam):
                return True
    return False


def hull_membership_fm(x: Sequence, points: Sequence[Sequence]) -> bool:
    """Hull membership as a Fourier-Motzkin feasibility problem in the weights.

    The equalities sum l_k p_k = x, sum l_k = 1 are solved for the pivot
    weights first; only the sign conditions go through elimination.
    """
    x = vector(x)
    pts = [vector(p) for p in points]
    if not pts:
        return False
    n = len(pts)
    augmented = [[p[j] for p in pts] + [x[j]] for j in range(len(x))]
    augmented.append([Fraction(1)] * n + [Fraction(1)])
    pivots = row_reduce(augmented, n)
    if any(row[-1] != 0 for row in augmented[len(pivots):]):
        return False
    free = [k for k in range(n) if k not in pivots]
    rows = [(tuple(1 if f == k else 0 for f in free), 0, False) for k in free]
    # pivot weight l_p = rhs - sum c_f l_f must be nonnegative
    for row in augmented[:len(pivots)]:
        rows.append((tuple(-row[f] for f in free), -row[-1], False))
    if not free:
        return all(row[-1] >= 0 for row in augmented[:len(pivots)])
    return fourier_motzkin_feasible(rows)


def _weights_matrix(points: Sequence[RatVector], fixed: Sequence[Fraction]) -> "cdd.Matrix":
    """Fraction-mode cdd inequality matrix over convex weights l on points.

    Rows read b + A l >= 0: l >= 0, then the equalities sum l = 1 and
    sum l_k p_k[j] = fixed[j] for the leading coordinates, held in lin_set.
    """
    n = len(points)
    rows = [[0] + [int(k == j) for k in range(n)] for j in range(n)]
    rows.append([-1] + [1] * n)
    rows.extend([-fixed[j]] + [p[j] for p in points] for j in range(len(fixed)))
    mat = cdd.Matrix(rows, number_type="fraction")
    mat.rep_type = cdd.RepType.INEQUALITY
    mat.lin_set = frozenset(range(n, len(rows)))
    return mat


def _solve(mat: "cdd.Matrix", objective: Sequence, sense) -> Optional[Fraction]:
    """Optimal value of the objective over mat, None when infeasible."""
    mat.obj_type = sense
    mat.obj_func = tuple(objective)
    lp = cdd.LinProg(mat)
    lp.solve()
    if lp.status != cdd.LPStatusType.OPTIMAL:
        return None
    return Fraction(lp.obj_value)


def lp_hull_membership(x: Sequence, points: Sequence[Sequence]) -> bool:
    """Hull membership as an exact cdd feasibility program over the convex weights."""
    x = vector(x)
    pts = list(dict.fromkeys(vector(p) for p in points))
    if not pts:
        return False
    if any(len(p) != len(x) for p in pts):
        raise DimensionMismatchError("hull points and query point differ in dimension")
    mat = _weights_matrix(pts, x)
    return _solve(mat, [0] * (len(pts) + 1), cdd.LPObjType.MAX) is not None


def hull_contains(x: Sequence, points: Sequence[Sequence]) -> bool:
    """Convex hull membership used by the oracles: Caratheodory up to the plane, exact LP above."""
    if len(x) <= 2:
        return caratheodory_membership(x, points)
    return lp_hull_membership(x, points)


# Arrangement and cdepth

@lru_cache(maxsize=512)
def arrangement_vertices(S: ConstraintSet) -> Tuple[Tuple[RatVector, int], ...]:
    """Vertices of the arrangement of S and the box facets inside [-X, X]^d, with their depth."""
    planes = {c.hyperplane_key() for c, _ in S.distinct}
    planes.update(c.hyperplane_key() for c in box_constraints(S.d, S.X))
    planes = sorted(planes)
    found: Dict[RatVector, int] = {}
    for chosen in combinations(planes, S.d):
        point = solve_unique([a for a, _ in chosen], [w for _, w in chosen])
        if point is None or point in found or not in_box(point, S.X):
            continue
        found[point] = depth(S, point)
    logger.debug("arrangement of %d hyperplanes has %d vertices in the box", len(planes), len(found))
    return tuple(sorted(found.items()))


def levels(vertices: Iterable[Tuple[RatVector, int]]) -> List[int]:
    """Distinct positive depth values, ascending."""
    return sorted({k for _, k in vertices if k > 0})


def max_level(test, candidate_levels: List[int]) -> int:
    """Largest level passing a downward-closed test, 0 if none."""
    lo, hi = 0, len(candidate_levels) - 1
    best = 0
    while lo <= hi:
        mid = (lo + hi) // 2
        if test(candidate_levels[mid]):
            best = candidate_levels[mid]
            lo = mid + 1
        else:
            hi = mid - 1
    return best


def cdepth_oracle(S: ConstraintSet, x: Sequence) -> int:
    """Largest k with x in the hull of {y in the box : depth(y) >= k}, floored by depth(x)."""
    x = vector(x)
    base = depth(S, x)
    if not S.items or not in_box(x, S.X):
        return base
    vertices = arrangement_vertices(S)

    def member(k: int) -> bool:
        return hull_contains(x, [v for v, dv in vertices if dv >= k])

    return max(base, max_level(member, [k for k in levels(vertices) if k > base]))


def hull_slice(points: Sequence[RatVector], prefix: Sequence) -> Optional[Tuple[Fraction, Fraction]]:
    """Range of coordinate len(prefix)+1 over hull(points) with the leading coordinates fixed to prefix.

    Points are projected on the first len(prefix)+1 coordinates; each end of
    the range is an exact cdd program over the convex weights. Returns None
    when the slice is empty.
    """
    prefix = vector(prefix)
    i = len(prefix)
    pts = list(dict.fromkeys(vector(p)[:i + 1] for p in points))
    if not pts:
        return None
    if i == 0:
        values = [p[0] for p in pts]
        return min(values), max(values)
    mat = _weights_matrix(pts, prefix)
    objective = [0] + [p[i] for p in pts]
    lo = _solve(mat, objective, cdd.LPObjType.MIN)
    if lo is None:
        return None
    return lo, _solve(mat, objective, cdd.LPObjType.MAX)


def val(points: Iterable[LabeledPoint], h: Hypothesis) -> int:
    """Correctly classified count: positives inside hs, negatives strictly outside."""
    count = 0
    for p in points:
        if len(p.x) != len(h.a):
            raise DimensionMismatchError(f"point of dimension {len(p.x)} for a {len(h.a)}-dimensional hypothesis")
        inside = h.contains(p.x)
        if (p.y == 1 and inside) or (p.y == -1 and not inside):
            count += 1
    return count


def general_position_check(points: Iterable[Sequence]) -> bool:
    """True iff no d+1 of the points lie on a common hyperplane."""
    pts = [vector(p) for p in points]
    if not pts:
        return True
    d = len(pts[0])
    if any(len(p) != d for p in pts):
        raise DimensionMismatchError("points differ in dimension")
    for subset in combinations(pts, d + 1):
        last = subset[-1]
        diffs = RatMatrix(tuple(tuple(p[j] - last[j] for j in range(d)) for p in subset[:-1]))
        if determinant(diffs) == 0:
            return False
    return True


def margin_satisfied(points: Iterable[LabeledPoint], h: Hypothesis, Xp: int) -> bool:
    """True iff every point is at Euclidean distance >= 1/Xp from the boundary of h."""
    norm_sq = sum(v * v for v in h.a)
    for p in points:
        gap = dot(h.a, p.x) - h.w
        if gap * gap * Xp * Xp < norm_sq:
            return False
    return True
