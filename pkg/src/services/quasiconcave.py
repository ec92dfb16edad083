"""The quality function Q over one coordinate, its finite domains, and fast evaluation.

For a fixed prefix x*_1..x*_{i-1}, Q(x_i) is the largest k such that some
completion (x_{i+1}, ..., x_d) lies in the hull of the depth->=k region of
the box. Its superlevel sets are nested closed intervals, so Q is
quasi-concave and is fully described by a short sorted list of breakpoints.
"""
import logging
from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from math import factorial
from typing import Dict, List, Optional, Sequence, Tuple, Union

from config import get_settings
from .errors import DomainTooLargeError
from .exact_arith import dot, solve_unique, vector
from .geometry import (
    ConstraintSet,
    arrangement_vertices,
    box_constraints,
    depth,
    hull_contains,
    hull_slice,
    in_box,
    levels,
    max_level,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DomainElement:
    """A reduced rational value with the unreduced witness s/t it was drawn as."""
    value: Fraction
    s: int
    t: int

    def __post_init__(self):
        if self.t == 0:
            raise ValueError("witness denominator must be nonzero")
        if Fraction(self.s, self.t) != self.value:
            raise ValueError(f"witness {self.s}/{self.t} does not reduce to {self.value}")


Prefix = Tuple[DomainElement, ...]
PrefixLike = Sequence[Union[DomainElement, Fraction, int]]


def prefix_values(prefix: PrefixLike) -> Tuple[Fraction, ...]:
    return tuple(p.value if isinstance(p, DomainElement) else Fraction(p) for p in prefix)


@dataclass(frozen=True)
class DomainSpec:
    d: int
    X: int
    i: int
    t_prev: int = 1

    def __post_init__(self):
        if not 1 <= self.i <= self.d:
            raise ValueError(f"coordinate index i={self.i} outside 1..{self.d}")
        if self.t_prev == 0:
            raise ValueError("previous witness denominator must be nonzero")
        if self.X < 1:
            raise ValueError(f"grid bound X must be positive, got {self.X}")

    @cached_property
    def N(self) -> int:
        return (self.d * factorial(self.d)) ** self.i * self.X ** (self.d * self.i)

    @cached_property
    def D(self) -> int:
        return factorial(self.d) * self.X ** self.d

    @property
    def extreme(self) -> Fraction:
        """Largest domain value, N / |t_prev|."""
        return Fraction(self.N, abs(self.t_prev))

    @property
    def pair_count(self) -> int:
        """Number of (s, t) pairs before deduplication."""
        return (2 * self.N + 1) * 2 * self.D


def domain_spec(d: int, X: int, i: int, t_prev: int = 1) -> DomainSpec:
    return DomainSpec(d, X, i, t_prev)


def enumerate_domain(spec: DomainSpec, cap: Optional[int] = None) -> List[DomainElement]:
    """All distinct values s/t, s in [±N], t in ([±D]·t_prev) minus 0, ascending.

    Each value keeps the witness with the smallest |t|, positive t first.
    """
    cap = cap if cap is not None else get_settings().enumeration_cap
    if spec.pair_count > cap:
        raise DomainTooLargeError(
            f"domain for coordinate {spec.i} has {spec.pair_count} (s, t) pairs, "
            f"above the explicit backend cap of {cap}"
        )
    seen: Dict[Fraction, DomainElement] = {}
    for c in range(1, spec.D + 1):
        for t in (c * spec.t_prev, -c * spec.t_prev):
            for s in range(-spec.N, spec.N + 1):
                value = Fraction(s, t)
                if value not in seen:
                    seen[value] = DomainElement(value, s, t)
    logger.debug("coordinate %d domain: %d pairs, %d distinct values", spec.i, spec.pair_count, len(seen))
    return [seen[v] for v in sorted(seen)]


@dataclass(frozen=True)
class DecreasingPointList:
    """Sorted breakpoints (x, Q(x)) of a quasi-concave Q, with sentinels at ±extreme."""
    entries: Tuple[Tuple[Fraction, int], ...]
    extreme: Fraction

    def __post_init__(self):
        if len(self.entries) < 2:
            raise ValueError("a decreasing-point list needs both sentinels")
        xs = [x for x, _ in self.entries]
        if any(a >= b for a, b in zip(xs, xs[1:])):
            raise ValueError("decreasing-point list must be strictly increasing in x")
        if xs[0] != -self.extreme or xs[-1] != self.extreme:
            raise ValueError("decreasing-point list must start and end at the domain extremes")

    @cached_property
    def xs(self) -> List[Fraction]:
        return [x for x, _ in self.entries]

    @property
    def global_max(self) -> int:
        return max(k for _, k in self.entries)

    def __len__(self) -> int:
        return len(self.entries)


def _projected_levels(S: ConstraintSet, i: int) -> Dict[Tuple[Fraction, ...], int]:
    """Arrangement vertices projected on the first i coordinates, keeping the deepest."""
    projected: Dict[Tuple[Fraction, ...], int] = {}
    for v, k in arrangement_vertices(S):
        key = v[:i]
        if projected.get(key, -1) < k:
            projected[key] = k
    return projected


def _check_prefix(S: ConstraintSet, values: Tuple[Fraction, ...]) -> int:
    i = len(values) + 1
    if i > S.d:
        raise ValueError(f"prefix of length {len(values)} leaves no coordinate in dimension {S.d}")
    return i


def slice_hyperplanes(S: ConstraintSet, values: Sequence[Fraction]) -> List[Tuple[Tuple[Fraction, ...], Fraction]]:
    """Boundaries of S and of the box with x_1..x_{i-1} substituted, as (a_i..a_d, w - <a_<i, prefix>).

    Hyperplanes parallel to the remaining coordinates are dropped.
    """
    fixed = len(values)
    planes = {c.hyperplane_key() for c, _ in S.distinct}
    planes.update(c.hyperplane_key() for c in box_constraints(S.d, S.X))
    restricted = set()
    for a, w in planes:
        if any(a[fixed:]):
            restricted.add((vector(a[fixed:]), w - dot(a[:fixed], values)))
    return sorted(restricted)


def intersection_candidates(S: ConstraintSet, prefix: PrefixLike) -> Dict[Tuple[Fraction, ...], int]:
    """Depth at every point of the prefix slice where d-i+1 restricted hyperplanes meet in the box.

    Subsets of S smaller than d-i+1 are completed by box facets, so every
    intersection that pins x_i down inside the box shows up here.
    """
    values = prefix_values(prefix)
    i = _check_prefix(S, values)
    found: Dict[Tuple[Fraction, ...], int] = {}
    for chosen in combinations(slice_hyperplanes(S, values), S.d - i + 1):
        tail = solve_unique([a for a, _ in chosen], [w for _, w in chosen])
        if tail is None:
            continue
        point = values + tail
        if point in found or not in_box(point, S.X):
            continue
        found[point] = depth(S, point)
    return found


def level_intervals(S: ConstraintSet, prefix: PrefixLike) -> Dict[int, Tuple[Fraction, Fraction]]:
    """For each positive level k, the closed interval {x_i : Q(x_i) >= k}, when nonempty.

    The ends are the extremes of x_i over the prefix slice of the hull of the
    depth->=k arrangement vertices. Intervals are nested, so the first empty
    slice ends the scan.
    """
    values = prefix_values(prefix)
    _check_prefix(S, values)
    if not S.items:
        return {}
    vertices = arrangement_vertices(S)
    intervals: Dict[int, Tuple[Fraction, Fraction]] = {}
    for k in levels(vertices):
        span = hull_slice([v for v, dv in vertices if dv >= k], values)
        if span is None:
            break
        intervals[k] = span
    return intervals


def _q_from_intervals(intervals: Dict[int, Tuple[Fraction, Fraction]], x: Fraction) -> int:
    best = 0
    for k, (lo, hi) in intervals.items():
        if lo <= x <= hi and k > best:
            best = k
    return best


def _prune(entries: List[Tuple[Fraction, int]]) -> List[Tuple[Fraction, int]]:
    """Drop interior entries bracketed by neighbors whose values are no lower."""
    kept: List[Tuple[Fraction, int]] = []
    for entry in entries:
        kept.append(entry)
        while len(kept) >= 3 and kept[-2][1] <= min(kept[-3][1], kept[-1][1]):
            del kept[-2]
    return kept


def _insert(entries: List[Tuple[Fraction, int]], x: Fraction, k: int) -> bool:
    """Insert (x, k) into the sorted list unless entries on both sides already reach k.

    Entries the insertion brackets are dropped. Returns whether x went in.
    """
    idx = bisect_left([e[0] for e in entries], x)
    if idx < len(entries) and entries[idx][0] == x:
        if entries[idx][1] >= k:
            return False
        del entries[idx]
    left = max((v for _, v in entries[:idx]), default=-1)
    right = max((v for _, v in entries[idx:]), default=-1)
    if k <= min(left, right):
        return False
    entries.insert(idx, (x, k))
    entries[:] = _prune(entries)
    return True


def build_decreasing_list(S: ConstraintSet, prefix: PrefixLike) -> DecreasingPointList:
    """Breakpoint list of Q for this prefix over [-extreme, extreme] of the next domain.

    The insertion pass scores every slice intersection by its depth and keeps
    it only if no entries on both sides are at least as deep. Depth at a
    witness can fall short of Q away from the first coordinate, so the
    reconciliation pass rescores every entry from the level intervals, adds
    the interval ends and both sentinels, and prunes again.
    """
    values = prefix_values(prefix)
    i = _check_prefix(S, values)
    t_prev = prefix[-1].t if prefix and isinstance(prefix[-1], DomainElement) else 1
    extreme = domain_spec(S.d, S.X, i, t_prev).extreme

    entries: List[Tuple[Fraction, int]] = []
    candidates = intersection_candidates(S, values) if S.items else {}
    inserted = sum(_insert(entries, point[i - 1], k) for point, k in sorted(candidates.items()))

    intervals = level_intervals(S, values)
    points = {-extreme, extreme}
    points.update(x for x, _ in entries if -extreme < x < extreme)
    for lo, hi in intervals.values():
        points.update(x for x in (lo, hi) if -extreme < x < extreme)
    reconciled = [(x, _q_from_intervals(intervals, x)) for x in sorted(points)]
    lifted = sum(1 for x, k in entries if _q_from_intervals(intervals, x) > k)
    pruned = _prune(reconciled)
    logger.debug("Q list for coordinate %d: %d intersections, %d inserted, %d lifted, %d levels, %d entries",
                 i, len(candidates), inserted, lifted, len(intervals), len(pruned))
    return DecreasingPointList(tuple(pruned), extreme)


def q_eval(L: DecreasingPointList, x: Union[Fraction, int]) -> int:
    """Q at x: the stored value at a breakpoint, else the smaller of the two neighbors."""
    x = Fraction(x)
    if x < -L.extreme or x > L.extreme:
        raise ValueError(f"{x} lies outside the list range [-{L.extreme}, {L.extreme}]")
    idx = bisect_left(L.xs, x)
    if L.xs[idx] == x:
        return L.entries[idx][1]
    return min(L.entries[idx - 1][1], L.entries[idx][1])


def q_interval_min(L: DecreasingPointList, j: int) -> int:
    """Best over placements of an interval of length 2^j - 1 of the minimum of Q on it."""
    if j < 0:
        raise ValueError("interval exponent must be nonnegative")
    width = 2 ** j - 1
    if 2 ** j > 2 * L.extreme + 1:
        raise ValueError(f"interval of size 2^{j} does not fit in [-{L.extreme}, {L.extreme}]")
    for k in sorted({k for _, k in L.entries}, reverse=True):
        inside = [x for x, v in L.entries if v >= k]
        if inside[-1] - inside[0] >= width:
            return k
    return min(k for _, k in L.entries)


def q_definitional(S: ConstraintSet, prefix: PrefixLike, x_i: Union[Fraction, int]) -> int:
    """Q straight from its definition.

    (prefix, x_i) has a completion in the hull of the depth->=k region exactly
    when it lies in the hull of the projected depth->=k vertices, so each level
    is a membership test and the largest passing level is found by bisection.
    """
    values = prefix_values(prefix)
    i = _check_prefix(S, values)
    if not S.items:
        return 0
    point = vector(values + (Fraction(x_i),))
    projected = _projected_levels(S, i)

    def member(k: int) -> bool:
        return hull_contains(point, [p for p, dp in projected.items() if dp >= k])

    return max_level(member, levels(projected.items()))
