"""JSON documents read and written by the command line, with conversions to the service types."""
from fractions import Fraction
from typing import List, Sequence, Tuple, Union

from pydantic import BaseModel, field_validator, model_validator

from services.deep_point import DeepPointRun, IterationRecord
from services.dp_core import PrivacyParams
from services.exact_arith import format_rational, parse_rational
from services.geometry import ConstraintSet, Hypothesis, LabeledPoint, depth, val
from services.halfspace import empirical_error
from services.quasiconcave import DecreasingPointList, DomainElement

RationalField = Union[int, str]


def _parse(value: RationalField) -> Fraction:
    if isinstance(value, bool):
        raise ValueError(f"expected an integer or a 'num/den' string, got {value!r}")
    try:
        return parse_rational(value)
    except (ValueError, ZeroDivisionError) as e:
        raise ValueError(f"malformed rational {value!r}") from e


def _format_all(values: Sequence[Fraction]) -> List[str]:
    return [format_rational(v) for v in values]


class FeasibilityInstance(BaseModel):
    """{"d": int, "X": int, "constraints": [[a_1, ..., a_d, w], ...]}"""
    d: int
    X: int
    constraints: List[List[int]]

    @model_validator(mode="after")
    def _rows_match_dimension(self):
        for row in self.constraints:
            if len(row) != self.d + 1:
                raise ValueError(f"constraint row {row} does not have d+1={self.d + 1} entries")
        return self

    def to_domain(self) -> ConstraintSet:
        return ConstraintSet.from_rows(self.constraints, self.d, self.X)

    @classmethod
    def from_domain(cls, S: ConstraintSet) -> "FeasibilityInstance":
        rows = [list(c.a) + [c.w] for c in S.items]
        return cls(d=S.d, X=S.X, constraints=rows)


class LabeledInstance(BaseModel):
    """{"d": int, "X": int, "points": [[x_1, ..., x_d, y], ...]}"""
    d: int
    X: int
    points: List[List[RationalField]]

    @model_validator(mode="after")
    def _points_match_dimension(self):
        for row in self.points:
            if len(row) != self.d + 1:
                raise ValueError(f"labeled point {row} does not have d+1={self.d + 1} entries")
            for value in row:
                _parse(value)
            if _parse(row[-1]) not in (-1, 1):
                raise ValueError(f"label must be -1 or 1, got {row[-1]}")
        return self

    def to_domain(self) -> List[LabeledPoint]:
        return [LabeledPoint(tuple(_parse(v) for v in row[:-1]), int(_parse(row[-1]))) for row in self.points]

    @classmethod
    def from_domain(cls, points: Sequence[LabeledPoint], X: int) -> "LabeledInstance":
        if not points:
            raise ValueError("cannot serialize an empty labeled dataset")
        rows: List[List[RationalField]] = []
        for p in points:
            coords: List[RationalField] = [int(v) if v.denominator == 1 else format_rational(v) for v in p.x]
            rows.append(coords + [p.y])
        return cls(d=len(points[0].x), X=X, points=rows)


class DomainElementRecord(BaseModel):
    value: str
    s: int
    t: int

    @classmethod
    def from_domain(cls, e: DomainElement) -> "DomainElementRecord":
        return cls(value=format_rational(e.value), s=e.s, t=e.t)


class IterationRecordDoc(BaseModel):
    i: int
    r: float
    domain_size: int
    chosen: DomainElementRecord
    achieved: int
    threshold: float
    millis: int

    @classmethod
    def from_domain(cls, rec: IterationRecord) -> "IterationRecordDoc":
        return cls(i=rec.i, r=rec.r, domain_size=rec.domain_size, chosen=DomainElementRecord.from_domain(rec.chosen),
                   achieved=rec.achieved, threshold=rec.threshold, millis=rec.millis)


class PrivacyRecord(BaseModel):
    eps: float
    delta: float

    @classmethod
    def from_domain(cls, p: PrivacyParams) -> "PrivacyRecord":
        return cls(eps=p.eps, delta=p.delta)


class LedgerEntry(BaseModel):
    label: str
    eps: float
    delta: float


class DeepPointRunRecord(BaseModel):
    """run.json written by `solve`."""
    alpha: float
    beta: float
    eps: float
    delta: float
    backend: str
    iterations: List[IterationRecordDoc]
    point: List[str]
    depth: int
    size: int
    accounted: PrivacyRecord
    within_budget: bool
    ledger: List[LedgerEntry]

    @classmethod
    def from_domain(cls, run: DeepPointRun, S: ConstraintSet) -> "DeepPointRunRecord":
        return cls(
            alpha=run.alpha, beta=run.beta, eps=run.eps, delta=run.delta, backend=run.backend,
            iterations=[IterationRecordDoc.from_domain(rec) for rec in run.iterations],
            point=_format_all(run.point),
            depth=depth(S, run.point),
            size=len(S),
            accounted=PrivacyRecord.from_domain(run.accounted),
            within_budget=run.within_budget,
            ledger=[LedgerEntry(label=label, eps=p.eps, delta=p.delta) for label, p in run.ledger.spends],
        )


class HalfspaceModel(BaseModel):
    """model.json written by `learn`."""
    a: List[str]
    w: int
    val: int
    empirical_error: str

    @field_validator("a")
    @classmethod
    def _nonzero(cls, value: List[str]):
        if not any(_parse(v) for v in value):
            raise ValueError("hypothesis coefficient vector must be nonzero")
        return value

    def to_domain(self) -> Hypothesis:
        return Hypothesis(tuple(_parse(v) for v in self.a), self.w)

    @classmethod
    def from_domain(cls, h: Hypothesis, points: Sequence[LabeledPoint]) -> "HalfspaceModel":
        if h.w.denominator != 1:
            raise ValueError(f"model offset must be an integer, got {h.w}")
        return cls(a=_format_all(h.a), w=int(h.w), val=val(points, h),
                   empirical_error=format_rational(empirical_error(points, h)))


class AuditRequest(BaseModel):
    """{"q": [...], "q_prime": [...], "eps": float}, qualities as integers or 'num/den'."""
    q: List[RationalField]
    q_prime: List[RationalField]
    eps: float

    @model_validator(mode="after")
    def _well_formed(self):
        if not self.q:
            raise ValueError("quality vectors must be nonempty")
        if len(self.q) != len(self.q_prime):
            raise ValueError(f"quality vectors of length {len(self.q)} and {len(self.q_prime)}")
        if self.eps < 0:
            raise ValueError(f"eps must be nonnegative, got {self.eps}")
        return self

    def qualities(self) -> Tuple[List[Fraction], List[Fraction]]:
        return [_parse(v) for v in self.q], [_parse(v) for v in self.q_prime]


class AuditReport(BaseModel):
    passed: bool
    eps: float
    max_log_ratio: float


def dump_decreasing_list(L: DecreasingPointList) -> List[Tuple[str, int]]:
    """Debug dump: [["x", k], ...]."""
    return [(format_rational(x), k) for x, k in L.entries]
