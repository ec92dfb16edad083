import csv
import io

import pytest

from services.dp_core import RandomSource
from services.errors import RejectionBudgetError
from services.experiments import (
    CSV_COLUMNS,
    ExperimentConfig,
    generate_feasibility_instance_with_witness,
    generate_labeled_instance_with_truth,
    run_trial,
    run_trials,
    success_rate,
    success_threshold,
    write_trials_csv,
)
from services.geometry import depth, general_position_check, in_box, is_realizable, val

SOLVE = ExperimentConfig(kind="solve", d=1, X=1, m=20, alpha=0.3, beta=0.2, eps=1.0, delta=0.01,
                         trials=3, seed=5, timing=False)
LEARN = ExperimentConfig(kind="learn", d=1, X=2, m=10, alpha=0.3, beta=0.2, eps=1.0, delta=0.01,
                         trials=2, seed=1, general_position=False, timing=False)


def test_feasibility_instance_contains_box_and_witness():
    S, hidden = generate_feasibility_instance_with_witness(2, 2, 30, RandomSource(8))
    assert len(S) == 30 + 4
    assert in_box(hidden, 2)
    assert depth(S, hidden) == len(S)
    assert is_realizable(S)
    assert all(any(c.a) and abs(c.w) <= 2 for c in S.items)


def test_labeled_instance_is_realizable_by_truth():
    points, truth = generate_labeled_instance_with_truth(2, 2, 10, RandomSource(6))
    assert val(points, truth) == len(points)
    assert all(any(p.x) for p in points)
    assert all(in_box(p.x, 2) for p in points)


def test_labeled_instance_in_general_position():
    points, _ = generate_labeled_instance_with_truth(2, 3, 8, RandomSource(12), require_general_position=True)
    assert general_position_check([p.x for p in points])


def test_rejection_budget():
    # only two nonzero points exist on the line [-1, 1]
    with pytest.raises(RejectionBudgetError):
        generate_labeled_instance_with_truth(1, 1, 3, RandomSource(0), require_general_position=True)


@pytest.mark.parametrize("args", [(0, 1, 5), (1, 0, 5), (1, 1, -1)])
def test_generator_ranges(args):
    with pytest.raises(ValueError):
        generate_feasibility_instance_with_witness(*args, RandomSource(0))


@pytest.mark.parametrize("alpha, size, expected", [(0.3, 10, 7), (0.1, 1000, 900), (0.25, 9, 7)])
def test_success_threshold(alpha, size, expected):
    assert success_threshold(alpha, size) == expected


@pytest.mark.parametrize("kwargs", [dict(kind="fit"), dict(trials=0), dict(m=0)])
def test_config_validation(kwargs):
    base = dict(kind="solve", d=1, X=1, m=5, alpha=0.3, beta=0.2, eps=1.0, delta=0.01)
    with pytest.raises(ValueError):
        ExperimentConfig(**{**base, **kwargs})


@pytest.mark.parametrize("cfg", [SOLVE, LEARN], ids=["solve", "learn"])
def test_trial_is_deterministic(cfg):
    row = run_trial(cfg, 1)
    assert row == run_trial(cfg, 1)
    assert row.seed == cfg.seed + 1
    assert row.millis == 0
    assert row.success == (row.achieved >= row.threshold)


def test_solve_trial_size_includes_box():
    row = run_trial(SOLVE, 0)
    assert row.threshold == success_threshold(SOLVE.alpha, SOLVE.m + 2)


def test_parallel_trials_match_serial():
    assert run_trials(SOLVE, workers=2) == run_trials(SOLVE, workers=1)


def test_success_rate():
    rows = run_trials(LEARN, workers=1)
    assert success_rate(rows) == sum(r.success for r in rows) / len(rows)
    assert success_rate([]) == 0.0


def test_trials_csv():
    rows = run_trials(SOLVE, workers=1)
    out = io.StringIO()
    write_trials_csv(rows, out)
    records = list(csv.reader(io.StringIO(out.getvalue())))
    assert tuple(records[0]) == CSV_COLUMNS
    assert len(records) == 1 + SOLVE.trials
    success = CSV_COLUMNS.index("success")
    assert {r[success] for r in records[1:]} <= {"0", "1"}
    assert {r[CSV_COLUMNS.index("millis")] for r in records[1:]} == {"0"}
