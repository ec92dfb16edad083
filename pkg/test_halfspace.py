from fractions import Fraction

import pytest

from services.deep_point import sufficient_size
from services.dp_core import PrivacyParams, RandomSource
from services.errors import DomainTooLargeError
from services.experiments import generate_labeled_instance, success_threshold
from services.geometry import Hypothesis, LabeledPoint, depth, general_position_check, is_realizable_points, val
from services.halfspace import (
    NoiseGrid,
    add_noise,
    dualize,
    empirical_error,
    learn_halfspace,
    learn_halfspace_run,
    learn_halfspace_with_noise,
    learner_accounting,
    margin_bound,
    rescale_to_grid,
)


def _separable_line(m):
    return [LabeledPoint((1,), 1)] * (m // 2) + [LabeledPoint((-1,), -1)] * (m // 2)


def test_dualize_examples():
    assert dualize([LabeledPoint((3, -2), 1)], 1).items[0].a == (3, -2)
    assert dualize([LabeledPoint((3, -2), 1)], 1).items[0].w == 1
    negative = dualize([LabeledPoint((3, -2), -1)], 1).items[0]
    assert (negative.a, negative.w) == ((-3, 2), -1)
    assert dualize([LabeledPoint((3, -2), -1)], 0).items[0].w == 0


def test_dualize_keeps_multiplicity_and_bound():
    S = dualize([LabeledPoint((1, 2), 1)] * 3, -1)
    assert len(S) == 3 and S.X == 2
    assert dualize([LabeledPoint((1, 2), 1)], -1, X=5).X == 5


@pytest.mark.parametrize("points", [
    [LabeledPoint((Fraction(1, 2),), 1)],
    [LabeledPoint((0, 0), 1)],
])
def test_dualize_rejects(points):
    with pytest.raises(ValueError):
        dualize(points, 0)


def test_dualize_rejects_bad_offset():
    with pytest.raises(ValueError):
        dualize([LabeledPoint((1,), 1)], 2)


def test_dual_depth_counts_weak_side():
    rng = RandomSource(3)
    points = generate_labeled_instance(2, 3, 12, rng)
    for w in (-1, 0, 1):
        S = dualize(points, w)
        for _ in range(10):
            a = (Fraction(rng.randint(-12, 12), 4), Fraction(rng.randint(-12, 12), 4))
            expected = sum(1 for p in points if p.y * (a[0] * p.x[0] + a[1] * p.x[1]) >= p.y * w)
            assert depth(S, a) == expected


def test_boundary_slack_in_general_position():
    rng = RandomSource(9)
    points = generate_labeled_instance(2, 3, 8, rng, require_general_position=True)
    for w in (-1, 0, 1):
        S = dualize(points, w)
        for _ in range(20):
            a = (rng.randint(-3, 3), rng.randint(-3, 3))
            if not any(a):
                continue
            assert abs(depth(S, a) - val(points, Hypothesis(a, w))) <= 2


@pytest.mark.parametrize("d, X, expected", [(1, 2, 4), (2, 1, 2048)])
def test_margin_bound(d, X, expected):
    assert margin_bound(d, X) == expected


def test_margin_bound_monotone():
    assert margin_bound(2, 2) > margin_bound(2, 1)


def test_noise_grid():
    grid = NoiseGrid.for_dataset(1, 2, 1, 0.5)
    assert grid.Delta == 2 and grid.size == 5
    assert grid.DeltaPrime == 2 * 2 * margin_bound(1, 1) * 1


def test_noise_magnitude_below_half_margin():
    d, X = 2, 1
    grid = NoiseGrid.for_dataset(d, 6, X, 0.1)
    largest = Fraction(grid.Delta, grid.DeltaPrime)
    assert d * largest ** 2 <= Fraction(1, 2 * margin_bound(d, X)) ** 2


def test_add_noise_keeps_labels_and_stays_on_grid():
    points = [LabeledPoint((1, -1), 1), LabeledPoint((0, 1), -1)]
    noisy, grid = add_noise(points, 0.5, len(points), 1, RandomSource(0))
    assert [p.y for p in noisy] == [1, -1]
    for before, after in zip(points, noisy):
        for u, v in zip(before.x, after.x):
            assert abs(v - u) <= Fraction(grid.Delta, grid.DeltaPrime)
            assert ((v - u) * grid.DeltaPrime).denominator == 1


def test_noise_yields_general_position():
    rng = RandomSource(21)
    trials, failures = 100, 0
    for t in range(trials):
        child = rng.child(t)
        points = [LabeledPoint((child.randint(-2, 2), child.randint(-2, 2)), 1) for _ in range(6)]
        noisy, _ = add_noise(points, 0.1, 6, 2, child)
        failures += not general_position_check([p.x for p in noisy])
    assert failures <= 15


def test_noise_preserves_realizability():
    rng = RandomSource(13)
    for t in range(30):
        points = generate_labeled_instance(2, 1, 2 + t % 5, rng.child(t))
        noisy, _ = add_noise(points, 0.1, len(points), 1, rng.child(1000 + t))
        assert is_realizable_points(noisy)


def test_rescale_to_grid():
    grid = NoiseGrid.for_dataset(1, 2, 3, 0.5)
    noisy = [LabeledPoint((3 + Fraction(1, grid.DeltaPrime),), -1)]
    scaled, X_tilde = rescale_to_grid(noisy, grid, 3)
    assert scaled[0].x == (3 * grid.DeltaPrime + 1,)
    assert scaled[0].y == -1
    assert X_tilde == grid.DeltaPrime * (3 + grid.Delta)


def test_rescale_rejects_off_grid_points():
    grid = NoiseGrid.for_dataset(1, 2, 1, 0.5)
    with pytest.raises(ValueError):
        rescale_to_grid([LabeledPoint((Fraction(1, 3 * grid.DeltaPrime),), 1)], grid, 1)


def test_empirical_error():
    points = [LabeledPoint((1,), 1), LabeledPoint((-1,), -1)]
    assert empirical_error(points, Hypothesis((1,), 0)) == 0
    assert empirical_error(points, Hypothesis((-1,), 1)) == 1
    assert empirical_error([], Hypothesis((1,), 0)) == 0


def test_val_and_error_are_complementary():
    rng = RandomSource(31)
    for t in range(100):
        points = generate_labeled_instance(2, 2, 1 + t % 7, rng.child(t))
        h = Hypothesis((rng.randint(1, 2), rng.randint(-2, 2)), rng.randint(-1, 1))
        assert Fraction(val(points, h), len(points)) + empirical_error(points, h) == 1


def test_learns_separable_line():
    alpha, beta, eps, delta = 0.3, 0.2, 1.0, 0.01
    m = sufficient_size(1, 1, alpha / 2, beta / 2, eps / 4, delta / 3)
    m += m % 2
    points = _separable_line(m)
    need = success_threshold(alpha, m)
    rng = RandomSource(17)
    successes = sum(val(points, learn_halfspace(points, alpha, beta, eps, delta, rng.child(t))) >= need
                    for t in range(40))
    assert successes >= 32


def test_learner_run_accounting():
    eps, delta = 1.0, 0.01
    run = learn_halfspace_run(_separable_line(40), 0.3, 0.2, eps, delta, RandomSource(2))
    assert sorted(run.branches) == [-1, 0, 1]
    assert len(run.ledger) == 4
    assert [p for _, p in run.ledger.spends[:3]] == [b.accounted for b in run.branches.values()]
    assert run.accounted == learner_accounting(1, eps, delta)
    assert run.accounted.eps <= eps
    assert run.within_budget and run.over_budget_branches == []
    assert run.hypothesis in [h for h, _ in run.candidates]


def test_learner_reports_branches_over_budget():
    run = learn_halfspace_run(_separable_line(40), 0.3, 0.2, 200.0, 0.01, RandomSource(2))
    assert run.over_budget_branches == [-1, 0, 1]
    assert not run.within_budget
    assert run.accounted.eps > 200.0


@pytest.mark.parametrize("d", [1, 2, 3])
@pytest.mark.parametrize("eps", [0.1, 1.0])
def test_learner_accounting_within_budget(d, eps):
    composed = learner_accounting(d, eps, 0.01)
    assert composed.within(PrivacyParams(eps, 0.01 + 1e-12))


def test_learning_through_noise_on_tiny_data():
    points = [LabeledPoint((1,), 1), LabeledPoint((-1,), -1)]
    run = learn_halfspace_with_noise(points, 1.0, 1.0, 1.0, 0.01, RandomSource(3))
    assert len(run.hypothesis.a) == 1 and run.hypothesis.w in (-1, 0, 1)
    assert run.accounted == learner_accounting(1, 1.0, 0.01)
    assert run.within_budget
    assert 0 <= empirical_error(points, run.hypothesis) <= 1
    assert len(run.ledger) == 4


def test_learning_through_noise_hits_domain_cap():
    points = [LabeledPoint((1,), 1), LabeledPoint((-1,), -1)]
    with pytest.raises(DomainTooLargeError):
        learn_halfspace_with_noise(points, 0.3, 0.2, 1.0, 0.01, RandomSource(3))
