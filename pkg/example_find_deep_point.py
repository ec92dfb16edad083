#!/usr/bin/env python3
"""
Example: privately finding a deep point and learning a halfspace

Walks through the library calls behind `dpfeas solve` and `dpfeas learn`
on small generated instances.
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent / "src"))

from config import configure_logging  # noqa: E402
from services import (  # noqa: E402
    RandomSource,
    depth,
    find_deep_point,
    generate_feasibility_instance,
    generate_labeled_instance,
    learn_halfspace_run,
    sufficient_size,
    val,
)


def print_section(title):
    """Print a section header."""
    print(f"\n{'='*70}")
    print(f"  {title}")
    print(f"{'='*70}\n")


def deep_point_on_a_line():
    print_section("Example 1: Deep point of a one-dimensional instance")
    alpha, beta, eps, delta = 0.3, 0.2, 2.0, 0.01
    m = sufficient_size(1, 2, alpha, beta, eps, delta)
    S = generate_feasibility_instance(1, 2, m, RandomSource(1))
    run = find_deep_point(S, alpha, beta, eps, delta, RandomSource(2))
    print(f"Constraints: {len(S)} (sufficient size {m} plus the box)")
    print(f"Point: {[str(v) for v in run.point]}")
    print(f"Depth: {depth(S, run.point)}/{len(S)}")
    print(f"Composed privacy: eps={run.accounted.eps:.4f} delta={run.accounted.delta:.3g}")


def deep_point_in_the_plane():
    print_section("Example 2: Deep point in the plane (below the utility size)")
    S = generate_feasibility_instance(2, 1, 40, RandomSource(3))
    run = find_deep_point(S, 0.3, 0.2, 1.0, 0.01, RandomSource(4))
    for record in run.iterations:
        print(f"Coordinate {record.i}: domain {record.domain_size}, chose {record.chosen.value} "
              f"with Q={record.achieved}")
    print(f"Depth: {depth(S, run.point)}/{len(S)}")


def learn_a_halfspace():
    print_section("Example 3: Learning a halfspace")
    points = generate_labeled_instance(2, 2, 12, RandomSource(5), require_general_position=True)
    run = learn_halfspace_run(points, 0.3, 0.2, 1.0, 0.01, RandomSource(6))
    for h, score in run.candidates:
        print(f"Candidate a={[str(v) for v in h.a]} w={h.w}: val {score}/{len(points)}")
    print(f"\nSelected: a={[str(v) for v in run.hypothesis.a]} w={run.hypothesis.w}")
    print(f"val: {val(points, run.hypothesis)}/{len(points)}")
    print(f"Privacy spent: eps={run.accounted.eps} delta={run.accounted.delta:.3g}")


def main():
    configure_logging("WARNING")
    deep_point_on_a_line()
    deep_point_in_the_plane()
    learn_a_halfspace()


if __name__ == "__main__":
    main()
