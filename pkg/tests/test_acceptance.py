"""Acceptance suite: one test per criterion, one printed line per criterion.

Run with `pytest -s tests/test_acceptance.py` to see the summary lines.
"""

import math
import random
import time
from contextlib import contextmanager
from fractions import Fraction

from mpmath import mp

from heatseries.bounds import (
    FINITE_LOWER_BOUND,
    INFINITE,
    OUT_OF_HYPOTHESIS,
    DegreeGrowth,
    GrowthProfile,
    convexity_split,
    decay_envelope,
    decay_threshold,
    lagrange_gap_bound,
    radius_estimate,
    remainder_bound,
    stirling_lower_holds,
    xlnx,
)
from heatseries.cli import main as cli_main
from heatseries.counterexample import (
    FlatBumpParams,
    _v_mpf,
    g_eval,
    growth_audit,
    heat_residual_1d,
    heat_residual_poly,
    v_eval,
)
from heatseries.graphs import (
    IntegerLine,
    LocalFunction,
    RegularTree,
    complete_graph,
    cycle_graph,
    integer_segment,
    path_graph,
    random_weighted_graph,
)
from heatseries.laplacian import (
    IteratedLaplacianTable,
    key_estimate_bound,
    laplacian_at,
)
from heatseries.oracle import dense_laplacian, expm_apply
from heatseries.series import SeriesSolution, backward_solve, series_eval

from conftest import tree_radial_reduction


@contextmanager
def criterion(number, description, budget=None):
    start = time.monotonic()
    try:
        yield
        elapsed = time.monotonic() - start
        if budget is not None:
            assert elapsed < budget, (
                f"criterion {number} took {elapsed:.2f}s, budget {budget}s"
            )
    except BaseException:
        elapsed = time.monotonic() - start
        print(f"ACCEPTANCE {number}: FAIL ({elapsed:.2f}s) {description}")
        raise
    print(f"ACCEPTANCE {number}: PASS ({elapsed:.2f}s) {description}")


def _matrix_graphs():
    return [
        ("K2", complete_graph(2)),
        ("P10", path_graph(10)),
        ("C100", cycle_graph(100)),
        ("random50", random_weighted_graph(50, seed=20240811)),
        ("zseg200", integer_segment(100)),
    ]


def test_criterion_1_series_oracle_equivalence():
    with criterion(
        1, "series matches the dense exponential entrywise within 1e-10", budget=10
    ):
        for _name, graph in _matrix_graphs():
            solution = SeriesSolution(graph, LocalFunction.delta(graph.root), tol=1e-11)
            op = dense_laplacian(graph)
            vec = op.vector_of(solution.initial)
            for t in (-0.1, -0.05, -0.01):
                ref = expm_apply(op, vec, t)
                for x in graph.vertices():
                    value = series_eval(solution, x, t).value
                    assert abs(value - ref[op.index[x]]) <= 1e-10


def test_criterion_2_backward_duality():
    with criterion(
        2, "backward solve is bit-identical to the negated-time series"
    ):
        for _name, graph in _matrix_graphs():
            a = LocalFunction.delta(graph.root)
            solution = SeriesSolution(graph, a, tol=1e-11)
            op = dense_laplacian(graph)
            vec = op.vector_of(a)
            for t in (0.1, 0.05, 0.01):
                ref = expm_apply(op, vec, -t)
                for x in graph.vertices():
                    fwd = series_eval(solution, x, -t)
                    bwd = backward_solve(graph, a, x, t, tol=1e-11)
                    assert bwd == fwd
                    assert abs(bwd.value - ref[op.index[x]]) <= 1e-10


def test_criterion_3_one_ring_estimate_suite():
    with criterion(
        3, "one-ring sup estimate: 10^4 pointwise + set instances, 0 violations"
    ):
        rng = random.Random(987)
        graphs = [
            random_weighted_graph(10, seed=s, exact=True) for s in range(25)
        ]
        pointwise = 0
        while pointwise < 10_000:
            g = graphs[pointwise % len(graphs)]
            verts = g.vertices()
            f = LocalFunction(
                {
                    x: Fraction(rng.randrange(-16, 17), rng.randrange(1, 5))
                    for x in rng.sample(verts, rng.randrange(1, 6))
                }
            )
            x = rng.choice(verts)
            # exact arithmetic end to end: tolerance is literally zero
            assert abs(laplacian_at(g, f, x)) <= key_estimate_bound(g, f, x)
            pointwise += 1
        for _ in range(2_000):
            g = rng.choice(graphs)
            verts = g.vertices()
            f = LocalFunction(
                {
                    x: Fraction(rng.randrange(-16, 17))
                    for x in rng.sample(verts, rng.randrange(1, 6))
                }
            )
            region = frozenset(rng.sample(verts, rng.randrange(1, 5)))
            lhs = max(abs(laplacian_at(g, f, x)) for x in region)
            rhs = (
                2
                * max(g.deg(y) for y in region)
                * f.max_abs_on(g.one_neighborhood(region))
            )
            assert lhs <= rhs


def test_criterion_4_radius_trichotomy():
    with criterion(
        4, "radius trichotomy exact on a symbolic 10^3-point grid"
    ):
        checked = 0
        for i in range(32):
            for j in range(32):
                rate = Fraction(i, 25)
                power = Fraction(j, 25)
                for cap in (Fraction(1), Fraction(3), Fraction(1, 2)):
                    cert = radius_estimate(
                        GrowthProfile(1.0, rate), DegreeGrowth(cap, power)
                    )
                    total = rate + power
                    assert cert.slack == 1 - total
                    if total < 1:
                        assert cert.kind == INFINITE
                        assert cert.radius == math.inf
                    elif total == 1:
                        assert cert.kind == FINITE_LOWER_BOUND
                        assert cert.radius == 1.0 / (2.0 * math.e * cap)
                    else:
                        assert cert.kind == OUT_OF_HYPOTHESIS
                checked += 1
        assert checked == 1024
        # bounded-degree specialization: zero power, cap plays the degree bound
        for cap in (1, 2, 3, 10):
            cert = radius_estimate(GrowthProfile(1.0, 1), DegreeGrowth(cap, 0))
            assert cert.radius >= 1.0 / (2.0 * math.e * cap) * (1 - 1e-15)
            assert cert.radius == 1.0 / (2.0 * math.e * cap)


def test_criterion_5_remainder_decay():
    with criterion(
        5,
        "remainder envelope: decay below 1e-30 at slack 0; certified shape "
        "beyond the explicit threshold at slack 0.2 and 0.5",
        budget=5,
    ):
        delta = 0.9 / (2 * math.e)
        growth = DegreeGrowth(1.0, 0.0)
        for big_r in (1.0, 5.0, 10.0):
            profile = GrowthProfile(1.0, 1.0)  # slack 0
            values = [
                remainder_bound(k, delta, growth, profile, big_r)
                for k in range(1, 10_000)
            ]
            peak = values.index(max(values))
            tail = values[peak:]
            assert all(b <= a for a, b in zip(tail, tail[1:]))
            assert min(values) < 1e-30
        for slack in (0.2, 0.5):
            profile = GrowthProfile(1.0, 1.0 - slack)
            start = int(math.ceil(decay_threshold(slack, delta, 1.0, 1.0))) + 1
            for k in range(start, 5_000):
                q = remainder_bound(k, delta, growth, profile, 1.0)
                assert q <= decay_envelope(slack, 1.0, k)


def test_criterion_6_elementary_inequalities():
    with criterion(
        6, "factorial, mean-value and convexity inequalities: full sweeps clean"
    ):
        for k in range(1, 501):
            assert stirling_lower_holds(k)  # exact rational certificate
        for big_r in (1, 2, 5, 10):
            for k in range(big_r, 10_001):
                gap = xlnx(k + big_r) - xlnx(k)
                assert gap <= lagrange_gap_bound(k, big_r) + 1e-9
        for k in range(1, 1001):
            for d in range(1, 1001):
                if xlnx(k + d) > convexity_split(k, d) + 1e-9:
                    raise AssertionError(f"convexity split fails at {(k, d)}")


def test_criterion_7_counterexample_audit():
    with criterion(
        7,
        "flat-bump audit: residual, growth envelope, and flatness witnesses",
        budget=30,
    ):
        params = FlatBumpParams(beta=4, epsilon=1.0, time_shift=1.0)
        # (a) residual: float path small relative to the solution scale,
        #     exact path the zero polynomial
        max_res, max_val = 0.0, 0.0
        for x in range(-10, 11):
            for t in (Fraction(1, 4), Fraction(1, 2), Fraction(1)):
                max_res = max(max_res, abs(heat_residual_1d(params, x, t)))
                max_val = max(max_val, abs(v_eval(params, x, t)))
            assert heat_residual_poly(params, x) == {}
        assert max_res <= 1e-9 * max_val
        # (b) growth envelope on the admissible window
        report = growth_audit(params, xmax=60)
        assert report.passed
        assert report.window == (7, 60)
        # (c) flatness at the dyadic probe plus a positive sample
        smallest = Fraction(1, 2**30)
        with mp.workdps(40):
            for x in (0, 1, 2, 3):
                for j in range(11):
                    assert abs(_v_mpf(params, x, smallest, order=j)) <= 1e-8
        assert v_eval(params, 0, 0.5) == g_eval(params, 0.5) > 0


def test_criterion_8_iterate_bound_exact():
    with criterion(
        8,
        "iterates of a unit delta stay under (2 D)^k for k <= 25, exactly",
    ):
        # integer line: exact integer iterates against the exact bound
        line_table = IteratedLaplacianTable(
            IntegerLine(), LocalFunction.delta(0, 1)
        )
        for k in range(26):
            entry = line_table.entry(k)
            bound = 4**k
            assert all(abs(v) <= bound for _, v in entry.items())
            assert all(isinstance(v, (int, Fraction)) for _, v in entry.items())

        # 3-regular tree: iterates of the base delta are radial, so they are
        # computed on the sphere-weighted half-line; the reduction itself is
        # cross-checked against the lazy tree for k <= 9
        tree = RegularTree(3)
        tree_table = IteratedLaplacianTable(tree, LocalFunction.delta(()))
        quot = tree_radial_reduction(3, 28)
        quot_table = IteratedLaplacianTable(quot, LocalFunction.delta(0))
        for k in range(10):
            te, qe = tree_table.entry(k), quot_table.entry(k)
            assert {len(w) for w in te.support} == set(qe.support)
            for w in te.support:
                assert te(w) == qe(len(w))
        for k in range(26):
            entry = quot_table.entry(k)
            bound = 6**k
            assert all(abs(v) <= bound for _, v in entry.items())


def test_criterion_9_verify_determinism(tmp_path):
    with criterion(9, "two verify runs produce byte-identical reports"):
        first = tmp_path / "r1.json"
        second = tmp_path / "r2.json"
        assert cli_main(["verify", "--out", str(first)]) == 0
        assert cli_main(["verify", "--out", str(second)]) == 0
        assert first.read_bytes() == second.read_bytes()
