"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""

from __future__ import annotations

import time
from fractions import Fraction

import pytest

from randgroups.bounds import bound_tuple_fulfillment, curve_crossover, negligibility_curve
from randgroups.density import (
    Budget,
    ModelParams,
    Verdict,
    closed_form_count,
    count_cyclically_reduced,
    enumerate_B_l,
    sample_presentation,
)
from randgroups.equations import (
    EquationSystem,
    LiftStatus,
    SolutionVerdict,
    equal_in,
    lift_solution,
    verify_solution,
)
from randgroups.experiments import ExperimentConfig, commuting_solutions, run_experiment
from randgroups.density import Presentation
from randgroups.freegroup import (
    Word,
    axis_overlap_diameter,
    commute_free,
    enumerate_cancellation_trees,
    tree_bound,
    translation_length,
)
from randgroups.vkd import (
    build_aux_graph,
    count_fulfilling_tuples,
    diagram_stats,
    generally_reduce,
    is_generally_reduced,
    random_diagram,
)
from randgroups.errors import BudgetExceeded
from randgroups.experiments import all_reduced_words


@pytest.fixture
def report(capsys):
    def emit(n: int, ok: bool, detail: str, started: float):
        with capsys.disabled():
            print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'} ({time.perf_counter() - started:.1f}s) {detail}")
    return emit


# -- 1 ----------------------------------------------------------------------------


def test_c1_cyclically_reduced_counts(report):
    t0 = time.perf_counter()
    bad = []
    for k, top in ((2, 10), (3, 6)):
        for l in range(1, top + 1):
            n = sum(1 for _ in enumerate_B_l(k, l))
            if not n == count_cyclically_reduced(k, l) == closed_form_count(k, l):
                bad.append((k, l))
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < 10
    report(1, ok, f"mismatches={bad}", t0)
    assert ok


# -- 2 ----------------------------------------------------------------------------


def test_c2_axis_overlap_exhaustive(report):
    t0 = time.perf_counter()
    words = all_reduced_words(2, 4)[1:]
    pairs = violations = 0
    for g in words:
        for h in words:
            if commute_free(g, h):
                continue
            pairs += 1
            if not axis_overlap_diameter(g, h) < 2 * max(translation_length(g), translation_length(h)):
                violations += 1
    elapsed = time.perf_counter() - t0
    ok = violations == 0 and elapsed < 300
    report(2, ok, f"pairs={pairs} violations={violations}", t0)
    assert ok


# -- 3 and 4 -------------------------------------------------------------------------


def corpus():
    for seed in range(1000):
        yield random_diagram(seed, (3, 4, 6)[seed % 3], max_cells=6)


@pytest.fixture(scope="module")
def reduced_corpus():
    out = []
    for D in corpus():
        trace: list = []
        try:
            E = generally_reduce(D, trace=trace)
        except BudgetExceeded:
            E = None  # did not terminate within the measure cap
        out.append((D, E, trace))
    return out


def test_c3_general_reduction(report, reduced_corpus):
    t0 = time.perf_counter()
    violations = 0
    for D, E, trace in reduced_corpus:
        if E is None or not is_generally_reduced(E):
            violations += 1
            continue
        s = diagram_stats(E, build_aux_graph(E))
        violations += s.A > s.R
    report(3, violations == 0, f"diagrams={len(reduced_corpus)} violations={violations}", t0)
    assert violations == 0


def test_c4_monotone_measures(report, reduced_corpus):
    t0 = time.perf_counter()
    steps = 0
    numbering_up = isolated_lost = 0
    boundary_up: dict[str, int] = {}
    for _, _, trace in reduced_corpus:
        for kind, a, b in trace:
            steps += 1
            numbering_up += len(b.numberings()) > len(a.numberings())
            if b.boundary_length > a.boundary_length:
                boundary_up[kind] = boundary_up.get(kind, 0) + 1
            counts, iso_b = b.cell_counts(), set(b.isolated_numberings())
            for i in a.isolated_numberings():
                if i in counts and (i not in iso_b or counts[i] > a.cell_counts()[i]):
                    isolated_lost += 1
    ok = numbering_up == 0 and not boundary_up and isolated_lost == 0
    report(4, ok, f"steps={steps} numbering_increases={numbering_up} "
                  f"boundary_increases_by_kind={boundary_up} isolation_breaks={isolated_lost}", t0)
    assert numbering_up == 0
    assert isolated_lost == 0
    assert not boundary_up


# -- 5 ----------------------------------------------------------------------------


def test_c5_tuple_bound_dominance(report):
    t0 = time.perf_counter()
    checked = violations = 0
    B = count_cyclically_reduced(2, 3)
    for seed in range(400):
        D = random_diagram(seed, 3, max_cells=3)
        K = build_aux_graph(D)
        n = len(K.numberings)
        if not 1 <= n <= 2:
            continue
        checked += 1
        if Fraction(count_fulfilling_tuples(D), B**n) > bound_tuple_fulfillment(n, K.u, 2, 3).exact:
            violations += 1
    ok = checked >= 20 and violations == 0
    report(5, ok, f"diagrams={checked} violations={violations}", t0)
    assert ok


# -- 6 ----------------------------------------------------------------------------


def test_c6_tree_count_dominance(report):
    t0 = time.perf_counter()
    bad = [(L, S) for L in range(1, 5) for S in range(1, 7)
           if len(enumerate_cancellation_trees(L, S)) > tree_bound(L, S)]
    report(6, not bad, f"violations={bad}", t0)
    assert not bad


# -- 7 ----------------------------------------------------------------------------


def test_c7_small_cancellation_trend(report):
    t0 = time.perf_counter()
    r = run_experiment(ExperimentConfig("C16", [(2, 8, 0.05), (2, 12, 0.05), (2, 16, 0.05)], 200, 2024))
    cells = r.cells
    ok = all(b.estimate >= a.estimate or b.hi95 >= a.lo95 for a, b in zip(cells, cells[1:]))
    elapsed = time.perf_counter() - t0
    ok = ok and elapsed < 120
    fr = ", ".join(f"l={c.l}: {c.successes}/{c.trials}" for c in cells)
    report(7, ok, fr, t0)
    assert ok


# -- 8 ----------------------------------------------------------------------------


def test_c8_tree_ball(report):
    t0 = time.perf_counter()
    r = run_experiment(ExperimentConfig("tree-ball", [(2, 16, 0.1)], 100, 2024))
    c = r.cells[0]
    decided = c.trials - c.unknowns
    frac = c.successes / c.trials
    ok = decided == c.trials and frac >= 0.95 and time.perf_counter() - t0 < 300
    report(8, ok, f"samples={c.trials} C'(1/6) found={decided} passing={c.successes}", t0)
    assert ok


# -- 9 ----------------------------------------------------------------------------


COMM = EquationSystem.parse(["[y1,y2]"])


def test_c9_lifting(report):
    t0 = time.perf_counter()
    params = ModelParams(2, 12, 0.05, 2024)
    screen = Budget(radius=0, node_cap=50)
    pairs = lifted = bad_lift = 0
    for t in range(100):
        p = sample_presentation(params, (0, t))
        sols, _ = commuting_solutions(p, 3, screen)
        for u, v in sols:
            pairs += 1
            res = lift_solution(COMM, [u, v], p, budget=8)
            if res.status != LiftStatus.LIFTED:
                continue
            good = verify_solution(COMM, res.lift) == SolutionVerdict.VALID and all(
                equal_in(a, b, p) == Verdict.TRIVIAL for a, b in zip(res.lift, (u, v)))
            lifted += good
            bad_lift += not good
    z2 = Presentation.from_relators(["a1a1"], 2)
    square = EquationSystem.parse(["y1y1"])
    a1 = Word.parse("a1", 2)
    counter_lifted = [b for b in range(0, 21, 2)
                      if lift_solution(square, [a1], z2, budget=b).status == LiftStatus.LIFTED]
    frac = lifted / pairs if pairs else 0.0
    ok = pairs > 0 and frac >= 0.95 and bad_lift == 0 and not counter_lifted
    report(9, ok, f"pairs={pairs} lifted={lifted} ({frac:.3f}) unverified_lifts={bad_lift} "
                  f"counterexample_lifted_at={counter_lifted}", t0)
    assert ok


# -- 10 ---------------------------------------------------------------------------


def test_c10_negligibility_decay(report):
    t0 = time.perf_counter()
    x = curve_crossover(1, 1, 2, 3)
    c = negligibility_curve(1, 1, 2, 3, range(x, x + 1001))
    vals = [v for _, v in c.points]
    ok = all(a > b for a, b in zip(vals, vals[1:]))
    report(10, ok, f"crossover={x} checked l={x}..{x + 1000}", t0)
    assert ok
