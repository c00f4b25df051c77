from __future__ import annotations

import json
from itertools import permutations

import pytest

from randgroups.density import Presentation, Verdict, enumerate_B_l
from randgroups.errors import MalformedDiagram, PreconditionError
from randgroups.freegroup import Word
from randgroups.vkd import (
    CONSTANT,
    RIGID,
    DecoratedDiagram,
    Variable,
    build_aux_graph,
    cell_from_polygon,
    count_fulfilling_tuples,
    diagram_stats,
    eliminate_self_intersection,
    fulfill_with_tuple,
    fulfilled_by_presentation,
    generally_reduce,
    is_generally_reduced,
    is_reduced,
    isolate_numbering,
    isolation_step,
    mine,
    random_diagram,
    standard_reduce,
)
from randgroups.vkd.work import Work


def _empty(level: int) -> Work:
    return Work(DecoratedDiagram(level, {}, (), (), {}, 0, None))


def _finish(W: Work, parts, variables) -> DecoratedDiagram:
    W.parts = [[name, d, list(steps)] for name, d, steps in parts]
    W.variables = {v.name: v for v in variables}
    return W.freeze()


def single_cell(l=3, parts=None, variables=None):
    W = _empty(l)
    verts = [0] + [W.new_vertex() for _ in range(l - 1)] + [0]
    poly = [(W.new_edge(verts[j], verts[j + 1]), 1) for j in range(l)]
    W.cells.append(cell_from_polygon(poly, 1, 1))
    if parts is None:
        parts = [("x", 1, poly)]
        variables = [Variable("x")]
    return W, poly, parts, variables


def theta(l, shared, nums=(1, 2), second_direction=-1, start2=None):
    """Two cells glued along a path of `shared` edges; with the defaults for
    start2 the shared path sits at positions 0..shared-1 of both cells."""
    W = _empty(l)
    u = W.base
    w = W.new_vertex()
    P = W.new_path(u, w, shared)
    Q1 = W.new_path(w, u, l - shared)
    Q2 = W.new_path(u, w, l - shared)
    W.cells.append(cell_from_polygon(P + Q1, nums[0], 1, 0))
    poly2 = [(e, -o) for e, o in reversed(P)] + Q2
    if start2 is None:
        start2 = l - shared if second_direction == -1 else 0
    W.cells.append(cell_from_polygon(poly2, nums[1], second_direction, start2))
    D = _finish(W, [("x", 1, Q2 + Q1)], [Variable("x")])
    return D


# -- structure ---------------------------------------------------------------


def test_single_cell_graph_has_no_edges():
    W, poly, parts, variables = single_cell(5)
    D = _finish(W, parts, variables)
    K = build_aux_graph(D)
    assert len(K.vertices) == 5
    assert K.edges == []
    assert is_reduced(D)


def test_two_cells_distinct_numberings_one_edge():
    D = theta(4, 1)
    K = build_aux_graph(D)
    assert len(K.vertices) == 8
    assert [(a, b) for a, b, _, _ in K.edges] == [((1, 0), (2, 0))]


def test_sharing_many_edges_bounds_components():
    l = 12
    D = theta(l, 3)
    K = build_aux_graph(D)
    assert len(K.edges) >= l // 6
    assert len(K.components()) <= 11 * l // 6


def test_same_numbering_shared_edge_is_not_reduced():
    D = theta(12, 3, nums=(1, 1))
    assert not is_reduced(D)


def test_euler_violation_rejected():
    W, poly, parts, variables = single_cell(3)
    D = _finish(W, parts, variables)
    data = D.to_json()
    data["cells"] = []
    with pytest.raises(MalformedDiagram):
        DecoratedDiagram.from_json(data)


def test_unequal_part_lengths_rejected():
    W, poly, _, _ = single_cell(3)
    with pytest.raises(MalformedDiagram):
        _finish(W, [("x", 1, poly[:1]), ("x", 1, poly[1:])], [Variable("x")])


def test_rigid_variable_single_part():
    W, poly, _, _ = single_cell(4)
    with pytest.raises(MalformedDiagram):
        _finish(W, [("x", 1, poly[:2]), ("x", 1, poly[2:])], [Variable("x", RIGID)])


def test_json_round_trip():
    D = random_diagram(11, 4, max_cells=4)
    data = json.loads(json.dumps(D.to_json()))
    E = DecoratedDiagram.from_json(data)
    assert E.to_json() == D.to_json()
    assert diagram_stats(E) == diagram_stats(D)


def test_aux_graph_invariant_under_edge_renaming():
    D = random_diagram(5, 4, max_cells=5)
    shift = 1000
    E = DecoratedDiagram.from_json(_rename_edges(D.to_json(), shift))
    a, b = build_aux_graph(D), build_aux_graph(E)
    assert sorted(map(sorted, a.components().values())) == sorted(map(sorted, b.components().values()))
    assert a.A == b.A and a.u == b.u


def _rename_edges(data, shift):
    data = json.loads(json.dumps(data))

    def step(s):
        return [s[0] + shift, s[1]]

    data["edges"] = {str(int(k) + shift): v for k, v in data["edges"].items()}
    for c in data["cells"]:
        c["slots"] = [step(s) for s in c["slots"]]
    data["boundary"]["walk"] = [step(s) for s in data["boundary"]["walk"]]
    for p in data["parts"]:
        p["steps"] = [step(s) for s in p["steps"]]
    data["rotation"] = {v: [step(s) for s in r] for v, r in data["rotation"].items()}
    if data.get("labels") is not None:
        data["labels"] = {str(int(k) + shift): x for k, x in data["labels"].items()}
    return data


# -- standard reduction ------------------------------------------------------


def test_cancellable_pair_reduces_to_tree():
    D = theta(3, 1, nums=(1, 1))
    E = standard_reduce(D)
    assert len(E.cells) == 0
    assert E.boundary_length == D.boundary_length == 4
    assert is_reduced(E)


def test_reduced_diagram_unchanged_by_standard_reduction():
    D = theta(4, 2)
    assert standard_reduce(D) == D


def test_standard_reduction_keeps_boundary_length():
    seen = 0
    for seed in range(300):
        D = random_diagram(seed, 4, max_cells=6)
        if is_reduced(D):
            continue
        E = standard_reduce(D)
        assert E.boundary_length == D.boundary_length
        if E != D:
            assert len(E.cells) < len(D.cells)
        seen += 1
        if seen == 100:
            break
    assert seen == 100


# -- isolation ---------------------------------------------------------------


def test_isolation_removes_single_cell():
    W, poly, parts, variables = single_cell(3)
    D = _finish(W, parts, variables)
    E, changed = isolation_step(D, (1, 0), poly[0][0])
    assert changed
    assert len(E.cells) == 0
    assert E.boundary_length == 4


def test_isolation_on_nonfilament_rigid_edge_does_nothing():
    W, poly, _, _ = single_cell(3)
    D = _finish(W, [("x", 1, poly[:1]), ("y", 1, poly[1:])], [Variable("x", RIGID), Variable("y")])
    E, changed = isolation_step(D, (1, 0), poly[0][0])
    assert not changed
    assert E == D


def test_isolation_requires_isolated_vertex():
    D = theta(4, 1)
    with pytest.raises(PreconditionError):
        isolation_step(D, (1, 0), D.cells[0].slots[0][0])


def test_isolation_keeps_vertex_isolated():
    checked = 0
    for seed in range(400):
        D = random_diagram(seed, 4, max_cells=5)
        K = build_aux_graph(D)
        for v in K.isolated_vertices():
            for c in D.cells:
                if c.numbering != v[0]:
                    continue
                try:
                    E, changed = isolation_step(D, v, c.slots[v[1]][0], K)
                except PreconditionError:
                    continue
                if not changed:
                    continue
                checked += 1
                if v[0] in E.numberings():
                    assert v in build_aux_graph(E).isolated_vertices()
                break
        if checked >= 100:
            break
    assert checked >= 100


def test_numbering_isolation_measure_and_other_numberings():
    checked = 0
    for seed in range(300):
        D = random_diagram(seed, 4, max_cells=6)
        K = build_aux_graph(D)
        if not K.isolated_vertices():
            continue
        v = K.isolated_vertices()[0]
        i = v[0]
        trace: list = []
        E = isolate_numbering(D, i, v, trace=trace)
        for _, a, b in trace:
            ra, rb = a.rigid_edges(), b.rigid_edges()
            ma = (sum(1 for c in a.cells if c.numbering == i and not a.is_isolated_cell(c, ra)),
                  a.cell_counts().get(i, 0))
            mb = (sum(1 for c in b.cells if c.numbering == i and not b.is_isolated_cell(c, rb)),
                  b.cell_counts().get(i, 0))
            assert mb < ma
            for j, n in a.cell_counts().items():
                if j != i:
                    assert b.cell_counts().get(j, 0) == n
        if v in build_aux_graph(E).isolated_vertices():
            assert isolate_numbering(E, i, v) == E
        checked += 1
    assert checked > 50


# -- self-intersections ------------------------------------------------------


def _with_spur():
    W, poly, _, _ = single_cell(3)
    f = W.new_edge(0, W.new_vertex())
    return W, poly, f


def test_rigid_spur_removed():
    W, poly, f = _with_spur()
    D = _finish(W, [("x", 1, [(f, 1), (f, -1)]), ("y", 1, poly)], [Variable("x", RIGID), Variable("y")])
    E = eliminate_self_intersection(D, "x")
    assert E.boundary_length == D.boundary_length - 2


def test_self_intersection_pasted_into_second_part():
    W, poly, f = _with_spur()
    a = W.new_vertex()
    b = W.new_vertex()
    g = W.new_edge(1, a)
    h = W.new_edge(a, b)
    parts = [
        ("x", 1, [(f, 1), (f, -1)]),
        ("z", 1, [poly[0]]),
        ("x", 1, [(g, 1), (h, 1)]),
        ("w", 1, [(h, -1), (g, -1), poly[1], poly[2]]),
    ]
    D = _finish(W, parts, [Variable("x"), Variable("z"), Variable("w")])
    E = eliminate_self_intersection(D, "x")
    lengths = [len(p) for p in E.parts if p.variable == "x"]
    assert lengths[0] == lengths[1]
    assert E.boundary_length < D.boundary_length


def test_elimination_needs_self_intersection():
    W, poly, _, _ = single_cell(3)
    D = _finish(W, [("x", 1, poly[:2]), ("y", 1, poly[2:])], [Variable("x"), Variable("y")])
    with pytest.raises(PreconditionError):
        eliminate_self_intersection(D, "x")


# -- general reduction and mining ----------------------------------------------


def _corpus(n=300):
    for seed in range(n):
        yield random_diagram(seed, (3, 4, 6)[seed % 3], max_cells=6)


def test_general_reduction_predicate_and_rigid_bound():
    for D in _corpus():
        E = generally_reduce(D)
        assert is_generally_reduced(E)
        K = build_aux_graph(E)
        s = diagram_stats(E, K)
        assert s.A <= s.R
        if not E.isolated_numberings():
            assert s.A == 0
        for v in K.isolated_vertices():
            assert v[0] in E.isolated_numberings()
        assert 2 * s.u <= s.n * E.level + s.A


def test_general_reduction_is_identity_on_reduced_input():
    for D in _corpus(60):
        E = generally_reduce(D)
        assert generally_reduce(E) == E


def test_general_reduction_keeps_constant_parts():
    for D in _corpus():
        E = generally_reduce(D)
        for name, var in D.variables.items():
            if var.kind != CONSTANT:
                continue
            before = [D.word(p.reading()) for p in D.parts if p.variable == name]
            after = [E.word(p.reading()) for p in E.parts if p.variable == name]
            assert before == after


def test_monotone_measures_on_every_step():
    for D in _corpus():
        trace: list = []
        generally_reduce(D, trace=trace)
        for kind, a, b in trace:
            assert len(b.numberings()) <= len(a.numberings())
            if kind == "standard":
                assert b.boundary_length == a.boundary_length
                assert len(b.cells) < len(a.cells)
            if kind == "self_intersection":
                assert b.boundary_length < a.boundary_length
            counts = b.cell_counts()
            iso_b = set(b.isolated_numberings())
            for i in a.isolated_numberings():
                if i in counts:
                    assert i in iso_b
                    assert counts[i] <= a.cell_counts()[i]


def test_fulfilment_survives_rewriting():
    for D in _corpus(200):
        words = D.numbering_words()
        trace: list = []
        E = generally_reduce(D, trace=trace)
        for _, _, b in trace:
            assert fulfill_with_tuple(b, [words[i] for i in b.numberings()]) is not None
        for i in E.isolated_numberings():
            M = mine(E, i)
            assert len(M.numberings()) < len(E.numberings())
            assert fulfill_with_tuple(M, [words[j] for j in M.numberings()]) is not None


def test_mine_single_isolated_cell():
    W, poly, _, _ = single_cell(3)
    D = _finish(W, [("x", 1, poly[:1]), ("y", 1, poly[1:])], [Variable("x", RIGID), Variable("y")])
    E = mine(D, 1)
    assert E.cells == ()
    assert E.numberings() == []
    assert [len(p) for p in E.parts if p.variable == "x"] == [2]


def test_mine_rejects_non_isolated_numbering():
    W, poly, parts, variables = single_cell(3)
    D = _finish(W, parts, variables)
    with pytest.raises(PreconditionError):
        mine(D, 1)


# -- fulfilment --------------------------------------------------------------


def test_single_cell_fulfilled_by_any_word():
    W, poly, parts, variables = single_cell(3)
    D = _finish(W, parts, variables)
    lab = fulfill_with_tuple(D, [Word.parse("a1a2a2")])
    assert [lab[e] for e, _ in poly] == [1, 2, 2]


def test_own_inverse_slot_is_unfulfillable():
    D = theta(3, 1, nums=(1, 1), second_direction=1, start2=0)
    # both cells read the shared edge at position 0 but in opposite senses
    assert D.cells[0].slots[0][0] == D.cells[1].slots[0][0]
    assert D.cells[0].slots[0][1] != D.cells[1].slots[0][1]
    for w in enumerate_B_l(2, 3):
        assert fulfill_with_tuple(D, [w]) is None


def test_tuple_length_mismatch():
    W, poly, parts, variables = single_cell(3)
    D = _finish(W, parts, variables)
    with pytest.raises(PreconditionError):
        fulfill_with_tuple(D, [])
    with pytest.raises(PreconditionError):
        fulfill_with_tuple(D, [Word.parse("a1a2")])


def test_constant_part_restricts_tuples():
    W, poly, _, _ = single_cell(3)
    D = _finish(W, [("c", 1, poly[:1]), ("y", 1, poly[1:])], [Variable("c", CONSTANT, (2,)), Variable("y")])
    assert count_fulfilling_tuples(D) == sum(1 for w in enumerate_B_l(2, 3) if w.letters[0] == 2)


def test_tuple_count_dominated_by_component_bound():
    checked = 0
    for seed in range(300):
        D = random_diagram(seed, 3, max_cells=3)
        K = build_aux_graph(D)
        n = len(K.numberings)
        if n > 2:
            continue
        assert count_fulfilling_tuples(D) <= 4**n * 3**K.u
        checked += 1
    assert checked >= 20


def test_presentation_witness():
    W, poly, parts, variables = single_cell(3)
    D = _finish(W, parts, variables)
    p = Presentation.from_relators(["a1a2a2"])
    assert fulfilled_by_presentation(D, p) == (p.relators[0],)


def test_presentation_needs_distinct_relators():
    D = theta(3, 1)
    p = Presentation.from_relators(["a1a2a2"])
    assert fulfilled_by_presentation(D, p) is None


def test_presentation_budget_reports_unknown():
    D = theta(3, 1)
    p = Presentation.from_relators(["a1a2a2", "a1a1a2", "a2a2a1"])
    assert fulfilled_by_presentation(D, p, budget=1) is Verdict.UNKNOWN


def test_presentation_search_agrees_with_exhaustive_tuples():
    words = list(enumerate_B_l(2, 3))
    for seed in range(40):
        D = random_diagram(seed, 3, max_cells=3)
        nums = D.numberings()
        if len(nums) > 2:
            continue
        rels = [words[(7 * seed + 3 * j) % len(words)] for j in range(4)]
        p = Presentation.from_relators(rels)
        got = fulfilled_by_presentation(D, p)
        expected = any(
            fulfill_with_tuple(D, list(t)) is not None for t in permutations(rels, len(nums))
        )
        assert (got is not None) == expected
        if got is not None:
            assert fulfill_with_tuple(D, list(got)) is not None
