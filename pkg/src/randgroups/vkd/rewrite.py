"""The rewriting system on decorated diagrams: standard reduction,
(v, C)-isolation, numbering isolation, elimination of self-intersections,
general reduction and mining.

Every operation returns a new validated diagram and leaves its input
untouched.  Labels, when present, are carried along so that the tuple of
cell words keeps fulfilling the rewritten diagram.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from ..errors import BudgetExceeded, MalformedDiagram, PreconditionError
from .auxgraph import AuxGraph, build_aux_graph, contiguity, diagram_stats, is_reduced
from .diagram import CONSTANT, RIGID, DecoratedDiagram, Dart, cell_from_polygon, inv, inv_path
from .work import Work

log = logging.getLogger(__name__)

# -- standard reduction -------------------------------------------------------


def cancellable_pairs(D: DecoratedDiagram) -> list[tuple[int, int, int]]:
    """(edge, cell, cell) for distinct same-numbering cells sharing an edge
    at the same position, smallest edge first."""
    where: dict[tuple[int, int, int], list[int]] = {}
    for ci, c in enumerate(D.cells):
        for p, (e, _) in enumerate(c.slots):
            where.setdefault((e, c.numbering, p), []).append(ci)
    out = []
    for (e, _, _), cis in sorted(where.items()):
        for a in range(len(cis)):
            for b in range(a + 1, len(cis)):
                out.append((e, cis[a], cis[b]))
    return out


def _fold_pair(D: DecoratedDiagram, ca: int, cb: int) -> DecoratedDiagram:
    """Remove cells ca, cb and zip the hole they leave.

    Slot q of one cell is glued to slot q of the other as the same dart,
    which is the identification of the hole walk with its mirror image.
    """
    W = Work(D)
    a, b = D.cells[ca], D.cells[cb]
    pairs = list(zip(a.slots, b.slots))
    W.cells[ca] = None
    W.cells[cb] = None
    W.identify(pairs)
    return W.freeze()


def standard_reduce_step(D: DecoratedDiagram) -> DecoratedDiagram | None:
    for e, ca, cb in cancellable_pairs(D):
        a, b = D.cells[ca], D.cells[cb]
        p = [s[0] for s in a.slots].index(e)
        if a.slots[p] != b.slots[p]:
            # the shared edge is read in opposite senses: the contour letter
            # would equal its own inverse, and no fold exists
            continue
        try:
            return _fold_pair(D, ca, cb)
        except MalformedDiagram as exc:
            log.debug("fold of cells %d,%d skipped: %s", ca, cb, exc)
    return None


def standard_reduce(D: DecoratedDiagram) -> DecoratedDiagram:
    """Eliminate cancellable pairs until none can be folded."""
    while True:
        nxt = standard_reduce_step(D)
        if nxt is None:
            return D
        D = nxt


# -- isolation -----------------------------------------------------------------


def _represented_edges(D: DecoratedDiagram, v: tuple[int, int]) -> list[tuple[int, int]]:
    """(cell index, edge) for the position-p edge of every cell numbered i."""
    i, p = v
    return [(ci, c.slots[p][0]) for ci, c in enumerate(D.cells) if c.numbering == i]


def _replacement_letters(D: DecoratedDiagram, v: tuple[int, int], letter: int) -> list[int]:
    """Word replacing a class edge carrying ``letter``: if the cell word is
    t and t_p is the class letter, t_p is replaced by the inverse of the
    rest of t (read from p+1), and t_p^-1 by the rest itself."""
    i, p = v
    t = D.numbering_words()[i]
    rest = list(t[p + 1:] + t[:p])
    if letter == t[p]:
        return [-x for x in reversed(rest)]
    if letter == -t[p]:
        return rest
    raise MalformedDiagram("class letter disagrees with the cell word")


def isolation_step(D: DecoratedDiagram, v: tuple[int, int], e: int,
                   K: AuxGraph | None = None) -> tuple[DecoratedDiagram, bool]:
    """Apply a (v, C)-isolation, C being the contiguity class of edge e.

    Returns the new diagram and whether anything changed.
    """
    K = K or build_aux_graph(D)
    if v not in K.component or v not in K.isolated_vertices():
        raise PreconditionError(f"{v} is not an isolated vertex of K")
    if e not in {edge for _, edge in _represented_edges(D, v)}:
        raise PreconditionError(f"edge {e} is not represented by {v}")
    cont = K.contiguity
    C = set(cont.cls(e))
    rigid = D.rigid_edges()
    filaments = D.filaments()
    cells_with_C = [ci for ci, c in enumerate(D.cells) if c.edges() & C]
    for ci in cells_with_C:
        c = D.cells[ci]
        if sum(1 for f, _ in c.slots if f in C) != 1:
            raise PreconditionError("class meets a cell twice; diagram is not reduced")
    for f in C - filaments:
        if sum(1 for c in D.cells if f in c.edges()) != 1:
            raise PreconditionError("class edge lies between two cells; diagram is not reduced")
    C_rigid = C & rigid
    if C_rigid:
        if C_rigid - filaments:
            return D, False
        if all(D.is_isolated_cell(D.cells[ci], rigid) for ci in cells_with_C):
            return D, False
        for f in C_rigid:
            kinds = [D.variables[D.parts[pi].variable].kind for pi, _, _ in Work(D).boundary_positions(f)]
            if kinds.count(RIGID) != 1:
                # both sides rigid: pasting would alter a rigid part
                return D, False
    W = Work(D)
    labelled = D.labels is not None
    # sigma: class letter exponent read at position p by cells numbered i
    ci0 = cells_with_C[0]
    e0, o0 = D.cells[ci0].slots[v[1]]
    sigma = cont.parity[e0] * o0
    for ci in cells_with_C:
        c = D.cells[ci]
        f, o = c.slots[v[1]]
        poly = c.polygon()
        dart = next(d for d in poly if d[0] == f)
        W.remove_cell_across(ci, dart)
    for f in sorted(C & filaments):
        t, h = D.edges[f]
        letters = _replacement_letters(D, v, D.labels[f]) if labelled else None
        if f in rigid:
            _paste_on_rigid_filament(D, W, v, f, sigma * cont.parity[f])
            continue
        Q = W.new_path(t, h, D.level - 1, letters)
        for pi, si, o in sorted(W.boundary_positions(f), reverse=True):
            W.replace_step(pi, si, Q if o == 1 else inv_path(Q))
    return W.freeze(), True


def _paste_on_rigid_filament(D: DecoratedDiagram, W: Work, v, f: int, orient: int) -> None:
    """Paste a copy of the cell numbered v[0] on the non-rigid side of f so
    that f sits at position v[1] read with orientation ``orient``."""
    i, p = v
    occ = W.boundary_positions(f)
    (pi, si, beta), = [x for x in occ if W.variables[W.parts[x[0]][0]].kind != RIGID]
    t, h = W.ends((f, beta))
    letters = None
    if D.labels is not None:
        letters = _replacement_letters(D, v, W.letter((f, beta)))
    Q = W.new_path(t, h, D.level - 1, letters)
    W.replace_step(pi, si, Q)
    polygon = [(f, -beta)] + Q
    direction = 1 if -beta == orient else -1
    reading = polygon if direction == 1 else inv_path(polygon)
    k = reading.index((f, orient))
    cell = cell_from_polygon(polygon, i, direction, (k - p) % D.level)
    W.cells.append(cell)


def _effective_isolation(D: DecoratedDiagram, v, K: AuxGraph):
    for _, e in _represented_edges(D, v):
        try:
            D2, changed = isolation_step(D, v, e, K)
        except PreconditionError:
            continue
        if changed:
            return D2
    return None


def isolate_numbering(D: DecoratedDiagram, i: int, v: tuple[int, int] | None = None,
                      trace: list | None = None, step_cap: int = 10_000) -> DecoratedDiagram:
    """Iterate (v, C)-isolations for an isolated vertex v of numbering i
    (lexicographically first unless given) until nothing changes."""
    K = build_aux_graph(D)
    if v is None:
        iso = [w for w in K.isolated_vertices() if w[0] == i]
        if not iso:
            raise PreconditionError(f"numbering {i} has no isolated vertex")
        v = iso[0]
    for _ in range(step_cap):
        if v not in K.component or v not in K.isolated_vertices():
            return D
        nxt = _effective_isolation(D, v, K)
        if nxt is None:
            return D
        if trace is not None:
            trace.append(("isolation", D, nxt))
        D = nxt
        K = build_aux_graph(D)
    raise BudgetExceeded("numbering isolation exceeded its step cap")


# -- self-intersections ---------------------------------------------------------


def first_self_intersection(D: DecoratedDiagram, k: int) -> tuple[int, int] | None:
    """(start order, length) of the first closed sub-walk of part k."""
    vs = D.part_vertices(k)
    if len(D.parts[k]) == 0:
        return None
    seen: dict[int, int] = {}
    for j, x in enumerate(vs):
        if x in seen:
            return seen[x], j - seen[x]
        seen[x] = j
    return None


def _reading_to_steps(n: int, direction: int, a: int, m: int) -> range:
    """Step indices (boundary order) covered by reading orders [a, a+m)."""
    if direction == 1:
        return range(a, a + m)
    return range(n - a - m, n - a)


def _lobe(D: DecoratedDiagram, k: int, a: int, m: int) -> tuple[list[int], set[int]]:
    """Cells and edges enclosed by the closed sub-walk of part k at orders
    [a, a+m); raises if it is not cut off from the rest of the diagram."""
    part = D.parts[k]
    idx = _reading_to_steps(len(part), part.direction, a, m)
    walk = [part.steps[j] for j in idx]
    poly_owner = {}
    for ci, c in enumerate(D.cells):
        for d in c.polygon():
            poly_owner[d] = ci
    cells: set[int] = set()
    stack = [poly_owner[d] for d in walk if d in poly_owner]
    while stack:
        ci = stack.pop()
        if ci in cells:
            continue
        cells.add(ci)
        for d in D.cells[ci].polygon():
            other = poly_owner.get(inv(d))
            if other is not None and other not in cells:
                stack.append(other)
    edges = {d[0] for d in walk} | {e for ci in cells for e in D.cells[ci].edges()}
    # the lobe must touch the rest only through the closing vertex
    walk_set = {(k, j) for j in idx}
    for pi, p in enumerate(D.parts):
        for j, (e, _) in enumerate(p.steps):
            if e in edges and (pi, j) not in walk_set:
                raise MalformedDiagram("closed sub-walk does not cut off a lobe")
    for ci, c in enumerate(D.cells):
        if ci not in cells and c.edges() & edges:
            raise MalformedDiagram("closed sub-walk does not cut off a lobe")
    return sorted(cells), edges


def eliminate_self_intersection(D: DecoratedDiagram, x: str) -> DecoratedDiagram:
    """Cut the first self-intersection S of a part of x out of that part;
    remove compatible self-intersections from the other parts of x and
    paste a copy of S onto the others."""
    var = D.variables.get(x)
    if var is None or var.kind == CONSTANT:
        raise PreconditionError(f"{x} is not a non-constant variable")
    ks = D.parts_of(x)
    found = None
    for k in ks:
        si = first_self_intersection(D, k)
        if si is not None:
            found = (k, si)
            break
    if found is None:
        raise PreconditionError(f"no part of {x} has a self-intersection")
    k0, (a, m) = found
    s0 = D.parts[k0].direction
    S_cells, S_edges = _lobe(D, k0, a, m)
    template_reading = list(D.parts[k0].reading()[a:a + m])

    W = Work(D)
    removals: list[tuple[int, range]] = []
    pastes: list[tuple[int, range]] = []
    n = len(D.parts[k0])
    removals.append((k0, _reading_to_steps(n, s0, a, m)))
    removed_cells = set(S_cells)
    for k in ks:
        if k == k0:
            continue
        vs = D.part_vertices(k)
        rng = _reading_to_steps(n, D.parts[k].direction, a, m)
        if vs[a] == vs[a + m]:
            try:
                cells_k, _ = _lobe(D, k, a, m)
            except MalformedDiagram:
                pastes.append((k, rng))
                continue
            if removed_cells & set(cells_k):
                pastes.append((k, rng))
                continue
            removed_cells |= set(cells_k)
            removals.append((k, rng))
        else:
            pastes.append((k, rng))
    for ci in removed_cells:
        W.cells[ci] = None
    glue: list[tuple[Dart, Dart]] = []
    for k, rng in pastes:
        sk = D.parts[k].direction
        pi_reading = list(D.parts[k].reading()[a:a + m])
        copy_reading = _paste_copy(D, W, S_cells, S_edges, template_reading, mirror=(s0 == sk))
        glue.extend(zip(copy_reading, pi_reading))
    # drop the cut and pasted ranges from their parts (highest index first)
    for k, rng in sorted(removals + pastes, key=lambda t: -t[0]):
        steps = W.parts[k][2]
        del steps[rng.start:rng.stop]
    if glue:
        W.identify(glue)
    return W.freeze()


def _paste_copy(D: DecoratedDiagram, W: Work, S_cells, S_edges, template_reading, mirror: bool) -> list[Dart]:
    """Add a fresh copy (mirrored if asked) of the lobe; return the copy of
    the lobe boundary in the template part's reading order."""
    vmap: dict[int, int] = {}

    def cv(x):
        if x not in vmap:
            vmap[x] = W.new_vertex()
        return vmap[x]

    emap = {}
    for e in sorted(S_edges):
        t, h = D.edges[e]
        emap[e] = W.new_edge(cv(t), cv(h), D.labels[e] if D.labels is not None else None)
    for ci in S_cells:
        c = D.cells[ci]
        slots = tuple((emap[f], o) for f, o in c.slots)
        W.cells.append(type(c)(c.numbering, -c.direction if mirror else c.direction, slots))
    return [(emap[f], o) for f, o in template_reading]


# -- general reduction -------------------------------------------------------------


def has_self_intersection(D: DecoratedDiagram) -> bool:
    return any(
        first_self_intersection(D, k) is not None
        for k, p in enumerate(D.parts)
        if D.variables[p.variable].kind != CONSTANT
    )


def _classes_of_vertex(D: DecoratedDiagram, v, cont) -> list[set[int]]:
    return [set(cont.cls(e)) for _, e in _represented_edges(D, v)]


def is_generally_reduced(D: DecoratedDiagram, K: AuxGraph | None = None) -> bool:
    """Reduced, free of self-intersections, and every isolated vertex's
    classes contain a rigid edge with all their cells isolated."""
    K = K or build_aux_graph(D)
    if not is_reduced(D, K) or has_self_intersection(D):
        return False
    rigid = D.rigid_edges()
    for v in K.isolated_vertices():
        for C in _classes_of_vertex(D, v, K.contiguity):
            if not C & rigid:
                return False
            for c in D.cells:
                if c.edges() & C and not D.is_isolated_cell(c, rigid):
                    return False
    return True


def default_step_cap(D: DecoratedDiagram) -> int:
    """Defensive cap on rewriting steps, from the size of the input."""
    s = diagram_stats(D)
    return 200 + 20 * (s.m + 1) * (s.boundary_len + D.level + 1) * (s.n + 1)


@dataclass
class ReductionTrace:
    steps: list = field(default_factory=list)

    def append(self, item):
        self.steps.append(item)

    def __len__(self):
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)


def _isolation_candidate(D: DecoratedDiagram):
    K = build_aux_graph(D)
    for v in K.isolated_vertices():
        nxt = _effective_isolation(D, v, K)
        if nxt is not None:
            return v
    return None


def _self_intersection_step(D: DecoratedDiagram):
    for name, var in D.variables.items():
        if var.kind == CONSTANT:
            continue
        if not any(first_self_intersection(D, k) is not None for k in D.parts_of(name)):
            continue
        try:
            return eliminate_self_intersection(D, name)
        except MalformedDiagram as exc:
            log.debug("self-intersection of %s skipped: %s", name, exc)
    return None


def generally_reduce(D: DecoratedDiagram, trace: list | None = None,
                     step_cap: int | None = None) -> DecoratedDiagram:
    """Apply standard reduction, numbering isolation and elimination of
    self-intersections until none applies.

    Order per round: one standard-reduction fold (smallest edge id first);
    else a full numbering isolation for the lexicographically first
    isolated vertex that admits an effective isolation; else one
    self-intersection elimination (variables in registry order).
    """
    cap = default_step_cap(D) if step_cap is None else step_cap
    steps = 0
    while True:
        if steps > cap:
            raise BudgetExceeded(f"general reduction exceeded {cap} steps")
        nxt = standard_reduce_step(D)
        if nxt is not None:
            if trace is not None:
                trace.append(("standard", D, nxt))
            D = nxt
            steps += 1
            continue
        v = _isolation_candidate(D)
        if v is not None:
            local: list = []
            D = isolate_numbering(D, v[0], v, trace=local, step_cap=max(cap - steps, 1))
            steps += len(local)
            if trace is not None:
                trace.extend(local)
            continue
        nxt = _self_intersection_step(D)
        if nxt is not None:
            if trace is not None:
                trace.append(("self_intersection", D, nxt))
            D = nxt
            steps += 1
            continue
        return D


def mine(D: DecoratedDiagram, i: int, trace: list | None = None) -> DecoratedDiagram:
    """Remove every cell of the isolated numbering i across one of its rigid
    edges, then generally reduce."""
    if i not in D.numberings() or i not in D.isolated_numberings():
        raise PreconditionError(f"numbering {i} is not isolated")
    rigid = D.rigid_edges()
    W = Work(D)
    for ci, c in enumerate(D.cells):
        if c.numbering != i:
            continue
        dart = next(d for d in c.polygon() if d[0] in rigid)
        W.remove_cell_across(ci, dart)
    mined = W.freeze()
    if trace is not None:
        trace.append(("mining", D, mined))
    return generally_reduce(mined, trace)
