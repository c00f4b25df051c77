"""Random labelled decorated diagrams and small enumerations.

The generator grows a disk diagram cell by cell, every edge carrying a
letter, so the tuple of cell words fulfils the result by construction.
That makes fulfilment monotonicity checkable on every rewriting image.
"""

from __future__ import annotations

from itertools import permutations

import numpy as np

from ..freegroup import free_reduce
from .diagram import CONSTANT, FREE, RIGID, DecoratedDiagram, Part, Variable, cell_from_polygon, inv_path
from .work import Work


def _letters(k: int) -> list[int]:
    return [x for i in range(1, k + 1) for x in (i, -i)]


class _Grower:
    def __init__(self, rng: np.random.Generator, l: int, k: int):
        self.rng = rng
        self.l = l
        self.k = k
        empty = DecoratedDiagram(l, {}, (), (), {}, 0, {})
        self.W = Work(empty)
        self.boundary: list = []  # counter-clockwise darts
        self.words: dict[int, tuple[int, ...]] = {}

    # helpers ---------------------------------------------------------------

    def choice(self, seq):
        return seq[int(self.rng.integers(len(seq)))]

    def ends(self, d):
        return self.W.ends(d)

    def vertex_at(self, idx: int) -> int:
        if not self.boundary:
            return self.W.base
        return self.ends(self.boundary[idx % len(self.boundary)])[0]

    def fill(self, prefix: list[int], n: int) -> list[int] | None:
        """Random letters extending prefix to a cyclically reduced word."""
        for _ in range(50):
            out = list(prefix)
            for _ in range(n):
                opts = [x for x in _letters(self.k) if not out or x != -out[-1]]
                out.append(self.choice(opts))
            if len(free_reduce(out)) == len(out) and (len(out) == 1 or out[0] != -out[-1]):
                return out[len(prefix):]
        return None

    def rotate(self, idx: int):
        self.boundary = self.boundary[idx:] + self.boundary[:idx]

    def new_cell_on_arc(self, start: int, k: int) -> bool:
        """Glue a cell along the k boundary darts from index start (k may be 0)."""
        if self.boundary:
            self.rotate(start)
        arc = self.boundary[:k]
        verts = [self.vertex_at(0)] + [self.ends(d)[1] for d in arc]
        if len(set(verts)) != len(verts):
            return False
        back = inv_path(arc)
        back_word = [self.W.letter(d) for d in back]
        if len(free_reduce(back_word)) != len(back_word):
            return False
        u, w = verts[0], verts[-1]
        n_new = self.l - k
        # try an existing numbering whose word fits, else a fresh one
        placements = []
        if self.words and self.rng.random() < 0.6:
            for i, t in self.words.items():
                for direction in (1, -1):
                    poly_word = list(t) if direction == 1 else [-x for x in reversed(t)]
                    for r in range(self.l):
                        rot = poly_word[r:] + poly_word[:r]
                        if rot[:k] == back_word:
                            placements.append((i, direction, r, rot))
        if placements:
            i, direction, r, rot = self.choice(placements)
            new_letters = rot[k:]
        else:
            new_letters = self.fill(back_word, n_new)
            if new_letters is None:
                return False
            i = max(self.words, default=0) + 1
            direction = 1 if self.rng.random() < 0.5 else -1
        Q = self.W.new_path(u, w, n_new, new_letters) if k else self._loop(u, new_letters)
        polygon = back + Q
        reading = polygon if direction == 1 else inv_path(polygon)
        start_pos = int(self.rng.integers(self.l))
        cell = cell_from_polygon(polygon, i, direction, start_pos)
        word = tuple(self.W.letter(d) for d in cell.slots)
        if i in self.words and self.words[i] != word:
            # a fitting placement fixes the start: realign to the stored word
            for s in range(self.l):
                cand = cell_from_polygon(polygon, i, direction, s)
                if tuple(self.W.letter(d) for d in cand.slots) == self.words[i]:
                    cell = cand
                    break
            else:
                return False
        self.words.setdefault(i, word)
        self.W.cells.append(cell)
        self.boundary = Q + self.boundary[k:]
        del reading
        return True

    def _loop(self, u: int, letters: list[int]):
        verts = [u] + [self.W.new_vertex() for _ in range(self.l - 1)] + [u]
        return [(self.W.new_edge(verts[j], verts[j + 1], letters[j]), 1) for j in range(self.l)]

    def mirror_cell(self) -> bool:
        """Glue the mirror image of an adjacent cell across one boundary edge."""
        owner = {}
        for ci, c in enumerate(self.W.cells):
            for d in c.polygon():
                owner[d] = ci
        cands = [j for j, d in enumerate(self.boundary) if d in owner]
        if not cands:
            return False
        j = self.choice(cands)
        d = self.boundary[j]
        c = self.W.cells[owner[d]]
        self.rotate(j)
        e, b = d
        t, h = self.ends(d)
        p = [s[0] for s in c.slots].index(e)
        word = self.words[c.numbering]
        # the mirror reads the same word with e at the same position and sense
        reading_dir = -c.direction
        o = c.slots[p][1]
        rest = list(word[p + 1:] + word[:p])
        # polygon (ccw) = [e^-b] + Q.  In the mirror's reading, e then the
        # rest is traversed; translate to the ccw order of Q.
        if reading_dir == 1:
            q_letters = rest
        else:
            q_letters = [-x for x in reversed(rest)]
        Q = self.W.new_path(t, h, self.l - 1, q_letters)
        polygon = [(e, -b)] + Q
        reading = polygon if reading_dir == 1 else inv_path(polygon)
        k = reading.index((e, o))
        cell = cell_from_polygon(polygon, c.numbering, reading_dir, (k - p) % self.l)
        if tuple(self.W.letter(s) for s in cell.slots) != word:
            return False
        self.W.cells.append(cell)
        self.boundary = Q + self.boundary[1:]
        return True

    def filament(self) -> None:
        idx = int(self.rng.integers(len(self.boundary))) if self.boundary else 0
        if self.boundary:
            self.rotate(idx)
        u = self.vertex_at(0)
        length = 1 + int(self.rng.integers(2))
        letters = [self.choice(_letters(self.k)) for _ in range(length)]
        verts = [u] + [self.W.new_vertex() for _ in range(length)]
        path = [(self.W.new_edge(verts[j], verts[j + 1], letters[j]), 1) for j in range(length)]
        self.boundary = path + inv_path(path) + self.boundary


def _decorate(g: _Grower, rng: np.random.Generator, rigid_p=0.25, constant_p=0.1, max_parts=6):
    W = g.W
    b = g.boundary
    if b:
        g.rotate(int(rng.integers(len(b))))
        b = g.boundary
    B = len(b)
    parts: list[list] = []
    if B:
        r = 1 + int(rng.integers(min(B, max_parts)))
        cuts = sorted(rng.choice(np.arange(1, B), size=r - 1, replace=False).tolist()) if r > 1 else []
        bounds = [0] + cuts + [B]
        for s, t in zip(bounds, bounds[1:]):
            parts.append(b[s:t])
    variables: dict[str, Variable] = {}
    words: dict[str, tuple[int, ...]] = {}
    out_parts = []
    for steps in parts:
        direction = 1 if rng.random() < 0.5 else -1
        reading = steps if direction == 1 else inv_path(steps)
        w = tuple(W.letter(d) for d in reading)
        winv = tuple(-x for x in reversed(w))
        joined = None
        if rng.random() < 0.8:
            for name, var in variables.items():
                if var.kind == RIGID:
                    continue
                if words[name] == w:
                    joined = (name, direction)
                elif words[name] == winv:
                    joined = (name, -direction)
                if joined:
                    break
        if joined is None:
            name = f"x{len(variables) + 1}"
            roll = rng.random()
            if roll < rigid_p:
                var = Variable(name, RIGID)
            elif roll < rigid_p + constant_p:
                var = Variable(name, CONSTANT, w)
            else:
                var = Variable(name, FREE)
            variables[name] = var
            words[name] = w
            joined = (name, direction)
        out_parts.append(Part(joined[0], joined[1], tuple(steps)))
    W.variables = variables
    W.parts = [[p.variable, p.direction, list(p.steps)] for p in out_parts]


def random_diagram(rng: np.random.Generator | int, l: int, max_cells: int = 6, k: int = 2,
                   filament_p: float = 0.15, mirror_p: float = 0.2, bud_p: float = 0.1) -> DecoratedDiagram:
    """A random labelled decorated diagram of level l with at most max_cells cells."""
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    g = _Grower(rng, l, k)
    target = 1 + int(rng.integers(max_cells))
    attempts = 0
    while len(g.W.cells) < target and attempts < 200:
        attempts += 1
        roll = rng.random()
        if not g.boundary:
            g.new_cell_on_arc(0, 0)
        elif roll < filament_p:
            g.filament()
        elif roll < filament_p + mirror_p:
            g.mirror_cell()
        elif roll < filament_p + mirror_p + bud_p:
            g.new_cell_on_arc(int(rng.integers(len(g.boundary))), 0)
        else:
            kk = 1 + int(rng.integers(min(l - 1, len(g.boundary))))
            g.new_cell_on_arc(int(rng.integers(len(g.boundary))), kk)
    if rng.random() < filament_p:
        g.filament()
    _decorate(g, rng)
    return g.W.freeze()


def canonical_form(D: DecoratedDiagram) -> tuple:
    """An isomorphism invariant of a diagram with a marked boundary start:
    edges and vertices renumbered by first appearance along the boundary
    and then along the cells, minimised over the order of the cells."""
    best = None
    for order in permutations(range(len(D.cells))):
        vmap: dict[int, int] = {D.boundary_start(): 0}
        emap: dict[int, tuple[int, int]] = {}

        def see(d):
            e, o = d
            if e not in emap:
                emap[e] = (len(emap), o)
                for x in D.ends((e, 1)):
                    vmap.setdefault(x, len(vmap))
            idx, o0 = emap[e]
            return (idx, o * o0)

        walk = tuple(see(d) for d in D.boundary())
        cells = tuple((D.cells[c].numbering, D.cells[c].direction, tuple(see(d) for d in D.cells[c].slots))
                      for c in order)
        edges = tuple(sorted((emap[e][0], *((vmap[t], vmap[h]) if emap[e][1] == 1 else (vmap[h], vmap[t])))
                             for e, (t, h) in D.edges.items() if e in emap))
        key = (walk, cells, edges)
        if best is None or key < best:
            best = key
    if best is None:
        best = ((), (), ())
    return best


def circular_diagrams(l: int, m: int) -> dict[tuple, DecoratedDiagram]:
    """All filament-free diagrams with at most m cells of level l, built by
    pasting cells along boundary arcs; keyed by canonical form.  Numberings
    are drawn from 1..m, so the result is the exhaustive counterpart of C(m)."""
    empty = DecoratedDiagram(l, {}, (), (), {}, 0, None)
    found = {canonical_form(empty): empty}
    layer = [empty]
    for _ in range(m):
        nxt = []
        for D in layer:
            b = D.boundary()
            B = len(b)
            starts = range(B) if B else [0]
            for s0 in starts:
                rot = b[s0:] + b[:s0]
                for k in range(0, min(B, l - 1) + 1):
                    if B == 0 and k:
                        continue
                    arc = rot[:k]
                    u = D.ends(rot[0])[0] if B else D.base
                    verts = [u] + [D.ends(d)[1] for d in arc]
                    if len(set(verts)) != len(verts):
                        continue
                    for i in range(1, m + 1):
                        for direction in (1, -1):
                            for start in range(l):
                                E = _paste(D, rot, k, u, verts[-1], i, direction, start)
                                key = canonical_form(E)
                                if key not in found:
                                    found[key] = E
                                    nxt.append(E)
        layer = nxt
    return found


def _paste(D: DecoratedDiagram, rot, k, u, w, numbering, direction, start) -> DecoratedDiagram:
    W = Work(D)
    l = D.level
    if k:
        Q = W.new_path(u, w, l - k)
    else:
        verts = [u] + [W.new_vertex() for _ in range(l - 1)] + [u]
        Q = [(W.new_edge(verts[j], verts[j + 1]), 1) for j in range(l)]
    polygon = inv_path(rot[:k]) + Q
    W.cells.append(cell_from_polygon(polygon, numbering, direction, start))
    W.parts = [["x1", 1, Q + list(rot[k:])]]
    W.variables = {"x1": Variable("x1", FREE)}
    return W.freeze()
