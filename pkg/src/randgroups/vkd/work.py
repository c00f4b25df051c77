"""Mutable scratch copy of a diagram used while rewriting."""

from __future__ import annotations

from dataclasses import replace
from typing import Sequence

from ..errors import MalformedDiagram
from .diagram import Cell, DecoratedDiagram, Dart, Part, inv, inv_path
from .unionfind import UnionFind


class Work:
    def __init__(self, D: DecoratedDiagram):
        self.level = D.level
        self.edges = dict(D.edges)
        self.cells: list[Cell | None] = list(D.cells)
        self.parts = [[p.variable, p.direction, list(p.steps)] for p in D.parts]
        self.variables = dict(D.variables)
        self.base = D.base
        self.labels = dict(D.labels) if D.labels is not None else None
        vs = [v for th in D.edges.values() for v in th] + [D.base]
        self._next_vertex = max(vs) + 1
        self._next_edge = max(D.edges, default=0) + 1

    # -- allocation ----------------------------------------------------------

    def new_vertex(self) -> int:
        v = self._next_vertex
        self._next_vertex += 1
        return v

    def new_edge(self, tail: int, head: int, label: int | None = None) -> int:
        e = self._next_edge
        self._next_edge += 1
        self.edges[e] = (tail, head)
        if self.labels is not None:
            if label is None:
                raise MalformedDiagram("labelled diagram needs a label for every new edge")
            self.labels[e] = label
        return e

    def new_path(self, u: int, v: int, n: int, letters: Sequence[int] | None = None) -> list[Dart]:
        """A fresh path of n edges from u to v (each edge oriented along it)."""
        verts = [u] + [self.new_vertex() for _ in range(n - 1)] + [v]
        path = []
        for j in range(n):
            lab = letters[j] if letters is not None else None
            path.append((self.new_edge(verts[j], verts[j + 1], lab), 1))
        return path

    def ends(self, d: Dart) -> tuple[int, int]:
        t, h = self.edges[d[0]]
        return (t, h) if d[1] == 1 else (h, t)

    def letter(self, d: Dart) -> int:
        x = self.labels[d[0]]
        return x if d[1] == 1 else -x

    # -- boundary ------------------------------------------------------------

    def boundary_positions(self, e: int) -> list[tuple[int, int, int]]:
        """(part index, step index, orientation) of each boundary traversal of e."""
        out = []
        for pi, (_, _, steps) in enumerate(self.parts):
            for si, (f, o) in enumerate(steps):
                if f == e:
                    out.append((pi, si, o))
        return out

    def replace_step(self, pi: int, si: int, new: Sequence[Dart]) -> None:
        steps = self.parts[pi][2]
        steps[si:si + 1] = list(new)

    def remove_cell_across(self, ci: int, dart: Dart) -> None:
        """Delete cell ci, whose polygon contains ``dart`` on the boundary;
        the boundary now walks around the rest of the cell instead."""
        cell = self.cells[ci]
        poly = list(cell.polygon())
        k = poly.index(dart)
        rest = poly[k + 1:] + poly[:k]
        hits = [(pi, si) for pi, si, o in self.boundary_positions(dart[0]) if o == dart[1]]
        if len(hits) != 1:
            raise MalformedDiagram("cell edge is not on the boundary")
        pi, si = hits[0]
        self.replace_step(pi, si, inv_path(rest))
        self.cells[ci] = None

    # -- identification ------------------------------------------------------

    def identify(self, pairs: Sequence[tuple[Dart, Dart]]) -> None:
        """Glue darts pairwise (a becomes b) and merge endpoints accordingly."""
        euf = UnionFind(self.edges)
        for (ea, oa), (eb, ob) in pairs:
            if not euf.union(ea, eb, oa * ob):
                raise MalformedDiagram("identification glues an edge to its own reverse")
        vuf = UnionFind()
        for e, (t, h) in self.edges.items():
            vuf.add(t)
            vuf.add(h)
            r, ph = euf.find(e)
            rt, rh = self.edges[r]
            if ph == -1:
                rt, rh = rh, rt
            vuf.union(t, rt)
            vuf.union(h, rh)
        emap = {e: euf.find(e) for e in self.edges}
        if self.labels is not None:
            for e, (r, ph) in emap.items():
                if self.labels[e] != self.labels[r] * ph:
                    raise MalformedDiagram("identification mixes incompatible labels")

        def md(d: Dart) -> Dart:
            r, ph = emap[d[0]]
            return (r, d[1] * ph)

        self.edges = {e: (vuf.root(t), vuf.root(h)) for e, (t, h) in self.edges.items() if emap[e][0] == e}
        self.cells = [None if c is None else replace(c, slots=tuple(md(s) for s in c.slots)) for c in self.cells]
        for p in self.parts:
            p[2] = [md(s) for s in p[2]]
        self.base = vuf.root(self.base)
        if self.labels is not None:
            self.labels = {e: x for e, x in self.labels.items() if e in self.edges}

    # -- finish --------------------------------------------------------------

    def freeze(self, validate: bool = True) -> DecoratedDiagram:
        cells = tuple(c for c in self.cells if c is not None)
        used = {e for c in cells for e, _ in c.slots}
        used |= {e for _, _, steps in self.parts for e, _ in steps}
        edges = {e: th for e, th in self.edges.items() if e in used}
        labels = None
        if self.labels is not None:
            labels = {e: x for e, x in self.labels.items() if e in edges}
        parts = tuple(Part(v, d, tuple(s)) for v, d, s in self.parts)
        base = self.base
        bnd = [d for p in parts for d in p.steps]
        if bnd:
            t, h = edges[bnd[0][0]]
            base = t if bnd[0][1] == 1 else h
        elif edges:
            base = next(iter(edges.values()))[0]
        D = DecoratedDiagram(self.level, edges, cells, parts, self.variables, base, labels)
        if validate:
            D.validate()
        return D


def polygon_rotated(cell: Cell, dart: Dart) -> list[Dart]:
    poly = list(cell.polygon())
    k = poly.index(dart)
    return poly[k:] + poly[:k]


__all__ = ["Work", "polygon_rotated", "inv", "inv_path"]
