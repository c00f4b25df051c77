"""Contiguity classes and the auxiliary graph K of a decorated diagram."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from ..errors import MalformedDiagram
from .diagram import CONSTANT, DecoratedDiagram
from .unionfind import UnionFind

Vertex = tuple[int, int]  # (numbering, position)


@dataclass
class Contiguity:
    """Edges forced to carry the same letter (up to inversion).

    ``parity[e]`` is phi(e): the label of e equals lambda^phi(e) for the
    class letter lambda.  ``fixed[root]`` holds a constant-imposed class
    letter; ``conflict`` records contradictory constraints (such a diagram
    is fulfilled by nothing).
    """

    root: dict[int, int]
    parity: dict[int, int]
    members: dict[int, list[int]]
    fixed: dict[int, int]
    conflict: bool

    def cls(self, e: int) -> list[int]:
        return self.members[self.root[e]]


def contiguity(D: DecoratedDiagram) -> Contiguity:
    uf = UnionFind(D.edges)
    conflict = False
    by_var: dict[str, list] = {}
    for p in D.parts:
        by_var.setdefault(p.variable, []).append(p.reading())
    for readings in by_var.values():
        first = readings[0]
        for other in readings[1:]:
            if len(other) != len(first):
                raise MalformedDiagram("parts of one variable have unequal lengths")
            for (ea, sa), (eb, sb) in zip(first, other):
                if not uf.union(ea, eb, sa * sb):
                    conflict = True
    root, parity, members = {}, {}, {}
    for e in D.edges:
        r, ph = uf.find(e)
        root[e], parity[e] = r, ph
        members.setdefault(r, []).append(e)
    fixed: dict[int, int] = {}
    for p in D.parts:
        var = D.variables[p.variable]
        if var.kind != CONSTANT:
            continue
        for (e, s), x in zip(p.reading(), var.letters):
            # lab(e)^s = x and lab(e) = lambda^phi  =>  lambda = x^(s*phi)
            lam = x * s * parity[e]
            r = root[e]
            if fixed.setdefault(r, lam) != lam:
                conflict = True
    return Contiguity(root, parity, members, fixed, conflict)


@dataclass
class Occurrence:
    cell: int
    position: int
    edge: int
    orient: int


@dataclass
class AuxGraph:
    numberings: list[int]
    level: int
    vertices: list[Vertex]
    edges: list[tuple[Vertex, Vertex, int, str]]
    component: dict[Vertex, int]
    constant_components: set[int]
    contiguity: Contiguity = field(repr=False)
    occurrences: dict[Vertex, list[Occurrence]] = field(repr=False)

    def loops(self, kind: str | None = None) -> list[tuple[Vertex, Vertex, int, str]]:
        return [x for x in self.edges if x[0] == x[1] and (kind is None or x[3] == kind)]

    def components(self) -> dict[int, list[Vertex]]:
        out: dict[int, list[Vertex]] = {}
        for v in self.vertices:
            out.setdefault(self.component[v], []).append(v)
        return out

    def is_constant(self, v: Vertex) -> bool:
        return self.component[v] in self.constant_components

    @property
    def u(self) -> int:
        """Number of non-constant connected components."""
        return sum(1 for c in self.components() if c not in self.constant_components)

    def isolated_vertices(self) -> list[Vertex]:
        comps = self.components()
        return sorted(
            vs[0] for c, vs in comps.items() if len(vs) == 1 and c not in self.constant_components
        )

    @property
    def A(self) -> int:
        return len(self.isolated_vertices())


def build_aux_graph(D: DecoratedDiagram, cont: Contiguity | None = None) -> AuxGraph:
    cont = cont or contiguity(D)
    nums = D.numberings()
    l = D.level
    vertices = [(i, p) for i in nums for p in range(l)]
    occ_by_class: dict[int, list[Occurrence]] = {}
    occ_by_vertex: dict[Vertex, list[Occurrence]] = {v: [] for v in vertices}
    for ci, c in enumerate(D.cells):
        for p, (e, o) in enumerate(c.slots):
            oc = Occurrence(ci, p, e, o)
            occ_by_class.setdefault(cont.root[e], []).append(oc)
            occ_by_vertex[(c.numbering, p)].append(oc)
    edges = []
    uf = UnionFind(vertices)
    for occs in occ_by_class.values():
        for a, b in combinations(occs, 2):
            va = (D.cells[a.cell].numbering, a.position)
            vb = (D.cells[b.cell].numbering, b.position)
            same_letter = cont.parity[a.edge] * a.orient == cont.parity[b.edge] * b.orient
            sign = -1 if same_letter else 1
            kind = "cell" if a.edge == b.edge else "contiguity"
            edges.append((va, vb, sign, kind))
            uf.union(va, vb)
    component = {v: uf.root(v) for v in vertices}
    constant_classes = set(cont.fixed)
    constant_components = set()
    for v, occs in occ_by_vertex.items():
        if any(cont.root[oc.edge] in constant_classes for oc in occs):
            constant_components.add(component[v])
    return AuxGraph(nums, l, vertices, edges, component, constant_components, cont, occ_by_vertex)


def is_reduced(D: DecoratedDiagram, K: AuxGraph | None = None) -> bool:
    """True iff the underlying topological diagram has no loop in K: no two
    distinct cells of one numbering share an edge at the same position."""
    K = K or build_aux_graph(D)
    return not K.loops("cell")


@dataclass(frozen=True)
class DiagramStats:
    n: int
    m: int
    u: int
    A: int
    R: int
    boundary_len: int

    @property
    def cells(self) -> int:
        return self.m

    def to_json(self) -> dict:
        return {"n": self.n, "m": self.m, "u": self.u, "A": self.A, "R": self.R, "boundary_len": self.boundary_len}


def diagram_stats(D: DecoratedDiagram, K: AuxGraph | None = None) -> DiagramStats:
    K = K or build_aux_graph(D)
    return DiagramStats(
        n=len(K.numberings),
        m=len(D.cells),
        u=K.u,
        A=K.A,
        R=len(D.rigid_edges()),
        boundary_len=D.boundary_length,
    )

