"""Decorated topological Van Kampen diagrams as combinatorial maps.

A diagram is stored as

* ``edges``: edge id -> (tail, head);
* ``cells``: numbering, direction (+1 counter-clockwise, -1 clockwise) and
  the ``level`` slots (edge, orientation) in reading order, starting at the
  cell's start vertex;
* ``parts``: consecutive segments of the boundary.  The boundary walk is the
  concatenation of the parts' steps and is always stored counter-clockwise
  (the disk lies on the left).  A part's ``direction`` says whether its
  variable is read along (+1) or against (-1) that walk;
* ``variables``: registry of variable name -> kind (free, rigid, constant)
  and, for constants, the fixed letters;
* ``labels`` (optional): a letter for every edge, read tail to head.

Faces are the cells plus the unbounded face.  The rotation system is
derived from the faces, and planarity is checked through the Euler
characteristic plus the requirement that every vertex link is one cycle.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from ..errors import MalformedDiagram
from ..freegroup import letter_str, parse_letters

Dart = tuple[int, int]

FREE, RIGID, CONSTANT = "free", "rigid", "constant"
KINDS = (FREE, RIGID, CONSTANT)


def inv(d: Dart) -> Dart:
    return (d[0], -d[1])


def inv_path(path: Sequence[Dart]) -> list[Dart]:
    return [inv(d) for d in reversed(path)]


@dataclass(frozen=True)
class Cell:
    numbering: int
    direction: int
    slots: tuple[Dart, ...]

    def polygon(self) -> tuple[Dart, ...]:
        """The boundary of the cell read counter-clockwise from its start."""
        if self.direction == 1:
            return self.slots
        return tuple(inv_path(self.slots))

    def edges(self) -> set[int]:
        return {e for e, _ in self.slots}


@dataclass(frozen=True)
class Part:
    variable: str
    direction: int
    steps: tuple[Dart, ...]

    def reading(self) -> tuple[Dart, ...]:
        if self.direction == 1:
            return self.steps
        return tuple(inv_path(self.steps))

    def __len__(self):
        return len(self.steps)


@dataclass(frozen=True)
class Variable:
    name: str
    kind: str = FREE
    letters: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise MalformedDiagram(f"unknown variable kind {self.kind!r}")
        if (self.kind == CONSTANT) != (self.letters is not None):
            raise MalformedDiagram(f"variable {self.name}: letters are required exactly for constants")


def cell_from_polygon(polygon: Sequence[Dart], numbering: int, direction: int, start: int = 0) -> Cell:
    """Build a cell from its counter-clockwise polygon, a reading direction
    and the index (in reading order) of the slot that becomes position 0."""
    reading = list(polygon) if direction == 1 else inv_path(polygon)
    start %= len(reading)
    return Cell(numbering, direction, tuple(reading[start:] + reading[:start]))


@dataclass(frozen=True, eq=True)
class DecoratedDiagram:
    level: int
    edges: dict = field(hash=False)
    cells: tuple[Cell, ...]
    parts: tuple[Part, ...]
    variables: dict = field(hash=False)
    base: int = 0
    labels: dict | None = field(default=None, hash=False)

    # -- basic views ---------------------------------------------------------

    def ends(self, d: Dart) -> tuple[int, int]:
        t, h = self.edges[d[0]]
        return (t, h) if d[1] == 1 else (h, t)

    def boundary(self) -> list[Dart]:
        out: list[Dart] = []
        for p in self.parts:
            out.extend(p.steps)
        return out

    @property
    def boundary_length(self) -> int:
        return sum(len(p) for p in self.parts)

    def vertices(self) -> set[int]:
        vs = {v for t, h in self.edges.values() for v in (t, h)}
        if not vs:
            vs = {self.base}
        return vs

    def numberings(self) -> list[int]:
        return sorted({c.numbering for c in self.cells})

    def start_vertex(self, c: Cell) -> int:
        return self.ends(c.slots[0])[0]

    def boundary_start(self) -> int:
        b = self.boundary()
        return self.ends(b[0])[0] if b else self.base

    def parts_of(self, name: str) -> list[int]:
        return [i for i, p in enumerate(self.parts) if p.variable == name]

    def rigid_edges(self) -> set[int]:
        return {e for p in self.parts if self.variables[p.variable].kind == RIGID for e, _ in p.steps}

    def constant_edges(self) -> set[int]:
        return {e for p in self.parts if self.variables[p.variable].kind == CONSTANT for e, _ in p.steps}

    def cell_edges(self) -> set[int]:
        return {e for c in self.cells for e, _ in c.slots}

    def filaments(self) -> set[int]:
        return set(self.edges) - self.cell_edges()

    def is_isolated_cell(self, c: Cell, rigid: set[int] | None = None) -> bool:
        rigid = self.rigid_edges() if rigid is None else rigid
        return any(e in rigid for e, _ in c.slots)

    def isolated_numberings(self) -> list[int]:
        rigid = self.rigid_edges()
        out = []
        for i in self.numberings():
            if all(self.is_isolated_cell(c, rigid) for c in self.cells if c.numbering == i):
                out.append(i)
        return out

    def cell_counts(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for c in self.cells:
            out[c.numbering] = out.get(c.numbering, 0) + 1
        return out

    def part_vertices(self, k: int) -> list[int]:
        """Vertices visited by part k in its reading direction."""
        p = self.parts[k]
        reading = p.reading()
        if not reading:
            # a zero-length part sits at the vertex where it is inserted
            return [self._part_anchor(k)]
        out = [self.ends(reading[0])[0]]
        out.extend(self.ends(d)[1] for d in reading)
        return out

    def _part_anchor(self, k: int) -> int:
        steps_before = [d for p in self.parts[:k] for d in p.steps]
        if steps_before:
            return self.ends(steps_before[-1])[1]
        return self.boundary_start()

    # -- labels --------------------------------------------------------------

    def letter(self, d: Dart) -> int:
        lab = self.labels[d[0]]
        return lab if d[1] == 1 else -lab

    def word(self, darts: Iterable[Dart]) -> tuple[int, ...]:
        return tuple(self.letter(d) for d in darts)

    def cell_word(self, c: Cell) -> tuple[int, ...]:
        return self.word(c.slots)

    def numbering_words(self) -> dict[int, tuple[int, ...]]:
        out = {}
        for c in self.cells:
            out.setdefault(c.numbering, self.cell_word(c))
        return out

    def check_labels(self) -> None:
        """Raise unless the labels make this a decorated diagram fulfilled
        by the tuple of its own cell words."""
        if self.labels is None:
            raise MalformedDiagram("diagram carries no labels")
        if set(self.labels) != set(self.edges):
            raise MalformedDiagram("labels must cover exactly the edges")
        words = self.numbering_words()
        for c in self.cells:
            if self.cell_word(c) != words[c.numbering]:
                raise MalformedDiagram(f"cells of numbering {c.numbering} read different words")
        seen: dict[str, tuple[int, ...]] = {}
        for p in self.parts:
            w = self.word(p.reading())
            var = self.variables[p.variable]
            if var.kind == CONSTANT and w != var.letters:
                raise MalformedDiagram(f"constant part {p.variable} reads {w}")
            if seen.setdefault(p.variable, w) != w:
                raise MalformedDiagram(f"parts of {p.variable} read different words")

    # -- validation ----------------------------------------------------------

    def faces(self) -> list[tuple[Dart, ...]]:
        """Counter-clockwise face boundaries: cells, then the unbounded face."""
        out = [c.polygon() for c in self.cells]
        out.append(tuple(inv_path(self.boundary())))
        return out

    def rotation(self) -> dict[int, list[Dart]]:
        """Cyclic order of outgoing darts at each vertex, derived from the faces."""
        nxt: dict[Dart, Dart] = {}
        for f in self.faces():
            for a, b in zip(f, f[1:] + f[:1]):
                nxt[a] = b
        rot: dict[int, list[Dart]] = {}
        seen: set[Dart] = set()
        for d in sorted(nxt):
            if d in seen:
                continue
            v = self.ends(d)[0]
            orbit = []
            x = d
            while x not in seen:
                seen.add(x)
                orbit.append(x)
                x = nxt[inv(x)]
            rot.setdefault(v, [])
            if rot[v]:
                raise MalformedDiagram(f"vertex {v} has a disconnected link")
            rot[v] = orbit
        return rot

    def validate(self) -> "DecoratedDiagram":
        l = self.level
        if l < 1:
            raise MalformedDiagram("level must be positive")
        for e, (t, h) in self.edges.items():
            if not isinstance(e, int):
                raise MalformedDiagram("edge ids must be integers")
        for c in self.cells:
            if len(c.slots) != l:
                raise MalformedDiagram(f"cell has {len(c.slots)} edges, expected {l}")
            if c.direction not in (1, -1):
                raise MalformedDiagram("cell direction must be +1 or -1")
            self._check_closed(c.slots, "cell")
        for p in self.parts:
            if p.direction not in (1, -1):
                raise MalformedDiagram("part direction must be +1 or -1")
            if p.variable not in self.variables:
                raise MalformedDiagram(f"unknown variable {p.variable}")
        b = self.boundary()
        if b:
            self._check_closed(b, "boundary")
        for d in b:
            if d[0] not in self.edges:
                raise MalformedDiagram(f"unknown edge {d[0]}")
        # every edge once in each direction across faces
        count: dict[Dart, int] = {}
        for f in self.faces():
            for d in f:
                if d[0] not in self.edges:
                    raise MalformedDiagram(f"unknown edge {d[0]}")
                count[d] = count.get(d, 0) + 1
        for e in self.edges:
            if count.get((e, 1), 0) != 1 or count.get((e, -1), 0) != 1:
                raise MalformedDiagram(f"edge {e} is not bounded by exactly two face sides")
        rot = self.rotation()
        vs = self.vertices()
        if self.edges and set(rot) != vs:
            raise MalformedDiagram("isolated vertex in a non-trivial diagram")
        if not self._connected():
            raise MalformedDiagram("diagram is not connected")
        chi = len(vs) - len(self.edges) + len(self.cells) + 1
        if chi != 2:
            raise MalformedDiagram(f"Euler characteristic {chi}, not a sphere")
        self._check_decoration()
        if self.labels is not None:
            self.check_labels()
        return self

    def _check_closed(self, walk, what):
        for a, b in zip(walk, walk[1:] + walk[:1]):
            if self.ends(a)[1] != self.ends(b)[0]:
                raise MalformedDiagram(f"{what} walk is not closed")

    def _connected(self) -> bool:
        vs = self.vertices()
        adj: dict[int, set[int]] = {v: set() for v in vs}
        for t, h in self.edges.values():
            adj[t].add(h)
            adj[h].add(t)
        start = next(iter(vs))
        seen = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen == vs

    def _check_decoration(self):
        lengths: dict[str, int] = {}
        counts: dict[str, int] = {}
        for p in self.parts:
            if lengths.setdefault(p.variable, len(p)) != len(p):
                raise MalformedDiagram(f"parts of {p.variable} have unequal lengths")
            counts[p.variable] = counts.get(p.variable, 0) + 1
        for name, var in self.variables.items():
            if var.kind == RIGID and counts.get(name, 0) > 1:
                raise MalformedDiagram(f"rigid variable {name} has {counts[name]} parts")
            if var.kind == CONSTANT and name in lengths and len(var.letters) != lengths[name]:
                raise MalformedDiagram(f"constant {name} has the wrong number of letters")

    # -- serialisation -------------------------------------------------------

    def to_json(self) -> dict:
        out = {
            "level": self.level,
            "base": self.base,
            "edges": {str(e): list(th) for e, th in sorted(self.edges.items())},
            "cells": [
                {
                    "numbering": c.numbering,
                    "start": self.start_vertex(c),
                    "direction": "CCW" if c.direction == 1 else "CW",
                    "slots": [list(s) for s in c.slots],
                }
                for c in self.cells
            ],
            "boundary": {"start": self.boundary_start(), "walk": [list(d) for d in self.boundary()]},
            "parts": [
                {"variable": p.variable, "direction": p.direction, "steps": [list(s) for s in p.steps]}
                for p in self.parts
            ],
            "variables": [
                {"name": v.name, "kind": v.kind}
                | ({"letters": "".join(letter_str(x) for x in v.letters)} if v.letters is not None else {})
                for v in self.variables.values()
            ],
            "rotation": {str(v): [list(d) for d in ds] for v, ds in sorted(self.rotation().items())},
        }
        if self.labels is not None:
            out["labels"] = {str(e): letter_str(x) for e, x in sorted(self.labels.items())}
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)

    @classmethod
    def from_json(cls, data: dict | str) -> "DecoratedDiagram":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            edges = {int(e): (int(th[0]), int(th[1])) for e, th in data["edges"].items()}
            cells = tuple(
                Cell(int(c["numbering"]), 1 if c["direction"] in ("CCW", 1) else -1,
                     tuple((int(e), int(o)) for e, o in c["slots"]))
                for c in data.get("cells", [])
            )
            parts = tuple(
                Part(p["variable"], int(p.get("direction", 1)), tuple((int(e), int(o)) for e, o in p["steps"]))
                for p in data.get("parts", [])
            )
            variables = {}
            for v in data.get("variables", []):
                letters = v.get("letters")
                if letters is not None:
                    letters = tuple(parse_letters(letters))
                variables[v["name"]] = Variable(v["name"], v.get("kind", FREE), letters)
            labels = None
            if "labels" in data:
                labels = {}
                for e, x in data["labels"].items():
                    (letter,) = parse_letters(x)
                    labels[int(e)] = letter
            d = cls(int(data["level"]), edges, cells, parts, variables, int(data.get("base", 0)), labels)
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedDiagram(f"bad diagram JSON: {exc}") from exc
        d.validate()
        walk = data.get("boundary", {}).get("walk")
        if walk is not None and [tuple(x) for x in walk] != d.boundary():
            raise MalformedDiagram("boundary walk disagrees with the parts")
        for c, raw in zip(d.cells, data.get("cells", [])):
            if "start" in raw and raw["start"] != d.start_vertex(c):
                raise MalformedDiagram("cell start vertex disagrees with its slots")
        if "rotation" in data:
            rot = d.rotation()
            for v, ds in data["rotation"].items():
                ds = [tuple(x) for x in ds]
                mine = rot.get(int(v), [])
                if len(mine) != len(ds) or (ds and not _same_cycle(mine, ds)):
                    raise MalformedDiagram(f"rotation at vertex {v} is inconsistent with the faces")
        return d


def _same_cycle(a: list, b: list) -> bool:
    if b[0] not in a:
        return False
    i = a.index(b[0])
    return a[i:] + a[:i] == b
