"""Word algebra in the free group F_k.

Letters are signed generator indices: ``+i`` is ``a_i`` and ``-i`` is its
inverse.  A :class:`Word` is always freely reduced, so two words are
graphically equal exactly when their letter tuples are equal.
"""

from __future__ import annotations

import enum
import itertools
import json
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import networkx as nx

from .errors import BudgetExceeded, PreconditionError, RankError

_TOKEN = re.compile(r"\s*([aA])(\d+)(\^-1)?\s*")


def _check_letters(letters: Sequence[int], rank: int) -> None:
    for x in letters:
        if x == 0 or abs(x) > rank:
            raise RankError(f"letter {x} out of range for rank {rank}")


def free_reduce(letters: Iterable[int]) -> tuple[int, ...]:
    """Stack-based free reduction of a raw letter sequence."""
    out: list[int] = []
    for x in letters:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def is_cyclically_reduced(letters: Sequence[int]) -> bool:
    if not letters:
        return True
    if any(a == -b for a, b in zip(letters, letters[1:])):
        return False
    return len(letters) == 1 or letters[0] != -letters[-1]


def letter_str(x: int) -> str:
    return f"a{x}" if x > 0 else f"A{-x}"


@dataclass(frozen=True, order=True)
class Word:
    """A freely reduced word of F_rank."""

    letters: tuple[int, ...]
    rank: int = 2

    def __post_init__(self):
        if self.rank < 1:
            raise RankError("rank must be positive")
        _check_letters(self.letters, self.rank)
        for a, b in zip(self.letters, self.letters[1:]):
            if a == -b:
                raise ValueError(f"word {self.letters} is not freely reduced")

    # construction -------------------------------------------------------
    @classmethod
    def identity(cls, rank: int = 2) -> "Word":
        return cls((), rank)

    @classmethod
    def parse(cls, text: str, rank: int | None = None) -> "Word":
        """Parse ``a1A2a1^-1``-style text (whitespace optional) and reduce it."""
        raw = parse_letters(text)
        if rank is None:
            rank = max([abs(x) for x in raw], default=2)
            rank = max(rank, 2)
        return reduce(raw, rank)

    @classmethod
    def from_json(cls, data: dict | str) -> "Word":
        if isinstance(data, str):
            data = json.loads(data)
        return reduce([i * s for i, s in data["letters"]], data["rank"])

    def to_json(self) -> dict:
        return {"rank": self.rank, "letters": [[abs(x), 1 if x > 0 else -1] for x in self.letters]}

    # views -------------------------------------------------------------
    @property
    def pairs(self) -> list[tuple[int, int]]:
        return [(abs(x), 1 if x > 0 else -1) for x in self.letters]

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[int]:
        return iter(self.letters)

    def __getitem__(self, i):
        return self.letters[i]

    def __str__(self) -> str:
        return "".join(letter_str(x) for x in self.letters) or "1"

    def __repr__(self) -> str:
        return f"Word({str(self)!r}, rank={self.rank})"

    def is_identity(self) -> bool:
        return not self.letters

    def is_cyclically_reduced(self) -> bool:
        return is_cyclically_reduced(self.letters)

    # algebra -----------------------------------------------------------
    def inverse(self) -> "Word":
        return Word(tuple(-x for x in reversed(self.letters)), self.rank)

    def __mul__(self, other: "Word") -> "Word":
        if not isinstance(other, Word):
            return NotImplemented
        if other.rank != self.rank:
            raise RankError("rank mismatch")
        a, b = list(self.letters), other.letters
        j = 0
        while a and j < len(b) and a[-1] == -b[j]:
            a.pop()
            j += 1
        return Word(tuple(a) + b[j:], self.rank)

    def __pow__(self, n: int) -> "Word":
        if n < 0:
            return self.inverse() ** (-n)
        if n == 0:
            return Word.identity(self.rank)
        dec = cyclic_reduce(self)
        # Y g^n Y^-1 is graphically reduced when g is cyclically reduced
        core = dec.core.letters * n
        return Word(dec.wing.letters + core + dec.wing.inverse().letters, self.rank)

    def conjugate(self, by: "Word") -> "Word":
        """``by * self * by^-1``."""
        return by * self * by.inverse()

    def cyclic_permutations(self) -> list["Word"]:
        n = len(self.letters)
        return [Word(self.letters[i:] + self.letters[:i], self.rank) for i in range(n)]


def parse_letters(text: str) -> list[int]:
    out: list[int] = []
    pos = 0
    text = text.strip()
    if text in ("", "1", "e"):
        return out
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ValueError(f"cannot parse word at {text[pos:]!r}")
        x = int(m.group(2))
        if x == 0:
            raise RankError("generator index 0")
        if m.group(1) == "A":
            x = -x
        if m.group(3):
            x = -x
        out.append(x)
        pos = m.end()
    return out


def reduce(raw: Iterable[int], rank: int = 2) -> Word:
    raw = list(raw)
    _check_letters(raw, rank)
    return Word(free_reduce(raw), rank)


@dataclass(frozen=True)
class ConjDecomposition:
    """``original = wing * core * wing^-1`` with no cancellation."""

    wing: Word
    core: Word
    original: Word

    @property
    def translation_length(self) -> int:
        return len(self.core)


def cyclic_reduce(w: Word) -> ConjDecomposition:
    x = w.letters
    i, j = 0, len(x) - 1
    while i < j and x[i] == -x[j]:
        i += 1
        j -= 1
    return ConjDecomposition(Word(x[:i], w.rank), Word(x[i:j + 1], w.rank), w)


def translation_length(w: Word) -> int:
    return len(cyclic_reduce(w).core)


def commute_free(g: Word, h: Word) -> bool:
    if g.rank != h.rank:
        raise RankError("rank mismatch")
    return g * h == h * g


class _Infinite:
    """Diameter of the overlap of two coinciding axes."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "INFINITE"

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("INFINITE")

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self


INFINITE = _Infinite()


def _axis_window(w: Word, n: int) -> list[tuple[int, ...]]:
    """Vertices of the axis of ``w`` between wing*g^-n and wing*g^n, in order."""
    dec = cyclic_reduce(w)
    stack = list(dec.wing.letters) + list(dec.core.inverse().letters) * n
    path = [tuple(stack)]
    for x in dec.core.letters * (2 * n):
        if stack and stack[-1] == -x:
            stack.pop()
        else:
            stack.append(x)
        path.append(tuple(stack))
    return path


def axis_overlap_diameter(g: Word, h: Word):
    """Edge-diameter of the intersection of the axes of g and h in the Cayley tree.

    Returns :data:`INFINITE` when g and h commute (their axes coincide).
    An empty intersection is reported as 0.
    """
    if g.is_identity() or h.is_identity():
        raise PreconditionError("axis of the trivial element is undefined")
    if g.rank != h.rank:
        raise RankError("rank mismatch")
    if commute_free(g, h):
        return INFINITE
    n = 2 + (len(g) + len(h)) // max(1, min(translation_length(g), translation_length(h)))
    while True:
        pa, pb = _axis_window(g, n), _axis_window(h, n)
        common = set(pa) & set(pb)
        ends = {pa[0], pa[-1], pb[0], pb[-1]}
        if not (common & ends):
            return max(len(common) - 1, 0)
        n *= 2


def contains_power_subword(w: Word, g: Word, n0: int) -> bool:
    if g.is_identity():
        raise PreconditionError("g must be nontrivial")
    hay = w.letters
    for pat in ((g ** n0).letters, (g ** -n0).letters):
        m = len(pat)
        for i in range(len(hay) - m + 1):
            if hay[i:i + m] == pat:
                return True
    return False


class PowerPairOutcome(enum.Enum):
    VERIFIED = "Verified"
    HYPOTHESIS_FAILED = "HypothesisFailed"
    VIOLATION = "Violation"


def check_power_pair_instance(p: Word, q: Word, G: Word, H: Word,
                              n0: int, r: int, s: int) -> PowerPairOutcome:
    """Check one instance of the power-commutation statement.

    Hypotheses: n0 > 10, r and s > 110*n0, neither p nor q contains
    g^{+-n0} or h^{+-n0} (g, h the cyclic cores of G, H) and
    p G^r q^-1 H^-s = 1 in F_k.  Conclusion: p G p^-1 commutes with H.
    """
    if G.is_identity() or H.is_identity():
        return PowerPairOutcome.HYPOTHESIS_FAILED
    if n0 <= 10 or r <= 110 * n0 or s <= 110 * n0:
        return PowerPairOutcome.HYPOTHESIS_FAILED
    g, h = cyclic_reduce(G).core, cyclic_reduce(H).core
    for word in (p, q):
        if contains_power_subword(word, g, n0) or contains_power_subword(word, h, n0):
            return PowerPairOutcome.HYPOTHESIS_FAILED
    if not (p * G ** r * q.inverse() * H ** -s).is_identity():
        return PowerPairOutcome.HYPOTHESIS_FAILED
    if commute_free(G.conjugate(p), H):
        return PowerPairOutcome.VERIFIED
    return PowerPairOutcome.VIOLATION


# -- cancellation trees ------------------------------------------------------

@dataclass(frozen=True)
class CancellationTree:
    """Combinatorial tree with positive integer edge lengths.

    Trees are kept up to isomorphism of weighted trees; ``canonical`` is the
    isomorphism-invariant key.  Labels of the boundary word are not part of
    the object, matching a count of shapes and edge lengths only.
    """

    vertex_count: int
    edges: tuple[tuple[int, int, int], ...]
    canonical: str

    @property
    def total_length(self) -> int:
        return sum(w for _, _, w in self.edges)

    @property
    def circumference(self) -> int:
        """Length of the closed walk around the tree (each edge twice)."""
        return 2 * self.total_length


def _tree_canonical(n: int, edges: Sequence[tuple[int, int, int]]) -> str:
    if n == 1:
        return "()"
    adj: dict[int, list[tuple[int, int]]] = {v: [] for v in range(n)}
    for u, v, w in edges:
        adj[u].append((v, w))
        adj[v].append((u, w))

    def enc(v, parent):
        return "(" + "".join(sorted(f"{w}{enc(c, v)}" for c, w in adj[v] if c != parent)) + ")"

    # centres of the unweighted tree
    deg = {v: len(adj[v]) for v in adj}
    layer = [v for v in adj if deg[v] <= 1]
    remaining = n
    while remaining > 2:
        remaining -= len(layer)
        nxt = []
        for v in layer:
            for c, _ in adj[v]:
                deg[c] -= 1
                if deg[c] == 1:
                    nxt.append(c)
        layer = nxt
    return min(enc(c, None) for c in layer)


def tree_bound(L: int, S: int) -> int:
    return 2 * L * (4 * L * L * S) ** (2 * L)


def enumerate_cancellation_trees(L: int, S: int, cap: int | None = 10**6) -> list[CancellationTree]:
    """All weighted trees with at most 2L vertices and total edge length at most S."""
    if L < 1 or S < 1:
        raise PreconditionError("L and S must be positive")
    out = [CancellationTree(1, (), "()")]
    seen = {"()"}
    for n in range(2, 2 * L + 1):
        if n - 1 > S:
            break
        for shape in nx.nonisomorphic_trees(n):
            es = sorted(shape.edges())
            for weights in _compositions_at_most(len(es), S):
                wedges = tuple((u, v, w) for (u, v), w in zip(es, weights))
                key = _tree_canonical(n, wedges)
                if key in seen:
                    continue
                seen.add(key)
                out.append(CancellationTree(n, wedges, key))
                if cap is not None and len(out) > cap:
                    raise BudgetExceeded(f"more than {cap} cancellation trees")
    return out


def _compositions_at_most(parts: int, total: int) -> Iterator[tuple[int, ...]]:
    for t in range(parts, total + 1):
        for cut in itertools.combinations(range(1, t), parts - 1):
            bounds = (0,) + cut + (t,)
            yield tuple(b - a for a, b in zip(bounds, bounds[1:]))
