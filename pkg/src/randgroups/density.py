"""Gromov density model: cyclically reduced words, random presentations,
small cancellation and a desk-scale word problem."""

from __future__ import annotations

import enum
import json
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .errors import BudgetExceeded, PreconditionError
from .freegroup import Word, free_reduce, is_cyclically_reduced

DEFAULT_ENUM_CAP = 10**7


def count_cyclically_reduced(k: int, l: int) -> int:
    """|B_l| by a three-state transfer count on the relation to the first letter."""
    if k < 2 or l < 1:
        raise PreconditionError("need k >= 2 and l >= 1")
    same, inv, other = 1, 0, 0
    for _ in range(l - 1):
        same, inv, other = (
            same + other,
            inv + other,
            (2 * k - 2) * (same + inv) + (2 * k - 3) * other,
        )
    return 2 * k * (same + other)


def closed_form_count(k: int, l: int) -> int:
    return (2 * k - 1) ** l + 1 + (k - 1) * (1 + (-1) ** l)


def _alphabet(k: int) -> list[int]:
    return [x for i in range(1, k + 1) for x in (i, -i)]


def enumerate_B_l(k: int, l: int, cap: int = DEFAULT_ENUM_CAP) -> Iterator[Word]:
    """Cyclically reduced words of length l in lexicographic order of the
    alphabet a1, A1, a2, A2, ..."""
    if (2 * k - 1) ** l > cap * (2 * k - 1):
        raise BudgetExceeded(f"enumeration of B_{l} over rank {k} exceeds cap {cap}")
    letters = _alphabet(k)
    word: list[int] = []

    def rec():
        if len(word) == l:
            if l == 1 or word[0] != -word[-1]:
                yield Word(tuple(word), k)
            return
        for x in letters:
            if word and word[-1] == -x:
                continue
            word.append(x)
            yield from rec()
            word.pop()

    yield from rec()


def relator_count(k: int, l: int, d: float) -> int:
    """floor(|B_l|^d), forced to be at least 1."""
    n = count_cyclically_reduced(k, l)
    if d <= 0:
        return 1
    s = math.floor(math.exp(d * math.log(n)) * (1 + 1e-12))
    return max(1, s)


@dataclass(frozen=True)
class ModelParams:
    k: int
    l: int
    d: float
    seed: int = 0

    def __post_init__(self):
        if self.k < 2 or self.l < 1:
            raise PreconditionError("need k >= 2 and l >= 1")
        if not 0 <= self.d <= 1:
            raise PreconditionError("density must lie in [0, 1]")

    @property
    def relator_count(self) -> int:
        return relator_count(self.k, self.l, self.d)


@dataclass(frozen=True)
class Presentation:
    """``<a_1..a_k : relators>``; ``params`` is None for hand-written presentations."""

    rank: int
    relators: tuple[Word, ...]
    params: ModelParams | None = None

    @classmethod
    def from_relators(cls, relators: Sequence[Word | str], rank: int = 2) -> "Presentation":
        rels = tuple(r if isinstance(r, Word) else Word.parse(r, rank) for r in relators)
        return cls(rank, rels)

    @property
    def level(self) -> int:
        return len(self.relators[0]) if self.relators else 0

    def to_json(self) -> dict:
        out = {"k": self.rank, "relators": [str(r) for r in self.relators]}
        if self.params is not None:
            out.update(l=self.params.l, d=self.params.d, seed=self.params.seed)
        else:
            out["l"] = self.level
        return out

    @classmethod
    def from_json(cls, data: dict | str) -> "Presentation":
        if isinstance(data, str):
            data = json.loads(data)
        k = data["k"]
        rels = tuple(Word.parse(r, k) for r in data["relators"])
        params = None
        if "d" in data:
            params = ModelParams(k, data["l"], data["d"], data.get("seed", 0))
        return cls(k, rels, params)

    def symmetrized(self) -> list[tuple[int, ...]]:
        """Distinct cyclic conjugates of the relators and their inverses."""
        return sorted(set(self.occurrences()))

    def occurrences(self) -> list[tuple[int, ...]]:
        """Relator occurrences: one entry per rotation of each distinct relator
        and of its inverse.

        Relators equal up to rotation or inversion collapse. A proper power
        contributes repeated entries (distinct occurrences of one word); an
        inverse rotation coinciding with a forward rotation is not repeated.
        """
        out: list[tuple[int, ...]] = []
        seen: set[tuple[int, ...]] = set()
        for r in self.relators:
            w = r.letters
            if w in seen:
                continue
            fwd = [w[i:] + w[:i] for i in range(len(w))]
            inv = r.inverse().letters
            bwd = [inv[i:] + inv[:i] for i in range(len(inv))]
            seen.update(fwd)
            seen.update(bwd)
            out.extend(fwd)
            fset = set(fwd)
            out.extend(x for x in bwd if x not in fset)
        return out


def substream(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(key)))


def random_cyclically_reduced(rng: np.random.Generator, k: int, l: int) -> Word:
    """Uniform element of B_l: uniform reduced word, rejected until cyclically reduced."""
    while True:
        first = int(rng.integers(2 * k))
        letters = [_alphabet(k)[first]]
        for _ in range(l - 1):
            j = int(rng.integers(2 * k - 1))
            # skip the inverse of the previous letter
            cands = [x for x in _alphabet(k) if x != -letters[-1]]
            letters.append(cands[j])
        if is_cyclically_reduced(letters):
            return Word(tuple(letters), k)


def sample_presentation(params: ModelParams, stream: Sequence[int] = ()) -> Presentation:
    """Draw floor(|B_l|^d) relators i.i.d. uniform on B_l (with replacement).

    Relator i is drawn from the substream ``(seed, *stream, i)``.
    """
    rels = tuple(
        random_cyclically_reduced(substream(params.seed, *stream, i), params.k, params.l)
        for i in range(params.relator_count)
    )
    return Presentation(params.k, rels, params)


def max_piece_ratio(p: Presentation) -> Fraction:
    """Longest piece over relator length (relators are assumed equal length).

    Pieces are common prefixes of two distinct relator occurrences, so
    self-overlaps at distinct positions count (a proper power has ratio 1)
    and repeated relators collapse.
    """
    if not p.relators:
        raise PreconditionError("presentation has no relators")
    sym = sorted(p.occurrences())
    best = 0
    for a, b in zip(sym, sym[1:]):
        k = 0
        while k < len(a) and k < len(b) and a[k] == b[k]:
            k += 1
        best = max(best, k)
    return Fraction(best, p.level)


def is_small_cancellation(p: Presentation, lam: Fraction = Fraction(1, 6)) -> bool:
    return max_piece_ratio(p) < lam


# -- word problem ------------------------------------------------------------

class Verdict(enum.Enum):
    TRIVIAL = "Trivial"
    NONTRIVIAL = "NonTrivial"
    UNKNOWN = "Unknown"


class Method(enum.Enum):
    DEHN = "Dehn"
    BALL_SEARCH = "BallSearch"


@dataclass(frozen=True)
class WordProblemVerdict:
    status: Verdict
    method: Method
    budget_consumed: int


@dataclass(frozen=True)
class Budget:
    """Ball-search limits: extra length over |w| allowed, and node cap.

    ``radius=None`` means twice the relator length."""

    radius: int | None = None
    node_cap: int = 10**6


def _dehn_table(p: Presentation) -> dict[tuple[int, ...], tuple[int, ...]]:
    """Map each factor u (|u| > l/2) of a symmetrised relator u v to v^-1."""
    table: dict[tuple[int, ...], tuple[int, ...]] = {}
    for r in p.symmetrized():
        n = len(r)
        for m in range(n // 2 + 1, n + 1):
            u, v = r[:m], r[m:]
            inv_v = tuple(-x for x in reversed(v))
            if u not in table or len(inv_v) < len(table[u]):
                table[u] = inv_v
    return table


@dataclass
class DehnRewriter:
    """Dehn's algorithm against a fixed presentation."""

    presentation: Presentation
    table: dict = field(init=False)

    def __post_init__(self):
        self.table = _dehn_table(self.presentation)
        self.lengths = sorted({len(u) for u in self.table}, reverse=True)

    def _step_linear(self, w: tuple[int, ...]):
        for m in self.lengths:
            for i in range(len(w) - m + 1):
                rep = self.table.get(w[i:i + m])
                if rep is not None:
                    return free_reduce(w[:i] + rep + w[i + m:])
        return None

    def shorten(self, w: tuple[int, ...]) -> tuple[tuple[int, ...], int]:
        """Linear Dehn reduction; returns the shortened word and the step count."""
        steps = 0
        w = free_reduce(w)
        while True:
            nxt = self._step_linear(w)
            if nxt is None:
                return w, steps
            w = nxt
            steps += 1

    def _cyclic_reduce(self, w):
        w = list(free_reduce(w))
        while len(w) >= 2 and w[0] == -w[-1]:
            w = w[1:-1]
        return tuple(w)

    def _step_cyclic(self, w: tuple[int, ...]):
        n = len(w)
        ww = w + w
        for m in self.lengths:
            if m > n:
                continue
            for i in range(n):
                rep = self.table.get(ww[i:i + m])
                if rep is not None:
                    rot = ww[i:i + n]
                    return self._cyclic_reduce(rep + rot[m:])
        return None

    def trace_cyclic(self, w: tuple[int, ...]) -> list[tuple[int, ...]]:
        """Sequence of cyclic words visited by cyclic Dehn reduction."""
        w = self._cyclic_reduce(w)
        out = [w]
        while w:
            nxt = self._step_cyclic(w)
            if nxt is None:
                break
            w = nxt
            out.append(w)
        return out


def _canonical_cyclic(w: tuple[int, ...]) -> tuple[int, ...]:
    if not w:
        return w
    return min(w[i:] + w[:i] for i in range(len(w)))


def ball_search(w: Word, p: Presentation, budget: Budget = Budget()) -> WordProblemVerdict:
    """Breadth-first search for a proof of triviality by relator insertions.

    Words are kept cyclically reduced (triviality is conjugation invariant);
    intermediate length is capped at |w| + radius.
    """
    radius = budget.radius if budget.radius is not None else 2 * max(p.level, 1)
    start = _canonical_cyclic(_cyc(w.letters))
    limit = len(start) + radius
    sym = p.symmetrized()
    seen = {start}
    queue = deque([start])
    nodes = 0
    while queue:
        cur = queue.popleft()
        nodes += 1
        if not cur:
            return WordProblemVerdict(Verdict.TRIVIAL, Method.BALL_SEARCH, nodes)
        if nodes >= budget.node_cap:
            break
        for i in range(len(cur) + 1):
            head, tail = cur[:i], cur[i:]
            for r in sym:
                nxt = _cyc(free_reduce(head + r + tail))
                if len(nxt) > limit:
                    continue
                key = _canonical_cyclic(nxt)
                if key not in seen:
                    if not key:
                        return WordProblemVerdict(Verdict.TRIVIAL, Method.BALL_SEARCH, nodes)
                    seen.add(key)
                    queue.append(key)
    return WordProblemVerdict(Verdict.UNKNOWN, Method.BALL_SEARCH, nodes)


def _cyc(w):
    w = list(w)
    i, j = 0, len(w) - 1
    while i < j and w[i] == -w[j]:
        i += 1
        j -= 1
    return tuple(w[i:j + 1])


def is_trivial(w: Word, p: Presentation, budget: Budget = Budget(),
               dehn: DehnRewriter | None = None) -> WordProblemVerdict:
    """Decide w = 1 in the group of p.

    Dehn's algorithm (exact) when p is C'(1/6); otherwise a bounded ball
    search that can only prove triviality.
    """
    if w.is_identity():
        return WordProblemVerdict(Verdict.TRIVIAL, Method.DEHN, 0)
    if p.relators and (dehn is not None or is_small_cancellation(p)):
        dehn = dehn or DehnRewriter(p)
        trace = dehn.trace_cyclic(w.letters)
        status = Verdict.TRIVIAL if not trace[-1] else Verdict.NONTRIVIAL
        return WordProblemVerdict(status, Method.DEHN, len(trace) - 1)
    if not p.relators:
        return WordProblemVerdict(Verdict.NONTRIVIAL, Method.DEHN, 0)
    # Dehn shortening is sound for any presentation: reaching the empty
    # word proves triviality, and the shortened word is equal in the group
    short, steps = (dehn or DehnRewriter(p)).shorten(w.letters)
    if not short:
        return WordProblemVerdict(Verdict.TRIVIAL, Method.DEHN, steps)
    res = ball_search(Word(short, w.rank), p, budget)
    return WordProblemVerdict(res.status, res.method, res.budget_consumed + steps)
