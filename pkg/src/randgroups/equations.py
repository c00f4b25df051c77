"""Systems of equations with constants over free groups and their quotients.

Equations are words over the constants a1..ak and the variables y1..yq.
Internally a constant a_i is the integer i and a variable y_j is
VAR + j (negated for inverses), so the free-group reduction routines
apply unchanged to the extended alphabet.
"""

from __future__ import annotations

import enum
import itertools
import re
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .density import Budget, DehnRewriter, Presentation, Verdict, is_small_cancellation, is_trivial
from .errors import NotATree, PreconditionError
from .freegroup import Word, free_reduce, letter_str

VAR = 1 << 20
FREE = "free"

_TOKEN = re.compile(r"\s*([aAyY])(\d+)(\^-1)?\s*")


def is_var(x: int) -> bool:
    return abs(x) > VAR


def var_index(x: int) -> int:
    return abs(x) - VAR


def token_str(x: int) -> str:
    if is_var(x):
        return f"y{var_index(x)}" if x > 0 else f"Y{var_index(x)}"
    return letter_str(x)


class _Parser:
    """Words in a/A/y/Y tokens with ``^-1`` suffixes, juxtaposition,
    parentheses and commutator brackets ``[u,v] = u v u^-1 v^-1``."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def peek(self) -> str:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def parse(self) -> list[int]:
        out = self.seq()
        if self.peek():
            raise ValueError(f"unexpected {self.text[self.pos:]!r}")
        return out

    def seq(self) -> list[int]:
        out: list[int] = []
        while True:
            c = self.peek()
            if c == "[":
                self.pos += 1
                u = self.seq()
                if self.peek() != ",":
                    raise ValueError("expected ',' in commutator")
                self.pos += 1
                v = self.seq()
                if self.peek() != "]":
                    raise ValueError("expected ']'")
                self.pos += 1
                out += u + v + _inv(u) + _inv(v)
            elif c == "(":
                self.pos += 1
                u = self.seq()
                if self.peek() != ")":
                    raise ValueError("expected ')'")
                self.pos += 1
                if self.text.startswith("^-1", self.pos):
                    self.pos += 3
                    u = _inv(u)
                out += u
            elif c and c in "aAyY":
                m = _TOKEN.match(self.text, self.pos)
                if not m:
                    raise ValueError(f"cannot parse at {self.text[self.pos:]!r}")
                n = int(m.group(2))
                if n == 0:
                    raise ValueError("index 0 is not allowed")
                x = n if m.group(1) in "aA" else VAR + n
                if m.group(1) in "AY":
                    x = -x
                if m.group(3):
                    x = -x
                out.append(x)
                self.pos = m.end()
            elif c in ("1", "e") and not out:
                self.pos += 1
            else:
                return out


def _inv(w: Sequence[int]) -> list[int]:
    return [-x for x in reversed(w)]


def parse_equation(text: str) -> tuple[int, ...]:
    return free_reduce(_Parser(text).parse())


@dataclass(frozen=True)
class EquationSystem:
    equations: tuple[tuple[int, ...], ...]
    rank: int = 2
    inequations: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        for w in self.equations + self.inequations:
            if free_reduce(w) != tuple(w):
                raise PreconditionError("equations must be freely reduced")
            for x in w:
                if not is_var(x) and not 1 <= abs(x) <= self.rank:
                    raise PreconditionError(f"constant a{abs(x)} exceeds rank {self.rank}")

    @classmethod
    def parse(cls, equations: Sequence[str], rank: int = 2, inequations: Sequence[str] = ()) -> "EquationSystem":
        return cls(tuple(parse_equation(e) for e in equations), rank,
                   tuple(parse_equation(e) for e in inequations))

    @classmethod
    def from_file(cls, path: str | Path, rank: int = 2) -> "EquationSystem":
        """One equation per line; lines starting with '!=' are inequations
        and '#' starts a comment."""
        eqs, ineqs = [], []
        for line in Path(path).read_text().splitlines():
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("!="):
                ineqs.append(line[2:])
            else:
                eqs.append(line.removesuffix("=1").removesuffix("= 1"))
        return cls.parse(eqs, rank, ineqs)

    @property
    def variables(self) -> list[int]:
        """Indices j of the variables y_j occurring anywhere."""
        return sorted({var_index(x) for w in self.equations + self.inequations for x in w if is_var(x)})

    @property
    def q(self) -> int:
        return max(self.variables, default=0)

    @property
    def N(self) -> int:
        return len(self.equations)

    @property
    def size(self) -> int:
        return sum(len(w) for w in self.equations)

    def __str__(self) -> str:
        return "; ".join("".join(token_str(x) for x in w) or "1" for w in self.equations)


Assignment = Mapping[int, Word] | Sequence[Word]


def _lookup(y0: Assignment, j: int) -> Word:
    try:
        return y0[j] if isinstance(y0, Mapping) else y0[j - 1]
    except (KeyError, IndexError):
        raise PreconditionError(f"variable y{j} is not assigned") from None


def substitute(w: Sequence[int], y0: Assignment) -> tuple[int, ...]:
    """The raw (unreduced) letter sequence w(y0)."""
    out: list[int] = []
    for x in w:
        if is_var(x):
            v = _lookup(y0, var_index(x)).letters
            out.extend(v if x > 0 else _inv(v))
        else:
            out.append(x)
    return tuple(out)


def _rank_of(sigma: EquationSystem, y0: Assignment) -> int:
    vals = y0.values() if isinstance(y0, Mapping) else y0
    return max([sigma.rank] + [v.rank for v in vals])


# -- lengths ------------------------------------------------------------------------


@dataclass(frozen=True)
class GeodesicLength:
    length: int
    method: str  # "free" or "dehn"


def geodesic_word(w: Word, target: Presentation | str = FREE) -> tuple[Word, str]:
    """A short representative of w: itself over the free group, the Dehn
    reduced form over a presentation (exact geodesic only in favourable
    small-cancellation cases, hence the method tag)."""
    if target == FREE or not target.relators:
        return w, "free"
    short, _ = DehnRewriter(target).shorten(w.letters)
    return Word(short, w.rank), "dehn"


def geodesic_assignment(sigma: EquationSystem, y0: Assignment, target=FREE) -> dict[int, Word]:
    return {j: geodesic_word(_lookup(y0, j), target)[0] for j in sigma.variables}


def circumference(sigma: EquationSystem, y0: Assignment, target=FREE) -> int:
    """Sum over equations of the semigroup length of w(y0), after replacing
    each value by its geodesic representative."""
    g = geodesic_assignment(sigma, y0, target)
    return sum(len(substitute(w, g)) for w in sigma.equations)


def solution_length(sigma: EquationSystem, y0: Assignment, target=FREE) -> int:
    return geodesic_solution_length(sigma, y0, target).length


def geodesic_solution_length(sigma: EquationSystem, y0: Assignment, target=FREE) -> GeodesicLength:
    best, method = 0, "free"
    for j in sigma.variables:
        w, method = geodesic_word(_lookup(y0, j), target)
        best = max(best, len(w))
    return GeodesicLength(best, method)


# -- verification -------------------------------------------------------------------


class SolutionVerdict(enum.Enum):
    VALID = "Valid"
    INVALID = "Invalid"
    UNKNOWN = "Unknown"


def _word_status(raw: Sequence[int], rank: int, target, budget: Budget, dehn=None) -> Verdict:
    w = Word(free_reduce(raw), rank)
    if target == FREE:
        return Verdict.TRIVIAL if w.is_identity() else Verdict.NONTRIVIAL
    return is_trivial(w, target, budget, dehn).status


def verify_solution(sigma: EquationSystem, y0: Assignment, target=FREE,
                    budget: Budget = Budget()) -> SolutionVerdict:
    rank = _rank_of(sigma, y0)
    dehn = _dehn_if_exact(target)
    unknown = False
    for w in sigma.equations:
        st = _word_status(substitute(w, y0), rank, target, budget, dehn)
        if st == Verdict.NONTRIVIAL:
            return SolutionVerdict.INVALID
        if st == Verdict.UNKNOWN:
            unknown = True
    return SolutionVerdict.UNKNOWN if unknown else SolutionVerdict.VALID


def _dehn_if_exact(target):
    if target != FREE and target.relators and is_small_cancellation(target):
        return DehnRewriter(target)
    return None


def equal_in(u: Word, v: Word, target, budget: Budget = Budget()) -> Verdict:
    return _word_status(u.letters + v.inverse().letters, max(u.rank, v.rank), target, budget,
                        _dehn_if_exact(target))


# -- lifting ------------------------------------------------------------------------


class LiftStatus(enum.Enum):
    LIFTED = "Lifted"
    UNKNOWN = "Unknown"


@dataclass
class LiftResult:
    status: LiftStatus
    lift: tuple[Word, ...] | None
    candidates: dict[int, int] = field(default_factory=dict)
    tuples_tried: int = 0
    exhausted: bool = False

    def to_json(self) -> dict:
        return {
            "status": self.status.value,
            "lift": None if self.lift is None else [str(w) for w in self.lift],
            "candidates": {f"y{j}": n for j, n in self.candidates.items()},
            "tuples_tried": self.tuples_tried,
            "exhausted": self.exhausted,
        }


def preimage_candidates(y: Word, p: Presentation, budget: int, conj_len: int = 1,
                        cap: int = 20_000) -> list[Word]:
    """Words of length at most ``budget`` equal to y in the group of p,
    reached from y by inserting conjugates g r g^-1 (|g| <= conj_len, r a
    symmetrised relator) at any position; shortest first."""
    rank = max(y.rank, max((r.rank for r in p.relators), default=2))
    sym = p.symmetrized()
    alphabet = [x for i in range(1, rank + 1) for x in (i, -i)]
    conjugators = [()]
    for n in range(1, conj_len + 1):
        conjugators += [g for g in itertools.product(alphabet, repeat=n) if free_reduce(g) == g]
    inserts = sorted({free_reduce(g + r + tuple(-x for x in reversed(g))) for g in conjugators for r in sym})
    start = y.letters
    seen = {start}
    order = [start]
    queue = deque([start])
    while queue and len(seen) < cap:
        cur = queue.popleft()
        for i in range(len(cur) + 1):
            for ins in inserts:
                nxt = free_reduce(cur[:i] + ins + cur[i:])
                if len(nxt) <= budget and nxt not in seen:
                    seen.add(nxt)
                    order.append(nxt)
                    queue.append(nxt)
                    if len(seen) >= cap:
                        break
            if len(seen) >= cap:
                break
    order.sort(key=lambda w: (len(w), w))
    return [Word(w, rank) for w in order]


def lift_solution(sigma: EquationSystem, y0: Assignment, p: Presentation, budget: int = 12,
                  tuple_cap: int = 10**6, candidate_cap: int = 20_000) -> LiftResult:
    """Look for a free solution projecting onto y0 in the group of p.

    Only verified lifts are returned; running out of candidates or of the
    tuple budget yields Unknown, never a definite 'no'.
    """
    js = sigma.variables
    own = tuple(_lookup(y0, j) for j in js)
    full = {j: w for j, w in zip(js, own)}
    if verify_solution(sigma, full, FREE) == SolutionVerdict.VALID:
        return LiftResult(LiftStatus.LIFTED, own, {j: 1 for j in js}, 1, False)
    cands = [preimage_candidates(w, p, budget, cap=candidate_cap) for w in own]
    sizes = {j: len(c) for j, c in zip(js, cands)}
    tried = 0
    for combo in itertools.product(*cands):
        tried += 1
        if tried > tuple_cap:
            return LiftResult(LiftStatus.UNKNOWN, None, sizes, tried - 1, False)
        assign = dict(zip(js, combo))
        if all(not free_reduce(substitute(w, assign)) for w in sigma.equations):
            return LiftResult(LiftStatus.LIFTED, tuple(combo), sizes, tried, False)
    capped = any(n >= candidate_cap for n in sizes.values())
    return LiftResult(LiftStatus.UNKNOWN, None, sizes, tried, not capped)


# -- diagrams ----------------------------------------------------------------------


def tree_diagram_for(sigma: EquationSystem, y0: Assignment, index: int = 0):
    """The cell-free diagram whose boundary reads equation ``index`` under a
    free solution y0, decorated by the equation's letters."""
    from .vkd.diagram import DecoratedDiagram, Variable
    from .vkd.work import Work

    w = sigma.equations[index]
    if free_reduce(substitute(w, y0)):
        raise PreconditionError("the assignment does not solve the equation freely")
    W = Work(DecoratedDiagram(2, {}, (), (), {}, 0, {}))
    stack: list[tuple[int, int]] = []  # (edge, letter) along the current path
    here = W.base
    parts, variables = [], {}
    for pos, x in enumerate(w):
        if is_var(x):
            name = f"y{var_index(x)}"
            value = _lookup(y0, var_index(x)).letters
            seg = value if x > 0 else tuple(_inv(value))
            variables[name] = Variable(name)
            direction = 1 if x > 0 else -1
        else:
            name = f"c{pos}"
            seg = (x,)
            variables[name] = Variable(name, "constant", (x,))
            direction = 1
        steps = []
        for letter in seg:
            if stack and stack[-1][1] == -letter:
                e, _ = stack.pop()
                steps.append((e, -1))
                here = W.edges[e][0]
            else:
                v = W.new_vertex()
                e = W.new_edge(here, v, letter)
                stack.append((e, letter))
                steps.append((e, 1))
                here = v
        parts.append([name, direction, steps])
    W.parts = [[n, d, s] for n, d, s in parts]
    W.variables = variables
    return W.freeze()


def extract_lift_from_trees(family, sigma: EquationSystem | None = None):
    """Generally reduce each labelled diagram; every result must be a tree.
    The variable parts then read a free solution.

    Returns a dict variable-name -> Word, or, given sigma, the tuple of
    values of y1..yq after checking it solves sigma freely.
    """
    from .vkd.rewrite import generally_reduce

    values: dict[str, Word] = {}
    for D in family:
        if D.labels is None:
            raise PreconditionError("diagrams must carry labels")
        T = generally_reduce(D)
        if T.cells:
            raise NotATree(f"{len(T.cells)} cells remain after general reduction")
        for part in T.parts:
            var = T.variables[part.variable]
            if var.kind == "constant":
                continue
            w = Word(free_reduce(T.word(part.reading())), max(2, max((abs(x) for x in T.labels.values()), default=2)))
            if values.setdefault(part.variable, w) != w:
                raise PreconditionError(f"parts of {part.variable} disagree")
    if sigma is None:
        return values
    out = tuple(values.get(f"y{j}", Word.identity(sigma.rank)) for j in range(1, sigma.q + 1))
    if verify_solution(sigma, out, FREE) != SolutionVerdict.VALID:
        raise PreconditionError("extracted words do not solve the system")
    return out


# -- existential clauses --------------------------------------------------------------


class WitnessVerdict(enum.Enum):
    HOLDS = "Holds"
    FAILS_EQ = "FailsEq"
    FAILS_INEQ = "FailsIneq"
    UNKNOWN = "Unknown"


def check_existential_witness(clause: EquationSystem, x0: Assignment, target=FREE,
                              budget: Budget = Budget()) -> WitnessVerdict:
    """Check equations then inequations of one disjunct on a witness."""
    eq = verify_solution(clause, x0, target, budget)
    if eq == SolutionVerdict.INVALID:
        return WitnessVerdict.FAILS_EQ
    rank = _rank_of(clause, x0)
    dehn = _dehn_if_exact(target)
    unknown = eq == SolutionVerdict.UNKNOWN
    for v in clause.inequations:
        st = _word_status(substitute(v, x0), rank, target, budget, dehn)
        if st == Verdict.TRIVIAL:
            return WitnessVerdict.FAILS_INEQ
        if st == Verdict.UNKNOWN:
            unknown = True
    return WitnessVerdict.UNKNOWN if unknown else WitnessVerdict.HOLDS


__all__ = [
    "VAR", "FREE", "EquationSystem", "parse_equation", "substitute", "circumference",
    "solution_length", "geodesic_solution_length", "GeodesicLength", "geodesic_word",
    "SolutionVerdict", "verify_solution", "equal_in", "LiftStatus", "LiftResult",
    "preimage_candidates", "lift_solution", "tree_diagram_for", "extract_lift_from_trees",
    "WitnessVerdict", "check_existential_witness",
]
