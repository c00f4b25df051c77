"""Fulfilment of decorated diagrams by tuples of words and by presentations."""

from __future__ import annotations

from itertools import product
from typing import Sequence

from ..density import Presentation, Verdict, enumerate_B_l
from ..errors import PreconditionError
from ..freegroup import Word, is_cyclically_reduced
from .auxgraph import Contiguity, contiguity
from .diagram import DecoratedDiagram

DEFAULT_SEARCH_BUDGET = 10**6


def _as_letters(w) -> tuple[int, ...]:
    return tuple(w.letters) if isinstance(w, Word) else tuple(w)


def _slot_constraints(D: DecoratedDiagram, cont: Contiguity) -> dict[int, list[tuple[int, int, int]]]:
    """For each numbering, the (class root, position, exponent) triples that
    tie a letter of its word to a class letter: lambda = t[pos]^exponent."""
    out: dict[int, list[tuple[int, int, int]]] = {i: [] for i in D.numberings()}
    for c in D.cells:
        for pos, (e, o) in enumerate(c.slots):
            # lab(e)^o = t[pos] and lab(e) = lambda^phi(e)
            out[c.numbering].append((cont.root[e], pos, o * cont.parity[e]))
    return out


def _assign(cons, word, letters: dict[int, int]) -> list[int] | None:
    """Extend the class-letter map with one numbering's word; returns the
    newly fixed roots, or None (with letters restored) on a clash."""
    added = []
    for root, pos, s in cons:
        lam = word[pos] * s
        have = letters.get(root)
        if have is None:
            letters[root] = lam
            added.append(root)
        elif have != lam:
            for r in added:
                del letters[r]
            return None
    return added


def fulfill_with_tuple(D: DecoratedDiagram, t: Sequence) -> dict[int, int] | None:
    """An edge labelling under which every cell of numbering i (i-th in
    sorted order) reads t_i and equivalent parts read the same word; None
    if no such labelling exists."""
    nums = D.numberings()
    words = [_as_letters(w) for w in t]
    if len(words) != len(nums):
        raise PreconditionError(f"expected {len(nums)} words, got {len(words)}")
    for w in words:
        if len(w) != D.level or not is_cyclically_reduced(list(w)):
            raise PreconditionError("tuple entries must be cyclically reduced of the diagram's level")
    cont = contiguity(D)
    if cont.conflict:
        return None
    letters = dict(cont.fixed)
    cons = _slot_constraints(D, cont)
    for i, w in zip(nums, words):
        if _assign(cons[i], w, letters) is None:
            return None
    return {e: letters.get(cont.root[e], 1) * cont.parity[e] for e in D.edges}


def count_fulfilling_tuples(D: DecoratedDiagram, k: int = 2) -> int:
    """Exhaustive number of tuples in B_l^n fulfilling D (small l only)."""
    nums = D.numberings()
    B = [tuple(w.letters) for w in enumerate_B_l(k, D.level)]
    cont = contiguity(D)
    if cont.conflict:
        return 0
    cons = _slot_constraints(D, cont)
    total = 0
    for tup in product(B, repeat=len(nums)):
        letters = dict(cont.fixed)
        if all(_assign(cons[i], w, letters) is not None for i, w in zip(nums, tup)):
            total += 1
    return total


def fulfilled_by_presentation(D: DecoratedDiagram, p: Presentation,
                              budget: int = DEFAULT_SEARCH_BUDGET):
    """A tuple of pairwise distinct relators of p fulfilling D, None if
    there is none, or Verdict.UNKNOWN when the search budget runs out.

    Numberings are filled in sorted order; each candidate relator is
    propagated into the class letters before the search branches further.
    """
    if p.level != D.level:
        raise PreconditionError("relator length differs from the diagram level")
    nums = D.numberings()
    cont = contiguity(D)
    if cont.conflict:
        return None
    cons = _slot_constraints(D, cont)
    rels = [tuple(r.letters) for r in p.relators]
    letters = dict(cont.fixed)
    chosen: list[int] = []
    nodes = 0

    def search(j: int) -> bool:
        nonlocal nodes
        if j == len(nums):
            return True
        for ri, w in enumerate(rels):
            if any(rels[c] == w for c in chosen):
                continue
            nodes += 1
            if nodes > budget:
                raise _OutOfBudget
            added = _assign(cons[nums[j]], w, letters)
            if added is None:
                continue
            chosen.append(ri)
            if search(j + 1):
                return True
            chosen.pop()
            for r in added:
                del letters[r]
        return False

    try:
        found = search(0)
    except _OutOfBudget:
        return Verdict.UNKNOWN
    if not found:
        return None
    return tuple(p.relators[ri] for ri in chosen)


class _OutOfBudget(Exception):
    pass
