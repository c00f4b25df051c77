"""Independent brute-force oracles used by the test-suite.

Nothing here imports the code paths it is used to check.
"""

from __future__ import annotations

import itertools
from fractions import Fraction


def _red(xs):
    out = []
    for x in xs:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def all_reduced(rank, max_len):
    """Every freely reduced word of length <= max_len as a letter tuple."""
    letters = [i for i in range(1, rank + 1)] + [-i for i in range(1, rank + 1)]
    words = [()]
    frontier = [()]
    for _ in range(max_len):
        nxt = []
        for w in frontier:
            for x in letters:
                if w and w[-1] == -x:
                    continue
                nxt.append(w + (x,))
        words.extend(nxt)
        frontier = nxt
    return words


def brute_axis_diameter(g, h, rank=2, radius=10):
    """Diameter of axis(g) & axis(h) restricted to the ball of given radius.

    A vertex x lies on the axis of G exactly when its displacement
    |x^-1 G x| equals the translation length (minimal displacement).
    """
    def tl(w):
        w = list(w)
        while len(w) >= 2 and w[0] == -w[-1]:
            w = w[1:-1]
        return len(w)

    tg, th = tl(g), tl(h)
    inv = lambda w: tuple(-x for x in reversed(w))
    common = []
    for x in all_reduced(rank, radius):
        if len(_red(inv(x) + tuple(g) + x)) == tg and len(_red(inv(x) + tuple(h) + x)) == th:
            common.append(x)
    best = 0
    for a, b in itertools.combinations(common, 2):
        best = max(best, len(_red(inv(a) + b)))
    return best


def brute_cyclically_reduced_count(rank, l):
    letters = [i for i in range(1, rank + 1)] + [-i for i in range(1, rank + 1)]
    n = 0
    for w in itertools.product(letters, repeat=l):
        if any(a == -b for a, b in zip(w, w[1:])):
            continue
        if l > 1 and w[0] == -w[-1]:
            continue
        n += 1
    return n


def brute_weighted_tree_classes(max_vertices, max_total):
    """Count weighted trees up to isomorphism by enumerating labelled trees.

    Labelled trees come from all (v-1)-edge subsets of K_v that are
    connected; isomorphism classes are taken by minimising over every
    vertex permutation.
    """
    classes = {("point",)}
    for v in range(2, max_vertices + 1):
        pairs = list(itertools.combinations(range(v), 2))
        for es in itertools.combinations(pairs, v - 1):
            parent = list(range(v))

            def find(a):
                while parent[a] != a:
                    a = parent[a]
                return a
            ok = True
            for a, b in es:
                ra, rb = find(a), find(b)
                if ra == rb:
                    ok = False
                    break
                parent[ra] = rb
            if not ok:
                continue
            for ws in itertools.product(range(1, max_total + 1), repeat=v - 1):
                if sum(ws) > max_total:
                    continue
                key = min(
                    tuple(sorted((min(p[a], p[b]), max(p[a], p[b]), w) for (a, b), w in zip(es, ws)))
                    for p in itertools.permutations(range(v))
                )
                classes.add((v, key))
    return len(classes)


def all_pairs_piece_ratio(relators, l):
    """Longest common prefix over all pairs of distinct relator occurrences.

    Occurrences are (relator class, rotation) for each relator and its
    inverse; a relator equal to a rotation of an earlier one (or of its
    inverse) adds nothing.
    """
    occ = []
    classes = []
    for r in relators:
        r = tuple(r)
        rots = {r[i:] + r[:i] for i in range(len(r))}
        ri = tuple(-x for x in reversed(r))
        irots = {ri[i:] + ri[:i] for i in range(len(ri))}
        if any(r in c for c in classes):
            continue
        classes.append(rots | irots)
        for i in range(len(r)):
            occ.append(r[i:] + r[:i])
        for i in range(len(ri)):
            w = ri[i:] + ri[:i]
            if w not in rots:
                occ.append(w)
    best = 0
    for a, b in itertools.combinations(occ, 2):
        k = 0
        while k < len(a) and k < len(b) and a[k] == b[k]:
            k += 1
        best = max(best, k)
    return Fraction(best, l)
