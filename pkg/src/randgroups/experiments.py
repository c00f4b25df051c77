"""Seeded Monte Carlo estimation of group properties over (k, l, d) grids."""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable

from scipy.stats import binomtest

from . import __version__
from .bounds import tree_ball_radius
from .density import (
    Budget,
    DehnRewriter,
    ModelParams,
    Presentation,
    Verdict,
    ball_search,
    is_small_cancellation,
    is_trivial,
    sample_presentation,
    _canonical_cyclic,
    _cyc,
)
from .equations import EquationSystem, LiftStatus, lift_solution
from .errors import PreconditionError
from .freegroup import Word, commute_free, free_reduce

PROPERTIES = ("C16", "shared-prefix", "tree-ball", "lift", "triviality")

DEFAULT_BUDGETS = {
    "sc_attempts": 200,  # draws per trial when a C'(1/6) sample is required
    "lift_radius": 0,  # ball-search slack when screening non-free solutions
    "lift_nodes": 50,
    "lift_length": 8,  # length budget for lift candidates
    "lift_max_len": 3,  # solutions with values up to this length
    "triviality_nodes": 40,
}


@dataclass
class ExperimentConfig:
    property: str
    grid: list[tuple[int, int, float]]
    trials: int
    seed: int
    budgets: dict = field(default_factory=dict)
    output: str | None = None

    def __post_init__(self):
        if self.property not in PROPERTIES:
            raise PreconditionError(f"property must be one of {PROPERTIES}")
        if self.trials < 1:
            raise PreconditionError("trials must be at least 1")
        self.grid = [(int(k), int(l), float(d)) for k, l, d in self.grid]
        for k, l, d in self.grid:
            if k < 2 or l < 1:
                raise PreconditionError("grid needs k >= 2 and l >= 1")
            if d >= 0.5 and not (self.property == "triviality" and l <= 6):
                raise PreconditionError("d >= 1/2 is only allowed for the triviality experiment at l <= 6")
            if d < 0:
                raise PreconditionError("density must be non-negative")
        unknown = set(self.budgets) - set(DEFAULT_BUDGETS)
        if unknown:
            raise PreconditionError(f"unknown budget keys {sorted(unknown)}")

    def budget(self, key: str):
        return self.budgets.get(key, DEFAULT_BUDGETS[key])

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        return cls(
            property=data["property"],
            grid=[tuple(g) for g in data["grid"]],
            trials=int(data["trials"]),
            seed=int(data["seed"]),
            budgets=dict(data.get("budgets", {})),
            output=data.get("output"),
        )


def wilson_interval(successes: int, trials: int) -> tuple[float, float]:
    if trials == 0:
        return 0.0, 1.0
    ci = binomtest(successes, trials).proportion_ci(confidence_level=0.95, method="wilson")
    return float(ci.low), float(ci.high)


@dataclass
class CellResult:
    k: int
    l: int
    d: float
    trials: int
    successes: int
    unknowns: int
    estimate: float
    lo95: float
    hi95: float

    @classmethod
    def from_counts(cls, k, l, d, trials, successes, unknowns) -> "CellResult":
        est = successes / trials if trials else 0.0
        lo, hi = wilson_interval(successes, trials)
        return cls(k, l, d, trials, successes, unknowns, est, lo, hi)


@dataclass
class ExperimentReport:
    property: str
    seed: int
    cells: list[CellResult]
    metadata: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "property": self.property,
            "seed": self.seed,
            "cells": [asdict(c) for c in self.cells],
            "metadata": self.metadata,
        }

    @classmethod
    def from_json(cls, data: dict | str) -> "ExperimentReport":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(data["property"], data["seed"], [CellResult(**c) for c in data["cells"]], data.get("metadata", {}))


# -- property checkers ------------------------------------------------------------
# Each returns a list of outcomes: True (success), False, or None (unknown).


def check_c16(p: Presentation, cfg: ExperimentConfig, draw) -> list:
    return [is_small_cancellation(p)]


def shared_prefix_free(p: Presentation) -> bool:
    """No two distinct relators begin with a common word longer than l/6."""
    l = p.level
    rels = sorted({r.letters for r in p.relators})
    for a, b in zip(rels, rels[1:]):  # sorted order puts the longest common prefixes adjacent
        n = 0
        while n < l and a[n] == b[n]:
            n += 1
        if 6 * n > l:
            return False
    return True


def check_shared_prefix(p: Presentation, cfg, draw) -> list:
    return [shared_prefix_free(p)]


def all_reduced_words(k: int, n: int) -> list[Word]:
    out = [()]
    layer = [()]
    for _ in range(n):
        layer = [w + (x,) for w in layer for i in range(1, k + 1) for x in (i, -i) if not w or w[-1] != -x]
        out += layer
    return [Word(w, k) for w in out]


def check_tree_ball(p: Presentation, cfg: ExperimentConfig, draw) -> list:
    """All nontrivial words of length <= floor(2 C0 l) stay nontrivial,
    on a C'(1/6) sample (redrawn up to the attempt budget)."""
    for _ in range(cfg.budget("sc_attempts")):
        if is_small_cancellation(p):
            break
        p = draw()
    else:
        return [None]
    radius = tree_ball_radius(Fraction(str(p.params.d)), p.level)
    dehn = DehnRewriter(p)
    for w in all_reduced_words(p.rank, radius)[1:]:
        if is_trivial(w, p, dehn=dehn).status != Verdict.NONTRIVIAL:
            return [False]
    return [True]


COMMUTATOR = EquationSystem.parse(["[y1,y2]"])


def commuting_solutions(p: Presentation, max_len: int, budget: Budget) -> tuple[list, int]:
    """Pairs (u, v) of words of length <= max_len with [u, v] = 1 proven in
    the group of p, and the number of pairs left undecided."""
    words = all_reduced_words(p.rank, max_len)
    dehn = DehnRewriter(p) if is_small_cancellation(p) else None
    cache: dict[tuple, Verdict] = {}
    sols, undecided = [], 0
    for u, v in product(words, repeat=2):
        if commute_free(u, v):
            sols.append((u, v))
            continue
        c = free_reduce(u.letters + v.letters + u.inverse().letters + v.inverse().letters)
        key = _canonical_cyclic(_cyc(c))
        st = cache.get(key)
        if st is None:
            w = Word(key, p.rank)
            st = is_trivial(w, p, budget, dehn).status
            cache[key] = st
        if st == Verdict.TRIVIAL:
            sols.append((u, v))
        elif st == Verdict.UNKNOWN and dehn is None:
            undecided += 1
    return sols, undecided


def check_lift(p: Presentation, cfg: ExperimentConfig, draw) -> list:
    budget = Budget(radius=cfg.budget("lift_radius"), node_cap=cfg.budget("lift_nodes"))
    sols, _ = commuting_solutions(p, cfg.budget("lift_max_len"), budget)
    out = []
    for u, v in sols:
        r = lift_solution(COMMUTATOR, [u, v], p, budget=cfg.budget("lift_length"))
        out.append(r.status == LiftStatus.LIFTED)
    return out


def order_at_most_two(p: Presentation, budget: Budget) -> bool | None:
    """True if |Gamma| <= 2 is proven: every generator squares to 1 and
    among any two generators one of a_i, a_j, a_i a_j is trivial."""
    k = p.rank

    def triv(letters) -> Verdict:
        return is_trivial(Word(free_reduce(letters), k), p, budget).status

    unknown = False
    for i in range(1, k + 1):
        st = triv((i, i))
        if st != Verdict.TRIVIAL:
            return False if st == Verdict.NONTRIVIAL else None
    for i in range(1, k + 1):
        for j in range(i + 1, k + 1):
            sts = [triv((i,)), triv((j,)), triv((i, j))]
            if Verdict.TRIVIAL in sts:
                continue
            if all(s == Verdict.NONTRIVIAL for s in sts):
                return False
            unknown = True
    return None if unknown else True


def check_triviality(p: Presentation, cfg: ExperimentConfig, draw) -> list:
    return [order_at_most_two(p, Budget(node_cap=cfg.budget("triviality_nodes")))]


CHECKERS: dict[str, Callable] = {
    "C16": check_c16,
    "shared-prefix": check_shared_prefix,
    "tree-ball": check_tree_ball,
    "lift": check_lift,
    "triviality": check_triviality,
}


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Estimate the property on every grid cell from independent samples.

    Trial t of cell c draws from substream (c, t); redraws inside a trial
    use (c, t, j).  Unknown outcomes count as trials but never as
    successes.
    """
    checker = CHECKERS[cfg.property]
    start = time.perf_counter()
    cells = []
    for ci, (k, l, d) in enumerate(cfg.grid):
        params = ModelParams(k, l, d, cfg.seed)
        succ = unk = total = 0
        for t in range(cfg.trials):
            redraw = iter(range(1, 10**9))

            def draw(ci=ci, t=t, redraw=redraw, params=params):
                return sample_presentation(params, (ci, t, next(redraw)))

            p = sample_presentation(params, (ci, t))
            for outcome in checker(p, cfg, draw):
                total += 1
                succ += outcome is True
                unk += outcome is None
        cells.append(CellResult.from_counts(k, l, d, total, succ, unk))
    meta = {"version": __version__, "trials_per_cell": cfg.trials,
            "budgets": {**DEFAULT_BUDGETS, **cfg.budgets},
            "wall_time_s": round(time.perf_counter() - start, 3)}
    return ExperimentReport(cfg.property, cfg.seed, cells, meta)


CSV_COLUMNS = ["k", "l", "d", "trials", "successes", "estimate", "lo95", "hi95", "unknowns"]


def report_csv(r: ExperimentReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for c in r.cells:
        w.writerow([c.k, c.l, c.d, c.trials, c.successes, f"{c.estimate:.6f}", f"{c.lo95:.6f}",
                    f"{c.hi95:.6f}", c.unknowns])
    return buf.getvalue()


def report_json(r: ExperimentReport) -> str:
    return json.dumps(r.to_json(), indent=2, sort_keys=True) + "\n"


def emit_report(r: ExperimentReport, format: str = "json", path: str | None = None) -> str:
    """Render the report (csv or json); also write it when path is given."""
    if format == "csv":
        text = report_csv(r)
    elif format == "json":
        text = report_json(r)
    else:
        raise PreconditionError("format must be csv or json")
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    return text
