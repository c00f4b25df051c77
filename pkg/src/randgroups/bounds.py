"""Closed-form probability and counting bounds with exact arithmetic.

Values are kept as products of integer powers with rational exponents so
that nothing overflows or rounds before the caller asks for it.  When every
exponent is an integer the exact rational value is available; otherwise
the value is irrational and is reported through a high-precision log.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import mpmath

from .density import count_cyclically_reduced
from .errors import PreconditionError
from .freegroup import tree_bound

_PREC = 60  # decimal digits for the mpmath views


def as_fraction(x) -> Fraction:
    """Read a density or similar parameter exactly (0.05 -> 1/20)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    return Fraction(str(x))


@dataclass(frozen=True)
class BoundValue:
    """prod(base ** exponent) over ``factors``; ``probability`` asks for a
    clamped view in [0, 1]."""

    factors: tuple[tuple[int, Fraction], ...]
    probability: bool = True

    @classmethod
    def of(cls, factors: Iterable[tuple[int, Fraction | int]], probability: bool = True) -> "BoundValue":
        merged: dict[int, Fraction] = {}
        for b, e in factors:
            if b < 1:
                raise PreconditionError("bases must be positive integers")
            if b == 1:
                continue
            merged[b] = merged.get(b, Fraction(0)) + Fraction(e)
        return cls(tuple(sorted((b, e) for b, e in merged.items() if e != 0)), probability)

    @property
    def is_rational(self) -> bool:
        return all(e.denominator == 1 for _, e in self.factors)

    @property
    def exact(self) -> Fraction | None:
        if not self.is_rational:
            return None
        num, den = 1, 1
        for b, e in self.factors:
            if e > 0:
                num *= b ** int(e)
            else:
                den *= b ** int(-e)
        return Fraction(num, den)

    @property
    def log2(self) -> float:
        with mpmath.workdps(_PREC):
            return float(self.log2_mp())

    def log2_mp(self):
        with mpmath.workdps(_PREC):
            return mpmath.fsum(mpmath.mpf(e.numerator) / e.denominator * mpmath.log(b, 2) for b, e in self.factors)

    def mp(self):
        with mpmath.workdps(_PREC):
            return mpmath.power(2, self.log2_mp())

    @property
    def clamped(self) -> Fraction | float:
        exact = self.exact
        if exact is not None:
            return min(exact, Fraction(1)) if self.probability else exact
        v = float(self.mp())
        return min(v, 1.0) if self.probability else v

    def __le__(self, other) -> bool:
        return _compare(self, other) <= 0

    def __ge__(self, other) -> bool:
        return _compare(self, other) >= 0

    def __lt__(self, other) -> bool:
        return _compare(self, other) < 0

    def __gt__(self, other) -> bool:
        return _compare(self, other) > 0

    def to_json(self) -> dict:
        exact = self.exact
        return {
            "exact": None if exact is None else str(exact),
            "log2": self.log2,
            "clamped": str(self.clamped) if isinstance(self.clamped, Fraction) else self.clamped,
            "factors": [[b, str(e)] for b, e in self.factors],
        }


def _compare(a: BoundValue, other) -> int:
    if isinstance(other, BoundValue):
        b = other
    else:
        q = as_fraction(other)
        if q <= 0:
            return 1
        b = BoundValue.of([(q.numerator, 1), (q.denominator, -1)])
    x, y = a.exact, b.exact
    if x is not None and y is not None:
        return (x > y) - (x < y)
    diff = BoundValue.of(list(a.factors) + [(base, -e) for base, e in b.factors])
    # diff = a / b; decide its sign of log exactly when possible
    if not diff.factors:
        return 0
    with mpmath.workdps(200):
        lg = diff.log2_mp()
        if abs(lg) < mpmath.mpf(10) ** -150:
            raise ArithmeticError("comparison too close to decide numerically")
        return 1 if lg > 0 else -1


# -- fulfilment bounds ----------------------------------------------------------


def bound_tuple_fulfillment(n: int, u: int, k: int, l: int) -> BoundValue:
    """(2k)^n (2k-1)^u / |B_l|^n."""
    if n < 1 or u < 0:
        raise PreconditionError("need n >= 1 and u >= 0")
    B = count_cyclically_reduced(k, l)
    return BoundValue.of([(2 * k, n), (2 * k - 1, u), (B, -n)])


MODES = ("components", "rigid", "no-isolated")


def bound_group_fulfillment(n: int, u_or_R: int, k: int, l: int, d, mode: str = "components") -> BoundValue:
    """Probability bound that a random group has n distinct relators
    fulfilling a diagram.

    components:  (2k)^n (2k-1)^u / |B_l|^(n(1-d))
    rigid:       (2k)^n (2k-1)^((nl+R)/2) / |B_l|^(n(1-d))
    no-isolated: the rigid bound with R = 0
    """
    if mode not in MODES:
        raise PreconditionError(f"mode must be one of {MODES}")
    if n < 1 or u_or_R < 0:
        raise PreconditionError("need n >= 1 and a non-negative second argument")
    d = as_fraction(d)
    B = count_cyclically_reduced(k, l)
    if mode == "components":
        top = Fraction(u_or_R)
    elif mode == "rigid":
        top = Fraction(n * l + u_or_R, 2)
    else:
        top = Fraction(n * l, 2)
    return BoundValue.of([(2 * k, n), (2 * k - 1, top), (B, -n * (1 - d))])


def isoperimetric_filter(boundary_len: int, cells: int, l: int, d) -> bool:
    """cells <= boundary_len / (l (1/2 - d))."""
    d = as_fraction(d)
    if l < 1 or d >= Fraction(1, 2):
        raise PreconditionError("need l >= 1 and d < 1/2")
    return cells * l * (Fraction(1, 2) - d) <= boundary_len


# -- counting bounds --------------------------------------------------------------


def circular_count_bound(m: int, l: int) -> int:
    """C(m) <= (4 (m l)^3)^m."""
    return (4 * (m * l) ** 3) ** m


def diagram_count_bound(m: int, S: int, W_len: int, l: int) -> BoundValue:
    """The bound on decorated diagrams with at most m cells, boundary at
    most S and a decoration word of length W_len, evaluated as written."""
    if min(m, S, W_len, l) < 1:
        raise PreconditionError("all arguments must be positive")
    C = circular_count_bound(m, l)
    T = tree_bound(W_len + 2, S)
    value = m * (C * S**3) ** m * 2 * S ** (3 * W_len + 1) * W_len * T**W_len
    return BoundValue.of([(value, 1)], probability=False)


# -- decay --------------------------------------------------------------------------


@dataclass(frozen=True)
class NegligibilityCurve:
    r: Fraction
    s: int
    base: Fraction
    q_degree: int
    points: tuple[tuple[int, float], ...]  # (l, natural log of the value)
    crossover: int

    def log_value(self, l: int):
        return _log_curve(l, self.q_degree, self.r, self.s, self.base)

    def value(self, l: int):
        with mpmath.workdps(_PREC):
            return mpmath.exp(self.log_value(l))


def _log_curve(l: int, q_degree, r, s, base):
    with mpmath.workdps(_PREC):
        x = mpmath.mpf(l)
        lx = mpmath.log(x)
        r = mpmath.mpf(Fraction(r).numerator) / Fraction(r).denominator
        a = mpmath.mpf(Fraction(base).numerator) / Fraction(base).denominator
        return q_degree * r * lx ** (s + 1) - x * mpmath.log(a)


def curve_crossover(q_degree: int, r, s: int, base) -> int:
    """Least integer l from which l^(q r ln^s l) / base^l strictly decreases.

    The log of the curve is f(x) = q r ln^(s+1) x - x ln(base) with
    f'(x) = q r (s+1) ln^s(x) / x - ln(base).  Its first term decreases
    for x > e^s, so once f' is negative there it stays negative; the
    scan below finds that point and then backs off while consecutive
    integer values still decrease.
    """
    base = as_fraction(base)
    if base <= 1:
        raise PreconditionError("base must exceed 1")
    r = as_fraction(r)
    lna = math.log(base)
    x = max(2, math.ceil(math.exp(s)))
    while q_degree * float(r) * (s + 1) * math.log(x) ** s / x >= lna:
        x += 1
    while x > 2 and _log_curve(x, q_degree, r, s, base) < _log_curve(x - 1, q_degree, r, s, base):
        x -= 1
    return x


def negligibility_curve(q_degree: int, r, s: int, base, l_range: Iterable[int]) -> NegligibilityCurve:
    """Evaluate l^(q r ln^s l) / base^l in log space over l_range and
    report the crossover beyond which the curve strictly decreases."""
    r, base = as_fraction(r), as_fraction(base)
    if base <= 1:
        raise PreconditionError("base must exceed 1")
    pts = tuple((l, float(_log_curve(l, q_degree, r, s, base))) for l in l_range)
    return NegligibilityCurve(r, s, base, q_degree, pts, curve_crossover(q_degree, r, s, base))


# -- model constants -------------------------------------------------------------------


@dataclass(frozen=True)
class ModelConstants:
    d: Fraction
    alpha0: Fraction
    C0: Fraction
    zeta0: Fraction
    rho0: Fraction

    @property
    def gap(self) -> Fraction:
        return Fraction(1, 2) - self.d

    def beta0(self, numerator=1) -> Fraction:
        """Cell-count coefficient numerator / (1/2 - d)."""
        return as_fraction(numerator) / self.gap

    def k0(self, nu0) -> int:
        q = as_fraction(nu0) / self.gap
        return -((-q.numerator) // q.denominator) + 1

    def to_json(self) -> dict:
        return {
            "d": str(self.d),
            "alpha0": str(self.alpha0),
            "C0": str(self.C0),
            "zeta0": str(self.zeta0),
            "rho0": str(self.rho0),
            "beta0": str(self.beta0()),
        }


def constants(d) -> ModelConstants:
    d = as_fraction(d)
    if d < 0 or d >= Fraction(1, 2):
        raise PreconditionError("density must satisfy 0 <= d < 1/2")
    gap = Fraction(1, 2) - d
    alpha0 = Fraction(48) / (1 - 2 * d) ** 2
    C0 = gap / 4
    zeta0 = 100 * alpha0 / gap
    rho0 = 2 * (3355 * alpha0 + zeta0)
    return ModelConstants(d, alpha0, C0, zeta0, rho0)


def tree_ball_radius(d, l: int) -> int:
    """floor(2 C0 l): words this short are expected to survive in the quotient."""
    c = constants(d)
    return int(2 * c.C0 * l)
