"""Converse machinery: weighted coefficients, optimal cached sets and lower bounds.

Coefficients are evaluated through elementary symmetric polynomials of the
occupancies inside and outside ``tau`` instead of summing over subsets, so a
single value costs O(Lambda^2) integer operations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import factorial, prod
from typing import Iterable, Sequence

from .errors import InvalidArgumentError, ResourceLimitError
from .model import RationalLike, Topology, parse_rational
from .symfunc import elem_sym, is_convex, without

__all__ = [
    "MAX_CACHES",
    "CoefficientTable",
    "EnvelopeCurve",
    "BoundResult",
    "weight",
    "coefficient",
    "tilde_coefficient",
    "coefficient_table",
    "tau_star",
    "tau_star_sequence",
    "envelope",
    "lower_envelope",
    "lower_bound_general",
    "lower_bound_regular",
    "optimality_certificate",
]

MAX_CACHES = 20


def _check_topo(topo: Topology) -> None:
    if topo.Lambda > MAX_CACHES:
        raise ResourceLimitError(f"converse supports at most {MAX_CACHES} caches, got {topo.Lambda}")


def _check_p(topo: Topology, p: int) -> int:
    if isinstance(p, bool) or not isinstance(p, int) or not 0 <= p <= topo.Lambda:
        raise InvalidArgumentError(f"p must be an integer in [0, {topo.Lambda}], got {p!r}")
    return p


def _split(topo: Topology, tau: Iterable[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    tau = frozenset(tau)
    for lab in tau:
        if not 1 <= lab <= topo.Lambda:
            raise InvalidArgumentError(f"unknown cache label {lab}")
    inside = tuple(topo.occupancy(lab) for lab in sorted(tau))
    outside = tuple(topo.occupancy(lab) for lab in topo.labels if lab not in tau)
    return inside, outside


def weight(sigma: Sequence[int], p: int, topo: Topology) -> Fraction:
    """Permutation weight: product of the occupancies of the last ``p`` caches of ``sigma``.

    Normalized over all permutations, which sum to ``p! (Lambda-p)! e_p(L)``;
    ``p = 0`` gives the uniform ``1 / Lambda!``.
    """
    p = _check_p(topo, p)
    if sorted(sigma) != list(topo.labels):
        raise InvalidArgumentError(f"sigma must be a permutation of 1..{topo.Lambda}, got {list(sigma)}")
    lam = topo.Lambda
    tail = sigma[lam - p:]
    norm = factorial(p) * factorial(lam - p) * elem_sym(topo.L, p)
    return Fraction(prod(topo.occupancy(lab) for lab in tail), norm)


def _first_term(inside, outside, p: int) -> Fraction:
    # q-sum grouped by m = |q & tau|: e_m(inside) * e_{p+1-m}(outside) sets share the factor
    j = len(inside)
    total = Fraction(0)
    for m in range(max(0, p + 1 - len(outside)), min(j, p + 1) + 1):
        count = elem_sym(inside, m) * elem_sym(outside, p + 1 - m)
        if count:
            total += Fraction(count * (p + 1 - m), j + 1 - m)
    return total


def _second_term(inside, outside, p: int) -> Fraction:
    j = len(inside)
    if j >= p:
        return Fraction(0)
    # sum over (p-j)-sets s of prod(s) * sum(s) == sum_i x_i^2 e_{p-j-1}(outside - x_i)
    inner = sum(x * x * elem_sym(without(outside, i), p - j - 1) for i, x in enumerate(outside))
    return Fraction(prod(inside) * inner, j + 1)


def coefficient(topo: Topology, p: int, tau: Iterable[int]) -> Fraction:
    """Weight with which the size of the class ``tau`` enters the averaged bound."""
    _check_topo(topo)
    p = _check_p(topo, p)
    inside, outside = _split(topo, tau)
    return (_first_term(inside, outside, p) + _second_term(inside, outside, p)) / elem_sym(topo.L, p)


def tilde_coefficient(topo: Topology, p: int, tau: Iterable[int]) -> Fraction:
    """The ``q``-sum part of :func:`coefficient` alone; never larger than it."""
    _check_topo(topo)
    p = _check_p(topo, p)
    inside, outside = _split(topo, tau)
    return _first_term(inside, outside, p) / elem_sym(topo.L, p)


@dataclass(frozen=True)
class CoefficientTable:
    p: int
    entries: dict
    tildeEntries: dict

    def __getitem__(self, tau) -> Fraction:
        return self.entries[frozenset(tau)]

    def tilde(self, tau) -> Fraction:
        return self.tildeEntries[frozenset(tau)]


def coefficient_table(topo: Topology, p: int) -> CoefficientTable:
    """Both coefficients for every subset of caches (``2^Lambda`` entries)."""
    _check_topo(topo)
    p = _check_p(topo, p)
    entries, tilde = {}, {}
    for j in range(topo.Lambda + 1):
        for tau in combinations(topo.labels, j):
            key = frozenset(tau)
            inside, outside = _split(topo, tau)
            first = _first_term(inside, outside, p)
            norm = elem_sym(topo.L, p)
            tilde[key] = first / norm
            entries[key] = (first + _second_term(inside, outside, p)) / norm
    return CoefficientTable(p, entries, tilde)


def tau_star(topo: Topology, p: int, j: int) -> frozenset:
    """Cache set of size ``j`` minimizing the tilde coefficient.

    Below ``p`` it is the ``j`` least-occupied caches, from ``p`` on the ``j``
    most-occupied ones.  Returned in caller labels.
    """
    p = _check_p(topo, p)
    lam = topo.Lambda
    if isinstance(j, bool) or not isinstance(j, int) or not 0 <= j <= lam:
        raise InvalidArgumentError(f"j must be an integer in [0, {lam}], got {j!r}")
    if j == 0:
        return frozenset()
    positions = range(lam - j + 1, lam + 1) if j < p else range(1, j + 1)
    return frozenset(topo.to_label(pos) for pos in positions)


def tau_star_sequence(topo: Topology, p: int) -> list[Fraction]:
    """``[tilde_coefficient(topo, p, tau_star(topo, p, j)) for j = 0..Lambda]``."""
    return [tilde_coefficient(topo, p, tau_star(topo, p, j)) for j in range(topo.Lambda + 1)]


def _cross(o, a, b) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


@dataclass(frozen=True)
class EnvelopeCurve:
    """Lower convex envelope of ``(j, value)`` points on ``j = 0..n``."""

    points: tuple[tuple[int, Fraction], ...]
    hull: tuple[tuple[int, Fraction], ...]

    def __call__(self, x: RationalLike) -> Fraction:
        x = parse_rational(x)
        lo, hi = self.hull[0][0], self.hull[-1][0]
        if not lo <= x <= hi:
            raise InvalidArgumentError(f"x must lie in [{lo}, {hi}], got {x}")
        for (x0, y0), (x1, y1) in zip(self.hull, self.hull[1:]):
            if x0 <= x <= x1:
                return y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        return self.hull[0][1]


def lower_envelope(points: Sequence[tuple[int, RationalLike]]) -> EnvelopeCurve:
    """Monotone-chain lower hull over exact rationals."""
    pts = [(parse_rational(x), parse_rational(y)) for x, y in points]
    if not pts:
        raise InvalidArgumentError("envelope needs at least one point")
    xs = [x for x, _ in pts]
    if xs != list(range(len(pts))):
        raise InvalidArgumentError("envelope points must sit at consecutive integers 0..n")
    hull = []
    for pt in pts:
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], pt) <= 0:
            hull.pop()
        hull.append(pt)
    return EnvelopeCurve(
        tuple((int(x), y) for x, y in pts), tuple((int(x), y) for x, y in hull)
    )


def envelope(points: Sequence[tuple[int, RationalLike]], x: RationalLike) -> Fraction:
    """Evaluate the lower convex envelope of ``points`` at ``x``."""
    return lower_envelope(points)(x)


@dataclass(frozen=True)
class BoundResult:
    t: Fraction
    value: Fraction
    kind: str
    optimalityCertificate: bool
    p: int | None = None
    sequence: tuple[Fraction, ...] = ()

    def __post_init__(self):
        if self.kind not in ("general", "regular"):
            raise InvalidArgumentError(f"unknown bound kind {self.kind!r}")
        if self.kind == "regular" and Fraction(self.t).denominator != 1:
            raise InvalidArgumentError(f"regular bound needs an integer t, got {self.t}")


def _round_half_up(t: Fraction) -> int:
    return math.floor(t + Fraction(1, 2))


def _general_for_p(topo: Topology, p: int, t: Fraction) -> tuple[Fraction, list[Fraction]]:
    seq = tau_star_sequence(topo, p)
    return envelope(list(enumerate(seq)), t), seq


def lower_bound_general(topo: Topology, t: RationalLike, all_p: bool = False) -> BoundResult:
    """Lower bound on the delivery time for any uncoded placement.

    Uses the tau-star sequence at ``p = round(t)`` (halves round up) and takes
    its lower convex envelope at ``t``.  ``all_p`` maximizes over every ``p``
    instead, which can only increase the bound.
    """
    _check_topo(topo)
    t = topo.check_rational_budget(t)
    p = _round_half_up(t)
    value, seq = _general_for_p(topo, p, t)
    if all_p:
        for q in range(topo.Lambda + 1):
            cand, cand_seq = _general_for_p(topo, q, t)
            if cand > value:
                value, seq, p = cand, cand_seq, q
    cert = t.denominator == 1 and is_convex(tau_star_sequence(topo, int(t)))
    return BoundResult(t, value, "general", cert, p, tuple(seq))


def lower_bound_regular(topo: Topology, t: int) -> BoundResult:
    """Optimal delivery time under regular placement, ``e_{t+1}(L) / e_t(L)``."""
    t = topo.check_budget(t)
    value = Fraction(elem_sym(topo.L, t + 1), elem_sym(topo.L, t))
    cert = topo.Lambda <= MAX_CACHES and is_convex(tau_star_sequence(topo, t))
    return BoundResult(Fraction(t), value, "regular", cert, t)


def optimality_certificate(topo: Topology, t: int) -> bool:
    """True when the tau-star sequence at ``p = t`` is convex in ``j``.

    Then the regular-placement delivery time is optimal among all uncoded
    placements.
    """
    _check_topo(topo)
    t = topo.check_budget(t)
    return is_convex(tau_star_sequence(topo, t))
