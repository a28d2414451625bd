"""Exact elementary symmetric polynomials over integer multisets.

Everything here works on plain tuples of non-negative integers (a *multiset*
whose positions carry identity, e.g. cache labels) and returns ``int`` or
:class:`fractions.Fraction`.  Positions are 0-based Python indices.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb, prod
from typing import Iterable, Sequence

from .errors import InvalidArgumentError

__all__ = [
    "as_multiset",
    "elem_sym",
    "elem_sym_all",
    "elem_sym_mean",
    "check_recursion",
    "check_weighted_identity",
    "ratio_sequence",
    "check_log_concavity",
    "check_maclaurin",
    "is_strictly_decreasing",
    "is_convex",
    "without",
]


def as_multiset(values: Iterable[int]) -> tuple[int, ...]:
    xs = tuple(values)
    for x in xs:
        if isinstance(x, bool) or not isinstance(x, int) or x < 0:
            raise InvalidArgumentError(f"multiset entries must be non-negative ints, got {x!r}")
    return xs


@lru_cache(maxsize=8192)
def _esym_table(xs: tuple[int, ...]) -> tuple[int, ...]:
    e = [1] + [0] * len(xs)
    for i, x in enumerate(xs, start=1):
        for k in range(i, 0, -1):
            e[k] += x * e[k - 1]
    return tuple(e)


def elem_sym_all(xs: Sequence[int]) -> tuple[int, ...]:
    """Return ``(e_0, e_1, ..., e_n)`` of ``xs`` in O(n^2) integer operations."""
    return _esym_table(tuple(xs))


def elem_sym(xs: Sequence[int], k: int) -> int:
    """k-th elementary symmetric polynomial of ``xs``.

    ``e_0 = 1`` and ``e_k = 0`` for ``k > len(xs)``.  Never enumerates subsets.
    """
    if k < 0:
        raise InvalidArgumentError(f"k must be non-negative, got {k}")
    xs = tuple(xs)
    if k > len(xs):
        return 0
    return _esym_table(xs)[k]


def elem_sym_mean(xs: Sequence[int], k: int) -> Fraction:
    """Elementary symmetric mean ``e_k / C(n, k)`` for ``1 <= k <= n``."""
    n = len(xs)
    if not 1 <= k <= n:
        raise InvalidArgumentError(f"k must lie in [1, {n}], got {k}")
    return Fraction(elem_sym(xs, k), comb(n, k))


def without(xs: Sequence[int], i: int) -> tuple[int, ...]:
    """``xs`` with position ``i`` removed."""
    return tuple(xs[:i]) + tuple(xs[i + 1:])


def check_recursion(xs: Sequence[int], k: int, i: int) -> bool:
    """Check ``e_k(X) = e_k(X - x_i) + x_i e_{k-1}(X - x_i)`` exactly."""
    rest = without(xs, i)
    return elem_sym(xs, k) == elem_sym(rest, k) + xs[i] * elem_sym(rest, k - 1)


def check_weighted_identity(xs: Sequence[int], k: int, phi: Iterable[int] = ()) -> bool:
    """Check the position-weighted identity for the excluded positions ``phi``.

    Left side: ``sum_{i not in phi} x_i e_{k-1}(X - x_i)``.  Right side: the
    sum over k-subsets ``q`` of ``prod(x_q) * |q - phi|``, enumerated directly.
    With ``phi`` empty the right side collapses to ``k e_k(X)``.
    """
    phi = frozenset(phi)
    n = len(xs)
    lhs = sum(xs[i] * elem_sym(without(xs, i), k - 1) for i in range(n) if i not in phi)
    rhs = sum(
        prod(xs[i] for i in q) * sum(1 for i in q if i not in phi)
        for q in combinations(range(n), k)
    )
    if not phi and rhs != k * elem_sym(xs, k):
        return False
    return lhs == rhs


def ratio_sequence(xs: Sequence[int]) -> list[Fraction]:
    """Return ``[e_{t+1}/e_t for t = 0..n]``; the last entry is always 0."""
    e = elem_sym_all(xs) + (0,)
    if any(v == 0 for v in e[:-1]):
        raise InvalidArgumentError("ratio sequence needs every element >= 1")
    return [Fraction(e[t + 1], e[t]) for t in range(len(xs) + 1)]


def check_log_concavity(xs: Sequence[int]) -> bool:
    """Strict log-concavity of ``(1, e_1, ..., e_n, 0)`` at every interior index."""
    a = elem_sym_all(xs) + (0,)
    return all(a[k] * a[k] > a[k + 1] * a[k - 1] for k in range(1, len(a) - 1))


def check_maclaurin(xs: Sequence[int]) -> bool:
    """Maclaurin chain ``E_1 >= E_2^(1/2) >= ... >= E_n^(1/n)``.

    ``E_k^(1/k) >= E_{k+1}^(1/(k+1))`` is tested as
    ``e_k^(k+1) C(n,k+1)^k >= e_{k+1}^k C(n,k)^(k+1)`` in integers.
    """
    n = len(xs)
    e = elem_sym_all(xs)
    for k in range(1, n):
        lhs = e[k] ** (k + 1) * comb(n, k + 1) ** k
        rhs = e[k + 1] ** k * comb(n, k) ** (k + 1)
        if lhs < rhs:
            return False
    return True


def is_strictly_decreasing(seq: Sequence) -> bool:
    return all(a > b for a, b in zip(seq, seq[1:]))


def is_convex(seq: Sequence, strict: bool = False) -> bool:
    """Discrete convexity ``2 a_j <= a_{j-1} + a_{j+1}`` (``<`` when strict)."""
    for j in range(1, len(seq) - 1):
        lhs, rhs = 2 * seq[j], seq[j - 1] + seq[j + 1]
        if lhs > rhs or (strict and lhs == rhs):
            return False
    return True
