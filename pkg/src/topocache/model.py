"""Topology and memory-allocation data model.

Caches are labelled ``1..Lambda`` in the order the caller supplied them.  A
:class:`Topology` also keeps the descending-occupancy canonical order that
the converse machinery relies on; every public result is reported against
the caller's labels.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

from .errors import InvalidArgumentError, UndefinedDoFError
from .symfunc import elem_sym, without

__all__ = [
    "Topology",
    "CacheBudget",
    "MemoryAllocation",
    "MemoryShare",
    "parse_rational",
    "format_rational",
    "allocate",
    "split_budget",
    "dof",
]

RationalLike = Union[int, Fraction, str, float]


def parse_rational(value: RationalLike) -> Fraction:
    """Parse ``"p/q"``, integers, decimal strings or floats into an exact Fraction.

    Floats go through their shortest ``repr`` so ``1.5`` becomes ``3/2``.
    """
    if isinstance(value, bool):
        raise InvalidArgumentError(f"not a rational number: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise InvalidArgumentError(f"not a finite number: {value!r}")
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidArgumentError(f"cannot parse rational {value!r}") from exc
    raise InvalidArgumentError(f"not a rational number: {value!r}")


def format_rational(x: Fraction) -> str:
    """Serialize as ``"p/q"`` (``"p/1"`` for integers keeps the form uniform)."""
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class Topology:
    """Cache occupancy vector ``L`` (users per cache), in caller label order."""

    L: tuple[int, ...]
    order: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        L = tuple(self.L)
        if not L:
            raise InvalidArgumentError("a topology needs at least one cache")
        for x in L:
            if isinstance(x, bool) or not isinstance(x, int):
                raise InvalidArgumentError(f"occupancies must be integers, got {x!r}")
            if x < 1:
                raise InvalidArgumentError(
                    f"every cache must serve at least one user, got L={list(L)}"
                )
        object.__setattr__(self, "L", L)
        # stable: equal occupancies keep ascending label order
        order = tuple(sorted(range(1, len(L) + 1), key=lambda lab: -L[lab - 1]))
        object.__setattr__(self, "order", order)

    @property
    def Lambda(self) -> int:
        return len(self.L)

    @property
    def K(self) -> int:
        return sum(self.L)

    @property
    def labels(self) -> range:
        return range(1, len(self.L) + 1)

    def occupancy(self, label: int) -> int:
        return self.L[label - 1]

    @property
    def sorted_L(self) -> tuple[int, ...]:
        """Occupancies in canonical (descending) order."""
        return tuple(self.L[lab - 1] for lab in self.order)

    def to_label(self, position: int) -> int:
        """Caller label of canonical position ``position`` (1-based)."""
        return self.order[position - 1]

    def to_position(self, label: int) -> int:
        """Canonical (1-based) position of caller label ``label``."""
        return self.order.index(label) + 1

    def check_budget(self, t: int) -> int:
        if isinstance(t, Fraction):
            if t.denominator != 1:
                raise InvalidArgumentError(f"integer budget required, got t={t}")
            t = t.numerator
        if isinstance(t, bool) or not isinstance(t, int) or not 0 <= t <= self.Lambda:
            raise InvalidArgumentError(f"t must be an integer in [0, {self.Lambda}], got {t!r}")
        return t

    def check_rational_budget(self, t: RationalLike) -> Fraction:
        t = parse_rational(t)
        if not 0 <= t <= self.Lambda:
            raise InvalidArgumentError(f"t must lie in [0, {self.Lambda}], got {t}")
        return t


@dataclass(frozen=True)
class CacheBudget:
    """Normalized sum cache size ``t`` and library size ``N``."""

    t: Fraction
    N: int

    def __post_init__(self):
        object.__setattr__(self, "t", parse_rational(self.t))
        if self.t < 0:
            raise InvalidArgumentError(f"t must be non-negative, got {self.t}")
        if not isinstance(self.N, int) or self.N < 1:
            raise InvalidArgumentError(f"N must be a positive integer, got {self.N!r}")

    def check_worst_case(self, topo: Topology) -> None:
        if self.t > topo.Lambda:
            raise InvalidArgumentError(f"t={self.t} exceeds the number of caches {topo.Lambda}")
        if self.N < topo.K:
            raise InvalidArgumentError(
                f"worst-case demands need N >= K, got N={self.N} < K={topo.K}"
            )


@dataclass(frozen=True)
class MemoryAllocation:
    """Per-cache fractions of the library, caller label order."""

    gamma: tuple[Fraction, ...]
    t: Fraction

    @property
    def total(self) -> Fraction:
        return sum(self.gamma, Fraction(0))


@dataclass(frozen=True)
class MemoryShare:
    """``t = alpha * floor_budget + (1 - alpha) * ceil_budget``."""

    alpha: Fraction
    floor_budget: int
    ceil_budget: int

    @property
    def t(self) -> Fraction:
        return self.alpha * self.floor_budget + (1 - self.alpha) * self.ceil_budget


def allocate(topo: Topology, t: int) -> MemoryAllocation:
    """Optimal allocation ``gamma_l = L_l e_{t-1}(L - L_l) / e_t(L)``."""
    t = topo.check_budget(t)
    L = topo.L
    if t == 0:
        return MemoryAllocation(tuple(Fraction(0) for _ in L), Fraction(0))
    et = elem_sym(L, t)
    gamma = tuple(
        Fraction(L[i] * elem_sym(without(L, i), t - 1), et) for i in range(len(L))
    )
    return MemoryAllocation(gamma, Fraction(t))


def split_budget(t: RationalLike, Lambda: int | None = None) -> MemoryShare:
    """Memory-sharing split of a fractional budget into its integer neighbours.

    ``alpha = ceil(t) - t``; an integer ``t`` gives ``alpha = 1`` and equal budgets.
    """
    t = parse_rational(t)
    if t < 0 or (Lambda is not None and t > Lambda):
        bound = f"[0, {Lambda}]" if Lambda is not None else "[0, inf)"
        raise InvalidArgumentError(f"t must lie in {bound}, got {t}")
    lo, hi = math.floor(t), math.ceil(t)
    if lo == hi:
        return MemoryShare(Fraction(1), lo, hi)
    return MemoryShare(Fraction(hi) - t, lo, hi)


def dof(topo: Topology, alloc: MemoryAllocation, T: RationalLike) -> Fraction:
    """Sum degrees of freedom ``(K - sum_l gamma_l L_l) / T``."""
    T = parse_rational(T)
    if T == 0:
        raise UndefinedDoFError("degrees of freedom are undefined for T = 0")
    if T < 0:
        raise InvalidArgumentError(f"delivery time must be positive, got {T}")
    uncached = topo.K - sum((g * l for g, l in zip(alloc.gamma, topo.L)), Fraction(0))
    return uncached / T
