"""Delivery when placement was sized for one occupancy vector and users arrive per another.

The assumed vector fixes memory allocation and subpacketization; the realized
vector (zeros allowed) decides how many users actually hang off each cache.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from itertools import combinations
from math import comb, prod
from typing import Sequence

from .delivery import DeliveryReport, Demand, Transmission, _clique_schedule, _decode_ok, decode
from .errors import InvalidArgumentError, ResourceLimitError
from .model import Topology
from .placement import Library, build_placement
from .symfunc import elem_sym

__all__ = [
    "MAX_CONVERSE_CACHES",
    "MismatchScenario",
    "LeaderAssignment",
    "clique_count_mismatch",
    "schedule_mismatch",
    "delivery_time_mismatch",
    "converse_mismatch",
    "leaders",
    "mismatch_time",
    "leader_count_spectrum",
]

MAX_CONVERSE_CACHES = 10


@dataclass(frozen=True)
class MismatchScenario:
    assumed: Topology
    realized: tuple[int, ...]
    t: int

    def __post_init__(self):
        if not isinstance(self.assumed, Topology):
            object.__setattr__(self, "assumed", Topology(tuple(self.assumed)))
        realized = tuple(self.realized)
        if len(realized) != self.assumed.Lambda:
            raise InvalidArgumentError(
                f"realized occupancy has {len(realized)} caches, assumed has {self.assumed.Lambda}"
            )
        for x in realized:
            if isinstance(x, bool) or not isinstance(x, int) or x < 0:
                raise InvalidArgumentError(f"realized occupancies must be non-negative ints, got {x!r}")
        object.__setattr__(self, "realized", realized)
        object.__setattr__(self, "t", self.assumed.check_budget(self.t))

    @property
    def Lambda(self) -> int:
        return self.assumed.Lambda

    @property
    def K(self) -> int:
        return sum(self.realized)


@dataclass(frozen=True)
class LeaderAssignment:
    """Global leader order plus the leader of every (t+1)-set."""

    leaders: tuple[int, ...]
    perSetLeader: dict

    def counts(self) -> dict[int, int]:
        out = {}
        for lab in self.perSetLeader.values():
            out[lab] = out.get(lab, 0) + 1
        return out


def _check_set(scn: MismatchScenario, Q: Sequence[int]) -> tuple[int, ...]:
    Q = tuple(sorted(Q))
    if len(Q) != scn.t + 1 or len(set(Q)) != len(Q):
        raise InvalidArgumentError(f"Q must hold {scn.t + 1} distinct caches, got {list(Q)}")
    for lab in Q:
        if not 1 <= lab <= scn.Lambda:
            raise InvalidArgumentError(f"unknown cache label {lab}")
    return Q


def clique_count_mismatch(scn: MismatchScenario, Q: Sequence[int], lam: int) -> int:
    """Subfiles of class ``Q - lam`` missing at the users of cache ``lam``."""
    Q = _check_set(scn, Q)
    if lam not in Q:
        raise InvalidArgumentError(f"cache {lam} is not in {list(Q)}")
    Lbar = scn.assumed.L
    return scn.realized[lam - 1] * prod(Lbar[i - 1] for i in Q if i != lam)


def _numerator(Lbar: Sequence, L: Sequence, t: int):
    # sum over (t+1)-sets of the largest per-cache demand; values may be Fractions
    n = len(Lbar)
    total = 0
    for Q in combinations(range(n), t + 1):
        best = 0
        for i in Q:
            val = L[i] * prod(Lbar[k] for k in Q if k != i)
            if val > best:
                best = val
        total += best
    return total


def mismatch_time(Lbar: Sequence, L: Sequence, t: int) -> Fraction:
    """Achievable delivery time for assumed ``Lbar`` (integers or Fractions) and realized ``L``."""
    if len(Lbar) != len(L):
        raise InvalidArgumentError("assumed and realized vectors differ in length")
    if not 0 <= t <= len(Lbar):
        raise InvalidArgumentError(f"t must lie in [0, {len(Lbar)}], got {t}")
    return Fraction(_numerator(Lbar, L, t)) / elem_sym(tuple(Lbar), t)


def delivery_time_mismatch(scn: MismatchScenario) -> Fraction:
    """Sum over (t+1)-sets of the worst per-cache clique size, over ``e_t(Lbar)``."""
    return mismatch_time(scn.assumed.L, scn.realized, scn.t)


def _converse(Lbar: Sequence[int], L: Sequence[int], t: int) -> tuple[int, tuple[int, ...]]:
    """Max over ordered prefixes of ``sum_k L[s_k] e_t(Lbar outside s_1..s_k)``.

    The remaining contribution depends only on the set already used, so a
    memoized search over subsets covers every (Lambda-t)-permutation.
    """
    n = len(Lbar)
    depth = n - t
    esym = {}

    def e_outside(mask: int) -> int:
        if mask not in esym:
            esym[mask] = elem_sym(tuple(Lbar[i] for i in range(n) if not mask >> i & 1), t)
        return esym[mask]

    memo = {}

    def best(mask: int, used: int) -> tuple[int, tuple[int, ...]]:
        if used == depth:
            return 0, ()
        if mask in memo:
            return memo[mask]
        top, arg = -1, ()
        for i in range(n):
            if mask >> i & 1:
                continue
            nxt = mask | 1 << i
            rest, tail = best(nxt, used + 1)
            val = L[i] * e_outside(nxt) + rest
            if val > top:
                top, arg = val, (i + 1,) + tail
        memo[mask] = (top, arg)
        return top, arg

    if depth == 0:
        return 0, ()
    return best(0, 0)


def converse_mismatch(scn: MismatchScenario, witness: bool = False):
    """Lower bound for the given assumed placement, maximized over cache orderings.

    With ``witness`` also returns one maximizing ordering (caller labels).
    """
    if scn.Lambda > MAX_CONVERSE_CACHES:
        raise ResourceLimitError(
            f"converse enumeration supports at most {MAX_CONVERSE_CACHES} caches, got {scn.Lambda}"
        )
    num, sigma = _converse(scn.assumed.L, scn.realized, scn.t)
    value = Fraction(num, elem_sym(scn.assumed.L, scn.t))
    return (value, sigma) if witness else value


def leaders(scn: MismatchScenario) -> LeaderAssignment:
    """Leader of each (t+1)-set and the global leader order.

    A set's leader maximizes ``L_i / Lbar_i`` over its members, ties going to
    the lowest label; the global order sorts caches the same way and keeps
    the first ``Lambda - t``.
    """
    Lbar, L = scn.assumed.L, scn.realized
    lam = scn.Lambda
    # ratios compared by cross-multiplication; sorted() is stable so ties keep label order
    def by_ratio(a: int, b: int) -> int:
        return L[b - 1] * Lbar[a - 1] - L[a - 1] * Lbar[b - 1]

    order = sorted(range(1, lam + 1), key=cmp_to_key(by_ratio))
    per_set = {}
    for Q in combinations(range(1, lam + 1), scn.t + 1):
        best, arg = -1, None
        for i in Q:
            val = L[i - 1] * prod(Lbar[k - 1] for k in Q if k != i)
            if val > best:
                best, arg = val, i
        per_set[Q] = arg
    return LeaderAssignment(tuple(order[: lam - scn.t]), per_set)


def schedule_mismatch(
    scn: MismatchScenario, demand: Demand, library: Library
) -> tuple[list[Transmission], DeliveryReport]:
    """Clique-XOR delivery over the assumed placement for the realized users.

    Caches with fewer wanted subfiles than the largest in a set simply drop
    out of the later XORs of that set.  All users are decoded byte-exactly and
    the report carries the realized count over ``e_t(Lbar)``.
    """
    if demand.occupancy != scn.realized:
        raise InvalidArgumentError(
            f"demand occupancy {demand.occupancy} does not match realized L={scn.realized}"
        )
    if library.N < scn.K:
        raise InvalidArgumentError(f"worst-case demands need N >= K, got N={library.N} < K={scn.K}")
    spec = build_placement(scn.assumed, scn.t)
    if library.S != spec.S:
        raise InvalidArgumentError(f"library cut into {library.S} subfiles, placement needs {spec.S}")
    txs = _clique_schedule(spec, demand, library, allow_padding=True)
    decoded = decode(spec, demand, txs, library)
    report = DeliveryReport(
        num_transmissions=len(txs),
        S=spec.S,
        T=Fraction(len(txs), spec.S),
        decode_ok=_decode_ok(decoded, demand, library),
    )
    return txs, report


def leader_count_spectrum(Lambda: int, t: int) -> set[int]:
    """Admissible per-cache leader counts: 0 and ``C(m, t)`` for ``m = t..Lambda-1``."""
    return {0} | {comb(m, t) for m in range(t, Lambda)}
