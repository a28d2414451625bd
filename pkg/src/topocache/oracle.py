"""Brute-force cross-checks for the converse machinery.

Nothing here uses the closed forms it is meant to validate: coefficients are
recomputed by averaging permutation bounds over every worst-case demand, and
optimal sets by scanning every subset.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations
from math import factorial, perm, prod
from typing import Iterable, Sequence

from .bounds import (
    coefficient,
    coefficient_table,
    lower_bound_regular,
    tau_star,
    tilde_coefficient,
    weight,
)
from .delivery import delivery_time
from .errors import InvalidArgumentError, ResourceLimitError
from .model import Topology
from .mismatch import MismatchScenario, converse_mismatch, delivery_time_mismatch
from .placement import PlacementSpec, build_placement

__all__ = [
    "SubfileSizeProfile",
    "t_lb_sigma",
    "brute_force_coefficient",
    "brute_force_tau_star",
    "tilde_minimizers",
    "verify_lp_point",
    "lp_point_value",
    "brute_force_mismatch_time",
    "brute_force_mismatch_converse",
    "SuiteResult",
    "run_suite",
]

MAX_DEMANDS_X_PERMS = 2_000_000


@dataclass(frozen=True)
class SubfileSizeProfile:
    """``sizes[(n, tau)]``: fraction of file ``n`` stored exactly in the caches ``tau``."""

    sizes: dict

    def __post_init__(self):
        totals = {}
        for (n, tau), size in self.sizes.items():
            if size < 0:
                raise InvalidArgumentError(f"negative size for file {n}, set {sorted(tau)}")
            totals[n] = totals.get(n, 0) + size
        bad = [n for n, s in totals.items() if s != 1]
        if bad:
            raise InvalidArgumentError(f"files {bad} are not fully partitioned")

    @classmethod
    def from_placement(cls, spec: PlacementSpec, N: int) -> "SubfileSizeProfile":
        sizes = {}
        for n in range(1, N + 1):
            for tau in combinations(spec.topo.labels, spec.t):
                sizes[(n, frozenset(tau))] = Fraction(spec.class_size(tau), spec.S)
        return cls(sizes)

    def files(self) -> set[int]:
        return {n for n, _ in self.sizes}


def t_lb_sigma(profile: SubfileSizeProfile, demand, sigma: Sequence[int]) -> Fraction:
    """Acyclic-side-information bound for the cache order ``sigma``.

    Walking ``sigma``, each user of the current cache contributes every piece
    of its requested file that is stored only outside the caches seen so far.
    """
    groups = demand.users_per_cache
    if sorted(sigma) != list(range(1, len(groups) + 1)):
        raise InvalidArgumentError(f"sigma must be a permutation of 1..{len(groups)}")
    missing = {demand.d[u - 1] for g in groups for u in g} - profile.files()
    if missing:
        raise InvalidArgumentError(f"profile lacks files {sorted(missing)}")
    by_file = {}
    for (n, tau), size in profile.sizes.items():
        by_file.setdefault(n, []).append((tau, size))
    total = Fraction(0)
    seen = set()
    for lab in sigma:
        seen.add(lab)
        for u in groups[lab - 1]:
            for tau, size in by_file[demand.d[u - 1]]:
                if seen.isdisjoint(tau):
                    total += size
    return total


class _Users:
    """Minimal demand stand-in so the oracle does not depend on the scheduler."""

    def __init__(self, d, users_per_cache):
        self.d = d
        self.users_per_cache = users_per_cache


def _contiguous(L: Sequence[int]) -> list[tuple[int, ...]]:
    groups, nxt = [], 1
    for x in L:
        groups.append(tuple(range(nxt, nxt + x)))
        nxt += x
    return groups


def brute_force_coefficient(topo: Topology, N: int, p: int, tau: Iterable[int]) -> Fraction:
    """Coefficient of ``|W_tau|`` in the permutation bound, averaged from scratch.

    Every distinct-demand vector and every permutation is visited; the
    permutation weights are the raw occupancy products of the last ``p``
    caches normalized by their own total.  Result is scaled by ``N`` so it
    refers to a library-averaged class size.
    """
    lam, K = topo.Lambda, topo.K
    if lam > 4 or K > 6:
        raise ResourceLimitError(f"brute force limited to 4 caches and 6 users, got {lam} and {K}")
    if N < K:
        raise InvalidArgumentError(f"worst-case demands need N >= K, got N={N} < K={K}")
    if not 0 <= p <= lam:
        raise InvalidArgumentError(f"p must lie in [0, {lam}], got {p}")
    tau = frozenset(tau)
    work = perm(N, K) * factorial(lam)
    if work > MAX_DEMANDS_X_PERMS:
        raise ResourceLimitError(f"{work} demand-permutation pairs exceed the budget {MAX_DEMANDS_X_PERMS}")
    groups = _contiguous(topo.L)
    raw = {s: prod(topo.L[lab - 1] for lab in s[lam - p:]) for s in permutations(range(1, lam + 1))}
    norm = sum(raw.values())
    acc = 0
    count = 0
    for d in permutations(range(1, N + 1), K):
        count += 1
        for s, w in raw.items():
            seen = set()
            hits = 0
            for lab in s:
                seen.add(lab)
                if seen.isdisjoint(tau):
                    hits += sum(1 for u in groups[lab - 1] if d[u - 1] == 1)
            acc += w * hits
    return Fraction(N * acc, norm * count)


def tilde_minimizers(topo: Topology, p: int, j: int) -> tuple[Fraction, list[frozenset]]:
    """Minimum tilde coefficient over all ``j``-subsets and every set attaining it."""
    if topo.Lambda > 6:
        raise ResourceLimitError(f"subset scan limited to 6 caches, got {topo.Lambda}")
    values = {frozenset(s): tilde_coefficient(topo, p, s) for s in combinations(topo.labels, j)}
    low = min(values.values())
    return low, sorted((s for s, v in values.items() if v == low), key=sorted)


def brute_force_tau_star(topo: Topology, p: int, j: int) -> frozenset:
    """Exhaustive argmin of the tilde coefficient; ties resolve to the closed-form set."""
    _, sets = tilde_minimizers(topo, p, j)
    preferred = tau_star(topo, p, j)
    return preferred if preferred in sets else sets[0]


def lp_point_value(topo: Topology, t: int) -> Fraction | None:
    """Objective at ``p = t`` of the regular placement, or ``None`` if infeasible."""
    if topo.Lambda > 5:
        raise ResourceLimitError(f"LP point check limited to 5 caches, got {topo.Lambda}")
    t = topo.check_budget(t)
    spec = build_placement(topo, t)
    a = {frozenset(tau): Fraction(spec.class_size(tau), spec.S) for tau in combinations(topo.labels, t)}
    if sum(a.values()) != 1 or sum(len(k) * v for k, v in a.items()) != t:
        return None
    if any(v < 0 for v in a.values()):
        return None
    table = coefficient_table(topo, t)
    full = sum(table[k] * v for k, v in a.items())
    reduced = sum(table.tilde(k) * v for k, v in a.items())
    if full != reduced:
        return None
    return full


def verify_lp_point(topo: Topology, t: int) -> bool:
    """Regular placement is feasible and attains the regular bound at ``p = t``."""
    value = lp_point_value(topo, t)
    return value is not None and value == lower_bound_regular(topo, t).value


def _esym_enumerated(xs: Sequence[int], k: int) -> int:
    return sum(prod(c) for c in combinations(xs, k))


def brute_force_mismatch_time(Lbar: Sequence[int], L: Sequence[int], t: int) -> Fraction:
    """Achievable mismatched delivery time with both sums enumerated."""
    n = len(Lbar)
    num = 0
    for Q in combinations(range(n), t + 1):
        num += max(L[i] * prod(Lbar[k] for k in Q if k != i) for i in Q)
    return Fraction(num, _esym_enumerated(Lbar, t))


def brute_force_mismatch_converse(Lbar: Sequence[int], L: Sequence[int], t: int) -> Fraction:
    """Mismatched converse by scanning every (Lambda-t)-permutation."""
    n = len(Lbar)
    if n > 7:
        raise ResourceLimitError(f"permutation scan limited to 7 caches, got {n}")
    best = 0
    for sigma in permutations(range(n), n - t):
        used = set()
        val = 0
        for i in sigma:
            used.add(i)
            val += L[i] * _esym_enumerated([Lbar[k] for k in range(n) if k not in used], t)
        best = max(best, val)
    return Fraction(best, _esym_enumerated(Lbar, t))


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    detail: str = ""


def _coefficient_suite() -> SuiteResult:
    checked = 0
    for L in [(1,), (2,), (1, 1), (2, 1), (3, 1), (2, 2), (1, 1, 1), (2, 1, 1), (3, 1, 1), (2, 2, 1)]:
        topo = Topology(L)
        for p in range(topo.Lambda + 1):
            for j in range(topo.Lambda + 1):
                for tau in combinations(topo.labels, j):
                    if brute_force_coefficient(topo, topo.K, p, tau) != coefficient(topo, p, tau):
                        return SuiteResult("coefficients", False, f"L={L} p={p} tau={tau}")
                    checked += 1
    return SuiteResult("coefficients", True, f"{checked} cases")


def _tau_star_suite() -> SuiteResult:
    checked = 0
    for L in [(3, 2, 1), (4, 4, 1), (5, 3, 3, 1), (2, 2, 2, 2), (6, 5, 3, 2, 1), (4, 3, 3, 2, 1, 1)]:
        topo = Topology(L)
        for p in range(topo.Lambda + 1):
            for j in range(topo.Lambda + 1):
                low, _ = tilde_minimizers(topo, p, j)
                if tilde_coefficient(topo, p, tau_star(topo, p, j)) != low:
                    return SuiteResult("tau-star", False, f"L={L} p={p} j={j}")
                checked += 1
    return SuiteResult("tau-star", True, f"{checked} cases")


def _lp_suite() -> SuiteResult:
    for L in [(3, 2, 1), (1, 1, 1, 1), (4, 2, 2, 1, 1)]:
        topo = Topology(L)
        for t in range(topo.Lambda + 1):
            if not verify_lp_point(topo, t):
                return SuiteResult("lp-point", False, f"L={L} t={t}")
    return SuiteResult("lp-point", True)


def _weighted_average_suite() -> SuiteResult:
    for L in [(3, 2, 1), (2, 2, 1), (1, 1, 1), (3, 1)]:
        topo = Topology(L)
        users = _Users(tuple(range(1, topo.K + 1)), _contiguous(L))
        for t in range(topo.Lambda + 1):
            profile = SubfileSizeProfile.from_placement(build_placement(topo, t), topo.K)
            T = delivery_time(topo, t)
            for p in range(topo.Lambda + 1):
                avg = sum(
                    weight(s, p, topo) * t_lb_sigma(profile, users, s)
                    for s in permutations(topo.labels)
                )
                if avg > T:
                    return SuiteResult("weighted-average", False, f"L={L} t={t} p={p}")
    return SuiteResult("weighted-average", True)


def _mismatch_suite() -> SuiteResult:
    cases = 0
    for Lbar in [(2, 1, 1), (3, 2, 1), (1, 1, 1, 1), (4, 2, 1, 1)]:
        for L in [(1, 2, 1), (0, 3, 1), (2, 2, 2), (1, 0, 0)]:
            L = (L + (0,) * len(Lbar))[: len(Lbar)]
            for t in range(len(Lbar)):
                scn = MismatchScenario(Lbar, L, t)
                ach = delivery_time_mismatch(scn)
                conv = converse_mismatch(scn)
                if not (ach == conv == brute_force_mismatch_time(Lbar, L, t)
                        == brute_force_mismatch_converse(Lbar, L, t)):
                    return SuiteResult("mismatch-equality", False, f"Lbar={Lbar} L={L} t={t}")
                cases += 1
    return SuiteResult("mismatch-equality", True, f"{cases} cases")


SUITES = {
    "coefficients": _coefficient_suite,
    "tau-star": _tau_star_suite,
    "lp-point": _lp_suite,
    "weighted-average": _weighted_average_suite,
    "mismatch-equality": _mismatch_suite,
}


def run_suite(names: Iterable[str] | None = None) -> list[SuiteResult]:
    """Run the named oracle suites (all by default)."""
    names = list(SUITES) if names is None else list(names)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise InvalidArgumentError(f"unknown suites {unknown}; choose from {list(SUITES)}")
    return [SUITES[n]() for n in names]
