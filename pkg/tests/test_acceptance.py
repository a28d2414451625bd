"""Acceptance criteria, one test each.

Run with ``pytest -s tests/test_acceptance.py`` to see one PASS/FAIL line per
criterion with its wall time.  Exhaustive sweeps over occupancy vectors are
taken over multisets: every checked quantity is invariant under relabelling
the caches.
"""
import random
import time
from contextlib import contextmanager
from fractions import Fraction as F
from itertools import combinations, combinations_with_replacement, product

import pytest

from topocache.bounds import (
    coefficient,
    lower_bound_regular,
    optimality_certificate,
    tau_star,
    tau_star_sequence,
    tilde_coefficient,
)
from topocache.delivery import Demand, deliver, delivery_time, schedule_fractional
from topocache.mismatch import MismatchScenario, converse_mismatch, delivery_time_mismatch
from topocache.model import Topology, allocate
from topocache.oracle import brute_force_coefficient, tilde_minimizers
from topocache.placement import Library, build_placement
from topocache.stochastic import PoissonSpec, emit_csv, simulate
from topocache.symfunc import (
    check_log_concavity,
    check_maclaurin,
    check_recursion,
    check_weighted_identity,
    is_convex,
    is_strictly_decreasing,
    ratio_sequence,
)


@contextmanager
def criterion(number: int, title: str, limit: float):
    """Print a PASS/FAIL line; fail when the body fails or overruns ``limit`` seconds."""
    start = time.perf_counter()
    state = {"note": ""}
    try:
        yield state
    except BaseException:
        elapsed = time.perf_counter() - start
        print(f"\n[criterion {number:2d}] FAIL  {title}  ({elapsed:.2f}s)")
        raise
    elapsed = time.perf_counter() - start
    ok = elapsed < limit
    note = f"  {state['note']}" if state["note"] else ""
    print(f"\n[criterion {number:2d}] {'PASS' if ok else 'FAIL'}  {title}  ({elapsed:.2f}s < {limit:g}s){note}")
    assert ok, f"criterion {number} took {elapsed:.2f}s, limit {limit}s"


def _multisets(max_len: int, values):
    for n in range(1, max_len + 1):
        yield from combinations_with_replacement(values, n)


def test_criterion_01_golden_example():
    with criterion(1, "L=(3,2,1), t=2: allocation, 6 XORs, T=6/11, byte-exact decode", 1):
        topo = Topology((3, 2, 1))
        assert allocate(topo, 2).gamma == (F(9, 11), F(8, 11), F(5, 11))
        spec = build_placement(topo, 2)
        assert spec.S == 11
        report = deliver(spec, Demand.contiguous(topo.L), Library.random(6, 11, subfile_length=32, seed=1))
        assert report.num_transmissions == 6
        assert report.T == F(6, 11)
        assert report.all_decoded


def test_criterion_02_achievable_meets_converse():
    with criterion(2, "delivery time equals regular lower bound, Lambda<=6, L<=6, all t", 10) as st:
        count = 0
        for L in _multisets(6, range(1, 7)):
            topo = Topology(L)
            for t in range(topo.Lambda + 1):
                assert delivery_time(topo, t) == lower_bound_regular(topo, t).value, (L, t)
                count += 1
        rng = random.Random(2)
        for _ in range(300):
            L = [rng.randint(1, 6) for _ in range(rng.randint(2, 6))]
            rng.shuffle(L)
            topo = Topology(tuple(L))
            t = rng.randint(0, topo.Lambda)
            assert delivery_time(topo, t) == lower_bound_regular(topo, t).value, (L, t)
        st["note"] = f"{count} multisets x budgets, plus 300 shuffled orderings"


def test_criterion_03_certificate_example():
    with criterion(3, "certificate sequence (18/11, 12/11, 6/11, 0) is convex", 1):
        topo = Topology((3, 2, 1))
        seq = tau_star_sequence(topo, 2)
        assert seq == [F(18, 11), F(12, 11), F(6, 11), 0]
        assert is_convex(seq)
        assert optimality_certificate(topo, 2)


def test_criterion_04_coefficients_match_brute_force():
    with criterion(4, "closed-form coefficients equal brute-force averages, Lambda<=3, N=K<=5", 60) as st:
        count = 0
        for lam in range(1, 4):
            for L in product(range(1, 6), repeat=lam):
                if sum(L) > 5:
                    continue
                topo = Topology(L)
                for p in range(lam + 1):
                    for j in range(lam + 1):
                        for tau in combinations(topo.labels, j):
                            assert brute_force_coefficient(topo, topo.K, p, tau) == coefficient(topo, p, tau)
                            count += 1
        st["note"] = f"{count} coefficients"


def test_criterion_05_tau_star_and_monotonicity():
    rng = random.Random(5)
    vectors = [tuple(rng.randint(1, 8) for _ in range(rng.randint(1, 6))) for _ in range(400)]
    with criterion(5, "tau* attains the minimum; sequence strictly decreasing for p<Lambda", 30) as st:
        for L in vectors:
            topo = Topology(L)
            for p in range(topo.Lambda + 1):
                for j in range(topo.Lambda + 1):
                    low, _ = tilde_minimizers(topo, p, j)
                    assert tilde_coefficient(topo, p, tau_star(topo, p, j)) == low, (L, p, j)
                seq = tau_star_sequence(topo, p)
                if p < topo.Lambda:
                    assert is_strictly_decreasing(seq), (L, p)
                else:
                    assert all(v == 0 for v in seq), (L, p)
        st["note"] = "at p=Lambda the sequence is identically 0, see the xfail below"


@pytest.mark.xfail(strict=True, reason="every coefficient vanishes when p equals the number of caches")
def test_criterion_05_strict_decrease_at_full_budget():
    topo = Topology((3, 2, 1))
    assert is_strictly_decreasing(tau_star_sequence(topo, topo.Lambda))


def test_criterion_06_mismatch_equality():
    pairs = [(a, b) for a in range(1, 5) for b in range(0, 5)]
    with criterion(6, "mismatched achievable time equals its converse, Lambda<=5, entries<=4", 120) as st:
        count = 0
        for ms in _multisets(5, pairs):
            Lbar = tuple(a for a, _ in ms)
            L = tuple(b for _, b in ms)
            for t in range(len(ms) + 1):
                scn = MismatchScenario(Lbar, L, t)
                assert delivery_time_mismatch(scn) == converse_mismatch(scn), (Lbar, L, t)
                count += 1
        st["note"] = f"{count} scenarios"


def test_criterion_07_dedicated_caches():
    with criterion(7, "all-ones occupancy gives (K-t)/(t+1)", 1):
        for K in range(1, 9):
            topo = Topology((1,) * K)
            for t in range(K + 1):
                assert delivery_time(topo, t) == F(K - t, t + 1)
                assert lower_bound_regular(topo, t).value == F(K - t, t + 1)
        report = deliver(build_placement(Topology((1,) * 5), 2), Demand.contiguous((1,) * 5),
                         Library.random(5, 10, seed=3))
        assert report.T == F(1, 1) and report.all_decoded


def test_criterion_08_memory_sharing():
    with criterion(8, "t=3/2 on (3,2,1): T=157/132, realized time within one granule", 1):
        topo = Topology((3, 2, 1))
        assert delivery_time(topo, F(3, 2)) == F(157, 132)
        dem = Demand.contiguous(topo.L)
        for size in (4 * 2 * 66, 1000, 37):
            rep = schedule_fractional(topo, F(3, 2), dem, Library.random(6, 1, subfile_length=size, seed=size))
            assert rep.T == F(157, 132)
            assert abs(rep.T_realized - rep.T) <= rep.granule, size
            assert rep.all_decoded
        assert schedule_fractional(topo, F(3, 2), dem, Library.random(6, 1, subfile_length=528)).T_realized == F(157, 132)


def test_criterion_09_symmetric_function_properties():
    rng = random.Random(9)
    with criterion(9, "recursion, weighted identity, ratio sequence, log-concavity, Maclaurin on 500 multisets", 10):
        for _ in range(500):
            xs = tuple(sorted(rng.randint(1, 20) for _ in range(rng.randint(1, 10))))
            n = len(xs)
            for k in range(1, n + 1):
                assert all(check_recursion(xs, k, i) for i in range(n))
                assert check_weighted_identity(xs, k)
                phi = [i for i in range(n) if rng.random() < 0.4]
                assert check_weighted_identity(xs, k, phi)
            ratios = ratio_sequence(xs)
            assert is_strictly_decreasing(ratios) and is_convex(ratios)
            assert check_log_concavity(xs)
            assert check_maclaurin(xs)


def test_criterion_10_stochastic_study(tmp_path):
    means = (20, 20, 8, 6, 4, 2)
    with criterion(10, "Poisson study: mean time >= assumed-topology time (3 stderr), repeatable CSV", 60):
        spec = PoissonSpec(means, 10_000, 7, budgets=(1, 2, 3, 4, 5))
        summary = simulate(spec)
        for row in summary.rows:
            assert row.T_perfect_assumed == delivery_time(Topology(means), row.t)
            assert row.mean_T_mismatch >= row.T_perfect_assumed - 3 * F(row.stderr), row.t
        first, _ = emit_csv(summary, tmp_path / "first.csv")
        second, _ = emit_csv(simulate(spec), tmp_path / "second.csv")
        assert first.read_bytes() == second.read_bytes()
