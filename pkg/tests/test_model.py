from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from topocache.errors import InvalidArgumentError, UndefinedDoFError
from topocache.model import (
    CacheBudget,
    Topology,
    allocate,
    dof,
    format_rational,
    parse_rational,
    split_budget,
)
from topocache.symfunc import elem_sym

occupancies = st.lists(st.integers(1, 6), min_size=1, max_size=6)


def test_topology_basics():
    topo = Topology((1, 3, 2))
    assert topo.K == 6 and topo.Lambda == 3
    assert topo.sorted_L == (3, 2, 1)
    assert topo.order == (2, 3, 1)
    assert topo.to_label(1) == 2 and topo.to_position(1) == 3


def test_topology_ties_keep_label_order():
    assert Topology((2, 5, 2, 5)).order == (2, 4, 1, 3)


@pytest.mark.parametrize("L", [(), (0, 1), (1, -2), (1.5,), (True,)])
def test_topology_rejects(L):
    with pytest.raises(InvalidArgumentError):
        Topology(L)


@pytest.mark.parametrize(
    "t, gamma",
    [(2, (F(9, 11), F(8, 11), F(5, 11))), (0, (0, 0, 0)), (1, (F(1, 2), F(1, 3), F(1, 6)))],
)
def test_allocate_examples(t, gamma):
    assert allocate(Topology((3, 2, 1)), t).gamma == gamma


def test_allocate_follows_caller_labels():
    assert allocate(Topology((1, 2, 3)), 2).gamma == (F(5, 11), F(8, 11), F(9, 11))


@pytest.mark.parametrize("t", [-1, 4, F(1, 2)])
def test_allocate_range(t):
    with pytest.raises(InvalidArgumentError):
        allocate(Topology((3, 2, 1)), t)


@given(occupancies, st.data())
def test_allocation_sums_to_budget(L, data):
    topo = Topology(tuple(L))
    t = data.draw(st.integers(0, topo.Lambda))
    alloc = allocate(topo, t)
    assert alloc.total == t
    assert all(0 <= g <= 1 for g in alloc.gamma)


@given(occupancies, st.data())
def test_allocation_monotone_in_load(L, data):
    topo = Topology(tuple(L))
    t = data.draw(st.integers(0, topo.Lambda))
    gamma = allocate(topo, t).gamma
    for a in range(topo.Lambda):
        for b in range(topo.Lambda):
            if L[a] >= L[b]:
                assert gamma[a] >= gamma[b]


@given(st.integers(1, 5), st.integers(1, 6), st.data())
def test_allocation_uniform(c, lam, data):
    t = data.draw(st.integers(0, lam))
    assert allocate(Topology((c,) * lam), t).gamma == (F(t, lam),) * lam


@pytest.mark.parametrize(
    "t, alpha, lo, hi",
    [(F(3, 2), F(1, 2), 1, 2), (2, F(1), 2, 2), (F(7, 3), F(2, 3), 2, 3), ("0", F(1), 0, 0)],
)
def test_split_budget(t, alpha, lo, hi):
    share = split_budget(t)
    assert (share.alpha, share.floor_budget, share.ceil_budget) == (alpha, lo, hi)
    assert share.t == parse_rational(t)


def test_split_budget_range():
    with pytest.raises(InvalidArgumentError):
        split_budget(F(-1, 2))
    with pytest.raises(InvalidArgumentError):
        split_budget(4, Lambda=3)


@pytest.mark.parametrize(
    "L, t, T, expected",
    [((3, 2, 1), 2, F(6, 11), 3), ((1, 1), 1, F(1, 2), 2), ((2, 2), 1, F(1), 2)],
)
def test_dof_examples(L, t, T, expected):
    topo = Topology(L)
    assert dof(topo, allocate(topo, t), T) == expected


def test_dof_zero_time():
    topo = Topology((3, 2, 1))
    with pytest.raises(UndefinedDoFError):
        dof(topo, allocate(topo, 3), 0)


@given(st.lists(st.integers(1, 6), min_size=2, max_size=6), st.data())
def test_dof_equals_multicast_gain(L, data):
    topo = Topology(tuple(L))
    t = data.draw(st.integers(1, topo.Lambda - 1))
    T = F(elem_sym(L, t + 1), elem_sym(L, t))
    assert dof(topo, allocate(topo, t), T) == t + 1


@pytest.mark.parametrize(
    "raw, expected",
    [("3/2", F(3, 2)), (2, F(2)), (1.5, F(3, 2)), ("0.25", F(1, 4)), (F(5, 7), F(5, 7))],
)
def test_parse_rational(raw, expected):
    assert parse_rational(raw) == expected


@pytest.mark.parametrize("raw", ["x", "1/0", True, None, float("nan")])
def test_parse_rational_rejects(raw):
    with pytest.raises(InvalidArgumentError):
        parse_rational(raw)


def test_format_rational():
    assert format_rational(F(6, 11)) == "6/11"
    assert format_rational(F(3)) == "3/1"


def test_cache_budget_worst_case():
    topo = Topology((3, 2, 1))
    CacheBudget("3/2", 6).check_worst_case(topo)
    with pytest.raises(InvalidArgumentError):
        CacheBudget(1, 5).check_worst_case(topo)
    with pytest.raises(InvalidArgumentError):
        CacheBudget(4, 6).check_worst_case(topo)
