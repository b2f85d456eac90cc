import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from primereg.errors import DomainError, GuardError
from primereg.numtheory import sieve_primes
from primereg.poly import parse_poly
from primereg.ramsey import (
    Coloring,
    EquationSpec,
    color_experiment,
    count_all_tuples,
    count_nonconstant,
    count_solutions,
    count_solutions_brute,
    dense_experiment,
    dr_verdict,
    obstruction_check,
    pr_verdict,
    s0_threshold,
    scaling_ratio,
    select_dense,
    set_partitions,
    zero_sum_subset,
)

SQ = parse_poly("x^2")
LIN = parse_poly("x")
P50 = sieve_primes(50).upto(50)


def spec(a, b=0, h=SQ):
    return EquationSpec(tuple(a), b, h)


def test_spec_validation():
    with pytest.raises(DomainError):
        spec([1, 0, -1])
    with pytest.raises(DomainError):
        spec([])
    with pytest.raises(DomainError):
        EquationSpec((1, -1), 0, parse_poly("5"))


# ---------------------------------------------------------------- verdicts


def test_pr_trivial_remark_case():
    v = pr_verdict(spec([1, 1, -2]))
    assert v.pr and v.I == (1, 2, 3) and v.m == 1


def test_pr_zero_sum_nonzero_b():
    assert not pr_verdict(spec([1, -1], 3)).pr


def test_pr_subtle_no_case():
    v = pr_verdict(spec([1, 1, 1, -1, -1]))
    assert not v.pr
    assert v.m == 0 and v.I is not None
    assert sum((1, 1, 1, -1, -1)[i - 1] for i in v.I) == 0
    assert v.intersectivity.witness == 2


def test_pr_linear_schur_fails():
    v = pr_verdict(spec([1, 1, -1], h=LIN))
    assert not v.pr and v.intersectivity.witness == 2


def test_pr_shifted_yes():
    # 2x^2 + y^2 - 2z^2 ... sum 1, b = 1 forces m = 1 and x^2 - 1 has root 1
    v = pr_verdict(spec([2, 1, -2], 1))
    assert v.pr and v.m == 1 and v.I == (1, 3)


def test_pr_b_not_multiple():
    v = pr_verdict(spec([2, 2, -1], 2))
    assert not v.pr and "multiple" in v.reason


def test_pr_no_zero_subset():
    v = pr_verdict(spec([1, 2, 4], 7))
    assert not v.pr and v.m == 1 and v.I is None


@pytest.mark.parametrize("a,b,want", [((2, -2, 3, -3), 0, True), ((1, 1, -1), 0, False), ((1, -1), 1, False)])
def test_dr_examples(a, b, want):
    assert dr_verdict(spec(a, b)) is want


@pytest.mark.parametrize("d,s0", [(2, 5), (3, 9), (4, 19)])
def test_s0_threshold(d, s0):
    r = s0_threshold(d)
    assert r.s0_upper == s0 == 2 * r.T_upper + 1
    assert r.s0_lower == 2 * d + 1


@settings(max_examples=40)
@given(st.lists(st.integers(-6, 6).filter(bool), min_size=1, max_size=7), st.integers(-5, 5))
def test_verdict_invariants(a, b):
    v = pr_verdict(spec(a, b), B=200)
    if v.dr:
        assert v.pr
    if v.pr:
        assert v.I and sum(a[i - 1] for i in v.I) == 0
        assert b == sum(a) * v.m
        assert v.intersectivity.is_yes
    assert v.dr == (b == 0 and sum(a) == 0)


@given(st.lists(st.integers(-20, 20).filter(bool), min_size=1, max_size=12))
def test_zero_sum_subset_oracle(a):
    got = zero_sum_subset(a)
    brute = [
        I for r in range(1, len(a) + 1) for I in itertools.combinations(range(len(a)), r) if sum(a[i] for i in I) == 0
    ]
    if not brute:
        assert got is None
    else:
        assert got is not None and sum(a[i] for i in got) == 0
        assert len(got) == min(len(I) for I in brute)


def test_zero_sum_guard():
    with pytest.raises(GuardError):
        zero_sum_subset([1] * 31)


# ---------------------------------------------------------------- counting


@pytest.mark.parametrize("n,bell", [(0, 1), (1, 1), (3, 5), (5, 52), (6, 203)])
def test_set_partition_counts(n, bell):
    parts = list(set_partitions(n))
    assert len(parts) == bell
    for p in parts:
        assert sorted(x for blk in p for x in blk) == list(range(n))


def test_too_few_primes():
    assert count_solutions([2, 3], spec([1, 1, 1, -1, -1, -1])) == 0


def test_injective_pair_has_no_distinct_solution():
    assert count_solutions(sieve_primes(2000).upto(2000), spec([1, -1])) == 0


def test_p50_matches_brute():
    s = spec([1, 1, 1, -1, -1, -1])
    c = count_solutions(P50, s)
    assert c == count_solutions_brute(P50, s)
    assert c > 0


@settings(max_examples=30)
@given(
    A=st.sets(st.sampled_from(sieve_primes(80).upto(80).tolist()), min_size=0, max_size=12),
    a=st.lists(st.integers(-3, 3).filter(bool), min_size=1, max_size=5),
    b=st.integers(-30, 30),
    h=st.sampled_from(["x", "x^2", "x^2-1", "x^3-2x"]),
)
def test_count_matches_brute(A, a, b, h):
    s = EquationSpec(tuple(a), b, parse_poly(h))
    assert count_solutions(A, s) == count_solutions_brute(A, s)


@settings(max_examples=15)
@given(st.permutations([1, 2, -1, -2, 3]))
def test_count_symmetric_under_permutation(a):
    A = sieve_primes(60).upto(60)
    assert count_solutions(A, spec(a, 0, LIN)) == count_solutions(A, spec([1, 2, -1, -2, 3], 0, LIN))


def test_all_tuples_brute():
    A = [2, 3, 5, 7, 11]
    s = spec([1, 1, -1, -1])
    brute = sum(1 for t in itertools.product(A, repeat=4) if t[0] ** 2 + t[1] ** 2 == t[2] ** 2 + t[3] ** 2)
    assert count_all_tuples(A, s) == brute
    assert count_nonconstant(A, s) == brute - len(A)


def test_scaling_ratio():
    assert scaling_ratio(10, 100, 2, 3) == pytest.approx(10 * 100**2 * (math.log(100) / 100) ** 3)


# ---------------------------------------------------------------- experiments


def test_single_colour_equals_plain_count():
    s = spec([1, 1, -1, -1], 0, LIN)
    rep = color_experiment(200, Coloring(1, "random", seed=3), s)
    assert rep.counts == [count_solutions(sieve_primes(200).upto(200), s)]


def test_colour_counts_bounded_by_total():
    s = spec([1, 1, -1, -1], 0, LIN)
    rep = color_experiment(300, Coloring(3, "random", seed=11), s)
    assert sum(rep.counts) <= count_solutions(sieve_primes(300).upto(300), s)
    assert rep.counts[rep.best] == max(rep.counts) > 0


def test_colouring_policies():
    ps = sieve_primes(100).upto(100)
    assert set(Coloring(2, "residue", modulus=2).assign(ps, 100).tolist()) == {0, 1}
    blocks = Coloring(4, "blocks").assign(ps, 100)
    assert blocks.tolist() == sorted(blocks.tolist()) and blocks.max() == 3
    c = Coloring.from_dict({"assignment": {str(p): int(p) % 3 for p in ps}})
    assert c.policy == "explicit" and c.r == 3
    assert c.assign(ps, 100).tolist() == (ps % 3).tolist()
    with pytest.raises(DomainError):
        c.assign(np.array([101]), 101)
    assert Coloring.from_dict(c.to_dict()) == c


def test_dense_full_density_is_plain_count():
    s = spec([1, 1, -1, -1])
    assert dense_experiment(300, 1.0, s).count == count_solutions(sieve_primes(300).upto(300), s)


def test_dense_tiny_set_is_zero():
    assert dense_experiment(100, 0.1, spec([1, 1, 1, -1, -1, -1])).count == 0


@pytest.mark.parametrize("policy", ["random", "top", "ap"])
def test_select_dense_policies(policy):
    A = select_dense(1000, 0.5, policy, seed=1)
    ps = sieve_primes(1000).upto(1000)
    assert set(A.tolist()) <= set(ps.tolist())
    if policy != "ap":
        assert len(A) == math.ceil(0.5 * len(ps))


def test_obstruction_linear():
    n, nonconst = obstruction_check(spec([1, 1, -1], 0, LIN), 100)
    assert n == 2 and nonconst == [0, 0]


def test_obstruction_absent_for_regular_equation():
    n, _ = obstruction_check(spec([1, 1, -2]), 100)
    assert n is None
