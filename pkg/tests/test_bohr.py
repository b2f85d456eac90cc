import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from primereg.bohr import (
    BohrSpec,
    bohr_enumerate,
    delta_exponent,
    density_certificate,
    harman_box,
    harman_search,
    low_major_arc,
    membership,
    random_alpha,
)
from primereg.errors import DomainError, GuardError
from primereg.numtheory import sieve_primes
from primereg.poly import parse_poly

SQ = parse_poly("x^2")


def frac_dist(x: Fraction) -> Fraction:
    f = x - math.floor(x)
    return min(f, 1 - f)


def theta(P: int) -> float:
    return float(sum(math.log(p) for p in sieve_primes(P).upto(P)))


def test_zero_phase_takes_everything():
    c = bohr_enumerate(BohrSpec(SQ, (0, 0), Fraction(1, 10), 1000))
    assert c.complement_count == 0
    assert c.member_count == len(sieve_primes(1000).upto(1000))
    assert c.log_mass == pytest.approx(theta(1000), rel=1e-12)


def test_half_phase_keeps_only_two():
    c = bohr_enumerate(BohrSpec(SQ, (Fraction(1, 2),), Fraction(3, 10), 100))
    assert c.members.tolist() == [2]


def test_wide_radius_empties_complement():
    c = bohr_enumerate(BohrSpec(parse_poly("x^3-19"), (Fraction(7, 13),), Fraction(3, 5), 2000, D=2))
    assert c.complement_count == 0 and c.member_count == c.eligible_count


def test_bad_radius():
    with pytest.raises(DomainError):
        BohrSpec(SQ, (0,), Fraction(0), 10)
    with pytest.raises(DomainError):
        BohrSpec(SQ, (), Fraction(1, 3), 10)


@settings(max_examples=40)
@given(
    num=st.integers(0, 10**6), den=st.integers(1, 10**6),
    rho=st.fractions(Fraction(1, 50), Fraction(99, 100)), D=st.sampled_from([1, 2, 3, 4, 6, 12]),
)
def test_membership_matches_fraction_oracle(num, den, rho, D):
    h = parse_poly("x^2-1")
    spec = BohrSpec(h, (Fraction(num, den),), rho, 600, D=D)
    lam = spec.aux().lam
    ps = sieve_primes(600).upto(600)
    got = membership(spec, ps)
    want = [frac_dist(Fraction(num * h(int(p)), den * lam)) < rho for p in ps]
    assert got.tolist() == want


def test_partition_identity_random_specs():
    rng = np.random.default_rng(7)
    for i in range(100):
        K = int(rng.integers(1, 4))
        rho = Fraction(int(rng.integers(1, 100)), 100)
        D = [1, 2, 4][i % 3]
        spec = BohrSpec(SQ if D == 1 else parse_poly("x^2-1"), random_alpha(rng, K), rho, 3000, D=D)
        assert bohr_enumerate(spec).partition_ok()


def test_monotone_in_radius():
    alpha = (Fraction(3, 7), Fraction(5, 11))
    sizes = [bohr_enumerate(BohrSpec(SQ, alpha, Fraction(k, 20), 5000)).member_count for k in range(1, 11)]
    assert sizes == sorted(sizes)


def test_threads_do_not_change_census():
    spec = BohrSpec(SQ, (Fraction(12345, 1 << 20),), Fraction(1, 7), 50000)
    a, b = bohr_enumerate(spec, 1, chunk=1000), bohr_enumerate(spec, 4, chunk=777)
    assert a.members.tolist() == b.members.tolist()
    assert a.log_mass == b.log_mass


@pytest.mark.parametrize("K,d,E", [(1, 2, 5), (2, 2, 17), (3, 2, 43), (1, 3, 6)])
def test_delta_exponent_examples(K, d, E):
    assert delta_exponent(K, d) == E


@pytest.mark.parametrize("d", [1, 2, 3, 5])
def test_delta_exponent_fold(d):
    # closed-form fold of the recursion E(K) = 3 + K d + 2 E(K-1)
    for K in range(1, 11):
        E = (d + 3) * 2 ** (K - 1) + sum(2 ** (K - k) * (3 + k * d) for k in range(2, K + 1))
        assert delta_exponent(K, d) == E


def test_delta_exponent_guard():
    with pytest.raises(DomainError):
        delta_exponent(0, 2)


def test_density_floor_base_case():
    r = density_certificate(BohrSpec(SQ, (0,), Fraction(1, 10), 10**4))
    assert r.floor == pytest.approx(1e-5)
    assert r.passed and r.measured == pytest.approx(1, rel=0.05)


def test_harman_box_order():
    box = harman_box(1, Fraction(1, 2))
    assert box[:2] == [(-1,), (1,)]
    assert len(box) == 4
    with pytest.raises(GuardError):
        harman_box(3, Fraction(1, 100))


def test_harman_half_phase():
    w = harman_search(BohrSpec(SQ, (Fraction(1, 2),), Fraction(3, 10), 1000))
    assert abs(w.m[0]) == 1
    assert w.inequality_holds


def test_harman_degenerate_when_complement_empty():
    w = harman_search(BohrSpec(SQ, (Fraction(1, 3),), Fraction(3, 5), 500))
    assert w.degenerate and w.lhs == 0 and w.rhs == 0


@settings(max_examples=12)
@given(
    seed=st.integers(0, 2**32 - 1), K=st.integers(1, 2),
    rho=st.sampled_from([Fraction(1, 2), Fraction(1, 3), Fraction(1, 4), Fraction(1, 5)]),
    P=st.integers(100, 20000),
)
def test_harman_inequality_holds(seed, K, rho, P):
    spec = BohrSpec(SQ, random_alpha(np.random.default_rng(seed), K), rho, P)
    w = harman_search(spec)
    assert w.degenerate or w.inequality_holds, w.to_dict()


def test_low_major_arc_rational():
    r = low_major_arc(Fraction(3, 10), L=4, P=1000, d=2)
    assert (r.q, r.a) == (10, 3) and r.gap == 0 and r.ok


def test_low_major_arc_far_denominator():
    r = low_major_arc(Fraction(1, 997), L=3, P=10**4, d=2)
    assert r.q <= r.Qmax == 27
    assert not r.q_bound_ok or not r.gap_bound_ok or r.q == 1


@given(st.fractions(0, 1), st.integers(2, 6), st.integers(1, 3))
def test_low_major_arc_dirichlet(t, L, d):
    r = low_major_arc(t, L, 10**6, d)
    assert 1 <= r.q <= r.Qmax
    assert r.gap <= 1 / (r.Qmax + 1) + 1e-15
