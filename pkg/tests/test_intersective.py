import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from primereg.errors import NoUnitRoot
from primereg.intersective import (
    aux_poly,
    check_aux,
    choose_zp,
    compute_rD,
    content_bound_scan,
    has_coprime_root,
    is_intersective_second_kind,
    lambda_of,
    obstruction_witness,
    padic_unit_roots,
    verify_no_witness,
)
from primereg.numtheory import factorint, sieve_primes
from primereg.poly import IntPoly, parse_poly, taylor_shift

PRODUCT_A = parse_poly("(x^2-13)(x^2-17)(x^2-221)")
PRODUCT_B = parse_poly("(x^3-19)(x^2+x+1)")


def unit_roots_brute(h, p, k):
    n = p**k
    return sorted(z for z in range(n) if z % p and h(z) % n == 0)


@pytest.mark.parametrize("poly,p,k", [("x^2-13", 3, 3), ("x^2-1", 5, 2), ("(x-1)^2", 7, 2), ("x^3-19", 3, 4), ("x^2+x+1", 7, 2)])
def test_padic_roots_match_exhaustive_scan_for_simple_factors(poly, p, k):
    h = parse_poly(poly)
    got = padic_unit_roots(h, p, k)
    for c in got:
        assert c.unit and c.z % p
        assert h(c.z) % p**k == 0
    # residues of genuine Z_p roots are congruence roots, and for simple roots every
    # congruence root lies in the Hensel class (mod p^(k-v)) of one of them
    brute = set(unit_roots_brute(h, p, k))
    assert {c.z for c in got} <= brute
    if all(c.m_p == 1 for c in got):
        for z in brute:
            assert any((z - c.z) % p ** (k - c.v) == 0 for c in got)


def test_padic_examples():
    assert [(c.z, c.m_p) for c in padic_unit_roots(parse_poly("x^2-13"), 3, 3)] == [(11, 1), (16, 1)]
    assert padic_unit_roots(parse_poly("x^2"), 5, 1) == []
    r = padic_unit_roots(parse_poly("(x-1)^2"), 7, 2)
    assert [(c.z, c.m_p, c.unit) for c in r] == [(1, 2, True)]


def test_choose_zp_examples():
    for p in (3, 5, 7, 11, 101):
        assert choose_zp(parse_poly("x^2-1"), p).z == 1
    c = choose_zp(parse_poly("x^2-13"), 3)
    assert (c.z, c.k) == (11, 3)
    assert choose_zp(parse_poly("(x-1)^2(x-3)"), 5).z == 3
    with pytest.raises(NoUnitRoot):
        choose_zp(parse_poly("x^2"), 5)


@pytest.mark.parametrize("h", [PRODUCT_A, PRODUCT_B, parse_poly("x^3-19"), parse_poly("(x-1)^2(x+2)")])
def test_certificates_are_hensel_sound(h):
    for p in sieve_primes(200).primes.tolist():
        try:
            c = choose_zp(h, p)
        except NoUnitRoot:
            continue
        assert c.hensel_ok
        assert h(c.z) % c.modulus == 0
        assert c.unit == (c.z % p != 0)


def test_verdict_examples():
    assert is_intersective_second_kind(parse_poly("x-1")).to_dict()["status"] == "CERTIFIED_YES"
    assert is_intersective_second_kind(IntPoly(())).status == "CERTIFIED_YES"
    v = is_intersective_second_kind(parse_poly("x^2"))
    assert (v.status, v.witness) == ("NO", 2)
    v = is_intersective_second_kind(parse_poly("x^2-13"))
    assert (v.status, v.witness) == ("NO", 13)
    assert v.minimal_witness == 5


@pytest.mark.parametrize("poly", ["x^2", "x^2-13", "x", "2x", "x^2+1", "x^3-2", "x^2-2"])
def test_no_verdicts_are_exhaustively_sound(poly):
    h = parse_poly(poly)
    v = is_intersective_second_kind(h, 2000)
    assert v.status == "NO"
    for n in {v.witness, v.minimal_witness}:
        assert verify_no_witness(h, n)
        assert not any(math.gcd(x, n) == 1 and h(x) % n == 0 for x in range(n))


def test_witness_for_x_squared_minus_13_is_forced_zero():
    h = parse_poly("x^2-13")
    assert [x for x in range(13) if h(x) % 13 == 0] == [0]


def test_exhaustive_power_policy_agrees():
    for poly in ["x^2-13", "x^2", "(x^2-13)(x^2-17)(x^2-221)"]:
        h = parse_poly(poly)
        a = is_intersective_second_kind(h, 300, power_policy="hensel")
        b = is_intersective_second_kind(h, 300, power_policy="exhaustive")
        assert a.status == b.status


def test_second_kind_products_scan_small_moduli():
    # independent oracle: a coprime root exists for every n <= 400
    for h in (PRODUCT_A, PRODUCT_B):
        assert all(has_coprime_root(h, n) for n in range(1, 401))


def test_lambda_examples():
    assert lambda_of(parse_poly("x^2-1"), 12) == 12
    assert lambda_of(parse_poly("(x-1)^2"), 6) == 36


@given(st.integers(1, 1000), st.integers(1, 1000))
def test_lambda_completely_multiplicative(m, n):
    h = parse_poly("(x-1)^2(x+1)")
    assert lambda_of(h, m * n) == lambda_of(h, m) * lambda_of(h, n)


def test_rD_examples():
    assert compute_rD(parse_poly("x^2-1"), 6) == -5
    assert compute_rD(parse_poly("x^2-5"), 1) == 0
    assert compute_rD(parse_poly("x^2-13"), 3) == -1


def test_aux_examples():
    a = aux_poly(parse_poly("x^2-1"), 3)
    assert (a.lam, a.r_D, a.h_D) == (3, -2, IntPoly((1, -4, 3)))
    a = aux_poly(parse_poly("x^2-1"), 2)
    assert (a.lam, a.r_D, a.h_D) == (2, -1, IntPoly((0, -2, 2)))
    h = parse_poly("x^3+5x-7")
    assert aux_poly(h, 1).h_D == h


@pytest.mark.parametrize("h", [parse_poly("x^2-1"), PRODUCT_A, PRODUCT_B])
def test_aux_identities_and_residues(h):
    for D in range(1, 121):
        a = aux_poly(h, D)
        assert check_aux(h, a) == []
        for p, e in factorint(D):
            assert a.r_D % p**e == choose_zp(h, p).z % p**e or e > choose_zp(h, p).k


def test_aux_rD_refines_beyond_certificate_precision():
    h = parse_poly("x^2-1")
    a = aux_poly(h, 3**6)
    assert a.r_D % 3**6 == 1
    assert taylor_shift(h, a.r_D, a.D) == a.h_D * a.lam


def test_content_scan():
    assert content_bound_scan(parse_poly("x^2-1"), 500).maximum <= 2
    assert content_bound_scan(parse_poly("x-1"), 50).maximum == 1
    scan = content_bound_scan(PRODUCT_A, 100)
    assert 1 <= scan.maximum < math.inf
    scan = content_bound_scan(parse_poly("x^3-19"), 30)
    assert 7 in scan.skipped and 7 not in scan.contents


def test_obstruction_witness_examples():
    assert obstruction_witness((1, 1, -1), 0, parse_poly("x")) == 2
    assert obstruction_witness((1, -1), 0, parse_poly("x^2")) is None
    assert obstruction_witness((1, 1, 1, -1, -1), 0, parse_poly("x^2")) == 2
