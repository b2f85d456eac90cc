import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from primereg.errors import ConstructionError, DomainError, GuardError
from primereg.intersective import aux_poly
from primereg.numtheory import sieve_primes
from primereg.poly import IntPoly, parse_poly
from primereg.weights import (
    WeightTable,
    align_X,
    build_mu,
    build_mu_D,
    build_nu,
    build_nu_D,
    build_wtrick,
    decay_report,
    fourier_eval,
    fourier_grid,
    image_of,
    interval_transform,
    nu_mass_on,
    phi_count,
    quadruple_count,
    qz_inverse,
    restriction_moment,
    wtrick_S,
)

CUBE = parse_poly("x^3-19")


@pytest.fixture(scope="module")
def cube_params():
    return build_wtrick(CUBE, 2, 2, 10**4, align=True)


def test_wtrick_examples(cube_params):
    p = cube_params
    assert (p.W, p.D, p.b0, p.g) == (4, 16, 1, 1)
    assert p.kappa * 4 == aux_poly(CUBE, 16).lam
    assert all(p.identities().values())
    with pytest.raises(ConstructionError):
        build_wtrick(parse_poly("x^2-1"), 2, 1, 1000, align=True)
    with pytest.raises(GuardError):
        build_wtrick(CUBE, 5, 100 * 3 * 5, 10**6)


def test_wtrick_requires_alignment():
    with pytest.raises(DomainError):
        build_wtrick(CUBE, 2, 2, 10**4 + 1 if (10**4 + 1 + 5) % 16 else 10**4 + 2)
    X = align_X(10**4, -5, 16)
    assert (X + 5) % 16 == 0 and 10**4 - 16 < X <= 10**4


@pytest.mark.parametrize("poly,w,gamma", [("x^3-19", 2, 2), ("x^2-1", 3, 2), ("(x^2-13)(x^2-17)(x^2-221)", 2, 10), ("x^3-19", 3, 2)])
def test_wtrick_identities(poly, w, gamma):
    p = build_wtrick(parse_poly(poly), w, gamma, 10**7, align=True)
    assert all(p.identities().values()), p.identities()


@pytest.mark.parametrize("poly,w,gamma", [("(x^2-13)(x^2-17)(x^2-221)", 2, 2), ("x^3-19", 3, 1)])
def test_wtrick_no_admissible_residue(poly, w, gamma):
    # h'(b) shares too large a factor with W for every unit b
    with pytest.raises(ConstructionError):
        build_wtrick(parse_poly(poly), w, gamma, 10**5, align=True)


def test_nu_definition_against_loop(cube_params):
    p = cube_params
    nu = build_nu(p)
    want = {}
    for q in sieve_primes(p.X).primes.tolist():
        if p.b < q <= p.X and q % p.modulus == p.b % p.modulus:
            n = (CUBE(q) - CUBE(p.b)) // p.lam
            want[n] = want.get(n, 0) + 2 / (4 * 1) * 3 * q * q * math.log(q)
    assert set(nu.keys.tolist()) == set(want)
    for k, v in want.items():
        assert nu.get(k) == pytest.approx(v, rel=1e-12)
    assert len(set(nu.keys.tolist())) == len(nu)  # injective on primes past b


def test_nu_empty_progression():
    p = build_wtrick(CUBE, 2, 2, 11)  # first prime = 1 (mod 16) is 17
    assert len(build_nu(p)) == 0


def test_nu_dominated_by_mu(cube_params):
    nu, mu = build_nu(cube_params), build_mu(cube_params)
    L = math.log(cube_params.X)
    # phi(W) log X mu / (W g) ... here phi(4)/4 = 1/2 < 1 so nu <= (log X) mu
    for k, v in zip(nu.keys.tolist(), nu.values.tolist()):
        assert v <= L * mu.get(k) * (1 + 1e-12)


def test_mu_mass_is_order_N(cube_params):
    mu = build_mu(cube_params)
    assert 0.5 < mu.mass / cube_params.N < 1.5


def test_mu_D_values_are_multiples():
    h = parse_poly("x^2-1")
    t = build_mu_D(h, 6, 6000)
    aux = aux_poly(h, 6)
    Z = (6000 - aux.r_D) // 6
    unit = aux.h_D(Z) * 6 / 6000
    assert np.allclose(t.values / unit, np.round(t.values / unit))


def test_nu_D_support_inside_image():
    h = parse_poly("x^2-1")
    t = build_nu_D(h, 6, 6000)
    aux = aux_poly(h, 6)
    Z = (6000 - aux.r_D) // 6
    image = {aux.h_D(z) for z in range(0, Z + 1)}
    assert set(t.keys.tolist()) <= image
    assert all(1 <= k <= t.N for k in t.keys.tolist())


def test_serialisation_round_trips(cube_params):
    nu = build_nu(cube_params)
    assert WeightTable.from_bytes(nu.to_bytes()).same_as(nu)
    assert WeightTable.from_json(nu.to_json()).same_as(nu)
    assert WeightTable.from_json(nu.to_json()).to_bytes() == nu.to_bytes()


def test_fourier_examples():
    t = WeightTable.from_pairs(1, [1], [1.0])
    assert abs(fourier_eval(t, Fraction(1, 2)) + 1) < 1e-15
    ind = WeightTable.indicator(500)
    for al in (Fraction(1, 7), 0.3141, Fraction(355, 1130)):
        assert abs(fourier_eval(ind, al) - interval_transform(500, al)) < 1e-9 * 500


@given(st.lists(st.tuples(st.integers(1, 200), st.floats(0, 10)), min_size=1, max_size=40))
def test_fourier_grid_parseval_and_direct(pairs):
    k, v = zip(*pairs)
    t = WeightTable.from_pairs(200, k, v)
    M = 401
    g = fourier_grid(t, M)
    sq = float((t.values**2).sum())
    assert abs(np.mean(np.abs(g) ** 2) - sq) <= 1e-9 * max(sq, 1)
    for j in (0, 1, 57, 400):
        assert abs(g[j] - fourier_eval(t, Fraction(j, M))) <= 1e-9 * max(t.mass, 1)


def test_decay_report_rows(cube_params):
    nu = build_nu(cube_params)
    rep = decay_report(nu, cube_params.N, samples=32, qmax=8)
    assert rep.alpha0_row == pytest.approx(abs(nu.mass - cube_params.N) / cube_params.N)
    assert rep.max_value >= rep.alpha0_row


def test_moment_examples():
    t = WeightTable.from_pairs(50, [3, 8, 20], [2.0, 1.0, 3.0])
    assert restriction_moment(t, 2).value == pytest.approx(14.0)
    for N in (1, 2, 7, 30, 100):
        ind = WeightTable.indicator(N)
        brute = quadruple_count(N)
        if N <= 30:
            r = range(1, N + 1)
            brute = sum(1 for a in r for b in r for c in r if 1 <= a + b - c <= N)
        assert restriction_moment(ind, 4).value == brute == (2 * N**3 + N) // 3


@given(st.lists(st.integers(1, 300), min_size=1, max_size=60, unique=True), st.sampled_from([2, 4]))
def test_moment_methods_agree(support, E):
    t = WeightTable.from_pairs(300, support, np.ones(len(support)))
    ex = restriction_moment(t, E).value
    qu = restriction_moment(t, E, method="quadrature").value
    assert abs(ex - qu) <= 1e-6 * ex


def test_moment_exact_needs_even():
    with pytest.raises(DomainError):
        restriction_moment(WeightTable.indicator(5), 3)


def test_phi_count_examples():
    A = WeightTable.indicator(40, [2, 3, 5, 7, 11, 13])
    assert phi_count([A, A], [], [1, -1], []) == 6
    I = WeightTable.indicator(10)
    assert phi_count([I], [I], [1], [1]) == 10


@given(st.lists(st.tuples(st.integers(1, 60), st.integers(1, 5)), min_size=1, max_size=12),
       st.lists(st.tuples(st.integers(1, 60), st.integers(1, 5)), min_size=1, max_size=12),
       st.lists(st.integers(-3, 3).filter(bool), min_size=2, max_size=2),
       st.integers(-3, 3).filter(bool))
def test_phi_count_brute(f_pairs, g_pairs, L1, c2):
    f = WeightTable.from_pairs(60, *zip(*f_pairs))
    g = WeightTable.from_pairs(60, *zip(*g_pairs))
    brute = 0.0
    for n1, v1 in zip(f.keys.tolist(), f.values.tolist()):
        for n2, v2 in zip(g.keys.tolist(), g.values.tolist()):
            for m, vm in zip(f.keys.tolist(), f.values.tolist()):
                if L1[0] * n1 + L1[1] * n2 == c2 * m:
                    brute += v1 * v2 * vm
    assert phi_count([f, g], [f], L1, [c2]) == pytest.approx(brute)


def test_qz_inverse():
    sq = parse_poly("x^2")
    assert qz_inverse(sq, 100, 0.5, 3600) == 60
    assert qz_inverse(sq, 100, 0.5, 3601) == 0
    assert qz_inverse(sq, 100, 0.5, 100) == 0  # preimage 10 lies below eta Z
    h3 = IntPoly((1, -4, 3))
    assert qz_inverse(h3, 1000, 0.1, h3(700)) == 700
    with pytest.raises(DomainError):
        qz_inverse(parse_poly("-x^2"), 100, 0.5, -3600)


def test_nu_mass_on(cube_params):
    nu = build_nu(cube_params)
    assert nu_mass_on(nu, nu.keys.tolist()) == pytest.approx(nu.mass)
    assert nu_mass_on(nu, []) == 0
    primes = sieve_primes(cube_params.X).primes.tolist()
    A = image_of(cube_params, [p for p in primes if p % 3 == 1])
    assert nu_mass_on(nu, A) >= 0.2 * cube_params.N


def test_vanishing_identity(cube_params):
    for q in range(2, 51):
        if math.gcd(q, cube_params.W) > 1:
            for a in (1, 3):
                if math.gcd(a, q) == 1:
                    assert abs(wtrick_S(cube_params, q, a)) < 1e-9
