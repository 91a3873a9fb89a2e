from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import divisors
from sympy.functions.combinatorial.numbers import kronecker_symbol

from cmll.errors import ValidationError
from cmll.ideals import (
    FracIdeal,
    ideal_from_gens,
    ideals_of_norm,
    ideals_up_to,
    one_ideal,
    one_mod_f,
    primes_above,
    principal_ideal,
)
from cmll.quadfield import FieldElt, QuadInt, make_field


def brute_force_ideals(K, n):
    """HNF lattices Z*a + Z*(b + c*w) of index n that are closed under w."""
    out = []
    for c in divisors(n):
        a = n // c
        if a % c:
            continue
        for b in range(a):
            if b % c:
                continue
            L = FracIdeal(K, a, b, c)
            if all(L.contains(g * K.omega) for g in (QuadInt(a, 0, K), QuadInt(b, c, K))):
                out.append(L.hnf)
    return sorted(out)


@pytest.mark.parametrize("d", [1, 2, 3, 5, 6, 7, 15, 23])
def test_ideal_counts_match_dirichlet_character(d):
    K = make_field(d)
    for n in range(1, 61):
        expected = sum(kronecker_symbol(K.disc, m) for m in divisors(n))
        assert len(ideals_of_norm(K, n)) == expected


@pytest.mark.parametrize("d", [1, 5, 7])
def test_ideal_enumeration_matches_brute_force(d):
    K = make_field(d)
    for n in range(1, 40):
        assert sorted(i.hnf for i in ideals_of_norm(K, n)) == brute_force_ideals(K, n)


@pytest.mark.parametrize("d", [1, 2, 3, 5, 14])
def test_norm_multiplicative_and_factorization(d):
    K = make_field(d)
    ideals = list(ideals_up_to(K, 30))
    for a in ideals[::3]:
        for b in ideals[::4]:
            ab = a * b
            assert ab.norm() == a.norm() * b.norm()
            assert ab.factor().product(K) == ab
            assert (ab / b) == a
            assert a.divides(ab)


@pytest.mark.parametrize("d", [1, 2, 3, 5, 23])
def test_inverse_of_fractional(d):
    K = make_field(d)
    one = one_ideal(K)
    for a in ideals_up_to(K, 25):
        assert a * a.inverse() == one
        assert (a ** -2) * a ** 2 == one


def test_examples_d5():
    K = make_field(5)
    p2 = ideal_from_gens(K, [2, QuadInt(1, 1, K)])
    assert p2.hnf == (2, 1, 1)
    assert p2.is_prime() and p2.norm_int() == 2
    assert p2.generator() is None
    assert p2 * p2 == principal_ideal(K, 2)
    p3 = ideal_from_gens(K, [3, QuadInt(1, 1, K)])
    assert (p2 * p3).generator() is not None


@pytest.mark.parametrize("d, ell, kind", [(1, 2, 1), (1, 5, 2), (1, 3, 1), (5, 5, 1), (5, 3, 2), (5, 7, 2), (3, 3, 1), (3, 2, 1), (7, 2, 2)])
def test_primes_above(d, ell, kind):
    K = make_field(d)
    ps = primes_above(K, ell)
    assert len(ps) == kind
    prod = one_ideal(K)
    for p in ps:
        assert p.is_prime()
        prod = prod * p ** (2 if p.norm_int() == ell and len(ps) == 1 else 1)
    assert prod == principal_ideal(K, ell)


@pytest.mark.parametrize("d", [1, 2, 3, 5, 6, 7, 10, 14, 15, 21, 23])
@settings(max_examples=25, deadline=None)
@given(a=st.integers(-12, 12), b=st.integers(-12, 12))
def test_principal_generator_is_recovered(d, a, b):
    K = make_field(d)
    x = QuadInt(a, b, K)
    if not x:
        return
    I = principal_ideal(K, x)
    g = I.generator()
    assert g is not None
    assert principal_ideal(K, g) == I
    assert abs(g.norm()) == abs(x.norm())


@pytest.mark.parametrize("d", [1, 5, 23])
def test_element_prime_to(d):
    K = make_field(d)
    f = principal_ideal(K, 6)
    for a in ideals_up_to(K, 30):
        if not a.is_coprime(f):
            with pytest.raises(ValidationError):
                a.element_prime_to(f)
            continue
        z = a.element_prime_to(f)
        assert a.contains(z)
        assert principal_ideal(K, z).is_coprime(f)


def test_one_mod_f():
    K = make_field(1)
    f = principal_ideal(K, 3)
    assert one_mod_f(QuadInt(4, 3, K), f)
    assert not one_mod_f(QuadInt(2, 0, K), f)
    # multiplicative congruence for fractions: 4/7 = 1 mod* 3
    assert one_mod_f(FieldElt(QuadInt(4, 0, K), 7), f)
    with pytest.raises(ValidationError):
        one_mod_f(0, f)


def test_zero_ideal_rejected():
    with pytest.raises(ValidationError):
        ideal_from_gens(make_field(1), [0])


def test_denominators_are_coprime_to_hnf_scaling():
    K = make_field(2)
    I = ideal_from_gens(K, [FieldElt(QuadInt(1, 0, K), 6)])
    assert I.den == 6 and I.hnf == (1, 0, 1)
    assert gcd(I.den, 1) == 1
    assert I.norm() * 36 == 1
