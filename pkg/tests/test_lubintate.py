from fractions import Fraction
from math import comb

import pytest

from cmll.errors import ValidationError
from cmll.lubintate import (
    PadicCoeffRing,
    PadicSeries,
    canonical_f,
    frobenius_congruence_check,
    law_axioms_report,
    lt_construct,
    lt_isomorphism_check,
    multiplicative_f,
    series_compose,
    torsion_quotient,
)
from cmll.quadfield import QuadInt, make_field


# -- an exact rational oracle over Q for f = p*T + T^p --------------------------------


def _bmul(a, b, D):
    out = {}
    for (i1, j1), x in a.items():
        for (i2, j2), y in b.items():
            if i1 + j1 + i2 + j2 <= D:
                k = (i1 + i2, j1 + j2)
                out[k] = out.get(k, 0) + x * y
    return out


def _apply_f(p, G, D):
    """f(G) = p*G + G^p for a bivariate G."""
    out = {k: p * v for k, v in G.items()}
    power = {(0, 0): Fraction(1)}
    for _ in range(p):
        power = _bmul(power, G, D)
    for k, v in power.items():
        out[k] = out.get(k, 0) + v
    return out


def _compose_law(F, fx, fy, D):
    """F(fx, fy) for bivariate F and fx, fy bivariate (in X only / Y only)."""
    out = {}
    xp = [{(0, 0): Fraction(1)}]
    yp = [{(0, 0): Fraction(1)}]
    for _ in range(D):
        xp.append(_bmul(xp[-1], fx, D))
        yp.append(_bmul(yp[-1], fy, D))
    for (i, j), c in F.items():
        for k, v in _bmul(xp[i], yp[j], D).items():
            out[k] = out.get(k, 0) + c * v
    return out


def rational_law(p, D):
    F = {(1, 0): Fraction(1), (0, 1): Fraction(1)}
    fx = _apply_f(p, {(1, 0): Fraction(1)}, D)
    fy = _apply_f(p, {(0, 1): Fraction(1)}, D)
    for r in range(2, D + 1):
        lhs = _compose_law(F, fx, fy, r)
        rhs = _apply_f(p, F, r)
        for i in range(r + 1):
            e = lhs.get((i, r - i), 0) - rhs.get((i, r - i), 0)
            if e:
                F[(i, r - i)] = -e / (p ** r - p)
    return F


def rational_endo(p, a, D):
    """[a](T) over Q: a*T + ... commuting with f."""
    g = {(1, 0): Fraction(a)}
    fx = _apply_f(p, {(1, 0): Fraction(1)}, D)
    for r in range(2, D + 1):
        lhs = _compose_law(g, fx, {}, r)
        rhs = _apply_f(p, g, r)
        e = lhs.get((r, 0), 0) - rhs.get((r, 0), 0)
        if e:
            g[(r, 0)] = -e / (p ** r - p)
    return [g.get((k, 0), 0) for k in range(D + 1)]


def mod(x, m):
    x = Fraction(x)
    return x.numerator * pow(x.denominator, -1, m) % m


@pytest.mark.parametrize("p, D, N", [(2, 8, 6), (3, 9, 4), (5, 6, 3)])
def test_law_matches_rational_oracle(p, D, N):
    R = PadicCoeffRing(None, p, N)
    M = lt_construct(R, canonical_f(R, D), D)
    oracle = rational_law(p, D)
    keys = set(oracle) | set(M.law.coeffs)
    for k in keys:
        assert M.law.coeffs.get(k, 0) == mod(oracle.get(k, 0), p ** N), k


@pytest.mark.parametrize("p, a", [(2, 3), (3, 2), (3, 7), (5, 2), (2, -1)])
def test_endo_matches_rational_oracle(p, a):
    D, N = 7, 4
    R = PadicCoeffRing(None, p, N)
    M = lt_construct(R, canonical_f(R, D), D)
    assert list(M.endo(a).coeffs) == [mod(c, p ** N) for c in rational_endo(p, a, D)]


def test_multiplicative_law_is_exact():
    R = PadicCoeffRing(None, 2, 16)
    M = lt_construct(R, multiplicative_f(R, 32), 32)
    assert M.law.coeffs == {(1, 0): 1, (0, 1): 1, (1, 1): 1}
    for a in range(11):
        assert M.endo(a) == PadicSeries.from_list(R, [0] + [comb(a, k) for k in range(1, 33)], 32)


FIELDS = [
    (None, 2),
    (None, 3),
    (None, 5),
    (3, 2),  # 2 is inert in Q(sqrt(-3)), q = 4
    (1, (1, 1)),
    (5, (0, 1)),
]


def _ring(d, pi, N):
    if d is None:
        return PadicCoeffRing(None, pi, N)
    K = make_field(d)
    pi = QuadInt(*pi, K) if isinstance(pi, tuple) else QuadInt(pi, 0, K)
    return PadicCoeffRing(K, pi, N)


@pytest.mark.parametrize("d, pi", FIELDS)
def test_axioms_and_frobenius(d, pi):
    R = _ring(d, pi, 8)
    M = lt_construct(R, canonical_f(R, 16), 16)
    assert law_axioms_report(M)["pass"]
    assert frobenius_congruence_check(M, 3)["pass"]
    # [pi] = f and [a] o [b] = [ab]
    assert M.endo(R.pi_raw) == M.f
    ab = series_compose(M.endo(2), M.endo(3))
    assert ab == M.endo(6)


@pytest.mark.parametrize("d, pi", FIELDS)
def test_stable_under_precision(d, pi):
    lo = _ring(d, pi, 4)
    hi = _ring(d, pi, 9)
    Mlo = lt_construct(lo, canonical_f(lo, 12), 12)
    Mhi = lt_construct(hi, canonical_f(hi, 12), 12)
    assert Mhi.law.truncate(lo) == Mlo.law
    assert Mhi.endo(5).truncate(lo) == Mlo.endo(5)


@pytest.mark.parametrize("d, pi", FIELDS)
def test_torsion_quotient_degrees(d, pi):
    R = _ring(d, pi, 6)
    M = lt_construct(R, canonical_f(R, 32), 32)
    q = R.q
    n = 1
    while q ** n <= 32:
        tq = torsion_quotient(M, n)
        assert tq["degree"] == tq["expected_degree"] == q ** (n - 1) * (q - 1)
        assert tq["exact"] and tq["unit_leading"] and tq["eisenstein"]
        n += 1


def test_isomorphic_modules():
    R = PadicCoeffRing(None, 2, 8)
    M1 = lt_construct(R, canonical_f(R, 12), 12)
    M2 = lt_construct(R, multiplicative_f(R, 12), 12)
    phi = lt_isomorphism_check(M1, M2, 1)
    assert phi is not None
    assert series_compose(phi, M1.f) == series_compose(M2.f, phi)


def test_teichmuller_endos():
    R = PadicCoeffRing(None, 5, 6)
    M = lt_construct(R, canonical_f(R, 20), 20)
    z = M.teichmuller(2)
    assert R.pow(R.embed(z), 4) == 1
    assert M.teichmuller_endo(2) == PadicSeries.from_list(R, [0, z], 20)


def test_validation():
    with pytest.raises(ValidationError):
        PadicCoeffRing(None, 4, 3)
    with pytest.raises(ValidationError):
        PadicCoeffRing(None, 2, 0)
    R = PadicCoeffRing(None, 5, 3)
    with pytest.raises(ValidationError):
        canonical_f(R, 4)
    K = make_field(1)
    with pytest.raises(ValidationError):
        PadicCoeffRing(K, QuadInt(3, 1, K), 3)
