import cmath

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmll.errors import ValidationError
from cmll.quadfield import (
    FieldElt,
    QuadInt,
    ResidueRing,
    format_element,
    make_field,
    parse_element,
    unit_group,
)
from cmll.ideals import principal_ideal

FIELDS = [1, 2, 3, 5, 7, 11, 15, 23]
small = st.integers(-40, 40)


def as_complex(x):
    w = x.ctx.omega_complex()
    return x.a + x.b * w


@pytest.mark.parametrize("d, t, n", [(1, 0, 1), (2, 0, 2), (3, 1, 1), (7, 1, 2), (5, 0, 5), (23, 1, 6)])
def test_omega_minimal_polynomial(d, t, n):
    K = make_field(d)
    assert (K.t, K.n) == (t, n)
    w = K.omega
    assert w * w == w * t - n
    assert K.omega_complex().imag > 0


@pytest.mark.parametrize("d", [4, 12, 0, -3, 18])
def test_rejects_bad_d(d):
    with pytest.raises(ValidationError):
        make_field(d)


@pytest.mark.parametrize("d", FIELDS)
@settings(max_examples=60, deadline=None)
@given(a=small, b=small, c=small, e=small)
def test_arithmetic_matches_complex_numbers(d, a, b, c, e):
    K = make_field(d)
    x, y = QuadInt(a, b, K), QuadInt(c, e, K)
    assert cmath.isclose(as_complex(x * y), as_complex(x) * as_complex(y), abs_tol=1e-6)
    assert cmath.isclose(as_complex(x + y), as_complex(x) + as_complex(y), abs_tol=1e-9)
    assert (x * y).norm() == x.norm() * y.norm()
    assert abs(x.norm() - abs(as_complex(x)) ** 2) < 1e-6 * (1 + x.norm())


@pytest.mark.parametrize("d", FIELDS)
@settings(max_examples=40, deadline=None)
@given(a=small, b=small, den=st.integers(1, 9))
def test_format_parse_round_trip(d, a, b, den):
    K = make_field(d)
    x = FieldElt(QuadInt(a, b, K), den)
    assert parse_element(K, format_element(x)) == x


def test_parse_variants():
    K = make_field(1)
    assert parse_element(K, "3+-2*w") == FieldElt.of(QuadInt(3, -2, K))
    assert parse_element(K, "w") == FieldElt.of(QuadInt(0, 1, K))
    assert parse_element(K, "2-w") == FieldElt.of(QuadInt(2, -1, K))
    with pytest.raises(ValidationError):
        parse_element(K, "2+x")


@pytest.mark.parametrize("d, w", [(1, 4), (3, 6), (2, 2), (5, 2), (7, 2)])
def test_unit_group(d, w):
    K = make_field(d)
    units = unit_group(K)
    assert len(units) == K.w == w
    assert all(u.norm() == 1 for u in units)
    assert units[0] == K.one()
    assert {x * y for x in units for y in units} == set(units)


@pytest.mark.parametrize("d", [1, 2, 3, 5])
@settings(max_examples=30, deadline=None)
@given(a=small, b=small, c=st.integers(1, 9), e=small)
def test_inverse(d, a, b, c, e):
    K = make_field(d)
    x = FieldElt(QuadInt(a, b, K), c)
    if x:
        assert x * x.inverse() == FieldElt.of(1, K)


@pytest.mark.parametrize("d, gen", [(1, 3), (1, (2, 1)), (5, 3), (3, 2), (7, 4)])
def test_residue_ring_units(d, gen):
    # |(O/f)^x| against brute force over all residues
    K = make_field(d)
    g = QuadInt(gen, 0, K) if isinstance(gen, int) else QuadInt(*gen, K)
    f = principal_ideal(K, g)
    R = ResidueRing(f)
    elts = list(R.elements())
    assert len(elts) == f.norm_int()
    units = [x for x in elts if any((x * y - 1) in f for y in elts)]
    assert R.unit_count() == len(units)
    for u in units:
        assert R.reduce(u * R.inverse(u)) == R.reduce(K.one())
