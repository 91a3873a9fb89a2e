import pytest

from cmll.cli import parse_ideal
from cmll.errors import ValidationError
from cmll.ideals import ideal_from_gens, ideals_up_to, one_ideal, principal_ideal
from cmll.quadfield import QuadInt, make_field
from cmll.rayclass import ray_class_group
from cmll.tannaka import (
    SymbolicWord,
    TannakaVerifier,
    choose_generators,
    cocycle_report,
    cocycle_verify,
    decompose,
    normalize,
    relation_checks,
    specialization_check,
    symbolic_extension,
)


def setup(d, f="1", g=None):
    K = make_field(d)
    G = ray_class_group(K, parse_ideal(K, f))
    return K, choose_generators(G, parse_ideal(K, g) if g else None)


def test_generators_examples():
    K, data = setup(5)
    assert [p.hnf for p in data.primes] == [(2, 1, 1)]
    assert data.orders == [2]
    assert data.primes[0] == ideal_from_gens(K, [2, QuadInt(1, 1, K)])
    _, data = setup(1, "3")
    assert data.orders == [2]
    _, data = setup(1)
    assert data.primes == [] and data.orders == []
    _, data = setup(21)
    assert data.orders == [2, 2]


def test_generators_avoid_g():
    K, data = setup(1, "3", "6")
    assert all(p.is_coprime(principal_ideal(K, 6)) for p in data.primes)
    with pytest.raises(ValidationError):
        setup(1, "3", "2")


def test_decompose_examples():
    K, data = setup(5)
    p = data.primes[0]
    dp = decompose(data, p)
    assert dp.exponents == (1,) and dp.gamma.is_one()
    a = ideal_from_gens(K, [3, QuadInt(1, 1, K)])
    da = decompose(data, a)
    assert da.exponents == (1,)
    assert da.gamma == a * p.inverse()
    assert principal_ideal(K, da.generator) == da.gamma
    b = principal_ideal(K, QuadInt(1, 3, K))
    db = decompose(data, b)
    assert db.exponents == (0,) and db.gamma == b


@pytest.mark.parametrize("d, f", [(1, "3"), (1, "5"), (5, "1"), (5, "3"), (21, "1"), (3, "7")])
def test_recompose_and_unit_adjustment(d, f):
    K, data = setup(d, f)
    from cmll.ideals import one_mod_f

    for a in ideals_up_to(K, 60):
        if not a.is_coprime(data.g):
            continue
        dec = decompose(data, a)
        assert dec.recompose(data) == a
        assert all(0 <= x < n for x, n in zip(dec.exponents, data.orders))
        assert one_mod_f(dec.generator, data.group.f)


def test_not_coprime_rejected():
    K, data = setup(1, "3")
    with pytest.raises(ValidationError):
        decompose(data, principal_ideal(K, 3))


@pytest.mark.parametrize("d, f, g", [(1, "1", None), (5, "1", None), (1, "3", None), (5, "3", None), (1, "3", "6"), (21, "1", None)])
def test_relations(d, f, g):
    _, data = setup(d, f, g)
    rep = relation_checks(data, 100 if g is None else 50)
    assert rep["pass"], rep["failures"][:3]
    if data.r:
        assert rep["checked"]["carry"] > 0 and rep["checked"]["trivial"] > 0


@pytest.mark.parametrize("d, f", [(1, "1"), (1, "3"), (5, "1"), (5, "3")])
def test_cocycle_all_pairs(d, f):
    _, data = setup(d, f)
    rep = cocycle_report(data, 60)
    assert rep["pass"], rep["failures"][:3]


@pytest.mark.parametrize("d, f, g, bound", [(21, "1", None, 30), (1, "3", "6", 30), (3, "7", None, 30)])
def test_cocycle_more_groups(d, f, g, bound):
    _, data = setup(d, f, g)
    assert cocycle_report(data, bound)["pass"]


def test_cocycle_examples():
    K, data = setup(5)
    one = one_ideal(K)
    res = cocycle_verify(data, one, one)
    assert res["empty"] and res["rewrites"] == 0
    # b principal and 1 mod f: no carries
    b = principal_ideal(K, QuadInt(1, 3, K))
    res = cocycle_verify(data, data.primes[0], b)
    assert res["empty"] and res["deltas"] == [0] and res["rewrites"] == 0
    # carry case: x_1 = n_1 - 1 and b = p_1
    p = data.primes[0]
    res = cocycle_verify(data, p, p)
    assert res["empty"] and res["deltas"] == [1] and res["rewrites"] == 1


def test_symbolic_word_shape():
    K, data = setup(5)
    p = data.primes[0]
    w = symbolic_extension(data, p)
    assert w.alpha == ((1, 0),)
    G = data.group
    assert dict(w.A) == {G.bracket_ideal(p): 1, G.identity: -1}
    assert w.l == ()
    assert symbolic_extension(data, one_ideal(K)).is_empty()


def test_normalize_is_confluent_on_random_words():
    import random

    _, data = setup(21)
    v = TannakaVerifier(data)
    rng = random.Random(1)
    for _ in range(200):
        alpha = [[rng.randint(-3, 3) for _ in range(n)] for n in data.orders]
        w = SymbolicWord.build(alpha, {}, {})
        a, _ = normalize(w, data, v.basis)
        b, _ = normalize(w, data, v.basis, order=[1, 0])
        assert a == b
        assert all(x[-1] == 0 for x in a.alpha)


class _NoGamma(TannakaVerifier):
    def _l_word(self, a):
        w = super()._l_word(a)
        return SymbolicWord(w.alpha, w.A, ())


class _NoMinusOne(TannakaVerifier):
    def _l_word(self, a):
        w = super()._l_word(a)
        G = self.data.group
        A = dict(w.A)
        A[G.identity] = A.get(G.identity, 0) + 1
        return SymbolicWord.build(w.alpha, A, dict(w.l))


@pytest.mark.parametrize("broken", [_NoGamma, _NoMinusOne])
def test_verifier_detects_wrong_extensions(broken):
    K, data = setup(5)
    v = broken(data)
    corpus = [a for a in ideals_up_to(K, 20)]
    assert any(not v.cocycle(a, b)["empty"] for a in corpus for b in corpus)


@pytest.mark.parametrize("d, f", [(1, "3"), (5, "1"), (21, "1")])
def test_specialization(d, f):
    _, data = setup(d, f)
    assert specialization_check(data, 40)["pass"]
