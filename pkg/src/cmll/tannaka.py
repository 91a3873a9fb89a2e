"""Symbolic verification of the cocycle law for the extended principal-ideal map.

Fix prime ideals p_1..p_r prime to g whose ray classes s_i split CL^(f) as a
direct sum of cyclic groups of orders n_i.  Every ideal prime to g factors
uniquely as a = gamma(a) * prod p_i^x_i with gamma(a) in Prin_{1 mod f} and
0 <= x_i < n_i.  The extension is the formal word

    l(a) = l(gamma(a)) * A^(s_a - 1) * prod_i alpha_i^(1 + s_i + ... + s_i^(x_i - 1))

in indeterminates alpha_i (fixed by every s_k with k != i), A, and the values
of l on a Z-basis of Prin_{1 mod f}.  The only relation imposed is
alpha_i^(N_i) = l(p_i^n_i) with N_i = 1 + s_i + ... + s_i^(n_i - 1).
"""

from dataclasses import dataclass, field
from itertools import product as iproduct

from .errors import CapExceeded, InternalConsistencyError, ValidationError
from .ideals import FracIdeal, ideals_up_to, one_ideal, one_mod_f, primes_up_to
from .quadfield import FieldElt, unit_group
from .rayclass import direct_sum_basis


@dataclass
class GeneratorData:
    group: object
    g: FracIdeal
    primes: list
    orders: list
    classes: list
    _coords: dict = field(default_factory=dict, repr=False)

    @property
    def r(self):
        return len(self.primes)

    def coordinates(self, element):
        """Exponents x_i with prod s_i^x_i = element."""
        if not self._coords:
            G = self.group
            for xs in iproduct(*[range(n) for n in self.orders]):
                e = G.identity
                for c, x in zip(self.classes, xs):
                    e = G.mul(e, G.power(c, x))
                self._coords[e] = xs
            if len(self._coords) != G.order:
                raise InternalConsistencyError("generator classes do not form a direct sum basis")
        return self._coords[element]

    def to_json(self):
        return {
            "conductor": self.group.f.to_json(),
            "g": self.g.to_json(),
            "generators": [{"prime": p.to_json(), "order": n} for p, n in zip(self.primes, self.orders)],
        }


def choose_generators(G, g=None, start_bound=50, cap=10**4):
    """Primes of increasing norm, prime to g, whose classes split G as a direct sum."""
    g = g or G.f
    if not G.f.divides(g):
        raise ValidationError("g must be divisible by the conductor")
    bound = start_bound
    while True:
        candidates = [(p, G.bracket_ideal(p)) for p in primes_up_to(G.ctx, bound) if p.is_coprime(g)]
        basis = direct_sum_basis(G, candidates)
        if basis is not None:
            return GeneratorData(G, g, [p for p, _, _ in basis], [n for _, _, n in basis], [x for _, x, _ in basis])
        if bound >= cap:
            raise CapExceeded(f"no generating primes of norm <= {cap}")
        bound *= 2


@dataclass(frozen=True)
class Decomposition:
    ideal: FracIdeal
    gamma: FracIdeal
    generator: FieldElt
    exponents: tuple

    def recompose(self, data):
        out = self.gamma
        for p, x in zip(data.primes, self.exponents):
            out = out * p ** x
        return out

    def to_json(self):
        return {
            "ideal": self.ideal.to_json(),
            "gamma": self.gamma.to_json(),
            "gamma_generator": str(self.generator),
            "exponents": list(self.exponents),
        }


def one_mod_f_generator(ideal, f):
    """A generator of the principal ideal that is 1 mod* f, or None."""
    gen = ideal.generator()
    if gen is None:
        return None
    for u in unit_group(ideal.ctx):
        cand = gen * FieldElt.of(u, ideal.ctx)
        if one_mod_f(cand, f):
            return cand
    return None


def decompose(data, a, sigma=None):
    if not a.is_coprime(data.g):
        raise ValidationError(f"{a} is not prime to g")
    xs = data.coordinates(data.group.bracket_ideal(a) if sigma is None else sigma)
    gamma = a
    for p, x in zip(data.primes, xs):
        if x:
            gamma = gamma * p ** (-x)
    gen = one_mod_f_generator(gamma, data.group.f)
    if gen is None:
        raise InternalConsistencyError(f"gamma({a}) has no generator that is 1 mod f")
    return Decomposition(a, gamma, gen, xs)


# -- the basis of Prin_{1 mod f} ----------------------------------------------------------


class PrinBasis:
    """Z-basis of Prin_{1 mod f} among ideals prime to g.

    One basis vector c_p = p * prod p_i^(-x_i(p)) per prime p that is not a
    generator, and c_i = p_i^n_i per generator.  New primes only add new
    vectors, so the basis can grow lazily.
    """

    def __init__(self, data):
        self.data = data
        self.gen_index = {p: i for i, p in enumerate(data.primes)}
        self._x = {}

    def label(self, p):
        return ("gen", self.gen_index[p]) if p in self.gen_index else ("prime", p.hnf)

    def basis_ideal(self, key):
        kind, val = key
        d = self.data
        if kind == "gen":
            return d.primes[val] ** d.orders[val]
        p = FracIdeal(d.group.ctx, *val)
        out = p
        for q, x in zip(d.primes, self._xp(p)):
            out = out * q ** (-x)
        return out

    def _xp(self, p):
        if p not in self._x:
            self._x[p] = self.data.coordinates(self.data.group.bracket_ideal(p))
        return self._x[p]

    def coords(self, gamma):
        """Coordinates of gamma in the basis, as a dict label -> int."""
        d = self.data
        out = {}
        gen_total = [0] * d.r
        for p, v in gamma.factor():
            if p in self.gen_index:
                gen_total[self.gen_index[p]] += v
            else:
                out[self.label(p)] = v
                for i, x in enumerate(self._xp(p)):
                    gen_total[i] += v * x
        for i, total in enumerate(gen_total):
            if total % d.orders[i]:
                raise InternalConsistencyError(f"{gamma} is not in Prin_(1 mod f)")
            if total:
                out[("gen", i)] = total // d.orders[i]
        return out


# -- symbolic words ---------------------------------------------------------------------------


def _add_dict(x, y, sign=1):
    out = dict(x)
    for k, v in y.items():
        out[k] = out.get(k, 0) + sign * v
        if not out[k]:
            del out[k]
    return out


@dataclass(frozen=True)
class SymbolicWord:
    """prod alpha_i^(alpha[i]) * A^(A) * prod l(c)^(l[c]).

    alpha[i] is a tuple of n_i integers (coefficients of s_i^j); A maps group
    elements to integers; l maps basis labels to integers.
    """

    alpha: tuple
    A: tuple
    l: tuple

    @staticmethod
    def build(alpha, A, l):
        return SymbolicWord(
            tuple(tuple(v) for v in alpha),
            tuple(sorted((k, v) for k, v in A.items() if v)),
            tuple(sorted((k, v) for k, v in l.items() if v)),
        )

    def __mul__(self, other):
        alpha = [tuple(x + y for x, y in zip(a, b)) for a, b in zip(self.alpha, other.alpha)]
        return SymbolicWord.build(alpha, _add_dict(dict(self.A), dict(other.A)), _add_dict(dict(self.l), dict(other.l)))

    def inverse(self):
        return SymbolicWord.build(
            [tuple(-x for x in a) for a in self.alpha],
            {k: -v for k, v in self.A},
            {k: -v for k, v in self.l},
        )

    def act(self, data, element):
        """sigma(element) applied to the word."""
        G = data.group
        xs = data.coordinates(element)
        alpha = []
        for a, x in zip(self.alpha, xs):
            n = len(a)
            alpha.append(tuple(a[(j - x) % n] for j in range(n)))
        A = {}
        for k, v in self.A:
            key = G.mul(element, k)
            A[key] = A.get(key, 0) + v
        return SymbolicWord.build(alpha, A, dict(self.l))

    def is_empty(self):
        return all(not any(a) for a in self.alpha) and not self.A and not self.l

    def to_json(self):
        return {
            "alpha": [list(a) for a in self.alpha],
            "A": {str(k): v for k, v in self.A},
            "l": {f"{k[0]}:{k[1]}": v for k, v in self.l},
        }


def normalize(word, data, basis, order=None):
    """Apply alpha_i^(N_i) -> l(p_i^n_i) until every alpha_i has zero top coefficient."""
    order = range(data.r) if order is None else order
    alpha = [list(a) for a in word.alpha]
    l = dict(word.l)
    rewrites = 0
    for i in order:
        c = alpha[i][-1]
        if c:
            alpha[i] = [x - c for x in alpha[i]]
            l = _add_dict(l, {("gen", i): c})
            rewrites += abs(c)
    return SymbolicWord.build(alpha, dict(word.A), l), rewrites


class TannakaVerifier:
    def __init__(self, data):
        self.data = data
        self.basis = PrinBasis(data)
        self._decomp = {}
        self._words = {}
        self._sigma = {}

    def decompose(self, a):
        if a not in self._decomp:
            self._decomp[a] = decompose(self.data, a, self.sigma(a))
        return self._decomp[a]

    def sigma(self, a):
        if a not in self._sigma:
            self._sigma[a] = self.data.group.bracket_ideal(a)
        return self._sigma[a]

    def l_word(self, a):
        if a not in self._words:
            self._words[a] = self._l_word(a)
        return self._words[a]

    def _l_word(self, a):
        d = self.data
        G = d.group
        dec = self.decompose(a)
        sigma = self.sigma(a)
        alpha = []
        for n, x in zip(d.orders, dec.exponents):
            alpha.append([1 if j < x else 0 for j in range(n)])
        A = _add_dict({sigma: 1}, {G.identity: 1}, -1)
        return SymbolicWord.build(alpha, A, self.basis.coords(dec.gamma))

    def cocycle(self, a, b):
        d = self.data
        G = d.group
        la, lb, lab = self.l_word(a), self.l_word(b), self.l_word(a * b)
        word = la * lb.act(d, self.sigma(a)) * lab.inverse()
        first, rewrites = normalize(word, d, self.basis)
        second, _ = normalize(word, d, self.basis, order=list(reversed(range(d.r))))
        if first != second:
            raise InternalConsistencyError("normalization is not confluent")
        xs, ys, zs = self.decompose(a).exponents, self.decompose(b).exponents, self.decompose(a * b).exponents
        deltas = []
        for x, y, z, n in zip(xs, ys, zs, d.orders):
            q, r = divmod(x + y - z, n)
            deltas.append(q if r == 0 else None)
        return {
            "empty": first.is_empty(),
            "rewrites": rewrites,
            "deltas": deltas,
            "deltas_ok": all(dl in (0, 1) for dl in deltas),
            "residual": None if first.is_empty() else first.to_json(),
        }


def symbolic_extension(data, a, verifier=None):
    return (verifier or TannakaVerifier(data)).l_word(a)


def cocycle_verify(data, a, b, verifier=None):
    return (verifier or TannakaVerifier(data)).cocycle(a, b)


def _corpus(data, bound):
    return [a for a in ideals_up_to(data.group.ctx, bound) if a.is_coprime(data.g)]


def cocycle_report(data, bound):
    """cocycle_verify over all pairs of integral ideals prime to g with norms <= bound."""
    v = TannakaVerifier(data)
    corpus = _corpus(data, bound)
    failures = []
    rewrites = 0
    for a in corpus:
        for b in corpus:
            res = v.cocycle(a, b)
            rewrites += res["rewrites"]
            if not res["empty"] or not res["deltas_ok"]:
                failures.append({"a": a.to_json(), "b": b.to_json(), "residual": res["residual"]})
    return {"pairs": len(corpus) ** 2, "rewrites": rewrites, "failures": failures, "pass": not failures}


def relation_checks(data, bound):
    """The three gamma relations and decompose/recompose over ideals of norm <= bound."""
    v = TannakaVerifier(data)
    corpus = _corpus(data, bound)
    prin = [b for b in corpus if all(x == 0 for x in v.decompose(b).exponents)]
    counts = {"prin": 0, "trivial": 0, "carry": 0, "recompose": 0}
    failures = []
    for a in corpus:
        da = v.decompose(a)
        if da.recompose(data) != a:
            failures.append({"relation": "recompose", "a": a.to_json()})
        counts["recompose"] += 1
        for b in prin:
            counts["prin"] += 1
            if v.decompose(a * b).gamma != da.gamma * v.decompose(b).gamma:
                failures.append({"relation": "prin", "a": a.to_json(), "b": b.to_json()})
        for j, (p, n) in enumerate(zip(data.primes, data.orders)):
            gap = v.decompose(a * p).gamma
            if da.exponents[j] != n - 1:
                counts["trivial"] += 1
                if not v.decompose(p).gamma.is_one() or gap != da.gamma:
                    failures.append({"relation": "trivial", "a": a.to_json(), "j": j})
            else:
                counts["carry"] += 1
                if gap != da.gamma * v.decompose(p ** n).gamma:
                    failures.append({"relation": "carry", "a": a.to_json(), "j": j})
    return {"ideals": len(corpus), "checked": counts, "failures": failures, "pass": not failures}


def specialization_check(data, bound):
    """Send each basis vector c to a generator that is 1 mod* f; the induced map on
    every gamma(a) must generate gamma(a), be 1 mod* f and be multiplicative."""
    v = TannakaVerifier(data)
    f = data.group.f
    values = {}

    def value(key):
        if key not in values:
            c = v.basis.basis_ideal(key)
            gen = one_mod_f_generator(c, f)
            if gen is None:
                raise InternalConsistencyError(f"basis ideal {c} is not in Prin_(1 mod f)")
            values[key] = gen
        return values[key]

    def special(gamma):
        out = FieldElt.of(1, gamma.ctx)
        for key, e in v.basis.coords(gamma).items():
            out = out * value(key) ** e
        return out

    corpus = _corpus(data, bound)
    gammas = [v.decompose(a).gamma for a in corpus]
    failures = []
    for gm in gammas:
        x = special(gm)
        if FracIdeal_from(x) != gm or not one_mod_f(x, f):
            failures.append(gm.to_json())
    mult_ok = all(special(g1 * g2) == special(g1) * special(g2) for g1 in gammas[:20] for g2 in gammas[:20])
    return {"gammas": len(gammas), "failures": failures, "multiplicative": mult_ok, "pass": not failures and mult_ok}


def FracIdeal_from(x):
    from .ideals import principal_ideal

    return principal_ideal(x.ctx, x)
