"""Ghost vectors, pi-typical Witt vectors, delta operators and Frobenius lifts.

Conventions: for a prime element pi with q = N(pi), the ghost components of
(x_0, ..., x_n) are gh_m = sum_i pi^i x_i^(q^(m-i)).  The delta operator is
delta(a) = (a^q - psi(a)) / pi, so psi(a) = a^q - pi*delta(a) and
delta(a+b) = delta(a) + delta(b) + sum_{0<i<q} binom(q, i)/pi * a^(q-i) b^i.
"""

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product as iproduct
from math import comb

from sympy import isprime

from .errors import InternalConsistencyError, ValidationError
from .ideals import FracIdeal, one_ideal, principal_ideal
from .quadfield import FieldElt, QuadInt, format_element, make_field

MAX_LENGTH = 4


# -- prime data ----------------------------------------------------------------


@dataclass(frozen=True)
class WittParams:
    """A principal prime (pi) of O, where O is Z (ctx None) or O_K."""

    ctx: object
    pi: object
    q: int

    @property
    def pi_pair(self):
        if self.ctx is None:
            return (Fraction(self.pi), Fraction(0))
        return (Fraction(self.pi.a), Fraction(self.pi.b))

    @property
    def tn(self):
        if self.ctx is None:
            return (0, 0)
        return (self.ctx.t, self.ctx.n)

    def label(self):
        return str(self.pi) if self.ctx is None else format_element(self.pi)

    def to_json(self):
        out = {"pi": self.label(), "q": self.q}
        if self.ctx is not None:
            out["d"] = self.ctx.d
        return out


def witt_params(pi, ctx=None, q=None):
    if ctx is None:
        if not isinstance(pi, int) or pi < 2 or not isprime(pi):
            raise ValidationError(f"{pi} is not a rational prime")
        norm = pi
    else:
        if isinstance(pi, int):
            pi = QuadInt(pi, 0, ctx)
        if not pi or not principal_ideal(ctx, pi).is_prime():
            raise ValidationError(f"{format_element(pi)} does not generate a prime ideal")
        norm = pi.norm()
    if q is not None and q != norm:
        raise ValidationError(f"q = {q} is not the norm {norm} of the prime")
    return WittParams(ctx, pi, norm)


# -- sparse polynomials over K with exact rational coefficients -----------------
# coefficients are pairs (a, b) meaning a + b*w with w^2 = t*w - n


def _kmul(x, y, tn):
    t, n = tn
    a, b = x
    c, d = y
    bd = b * d
    return (a * c - n * bd, a * d + b * c + t * bd)


def _kadd(x, y):
    return (x[0] + y[0], x[1] + y[1])


def _kzero(x):
    return x[0] == 0 and x[1] == 0


def _kinv(x, tn):
    t, n = tn
    a, b = x
    conj = (a + b * t, -b)
    norm = a * a + t * a * b + n * b * b
    return (conj[0] / norm, conj[1] / norm)


def _padd(p, r, sign=1):
    out = dict(p)
    for mono, c in r.items():
        c = (sign * c[0], sign * c[1])
        if mono in out:
            s = _kadd(out[mono], c)
            if _kzero(s):
                del out[mono]
            else:
                out[mono] = s
        elif not _kzero(c):
            out[mono] = c
    return out


def _pmul(p, r, tn):
    out = {}
    for m1, c1 in p.items():
        for m2, c2 in r.items():
            mono = tuple(i + j for i, j in zip(m1, m2))
            c = _kmul(c1, c2, tn)
            if mono in out:
                s = _kadd(out[mono], c)
                if _kzero(s):
                    del out[mono]
                else:
                    out[mono] = s
            else:
                out[mono] = c
    return {m: c for m, c in out.items() if not _kzero(c)}


def _pscale(p, c, tn):
    return {m: _kmul(v, c, tn) for m, v in p.items() if not _kzero(_kmul(v, c, tn))}


def _ppow(p, e, nvars, tn):
    result = {(0,) * nvars: (Fraction(1), Fraction(0))}
    base = p
    while e:
        if e & 1:
            result = _pmul(result, base, tn)
        e >>= 1
        if e:
            base = _pmul(base, base, tn)
    return result


def _var(i, nvars):
    mono = [0] * nvars
    mono[i] = 1
    return {tuple(mono): (Fraction(1), Fraction(0))}


def _kpow(x, e, tn):
    r = (Fraction(1), Fraction(0))
    for _ in range(e):
        r = _kmul(r, x, tn)
    return r


@dataclass(frozen=True)
class WittPolynomials:
    """S_m and P_m for m < length in variables X_0..X_{L-1}, Y_0..Y_{L-1}.

    Coefficients are stored as integer pairs (a, b) meaning a + b*w.
    """

    params: WittParams
    length: int
    S: tuple
    P: tuple

    @property
    def nvars(self):
        return 2 * self.length

    def to_json(self):
        def ser(poly):
            return {
                ",".join(map(str, mono)): _format_coeff(c, self.params)
                for mono, c in sorted(poly.items())
            }

        return {
            "params": self.params.to_json(),
            "length": self.length,
            "variables": [f"X{i}" for i in range(self.length)] + [f"Y{i}" for i in range(self.length)],
            "S": [ser(p) for p in self.S],
            "P": [ser(p) for p in self.P],
        }


def _format_coeff(c, params):
    if params.ctx is None:
        return c[0]
    return format_element(QuadInt(c[0], c[1], params.ctx))


def _ghost_poly(coords, m, params):
    """gh_m of a list of polynomials (the coordinates)."""
    tn, q = params.tn, params.q
    nvars = len(next(iter(coords[0])))
    total = {}
    for i in range(m + 1):
        term = _pscale(_ppow(coords[i], q ** (m - i), nvars, tn), _kpow(params.pi_pair, i, tn), tn)
        total = _padd(total, term)
    return total


def _integral_dict(poly, what):
    out = {}
    for mono, (a, b) in poly.items():
        if a.denominator != 1 or b.denominator != 1:
            raise InternalConsistencyError(f"{what} has a non-integral coefficient {a} + {b}*w at {mono}")
        out[mono] = (int(a), int(b))
    return out


@lru_cache(maxsize=None)
def _witt_polynomials_cached(params, length):
    tn, q = params.tn, params.q
    nvars = 2 * length
    X = [_var(i, nvars) for i in range(length)]
    Y = [_var(length + i, nvars) for i in range(length)]
    pinv = _kinv(params.pi_pair, tn)
    S, P = [], []
    for m in range(length):
        gx, gy = _ghost_poly(X, m, params), _ghost_poly(Y, m, params)
        for target, store in ((_padd(gx, gy), S), (_pmul(gx, gy, tn), P)):
            rest = dict(target)
            for i in range(m):
                rest = _padd(rest, _pscale(_ppow(store[i], q ** (m - i), nvars, tn), _kpow(params.pi_pair, i, tn), tn), -1)
            store.append(_pscale(rest, _kpow(pinv, m, tn), tn))
    S_int = tuple(_integral_dict(s, f"S_{m}") for m, s in enumerate(S))
    P_int = tuple(_integral_dict(p, f"P_{m}") for m, p in enumerate(P))
    return WittPolynomials(params, length, S_int, P_int)


def witt_polynomials(params, length, cap=MAX_LENGTH):
    """Universal addition and multiplication polynomials by ghost inversion over K."""
    if not 1 <= length <= cap:
        raise ValidationError(f"length must be between 1 and {cap}")
    return _witt_polynomials_cached(params, length)


# -- carriers --------------------------------------------------------------------


class Carrier:
    """A supported coefficient ring with its default Frobenius lift."""

    flat = True
    name = "carrier"

    def embed(self, c):
        raise NotImplementedError

    def zero(self):
        return self.embed(0)

    def one(self):
        return self.embed(1)

    def add(self, x, y):
        return self.normalize(x + y)

    def sub(self, x, y):
        return self.normalize(x - y)

    def neg(self, x):
        return self.normalize(-x)

    def mul(self, x, y):
        return self.normalize(x * y)

    def pow(self, x, e):
        result, base = self.one(), x
        while e:
            if e & 1:
                result = self.mul(result, base)
            e >>= 1
            if e:
                base = self.mul(base, base)
        return result

    def normalize(self, x):
        return x

    def eq(self, x, y):
        return self.normalize(x) == self.normalize(y)


class ZCarrier(Carrier):
    name = "Z"

    def embed(self, c):
        if isinstance(c, tuple):
            if c[1]:
                raise ValidationError("Z carrier cannot hold w")
            c = c[0]
        return int(c)

    def frobenius(self, x):
        return x

    def divide(self, x, pi):
        return x // pi if x % pi == 0 else None

    def in_ideal(self, x, m):
        return x % m == 0

    def random(self, rng, size=5):
        return rng.randint(-size, size)

    def to_json(self, x):
        return x


class OKCarrier(Carrier):
    name = "O_K"

    def __init__(self, ctx):
        self.ctx = ctx

    def embed(self, c):
        if isinstance(c, QuadInt):
            return c
        if isinstance(c, tuple):
            return QuadInt(c[0], c[1], self.ctx)
        return QuadInt(int(c), 0, self.ctx)

    def frobenius(self, x):
        return x

    def divide(self, x, pi):
        r = FieldElt(x) / FieldElt.of(pi, self.ctx)
        return r.to_quadint() if r.is_integral() else None

    def in_ideal(self, x, ideal):
        return ideal.contains(x)

    def random(self, rng, size=5):
        return QuadInt(rng.randint(-size, size), rng.randint(-size, size), self.ctx)

    def to_json(self, x):
        return format_element(x)


class OKPoly:
    """Polynomial over O_K in one variable T, coefficients low degree first."""

    __slots__ = ("coeffs", "ctx")

    def __init__(self, coeffs, ctx):
        coeffs = list(coeffs)
        while coeffs and not coeffs[-1]:
            coeffs.pop()
        self.coeffs = tuple(coeffs)
        self.ctx = ctx

    def _coerce(self, other):
        if isinstance(other, OKPoly):
            return other
        if isinstance(other, int):
            other = QuadInt(other, 0, self.ctx)
        return OKPoly([other], self.ctx)

    def __add__(self, other):
        other = self._coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        zero = QuadInt(0, 0, self.ctx)
        a = self.coeffs + (zero,) * (n - len(self.coeffs))
        b = other.coeffs + (zero,) * (n - len(other.coeffs))
        return OKPoly([x + y for x, y in zip(a, b)], self.ctx)

    __radd__ = __add__

    def __neg__(self):
        return OKPoly([-c for c in self.coeffs], self.ctx)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __mul__(self, other):
        other = self._coerce(other)
        if not self.coeffs or not other.coeffs:
            return OKPoly([], self.ctx)
        out = [QuadInt(0, 0, self.ctx)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return OKPoly(out, self.ctx)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, OKPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __bool__(self):
        return bool(self.coeffs)

    def degree(self):
        return len(self.coeffs) - 1

    def compose(self, inner):
        """self(inner(T)) by Horner."""
        result = OKPoly([], self.ctx)
        for c in reversed(self.coeffs):
            result = result * inner + c
        return result

    def __repr__(self):
        terms = [f"({format_element(c)})*T^{i}" for i, c in enumerate(self.coeffs) if c]
        return " + ".join(terms) or "0"


class OKTCarrier(Carrier):
    """O_K[T] with the monomial Frobenius lift T -> T^q."""

    name = "O_K[T]"

    def __init__(self, ctx, q=None):
        self.ctx = ctx
        self.q = q

    def embed(self, c):
        if isinstance(c, OKPoly):
            return c
        if isinstance(c, tuple):
            c = QuadInt(c[0], c[1], self.ctx)
        elif isinstance(c, int):
            c = QuadInt(c, 0, self.ctx)
        return OKPoly([c], self.ctx)

    def T(self):
        return OKPoly([QuadInt(0, 0, self.ctx), QuadInt(1, 0, self.ctx)], self.ctx)

    def substitution(self, image):
        """The O_K-algebra endomorphism T -> image."""
        return lambda x: x.compose(image)

    def monomial_lift(self, k):
        return self.substitution(OKPoly([QuadInt(0, 0, self.ctx)] * k + [QuadInt(1, 0, self.ctx)], self.ctx))

    def frobenius(self, x):
        if self.q is None:
            raise ValidationError("no default Frobenius exponent for this carrier")
        return self.monomial_lift(self.q)(x)

    def divide(self, x, pi):
        out = []
        pi = FieldElt.of(pi, self.ctx)
        for c in x.coeffs:
            r = FieldElt(c) / pi
            if not r.is_integral():
                return None
            out.append(r.to_quadint())
        return OKPoly(out, self.ctx)

    def in_ideal(self, x, ideal):
        return all(ideal.contains(c) for c in x.coeffs)

    def random(self, rng, size=3, degree=3):
        return OKPoly(
            [QuadInt(rng.randint(-size, size), rng.randint(-size, size), self.ctx) for _ in range(rng.randint(0, degree) + 1)],
            self.ctx,
        )

    def to_json(self, x):
        return [format_element(c) for c in x.coeffs]


class TruncatedCarrier(Carrier):
    """O_K/pi^N.  Not flat: pi is nilpotent, so Dwork membership is refused."""

    flat = False
    name = "O_K/pi^N"

    def __init__(self, ctx, pi, N):
        from .quadfield import ResidueRing

        self.ctx = ctx
        self.pi = pi if isinstance(pi, QuadInt) else QuadInt(pi, 0, ctx)
        self.N = N
        self.modulus = principal_ideal(ctx, self.pi) ** N
        self.ring = ResidueRing(self.modulus)

    def embed(self, c):
        if isinstance(c, tuple):
            c = QuadInt(c[0], c[1], self.ctx)
        return self.ring.reduce(c)

    def normalize(self, x):
        return self.ring.reduce(x)

    def frobenius(self, x):
        return x

    def divide(self, x, pi):
        # lift to O_K, divide there; the result is only defined modulo pi^(N-1)
        r = FieldElt(x) / FieldElt.of(pi, self.ctx)
        return self.ring.reduce(r.to_quadint()) if r.is_integral() else None

    def in_ideal(self, x, ideal):
        raise ValidationError("ideal membership is not decidable in a truncated carrier")

    def random(self, rng, size=5):
        return self.ring.reduce(QuadInt(rng.randint(-size, size), rng.randint(-size, size), self.ctx))

    def to_json(self, x):
        return format_element(x)


def carrier_for(params):
    if params.ctx is None:
        return ZCarrier()
    return OKCarrier(params.ctx)


# -- ghost and Witt vectors ----------------------------------------------------------


@dataclass(frozen=True)
class GhostVector:
    """Components indexed by a finite divisor-closed set.

    In the pi-typical case the indices are 0..n standing for pi^0..pi^n;
    otherwise they are the integral ideals dividing a fixed ideal.
    """

    indices: tuple
    components: tuple
    carrier: object
    kind: str = "pi-typical"

    def _check(self, other):
        if self.indices != other.indices or self.kind != other.kind:
            raise ValidationError("ghost vectors have different index sets")

    def __add__(self, other):
        self._check(other)
        return GhostVector(self.indices, tuple(self.carrier.add(x, y) for x, y in zip(self.components, other.components)), self.carrier, self.kind)

    def __mul__(self, other):
        self._check(other)
        return GhostVector(self.indices, tuple(self.carrier.mul(x, y) for x, y in zip(self.components, other.components)), self.carrier, self.kind)

    def __eq__(self, other):
        return (
            isinstance(other, GhostVector)
            and self.indices == other.indices
            and all(self.carrier.eq(x, y) for x, y in zip(self.components, other.components))
        )

    def __hash__(self):
        return hash(self.indices)

    def __getitem__(self, index):
        return self.components[self.indices.index(index)]

    def truncate(self, length):
        if self.kind != "pi-typical":
            raise ValidationError("truncation is defined for pi-typical vectors")
        return GhostVector(self.indices[:length], self.components[:length], self.carrier, self.kind)

    def to_json(self):
        idx = list(self.indices) if self.kind == "pi-typical" else [i.to_json() for i in self.indices]
        return {"kind": self.kind, "indices": idx, "components": [self.carrier.to_json(c) for c in self.components]}


@dataclass(frozen=True)
class WittVector:
    params: WittParams
    coords: tuple
    carrier: object

    @property
    def length(self):
        return len(self.coords)

    def __eq__(self, other):
        return (
            isinstance(other, WittVector)
            and self.params == other.params
            and self.length == other.length
            and all(self.carrier.eq(x, y) for x, y in zip(self.coords, other.coords))
        )

    def __hash__(self):
        return hash((self.params, self.length))

    def to_json(self):
        return {"params": self.params.to_json(), "coords": [self.carrier.to_json(c) for c in self.coords]}


def witt_vector(params, coords, carrier=None):
    carrier = carrier or carrier_for(params)
    if not 1 <= len(coords) <= MAX_LENGTH:
        raise ValidationError(f"length must be between 1 and {MAX_LENGTH}")
    return WittVector(params, tuple(carrier.embed(c) for c in coords), carrier)


def teichmuller(params, c, length, carrier=None):
    carrier = carrier or carrier_for(params)
    return WittVector(params, (carrier.embed(c),) + (carrier.zero(),) * (length - 1), carrier)


def _embed_pi(params, carrier):
    return carrier.embed(params.pi if params.ctx is None else (params.pi.a, params.pi.b))


def ghost_map(w):
    params, carrier = w.params, w.carrier
    pi = _embed_pi(params, carrier)
    comps = []
    for m in range(w.length):
        total = carrier.zero()
        for i in range(m + 1):
            term = carrier.mul(carrier.pow(pi, i), carrier.pow(w.coords[i], params.q ** (m - i)))
            total = carrier.add(total, term)
        comps.append(total)
    return GhostVector(tuple(range(w.length)), tuple(comps), carrier)


def _evaluate(poly, values, carrier):
    cache = {}
    total = carrier.zero()
    for mono, coeff in poly.items():
        term = carrier.embed(coeff)
        for i, e in enumerate(mono):
            if e:
                key = (i, e)
                if key not in cache:
                    cache[key] = carrier.pow(values[i], e)
                term = carrier.mul(term, cache[key])
        total = carrier.add(total, term)
    return total


def _binary(x, y, which):
    if x.params != y.params or x.length != y.length or type(x.carrier) is not type(y.carrier):
        raise ValidationError("Witt vectors have mismatched parameters")
    polys = witt_polynomials(x.params, x.length)
    values = list(x.coords) + list(y.coords)
    table = polys.S if which == "S" else polys.P
    return WittVector(x.params, tuple(_evaluate(p, values, x.carrier) for p in table), x.carrier)


def witt_add(x, y):
    return _binary(x, y, "S")


def witt_mul(x, y):
    return _binary(x, y, "P")


def ghost_preimage(g, params):
    """Witt coordinates with ghost vector g, or None if some division by pi fails."""
    carrier = g.carrier
    if not carrier.flat:
        raise ValidationError("ghost inversion needs a pi-torsion-free carrier")
    pi = _embed_pi(params, carrier)
    pi_raw = params.pi
    coords = []
    for m, gm in enumerate(g.components):
        rest = gm
        for i, x in enumerate(coords):
            rest = carrier.sub(rest, carrier.mul(carrier.pow(pi, i), carrier.pow(x, params.q ** (m - i))))
        for _ in range(m):
            rest = carrier.divide(rest, pi_raw)
            if rest is None:
                return None
        coords.append(rest)
    return WittVector(params, tuple(coords), carrier)


# -- delta rings -----------------------------------------------------------------------


class DeltaRing:
    """A carrier with the delta operator attached to a Frobenius lift psi."""

    def __init__(self, carrier, params, psi=None):
        self.carrier = carrier
        self.params = params
        self.psi = psi or carrier.frobenius

    def delta(self, a):
        c = self.carrier
        diff = c.sub(c.pow(a, self.params.q), self.psi(a))
        out = c.divide(diff, self.params.pi)
        if out is None:
            raise ValidationError("a^q - psi(a) is not divisible by pi: psi does not lift Frobenius")
        return out

    def psi_from_delta(self, a):
        c = self.carrier
        pi = _embed_pi(self.params, c)
        return c.sub(c.pow(a, self.params.q), c.mul(pi, self.delta(a)))

    def sum_defect(self, a, b):
        """sum_{0<i<q} binom(q, i)/pi * a^(q-i) b^i, exactly."""
        c, q = self.carrier, self.params.q
        total = c.zero()
        for i in range(1, q):
            total = c.add(total, c.mul(c.embed(comb(q, i)), c.mul(c.pow(a, q - i), c.pow(b, i))))
        out = c.divide(total, self.params.pi)
        if out is None:
            raise InternalConsistencyError("binomial defect is not divisible by pi")
        return out


def delta(ring, a):
    return ring.delta(a)


def delta_axioms_report(ring, samples):
    """Check delta(0)=delta(1)=0, the product rule, the sum rule and that psi is a
    ring homomorphism on all pairs drawn from `samples`."""
    c = ring.carrier
    pi = _embed_pi(ring.params, c)
    q = ring.params.q
    failures = []
    if not c.eq(ring.delta(c.zero()), c.zero()) or not c.eq(ring.delta(c.one()), c.zero()):
        failures.append("constants")
    for a, b in zip(samples, samples[1:] + samples[:1]):
        da, db = ring.delta(a), ring.delta(b)
        lhs = ring.delta(c.mul(a, b))
        rhs = c.sub(c.add(c.mul(c.pow(a, q), db), c.mul(c.pow(b, q), da)), c.mul(pi, c.mul(da, db)))
        if not c.eq(lhs, rhs):
            failures.append(("product", c.to_json(a), c.to_json(b)))
        lhs = ring.delta(c.add(a, b))
        rhs = c.add(c.add(da, db), ring.sum_defect(a, b))
        if not c.eq(lhs, rhs):
            failures.append(("sum", c.to_json(a), c.to_json(b)))
        psi = ring.psi_from_delta
        if not c.eq(psi(c.add(a, b)), c.add(psi(a), psi(b))) or not c.eq(psi(c.mul(a, b)), c.mul(psi(a), psi(b))):
            failures.append(("psi-homomorphism", c.to_json(a), c.to_json(b)))
    return {"samples": len(samples), "failures": failures, "pass": not failures}


# -- Frobenius lifts and Dwork congruences ---------------------------------------------


def verify_lambda(carrier, frobenius_lifts, primes, samples):
    """Check that the lifts commute pairwise and that psi^p(a) = a^Np mod p."""
    report = {"commute": True, "frobenius": {}, "failures": []}
    for i, p in enumerate(primes):
        for l in primes[i + 1:]:
            f, g = frobenius_lifts[p], frobenius_lifts[l]
            for a in samples:
                if not carrier.eq(f(g(a)), g(f(a))):
                    report["commute"] = False
                    report["failures"].append({"axiom": "commute", "primes": [p.to_json(), l.to_json()], "sample": carrier.to_json(a)})
                    break
        ok = True
        np_ = p.norm_int()
        for a in samples:
            if not carrier.in_ideal(carrier.sub(frobenius_lifts[p](a), carrier.pow(a, np_)), p):
                ok = False
                report["failures"].append({"axiom": "frobenius", "prime": p.to_json(), "sample": carrier.to_json(a)})
                break
        report["frobenius"][str(p.hnf)] = ok
    report["pass"] = report["commute"] and all(report["frobenius"].values())
    return report


def dwork_membership(g, frobenius_lift, params):
    """pi-typical Dwork test: psi(gh_m) = gh_{m+1} mod pi^(m+1)."""
    carrier = g.carrier
    if not carrier.flat:
        raise ValidationError("Dwork membership needs a pi-torsion-free carrier")
    if g.kind != "pi-typical":
        raise ValidationError("use dwork_membership_ideals for divisor-indexed vectors")
    for m in range(len(g.components) - 1):
        diff = carrier.sub(g.components[m + 1], frobenius_lift(g.components[m]))
        for _ in range(m + 1):
            diff = carrier.divide(diff, params.pi)
            if diff is None:
                return False
    return True


def divisors(a):
    """Integral ideals dividing the integral ideal a, sorted."""
    if not a.is_integral():
        raise ValidationError("divisors are defined for integral ideals")
    fac = a.factor()
    ctx = a.ctx
    out = []
    for exps in iproduct(*[range(e + 1) for _, e in fac]):
        d = one_ideal(ctx)
        for (p, _), k in zip(fac, exps):
            d = d * p ** k
        out.append(d)
    return sorted(out)


def ghost_vector_on(a, components, carrier):
    idx = tuple(divisors(a))
    if len(components) != len(idx):
        raise ValidationError("one component per divisor is required")
    return GhostVector(idx, tuple(components), carrier, kind="ideal")


def dwork_membership_ideals(g, frobenius_lifts):
    """psi^p(g_e) = g_{pe} mod p^{v_p(pe)} whenever pe is an index."""
    carrier = g.carrier
    if not carrier.flat:
        raise ValidationError("Dwork membership needs a torsion-free carrier")
    idx = set(g.indices)
    for e in g.indices:
        for p, psi in frobenius_lifts.items():
            pe = p * e
            if pe not in idx:
                continue
            k = pe.valuation(p)
            if not carrier.in_ideal(carrier.sub(g[pe], psi(g[e])), p ** k):
                return False
    return True


def _index_bijection(a, b):
    da, db = divisors(a), divisors(b)
    flat = divisors(a * b)
    image = {}
    for x in da:
        for y in db:
            image[(x, y)] = x * y
    ok = len(set(image.values())) == len(image) and set(image.values()) == set(flat)
    return da, db, flat, image, ok


def coprime_factorization_check(a, b, carrier, frobenius_lifts=None, samples=20, seed=0):
    """Gamma_ab(A) = Gamma_a(Gamma_b(A)) as indexed products, with Dwork membership
    splitting into the a-slices and b-slices."""
    if a.ctx != b.ctx or not a.is_coprime(b):
        raise ValidationError("the two ideals must be coprime")
    da, db, flat, image, bijective = _index_bijection(a, b)
    ab = a * b
    if frobenius_lifts is None:
        frobenius_lifts = {p: (lambda x: x) for p, _ in ab.factor()}
    lifts_a = {p: f for p, f in frobenius_lifts.items() if a.valuation(p) > 0}
    lifts_b = {p: f for p, f in frobenius_lifts.items() if b.valuation(p) > 0}
    rng = random.Random(seed)
    round_trip = True
    factor_ok = True
    members = 0
    for s in range(samples):
        if s % 2 == 0:
            g = _teichmuller_ghost(flat, carrier, rng)
        else:
            g = GhostVector(tuple(flat), tuple(carrier.random(rng) for _ in flat), carrier, "ideal")
        nested = {x: {y: g[image[(x, y)]] for y in db} for x in da}
        inverse = {v: k for k, v in image.items()}
        back = GhostVector(tuple(flat), tuple(nested[inverse[d][0]][inverse[d][1]] for d in flat), carrier, "ideal")
        if back != g:
            round_trip = False
        whole = dwork_membership_ideals(g, frobenius_lifts)
        members += whole
        a_slices = all(
            dwork_membership_ideals(GhostVector(tuple(da), tuple(nested[x][y] for x in da), carrier, "ideal"), lifts_a) for y in db
        )
        b_slices = all(
            dwork_membership_ideals(GhostVector(tuple(db), tuple(nested[x][y] for y in db), carrier, "ideal"), lifts_b) for x in da
        )
        if whole != (a_slices and b_slices):
            factor_ok = False
    return {
        "divisors": [len(da), len(db), len(flat)],
        "bijection": bijective,
        "round_trip": round_trip,
        "membership_factors": factor_ok,
        "members_seen": members,
        "pass": bijective and round_trip and factor_ok,
    }


def _teichmuller_ghost(indices, carrier, rng):
    # ghost components c^{N e}: in the image when every psi^p is the identity on O_K
    c = carrier.random(rng)
    return GhostVector(tuple(indices), tuple(carrier.pow(c, e.norm_int()) for e in indices), carrier, "ideal")


def random_witt(params, length, rng, carrier=None, size=5):
    carrier = carrier or carrier_for(params)
    return WittVector(params, tuple(carrier.random(rng, size) for _ in range(length)), carrier)


def ghost_homomorphism_report(params, trials, seed=0, max_length=MAX_LENGTH):
    rng = random.Random(seed)
    failures = 0
    for _ in range(trials):
        length = rng.randint(1, max_length)
        x = random_witt(params, length, rng, size=3)
        y = random_witt(params, length, rng, size=3)
        gx, gy = ghost_map(x), ghost_map(y)
        if ghost_map(witt_add(x, y)) != gx + gy or ghost_map(witt_mul(x, y)) != gx * gy:
            failures += 1
    return {"params": params.to_json(), "trials": trials, "failures": failures, "pass": failures == 0}
