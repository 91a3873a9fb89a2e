"""Fractional ideals of O_K in Hermite normal form.

A fractional ideal is stored as (Z*a + Z*(b + c*w)) / den with a > 0,
0 <= b < a, c > 0, c | a, c | b and den the least positive integer making
den*I integral.  The representation is canonical, so equality and hashing
are field comparisons.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import gcd, isqrt

from sympy import factorint, jacobi_symbol
from sympy.ntheory import sqrt_mod

from .errors import ValidationError
from .quadfield import FieldElt, QuadInt, unit_group


def _xgcd(x, y):
    """Return (g, s, t) with s*x + t*y = g = gcd(x, y) >= 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while y:
        q, r = divmod(x, y)
        x, y = y, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if x < 0:
        x, s0, t0 = -x, -s0, -t0
    return x, s0, t0


def _hnf2(vectors):
    """HNF (a, b, c) of the rank-2 lattice spanned by integer pairs (x, y)."""
    pivot = None
    xs = []
    for x, y in vectors:
        if y == 0:
            xs.append(x)
        elif pivot is None:
            pivot = (x, y)
        else:
            px, py = pivot
            g, s, t = _xgcd(py, y)
            xs.append(px * (y // g) - x * (py // g))
            pivot = (s * px + t * x, g)
    a = 0
    for x in xs:
        a = gcd(a, x)
    if pivot is None or a == 0:
        raise ValidationError("generators do not span a rank-two lattice")
    bx, c = pivot
    if c < 0:
        bx, c = -bx, -c
    return a, bx % a, c


@dataclass(frozen=True)
class FracIdeal:
    ctx: object
    a: int
    b: int
    c: int
    den: int = 1

    @property
    def hnf(self):
        return (self.a, self.b, self.c)

    # -- construction helpers -------------------------------------------------

    @classmethod
    def _from_lattice(cls, ctx, a, b, c, den):
        k = gcd(gcd(gcd(a, b), c), den)
        if k > 1:
            a, b, c, den = a // k, b // k, c // k, den // k
        if c <= 0 or a % c or b % c or not 0 <= b < a:
            raise ValidationError(f"({a}, {b}, {c}) is not the HNF of an ideal")
        return cls(ctx, a, b, c, den)

    def zbasis(self):
        """Z-basis (a/den, (b + c*w)/den) as field elements."""
        ctx = self.ctx
        return (
            FieldElt(QuadInt(self.a, 0, ctx), self.den),
            FieldElt(QuadInt(self.b, self.c, ctx), self.den),
        )

    def _integral_basis(self):
        ctx = self.ctx
        return QuadInt(self.a, 0, ctx), QuadInt(self.b, self.c, ctx)

    # -- arithmetic -----------------------------------------------------------

    def __mul__(self, other):
        if not isinstance(other, FracIdeal):
            other = principal_ideal(self.ctx, other)
        if other.ctx != self.ctx:
            raise ValidationError("ideals of different fields")
        omega = self.ctx.omega
        vecs = []
        for x in self._integral_basis():
            for y in other._integral_basis():
                z = x * y
                zw = z * omega
                vecs.append((z.a, z.b))
                vecs.append((zw.a, zw.b))
        a, b, c = _hnf2(vecs)
        return FracIdeal._from_lattice(self.ctx, a, b, c, self.den * other.den)

    __rmul__ = __mul__

    def __add__(self, other):
        if other.ctx != self.ctx:
            raise ValidationError("ideals of different fields")
        den = self.den * other.den // gcd(self.den, other.den)
        vecs = []
        for ideal in (self, other):
            scale = den // ideal.den
            for x in ideal._integral_basis():
                vecs.append((x.a * scale, x.b * scale))
        a, b, c = _hnf2(vecs)
        return FracIdeal._from_lattice(self.ctx, a, b, c, den)

    def conj(self):
        x, y = self._integral_basis()
        return ideal_from_gens(self.ctx, [x.conj(), y.conj()]).scale(Fraction(1, self.den))

    def scale(self, q):
        """The ideal q*I for a nonzero rational q."""
        q = Fraction(q)
        if q == 0:
            raise ValidationError("scaling by zero")
        num, den = abs(q.numerator), q.denominator
        return FracIdeal._from_lattice(self.ctx, self.a * num, self.b * num, self.c * num, self.den * den)

    def inverse(self):
        # (J/den)^-1 = den * conj(J) / N(J) for integral J
        nj = self.a * self.c
        x, y = self._integral_basis()
        cj = ideal_from_gens(self.ctx, [x.conj(), y.conj()])
        return cj.scale(Fraction(self.den, nj))

    def __truediv__(self, other):
        if not isinstance(other, FracIdeal):
            other = principal_ideal(self.ctx, other)
        return self * other.inverse()

    def __pow__(self, e):
        base = self if e >= 0 else self.inverse()
        e = abs(e)
        result = one_ideal(self.ctx)
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    # -- predicates -----------------------------------------------------------

    def norm(self):
        return Fraction(self.a * self.c, self.den * self.den)

    def norm_int(self):
        if self.den != 1:
            raise ValidationError("integer norm requested for a non-integral ideal")
        return self.a * self.c

    def is_integral(self):
        return self.den == 1

    def is_one(self):
        return self.den == 1 and self.a == 1 and self.c == 1

    def contains(self, x):
        x = FieldElt.of(x, self.ctx)
        scaled = x * self.den
        if scaled.den != 1:
            return False
        z = scaled.num
        if z.b % self.c:
            return False
        k = z.b // self.c
        return (z.a - k * self.b) % self.a == 0

    def __contains__(self, x):
        return self.contains(x)

    def divides(self, other):
        """True iff other is contained in self (self | other)."""
        return all(self.contains(g) for g in other.zbasis())

    def is_coprime(self, other):
        if self.is_integral() and other.is_integral():
            return (self + other).is_one()
        mine = {p for p, _ in self.factor()}
        return not any(p in mine for p, _ in other.factor())

    def sort_key(self):
        return (self.norm(), self.den, self.a, self.b, self.c)

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    # -- factorization --------------------------------------------------------

    def valuation(self, p):
        """v_p(I) for a prime ideal p."""
        ell, e = _prime_data(p)
        v = 0
        j = FracIdeal(self.ctx, self.a, self.b, self.c, 1)
        pinv = p.inverse()
        while p.divides(j):
            j = j * pinv
            v += 1
        d, k = self.den, 0
        while d % ell == 0:
            d //= ell
            k += 1
        return v - e * k

    def factor(self):
        return factor_ideal(self)

    def is_prime(self):
        if not self.is_integral():
            return False
        nrm = self.a * self.c
        f = factorint(nrm)
        if len(f) != 1:
            return False
        (ell, k), = f.items()
        if k == 1:
            return True
        return k == 2 and splitting_type(self.ctx, ell) == "inert" and self == principal_ideal(self.ctx, ell)

    # -- principality ---------------------------------------------------------

    def reduced_form(self):
        """Reduced binary quadratic form of the (oriented) ideal lattice and its basis.

        Returns ((A, B, C), alpha, beta) where N(x*alpha + y*beta)/N(I) equals
        A x^2 + B xy + C y^2 and -A < B <= A <= C (B >= 0 when A == C).  The
        form is an invariant of the ideal class.
        """
        ctx = self.ctx
        a, b, c = self.a, self.b, self.c
        alpha = QuadInt(a, 0, ctx)
        beta = QuadInt(b, c, ctx)
        nrm = a * c
        A = a // c
        B = (2 * b + c * ctx.t) // c
        C = beta.norm() // nrm
        while True:
            k = (A - B) // (2 * A)
            if k:
                beta = beta + alpha * k
                C = C + k * B + k * k * A
                B = B + 2 * k * A
            if A > C:
                alpha, beta = beta, -alpha
                A, B, C = C, -B, A
                continue
            break
        if A == C and B < 0:
            alpha, beta = beta, -alpha
            B = -B
        return (A, B, C), alpha, beta

    def class_key(self):
        return self.reduced_form()[0]

    def generator(self):
        """A generator of I if it is principal, else None.

        The shortest vector of the lattice has norm N(I) exactly when the
        ideal is principal, and then it generates.
        """
        (A, _, _), alpha, _ = self.reduced_form()
        if A != 1:
            return None
        return _canonical_unit_multiple(FieldElt(alpha, self.den))

    def element_prime_to(self, f):
        """Some z in I (integral) lying outside every prime dividing f."""
        primes = [p for p, _ in f.factor()]
        x, y = self._integral_basis()
        if any(p.contains(x) and p.contains(y) for p in primes):
            raise ValidationError(f"{self} lies inside a prime dividing {f}")
        radius = 0
        while True:
            for i in range(-radius, radius + 1):
                for j in range(-radius, radius + 1):
                    if max(abs(i), abs(j)) != radius:
                        continue
                    z = x * i + y * j
                    if z and not any(p.contains(z) for p in primes):
                        return FieldElt(z, self.den)
            radius += 1

    # -- serialization --------------------------------------------------------

    def to_json(self):
        return {"hnf": [self.a, self.b, self.c], "den": self.den}

    @classmethod
    def from_json(cls, ctx, data):
        a, b, c = data["hnf"]
        return cls._from_lattice(ctx, int(a), int(b), int(c), int(data.get("den", 1)))

    def __repr__(self):
        s = f"[{self.a}, {self.b}, {self.c}]"
        if self.den != 1:
            s += f"/{self.den}"
        return f"FracIdeal(d={self.ctx.d}, {s})"


def _canonical_unit_multiple(x):
    # deterministic choice among the unit multiples of a generator
    units = unit_group(x.ctx)
    cands = [x * u for u in units]
    return max(cands, key=lambda g: (g.num.a > 0 and g.num.b >= 0, g.num.a, g.num.b))


def ideal_from_gens(ctx, gens):
    """The O_K-span of a list of field elements (ints, QuadInts, FieldElts)."""
    elts = [FieldElt.of(g, ctx) for g in gens]
    elts = [g for g in elts if g]
    if not elts:
        raise ValidationError("the zero ideal is not a fractional ideal")
    den = 1
    for g in elts:
        den = den * g.den // gcd(den, g.den)
    omega = ctx.omega
    vecs = []
    for g in elts:
        z = g.num * (den // g.den)
        zw = z * omega
        vecs.append((z.a, z.b))
        vecs.append((zw.a, zw.b))
    a, b, c = _hnf2(vecs)
    return FracIdeal._from_lattice(ctx, a, b, c, den)


def principal_ideal(ctx, x):
    return ideal_from_gens(ctx, [x])


def one_ideal(ctx):
    return FracIdeal(ctx, 1, 0, 1, 1)


def ideal_mul(i, j):
    return i * j


def ideal_inv(i):
    return i.inverse()


def ideal_norm(i):
    return i.norm()


def is_coprime(i, j):
    return i.is_coprime(j)


def is_principal(i):
    return i.generator()


# -- rational primes and their splitting ----------------------------------------

def splitting_type(ctx, ell):
    """'split', 'inert' or 'ramified' according to the Kronecker symbol (disc|ell)."""
    D = ctx.disc
    if ell == 2:
        if D % 2 == 0:
            return "ramified"
        return "split" if D % 8 == 1 else "inert"
    k = jacobi_symbol(D % ell, ell)
    return {0: "ramified", 1: "split", -1: "inert"}[k]


@lru_cache(maxsize=None)
def primes_above(ctx, ell):
    """Prime ideals over the rational prime ell, sorted by HNF."""
    kind = splitting_type(ctx, ell)
    if kind == "inert":
        return (principal_ideal(ctx, ell),)
    t, n = ctx.t, ctx.n
    if ell == 2:
        roots = [r for r in range(2) if (r * r - t * r + n) % 2 == 0]
    else:
        inv2 = pow(2, -1, ell)
        roots = sorted({(t + s) * inv2 % ell for s in sqrt_mod(ctx.disc % ell, ell, all_roots=True)})
    primes = [ideal_from_gens(ctx, [ell, QuadInt(-r, 1, ctx)]) for r in roots]
    return tuple(sorted(set(primes), key=lambda p: p.hnf))


def _prime_data(p):
    """(rational prime below p, ramification index)."""
    nrm = p.norm_int()
    f = factorint(nrm)
    if len(f) != 1:
        raise ValidationError(f"{p} is not a prime ideal")
    ell = next(iter(f))
    kind = splitting_type(p.ctx, ell)
    if kind == "inert" and nrm != ell * ell or kind != "inert" and nrm != ell:
        raise ValidationError(f"{p} is not a prime ideal")
    return ell, 2 if kind == "ramified" else 1


class PrimeFactorization(list):
    """List of (prime ideal, exponent) pairs sorted by norm, then HNF."""

    def product(self, ctx):
        result = one_ideal(ctx)
        for p, e in self:
            result = result * p ** e
        return result

    def support(self):
        return [p for p, _ in self]

    def to_json(self):
        return [{"prime": p.to_json(), "exp": e} for p, e in self]


def factor_ideal(ideal):
    ctx = ideal.ctx
    exps = {}
    integral = FracIdeal(ctx, ideal.a, ideal.b, ideal.c, 1)
    for ell in factorint(integral.a * integral.c):
        for p in primes_above(ctx, ell):
            v = integral.valuation(p)
            if v:
                exps[p] = exps.get(p, 0) + v
    for ell, k in factorint(ideal.den).items():
        for p in primes_above(ctx, ell):
            e = 2 if splitting_type(ctx, ell) == "ramified" else 1
            exps[p] = exps.get(p, 0) - e * k
    items = sorted(((p, e) for p, e in exps.items() if e), key=lambda pe: (pe[0].norm(), pe[0].hnf))
    return PrimeFactorization(items)


# -- enumeration ----------------------------------------------------------------

def _prime_power_options(ctx, ell, k):
    kind = splitting_type(ctx, ell)
    if kind == "inert":
        return [principal_ideal(ctx, ell ** (k // 2))] if k % 2 == 0 else []
    primes = primes_above(ctx, ell)
    if kind == "ramified":
        return [primes[0] ** k]
    p, q = primes
    return [p ** i * q ** (k - i) for i in range(k + 1)]


@lru_cache(maxsize=4096)
def ideals_of_norm(ctx, nrm):
    """All integral ideals of the given norm, sorted by HNF."""
    if nrm == 1:
        return (one_ideal(ctx),)
    options = [_prime_power_options(ctx, ell, k) for ell, k in factorint(nrm).items()]
    result = []
    for combo in product(*options):
        ideal = one_ideal(ctx)
        for part in combo:
            ideal = ideal * part
        result.append(ideal)
    return tuple(sorted(result, key=lambda i: i.hnf))


def ideals_up_to(ctx, bound, start=1):
    """Integral ideals with start <= norm <= bound, by norm then HNF."""
    for nrm in range(start, bound + 1):
        yield from ideals_of_norm(ctx, nrm)


def primes_up_to(ctx, bound):
    """Prime ideals of norm <= bound, sorted by norm then HNF."""
    out = []
    for ell in range(2, bound + 1):
        if len(factorint(ell)) == 1 and next(iter(factorint(ell).values())) == 1:
            out.extend(p for p in primes_above(ctx, ell) if p.norm_int() <= bound)
    return sorted(out, key=lambda p: (p.norm_int(), p.hnf))


def principal_search(ideal):
    """Exhaustive search for a generator of an integral ideal (slow oracle).

    Walks every lattice point of norm N(I) using the bound
    4 N(x + y w) = (2x + t y)^2 + |disc| y^2.
    """
    ctx = ideal.ctx
    if not ideal.is_integral():
        raise ValidationError("principal_search expects an integral ideal")
    target = ideal.a * ideal.c
    t, D = ctx.t, -ctx.disc
    ymax = isqrt(4 * target // D)
    for y in range(-ymax, ymax + 1):
        if y % ideal.c:
            continue
        rest = 4 * target - D * y * y
        if rest < 0:
            continue
        s = isqrt(rest)
        if s * s != rest:
            continue
        for sign in (1, -1):
            num = sign * s - t * y
            if num % 2:
                continue
            z = QuadInt(num // 2, y, ctx)
            if ideal.contains(z):
                return z
    return None


def one_mod_f(g, f):
    """True iff g = 1 mod* f, i.e. v_p(g - 1) >= v_p(f) for every p | f."""
    g = FieldElt.of(g, f.ctx)
    if not g:
        raise ValidationError("one_mod_f needs a nonzero element")
    if not f.is_integral():
        raise ValidationError("modulus must be integral")
    diff = g - 1
    if not diff:
        return True
    dideal = principal_ideal(f.ctx, diff)
    return all(dideal.valuation(p) >= e for p, e in f.factor())
