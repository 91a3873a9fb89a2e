"""Imaginary quadratic fields K = Q(sqrt(-d)), their integers and residue rings.

Every ring of integers is written Z[w] with

    w = sqrt(-d)          if d = 1, 2 mod 4   (SQRT)
    w = (1 + sqrt(-d))/2  if d = 3 mod 4      (HALF)

so w satisfies w^2 = t*w - n with t = Tr(w), n = N(w).  Under the complex
embedding used throughout, Im(w) > 0.
"""

import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from math import gcd

from sympy import factorint

from .errors import CapExceeded, ValidationError


class OmegaKind(Enum):
    SQRT = "sqrt"
    HALF = "half"


@dataclass(frozen=True)
class FieldCtx:
    d: int
    disc: int
    omega_kind: OmegaKind
    w: int

    @property
    def t(self):
        """Trace of w."""
        return 1 if self.omega_kind is OmegaKind.HALF else 0

    @property
    def n(self):
        """Norm of w."""
        return (1 + self.d) // 4 if self.omega_kind is OmegaKind.HALF else self.d

    @property
    def omega(self):
        return QuadInt(0, 1, self)

    def one(self):
        return QuadInt(1, 0, self)

    def zero(self):
        return QuadInt(0, 0, self)

    def __call__(self, a, b=0):
        return QuadInt(a, b, self)

    def omega_complex(self, mp=None):
        """w as a complex number (mpmath mpc if `mp` is given, else Python complex)."""
        if mp is None:
            if self.omega_kind is OmegaKind.SQRT:
                return complex(0, self.d ** 0.5)
            return complex(0.5, self.d ** 0.5 / 2)
        root = mp.sqrt(self.d)
        if self.omega_kind is OmegaKind.SQRT:
            return mp.mpc(0, root)
        return mp.mpc(mp.mpf(1) / 2, root / 2)

    def to_json(self):
        return {"d": self.d}


def _is_squarefree(d):
    return all(e == 1 for e in factorint(d).values())


@lru_cache(maxsize=None)
def make_field(d):
    if not isinstance(d, int) or isinstance(d, bool):
        raise ValidationError(f"d must be an integer, got {d!r}")
    if d <= 0:
        raise ValidationError(f"d must be positive, got {d}")
    if not _is_squarefree(d):
        raise ValidationError(f"d={d} is not squarefree")
    if d % 4 == 3:
        kind, disc = OmegaKind.HALF, -d
    else:
        kind, disc = OmegaKind.SQRT, -4 * d
    w = {1: 4, 3: 6}.get(d, 2)
    return FieldCtx(d, disc, kind, w)


def _same_ctx(x, y):
    if x.ctx is not y.ctx and x.ctx != y.ctx:
        raise ValidationError("elements of different fields cannot be combined")


class QuadInt:
    """An element a + b*w of O_K."""

    __slots__ = ("a", "b", "ctx")

    def __init__(self, a, b, ctx):
        self.a = int(a)
        self.b = int(b)
        self.ctx = ctx

    def _coerce(self, other):
        if isinstance(other, QuadInt):
            _same_ctx(self, other)
            return other
        if isinstance(other, int):
            return QuadInt(other, 0, self.ctx)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return QuadInt(self.a + other.a, self.b + other.b, self.ctx)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return QuadInt(self.a - other.a, self.b - other.b, self.ctx)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return QuadInt(-self.a, -self.b, self.ctx)

    def __mul__(self, other):
        if isinstance(other, int):
            return QuadInt(self.a * other, self.b * other, self.ctx)
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        t, n = self.ctx.t, self.ctx.n
        a, b, c, d = self.a, self.b, other.a, other.b
        bd = b * d
        return QuadInt(a * c - n * bd, a * d + b * c + t * bd, self.ctx)

    __rmul__ = __mul__

    def __pow__(self, e):
        if e < 0:
            raise ValidationError("negative power of an integral element")
        result = QuadInt(1, 0, self.ctx)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, int):
            return self.b == 0 and self.a == other
        if isinstance(other, QuadInt):
            return self.a == other.a and self.b == other.b and self.ctx == other.ctx
        if isinstance(other, FieldElt):
            return other == self
        return NotImplemented

    def __hash__(self):
        return hash((self.a, self.b, self.ctx.d))

    def __bool__(self):
        return bool(self.a or self.b)

    def conj(self):
        return QuadInt(self.a + self.b * self.ctx.t, -self.b, self.ctx)

    def norm(self):
        a, b = self.a, self.b
        return a * a + self.ctx.t * a * b + self.ctx.n * b * b

    def trace(self):
        return 2 * self.a + self.ctx.t * self.b

    def to_complex(self, mp=None):
        return self.a + self.b * self.ctx.omega_complex(mp)

    def __repr__(self):
        return f"QuadInt({format_element(self)!r}, d={self.ctx.d})"

    def __str__(self):
        return format_element(self)


class FieldElt:
    """An element num/den of K with num in O_K and den > 0, in lowest terms."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=1):
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        if den < 0:
            num, den = -num, -den
        g = gcd(gcd(num.a, num.b), den)
        if g > 1:
            num = QuadInt(num.a // g, num.b // g, num.ctx)
            den //= g
        self.num = num
        self.den = den

    @property
    def ctx(self):
        return self.num.ctx

    @classmethod
    def of(cls, x, ctx=None):
        if isinstance(x, FieldElt):
            return x
        if isinstance(x, QuadInt):
            return cls(x, 1)
        if isinstance(x, int):
            return cls(QuadInt(x, 0, ctx), 1)
        if isinstance(x, Fraction):
            return cls(QuadInt(x.numerator, 0, ctx), x.denominator)
        raise TypeError(f"cannot convert {x!r} to a field element")

    def _coerce(self, other):
        if isinstance(other, (FieldElt, QuadInt, int, Fraction)):
            return FieldElt.of(other, self.ctx)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return FieldElt(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return FieldElt(-self.num, self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return FieldElt(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self):
        nrm = self.num.norm()
        if nrm == 0:
            raise ZeroDivisionError("inverse of zero")
        return FieldElt(self.num.conj() * self.den, nrm)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return FieldElt.of(other, self.ctx) * self.inverse()

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        return FieldElt(self.num ** e, self.den ** e)

    def __eq__(self, other):
        if isinstance(other, (QuadInt, int)):
            other = FieldElt.of(other, self.ctx)
        if not isinstance(other, FieldElt):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __bool__(self):
        return bool(self.num)

    def conj(self):
        return FieldElt(self.num.conj(), self.den)

    def norm(self):
        return Fraction(self.num.norm(), self.den * self.den)

    def trace(self):
        return Fraction(self.num.trace(), self.den)

    def is_integral(self):
        return self.den == 1

    def to_quadint(self):
        if self.den != 1:
            raise ValidationError(f"{self} is not integral")
        return self.num

    def to_complex(self, mp=None):
        z = self.num.to_complex(mp)
        return z / (mp.mpf(self.den) if mp is not None else self.den)

    def __repr__(self):
        return f"FieldElt({format_element(self)!r}, d={self.ctx.d})"

    def __str__(self):
        return format_element(self)


def unit_group(ctx):
    """All w units of O_K, starting with 1 and closed under multiplication."""
    one = ctx.one()
    if ctx.d == 1:
        i = ctx.omega
        return [one, i, -one, -i]
    if ctx.d == 3:
        units, u = [], one
        for _ in range(6):
            units.append(u)
            u = u * ctx.omega
        return units
    return [one, -one]


def norm(x):
    return x.norm()


def trace(x):
    return x.trace()


def conj(x):
    return x.conj()


# -- serialization -----------------------------------------------------------

def format_element(x):
    """'a+b*w' (or 'a+b*w/den' for non-integral field elements)."""
    if isinstance(x, FieldElt):
        s = f"{x.num.a}+{x.num.b}*w"
        return s if x.den == 1 else f"{s}/{x.den}"
    return f"{x.a}+{x.b}*w"


_TERM = re.compile(r"([+-]*)([^+-]+)")


def parse_element(ctx, text):
    """Parse 'a+b*w', 'a', 'b*w', 'w', 'a-w', optionally followed by '/den'."""
    s = text.replace(" ", "")
    s, _, den_text = s.partition("/")
    try:
        den = int(den_text) if den_text else 1
    except ValueError:
        raise ValidationError(f"cannot parse element {text!r}") from None
    if den <= 0:
        raise ValidationError(f"denominator must be positive in {text!r}")
    terms = _TERM.findall(s)
    if not s or "".join(sign + body for sign, body in terms) != s:
        raise ValidationError(f"cannot parse element {text!r}")
    a = b = 0
    try:
        for signs, body in terms:
            sign = -1 if signs.count("-") % 2 else 1
            if body.endswith("w"):
                coeff = body[:-1].rstrip("*")
                b += sign * (int(coeff) if coeff else 1)
            else:
                a += sign * int(body)
    except ValueError:
        raise ValidationError(f"cannot parse element {text!r}") from None
    return FieldElt(QuadInt(a, b, ctx), den)


# -- residue rings -----------------------------------------------------------

class ResidueRing:
    """O_K/f for a nonzero integral ideal f.

    With f = Z*a + Z*(b + c*w) in HNF, every class has a unique representative
    x + y*w with 0 <= x < a and 0 <= y < c.
    """

    def __init__(self, f, cap=10**6):
        if not f.is_integral():
            raise ValidationError("residue ring modulus must be an integral ideal")
        self.modulus = f
        self.ctx = f.ctx
        self.size = f.a * f.c
        self.cap = cap
        self._primes = None
        self._units = None

    def __repr__(self):
        return f"ResidueRing(d={self.ctx.d}, f={self.modulus.hnf})"

    @property
    def primes(self):
        if self._primes is None:
            self._primes = [p for p, _ in self.modulus.factor()]
        return self._primes

    def reduce(self, x):
        """Canonical representative of x mod f.

        Non-integral field elements are accepted when their denominator ideal
        is prime to f.
        """
        if isinstance(x, int):
            x = QuadInt(x, 0, self.ctx)
        elif isinstance(x, FieldElt):
            if x.den != 1:
                return self._reduce_fraction(x)
            x = x.num
        f = self.modulus
        k = x.b // f.c
        xa = (x.a - k * f.b) % f.a
        return QuadInt(xa, x.b - k * f.c, self.ctx)

    def _reduce_fraction(self, x):
        # x = num/den; invert den modulo a when it is prime to f
        f = self.modulus
        if gcd(x.den, f.a) == 1:
            return self.reduce(x.num * pow(x.den, -1, f.a))
        from .ideals import ideal_from_gens, one_ideal

        denominators = (ideal_from_gens(self.ctx, [x]) + one_ideal(self.ctx)).inverse()
        if not denominators.is_coprime(f):
            raise ValidationError(f"{x} is not integral at the primes dividing the modulus")
        z = denominators.element_prime_to(f)
        zx = (x * z).to_quadint()
        return self.mul(self.reduce(zx), self.inverse(self.reduce(z)))

    def key(self, x):
        r = self.reduce(x)
        return (r.a, r.b)

    def add(self, x, y):
        return self.reduce(x + y)

    def mul(self, x, y):
        return self.reduce(x * y)

    def pow(self, x, e):
        result = self.reduce(1)
        base = self.reduce(x)
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def is_zero(self, x):
        r = self.reduce(x)
        return r.a == 0 and r.b == 0

    def is_unit(self, x):
        if self.size == 1:
            return True
        x = self.reduce(x)
        return all(not p.contains(x) for p in self.primes)

    def unit_count(self):
        """#(O_K/f)^x by multiplicativity over the prime factors of f."""
        count = Fraction(self.size)
        for p in self.primes:
            np_ = p.norm_int()
            count *= Fraction(np_ - 1, np_)
        return int(count)

    def inverse(self, x):
        if not self.is_unit(x):
            raise ValidationError(f"{x} is not a unit modulo f")
        return self.pow(x, self.unit_count() - 1)

    def elements(self):
        if self.size > self.cap:
            raise CapExceeded(f"residue ring of size {self.size} exceeds enumeration cap {self.cap}")
        f = self.modulus
        return [QuadInt(x, y, self.ctx) for y in range(f.c) for x in range(f.a)]

    def units(self):
        if self._units is None:
            self._units = [x for x in self.elements() if self.is_unit(x)]
        return self._units


def residue_ring(ctx, f, cap=10**6):
    if f.ctx != ctx:
        raise ValidationError("modulus belongs to a different field")
    return ResidueRing(f, cap=cap)
