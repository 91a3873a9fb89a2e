"""Class groups and ray class groups CL^(f) of imaginary quadratic orders.

A ray class of conductor f is encoded by a pair (k, c): k is the ideal class
in CL and c is a coset of im(O_K^x) in (O_K/f)^x.  For every class k a
representative r_k is fixed whose norm is prime to Nf.  An integral ideal a
prime to f then has a*conj(r_k) = (g) principal and its ray class is
(k, coset of g/N(r_k) mod f).  Two ideals of the same class k are ray
equivalent exactly when those cosets agree, so the encoding is a bijection.
"""

import math
from dataclasses import dataclass, field
from itertools import product as iproduct

from sympy import factorint

from .errors import CapExceeded, InternalConsistencyError, ValidationError
from .ideals import (
    FracIdeal,
    ideals_up_to,
    one_ideal,
    one_mod_f,
    principal_ideal,
    primes_up_to,
)
from .quadfield import FieldElt, QuadInt, ResidueRing, unit_group


def abelian_invariants(n, order_of):
    """Invariant factors d1 | d2 | ... of an abelian group of order n.

    `order_of` lists the order of every element.  Uses the counts
    #{x : x^(l^k) = 1} = l^(sum_i min(e_i, k)) for each prime l | n.
    """
    exps_by_prime = {}
    for ell in factorint(n):
        counts = [1]
        k = 1
        while True:
            c = sum(1 for o in order_of if (ell ** k) % o == 0)
            counts.append(c)
            if c == counts[-2] and k > 1 or c == n:
                break
            k += 1
        ranks = []
        for k in range(1, len(counts)):
            ratio = counts[k] // counts[k - 1]
            ranks.append(round(math.log(ratio, ell)) if ratio > 1 else 0)
        exps = []
        j = 1
        while ranks and j <= ranks[0]:
            exps.append(sum(1 for r in ranks if r >= j))
            j += 1
        exps_by_prime[ell] = exps
    width = max((len(v) for v in exps_by_prime.values()), default=0)
    invariants = []
    for j in range(width):
        d = 1
        for ell, exps in exps_by_prime.items():
            if j < len(exps):
                d *= ell ** exps[j]
        invariants.append(d)
    return sorted(invariants)


class FiniteAbelianGroup:
    """Mixin: element orders, powers and invariants from `mul` and `order`."""

    identity = 0

    def power(self, x, e):
        e %= self.exponent()
        result, base = self.identity, x
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def element_order(self, x):
        k, y = 1, x
        while y != self.identity:
            y = self.mul(y, x)
            k += 1
        return k

    def orders(self):
        if getattr(self, "_orders", None) is None:
            self._orders = [self.element_order(x) for x in range(self.order)]
        return self._orders

    def exponent(self):
        if getattr(self, "_exponent", None) is None:
            e = 1
            for o in self.orders():
                e = e * o // math.gcd(e, o)
            self._exponent = e
        return self._exponent

    def inv(self, x):
        return self.power(x, self.exponent() - 1)

    @property
    def elementary_divisors(self):
        if getattr(self, "_invariants", None) is None:
            self._invariants = abelian_invariants(self.order, self.orders())
        return self._invariants

    def subgroup_generated(self, gens):
        seen = {self.identity}
        frontier = [self.identity]
        while frontier:
            x = frontier.pop()
            for g in gens:
                y = self.mul(x, g)
                if y not in seen:
                    seen.add(y)
                    frontier.append(y)
        return seen


def direct_sum_basis(group, candidates):
    """Pick elements from `candidates` whose cyclic subgroups form a direct sum
    decomposition with orders equal to the invariant factors (largest first).

    `candidates` is a sequence of (label, element); the first successful
    choice in candidate order is returned as [(label, element, order), ...].
    """
    targets = list(reversed(group.elementary_divisors))
    if not targets:
        return []
    by_order = {}
    for label, x in candidates:
        by_order.setdefault(group.element_order(x), []).append((label, x))

    def search(i, chosen, size):
        if i == len(targets):
            return chosen
        for label, x in by_order.get(targets[i], []):
            if any(x == y for _, y, _ in chosen):
                continue
            span = group.subgroup_generated([y for _, y, _ in chosen] + [x])
            if len(span) != size * targets[i]:
                continue
            found = search(i + 1, chosen + [(label, x, targets[i])], size * targets[i])
            if found is not None:
                return found
        return None

    return search(0, [], 1)


def minkowski_bound(ctx):
    return int(2 * math.sqrt(-ctx.disc) / math.pi) + 1


class ClassGroup(FiniteAbelianGroup):
    """CL(O_K) with canonical least-norm integral representatives."""

    def __init__(self, ctx, reps, keys):
        self.ctx = ctx
        self.reps = reps
        self.keys = keys
        self.index = {k: i for i, k in enumerate(keys)}
        self.order = len(reps)
        self.h = self.order
        self.table = [[self.class_index(x * y) for y in reps] for x in reps]

    def class_index(self, ideal):
        integral = FracIdeal(ideal.ctx, ideal.a, ideal.b, ideal.c, 1)
        key = integral.class_key()
        try:
            return self.index[key]
        except KeyError:
            raise InternalConsistencyError(f"reduced form {key} is not among the class representatives") from None

    def mul(self, i, j):
        return self.table[i][j]

    def to_json(self):
        return {
            "h": self.h,
            "reps": [r.to_json() for r in self.reps],
            "elementary_divisors": self.elementary_divisors,
        }


_CLASS_GROUPS = {}


def class_group(ctx, cap=10**6):
    """Enumerate integral ideals up to the Minkowski bound and merge equal classes."""
    if ctx in _CLASS_GROUPS:
        return _CLASS_GROUPS[ctx]
    bound = minkowski_bound(ctx)
    if bound > cap:
        raise CapExceeded(f"Minkowski bound {bound} exceeds the enumeration cap {cap}")
    reps, keys = [], []
    for ideal in ideals_up_to(ctx, bound):
        key = ideal.class_key()
        if key not in keys:
            keys.append(key)
            reps.append(ideal)
    group = ClassGroup(ctx, reps, keys)
    _CLASS_GROUPS[ctx] = group
    return group


def count_reduced_forms(disc):
    """Number of reduced primitive positive definite forms of discriminant disc."""
    count = 0
    a = 1
    while 3 * a * a <= -disc:
        for b in range(-a + 1, a + 1):
            if (b * b - disc) % (4 * a):
                continue
            c = (b * b - disc) // (4 * a)
            if c < a or (c == a and b < 0):
                continue
            if math.gcd(math.gcd(a, abs(b)), c) != 1:
                continue
            count += 1
        a += 1
    return count


@dataclass(frozen=True)
class LevelStructure:
    """A level-f structure on a rank-one module, recorded as the image of a
    chosen generator in (O_K/f)^x."""

    modulus: FracIdeal
    image: QuadInt

    def __post_init__(self):
        if not ResidueRing(self.modulus).is_unit(self.image):
            raise ValidationError("a level structure must send the generator to a unit")


@dataclass(frozen=True)
class RayClassElem:
    index: int
    ideal_class: int
    unit_coset: int


class RayClassGroup(FiniteAbelianGroup):
    def __init__(self, ctx, f, cap=10**6, cap_order=10**5):
        if not f.is_integral():
            raise ValidationError("the conductor must be an integral ideal")
        self.ctx = ctx
        self.f = f
        self.cap = cap
        self.cl = class_group(ctx, cap)
        self.ring = ResidueRing(f, cap=cap)
        self.nf = f.a * f.c
        units = self.ring.units()
        self.unit_images = [self.ring.reduce(u) for u in unit_group(ctx)]
        self.im_units = {(u.a, u.b) for u in self.unit_images}

        one_key = self.ring.key(1)
        orbit_of = {}
        orbits = []
        seen = set()
        for u in units:
            key = (u.a, u.b)
            if key in seen:
                continue
            orbit = {self.ring.key(u * e) for e in self.unit_images}
            seen |= orbit
            orbits.append((key not in self.im_units and 1 or 0, min(orbit), orbit))
        orbits.sort(key=lambda t: (t[0], t[1]))
        self.coset_reps = []
        for idx, (_, rep, orbit) in enumerate(orbits):
            self.coset_reps.append(QuadInt(rep[0], rep[1], ctx))
            for key in orbit:
                orbit_of[key] = idx
        self.coset_of = orbit_of
        if orbit_of.get(one_key) != 0:
            raise InternalConsistencyError("the identity coset is not first")
        self.m = len(orbits)
        self.order = self.cl.h * self.m
        if self.order > cap_order:
            raise CapExceeded(f"ray class group of order {self.order} exceeds cap {cap_order}")

        self.class_reps = self._coprime_class_reps()
        self._coset_table = {}
        self._cocycle = {}
        self._canonical = None

    # -- encoding -----------------------------------------------------------

    def _coprime_class_reps(self):
        reps = [None] * self.cl.h
        missing = self.cl.h
        for ideal in ideals_up_to(self.ctx, self.cap):
            if math.gcd(ideal.a * ideal.c, self.nf) != 1:
                continue
            k = self.cl.class_index(ideal)
            if reps[k] is None:
                reps[k] = ideal
                missing -= 1
                if not missing:
                    return reps
        raise CapExceeded("no class representatives prime to f below the cap")

    def _residue_of_principal(self, ideal):
        """Residue of a generator of the principal integral ideal, as a key."""
        g = ideal.generator()
        if g is None:
            raise InternalConsistencyError(f"{ideal} was expected to be principal")
        return self.ring.key(g)

    def _encode(self, a):
        k = self.cl.class_index(a)
        r = self.class_reps[k]
        g = (a * r.conj()).generator()
        if g is None:
            raise InternalConsistencyError("a * conj(r_k) is not principal")
        nr = r.a * r.c
        res = self.ring.reduce(g.num * pow(nr * g.den, -1, self.f.a)) if self.nf > 1 else self.ring.reduce(0)
        key = (res.a, res.b)
        try:
            c = self.coset_of[key]
        except KeyError:
            raise InternalConsistencyError(f"{a} maps to a non-unit residue") from None
        return k * self.m + c

    def decode(self, i):
        return divmod(i, self.m)

    def elem(self, i):
        k, c = self.decode(i)
        return RayClassElem(i, k, c)

    def iota(self, u):
        """Image of a unit residue u in CL^(f) (the principal ideal class of a lift)."""
        key = self.ring.key(u)
        return self.coset_of[key]

    # -- group law ----------------------------------------------------------

    def _coset_mul(self, c1, c2):
        key = (c1, c2) if c1 <= c2 else (c2, c1)
        if key not in self._coset_table:
            prod = self.ring.mul(self.coset_reps[c1], self.coset_reps[c2])
            self._coset_table[key] = self.coset_of[(prod.a, prod.b)]
        return self._coset_table[key]

    def mul(self, i, j):
        k1, c1 = divmod(i, self.m)
        k2, c2 = divmod(j, self.m)
        ck = (k1, k2) if k1 <= k2 else (k2, k1)
        if ck not in self._cocycle:
            self._cocycle[ck] = self._encode(self.class_reps[k1] * self.class_reps[k2])
        k3, cb = divmod(self._cocycle[ck], self.m)
        return k3 * self.m + self._coset_mul(self._coset_mul(c1, c2), cb)

    # -- brackets -------------------------------------------------------------

    def bracket_ideal(self, a):
        """[a]_f: the class of a with its canonical level structure."""
        if a.ctx != self.ctx:
            raise ValidationError("ideal belongs to a different field")
        if a.is_integral():
            if not a.is_coprime(self.f):
                raise ValidationError(f"{a} is not coprime to the conductor")
            return self._encode(a)
        if math.gcd(a.den, self.nf) == 1:
            num = FracIdeal(self.ctx, a.a, a.b, a.c, 1)
            return self.mul(self.bracket_ideal(num), self.inv(self.bracket_ideal(principal_ideal(self.ctx, a.den))))
        result = self.identity
        fprimes = {p for p, _ in self.f.factor()}
        for p, e in a.factor():
            if p in fprimes:
                raise ValidationError(f"{a} is not coprime to the conductor")
            x = self._encode(p)
            result = self.mul(result, self.power(x, e))
        return result

    def dlog(self, a):
        return self.bracket_ideal(a)

    def ideal_of(self, i):
        """Some integral ideal in the ray class i (cheap, not least norm)."""
        k, c = divmod(i, self.m)
        lift = self.coset_reps[c]
        if not lift:
            lift = QuadInt(1, 0, self.ctx)
        return self.class_reps[k] * principal_ideal(self.ctx, lift)

    def canonical_rep(self, i):
        """Least-norm integral ideal prime to f in class i (ties by HNF)."""
        if self._canonical is None:
            reps = [None] * self.order
            missing = self.order
            for ideal in ideals_up_to(self.ctx, self.cap):
                if not ideal.is_coprime(self.f):
                    continue
                j = self._encode(ideal)
                if reps[j] is None:
                    reps[j] = ideal
                    missing -= 1
                    if not missing:
                        break
            else:
                raise CapExceeded("ray class representatives exceed the norm cap")
            self._canonical = reps
        return self._canonical[i]

    def to_json(self):
        return {
            "order": self.order,
            "elementary_divisors": self.elementary_divisors,
            "conductor": self.f.to_json(),
            "h": self.cl.h,
        }


_RAY_GROUPS = {}


def ray_class_group(ctx, f, cap=10**6, cap_order=10**5):
    key = (ctx, f)
    if key not in _RAY_GROUPS:
        _RAY_GROUPS[key] = RayClassGroup(ctx, f, cap=cap, cap_order=cap_order)
    return _RAY_GROUPS[key]


def bracket_ideal(group, a):
    return group.bracket_ideal(a)


def _element_with_unit_quotient(L, f):
    """y in L with (y) * L^-1 integral and prime to f."""
    linv = L.inverse()
    x, y = L.zbasis()
    radius = 0
    while True:
        for i in range(-radius, radius + 1):
            for j in range(-radius, radius + 1):
                if max(abs(i), abs(j)) != radius:
                    continue
                z = x * i + y * j
                if not z:
                    continue
                c = principal_ideal(L.ctx, z) * linv
                if c.is_integral() and c.is_coprime(f):
                    return z, c
        radius += 1


def bracket_idele(group, components, default=1):
    """[s]_f for the finite idele s with the given components.

    `components` maps prime ideals to nonzero field elements, optionally as
    (value, precision) pairs where precision counts the p-adic digits known;
    every other prime carries the global element `default`.  The class is
    that of (s)^-1 with level structure x -> s*x mod f.
    """
    ctx, f = group.ctx, group.f
    default = FieldElt.of(default, ctx)
    if not default:
        raise ValidationError("the default component must be nonzero")
    comps = {}
    for p, value in components.items():
        prec = None
        if isinstance(value, tuple):
            value, prec = value
        value = FieldElt.of(value, ctx)
        if not value:
            raise ValidationError("idele components must be nonzero")
        if not p.is_prime():
            raise ValidationError(f"{p} is not a prime ideal")
        comps[p] = (value, prec)

    fexp = dict(f.factor())
    for p, e in fexp.items():
        if p in comps:
            value, prec = comps[p]
            if prec is not None and prec < e + principal_ideal(ctx, value).valuation(p):
                raise ValidationError(f"component at {p} is known to too few digits for conductor {f}")

    s_ideal = one_ideal(ctx)
    for p, (value, _) in comps.items():
        s_ideal = s_ideal * p ** principal_ideal(ctx, value).valuation(p)
    for p, e in principal_ideal(ctx, default).factor():
        if p not in comps:
            s_ideal = s_ideal * p ** e
    L = s_ideal.inverse()

    y, c = _element_with_unit_quotient(L, f)
    residues = {}
    for p, e in fexp.items():
        value = comps[p][0] if p in comps else default
        residues[p] = ResidueRing(p ** e).reduce(value * y)
    u = _crt(group, residues)
    return group.mul(group.inv(group.bracket_ideal(c)), group.iota(u))


def _crt(group, residues):
    """The unit of O_K/f with prescribed residues modulo each p^e || f."""
    if group.nf == 1:
        return group.ring.reduce(1)
    rings = {p: ResidueRing(p ** e) for p, e in group.f.factor()}
    target = {p: rings[p].key(r) for p, r in residues.items()}
    for u in group.ring.units():
        if all(rings[p].key(u) == k for p, k in target.items()):
            return u
    raise InternalConsistencyError("Chinese remainder reconstruction failed")


def in_prin_one_mod_f(a, f):
    """Is a in Prin_{1 mod f}: principal with some generator = 1 mod* f?"""
    g = a.generator()
    if g is None:
        return False
    return any(one_mod_f(g * u, f) for u in unit_group(a.ctx))


def kernel_check(group, bound):
    """[a]_f trivial iff a in Prin_{1 mod f}, for integral a prime to f with Na <= bound."""
    counterexamples = []
    checked = 0
    for a in ideals_up_to(group.ctx, bound):
        if not a.is_coprime(group.f):
            continue
        checked += 1
        trivial = group.bracket_ideal(a) == group.identity
        if trivial != in_prin_one_mod_f(a, group.f):
            counterexamples.append(a)
    return {"checked": checked, "counterexamples": [a.to_json() for a in counterexamples]}


def separates_units(ctx, f):
    ring = ResidueRing(f)
    return len({ring.key(u) for u in unit_group(ctx)}) == ctx.w


def exactness_report(group):
    """Exactness of 1 -> im(O_K^x) -> (O_K/f)^x -> CL^(f) -> CL -> 1 by enumeration."""
    ctx, ring = group.ctx, group.ring
    units = ring.units()
    unit_keys = {(u.a, u.b) for u in units}
    im_u = group.im_units
    closed = all(ring.key(QuadInt(x[0], x[1], ctx) * QuadInt(y[0], y[1], ctx)) in im_u for x in im_u for y in im_u)

    iota_images = set()
    kernel_ok = True
    for u in units:
        lift = u if u else QuadInt(1, 0, ctx)
        cls = group.bracket_ideal(principal_ideal(ctx, lift))
        iota_images.add(cls)
        if (cls == group.identity) != ((u.a, u.b) in im_u):
            kernel_ok = False
    to_cl = [group.cl.class_index(group.ideal_of(i)) for i in range(group.order)]
    ker_proj = {i for i, k in enumerate(to_cl) if k == 0}
    order_formula = group.cl.h * ring.unit_count() // len(im_u)
    return {
        "units_subgroup": closed and im_u <= unit_keys,
        "exact_at_units": kernel_ok,
        "exact_at_ray": iota_images == ker_proj,
        "surjective_to_class_group": set(to_cl) == set(range(group.cl.h)),
        "order_formula": order_formula == group.order and ring.unit_count() == len(units),
    }


def projection_map(big, small):
    """CL^(f') -> CL^(f) for f | f', as an index list."""
    if not small.f.divides(big.f):
        raise ValidationError("the smaller conductor must divide the larger one")
    return [small.bracket_ideal(big.ideal_of(i)) for i in range(big.order)]
