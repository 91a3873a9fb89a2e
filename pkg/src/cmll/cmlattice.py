"""CM elliptic curves over C as lattices C/c with c a fractional ideal of O_K.

Maps between curves are recorded by their multiplier z in K: z induces
C/c -> C/c' whenever z*c is contained in c'.  Two such maps agree exactly when
their multipliers agree, and this is what the ghost-family checks detect on
finitely many torsion points.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .errors import CapExceeded, InternalConsistencyError, PrecisionError, ValidationError
from .ideals import FracIdeal, _hnf2, ideals_up_to, one_ideal, principal_ideal
from .quadfield import FieldElt, QuadInt, ResidueRing, format_element, unit_group
from .rayclass import class_group, ray_class_group


@dataclass(frozen=True)
class CMLattice:
    ctx: object
    lattice: FracIdeal

    def __post_init__(self):
        if self.lattice.ctx != self.ctx:
            raise ValidationError("lattice belongs to a different field")

    def is_isomorphic(self, other):
        cl = class_group(self.ctx)
        return cl.class_index(self.lattice) == cl.class_index(other.lattice)

    def to_json(self):
        return {"d": self.ctx.d, "lattice": self.lattice.to_json()}


def cm_curve(ctx, lattice=None):
    return CMLattice(ctx, lattice or one_ideal(ctx))


def serre_tensor(E, b):
    """E tensor b: the lattice b*c."""
    return CMLattice(E.ctx, b * E.lattice)


def hom_ideal(E, E2):
    """{z in K : z*c in c'} = c' * c^-1."""
    if E.ctx != E2.ctx:
        raise ValidationError("curves over different fields")
    return E2.lattice * E.lattice.inverse()


def evaluation(E, E2):
    """The lattice of E tensor Hom(E, E2); equals that of E2 on the nose."""
    return serre_tensor(E, hom_ideal(E, E2))


# -- torsion -------------------------------------------------------------------------


class TorsionModule:
    """f^-1 c / c with coordinates in a Z-basis of f^-1 c."""

    def __init__(self, E, f, cap=10**6):
        if not f.is_integral() or f.norm_int() == 0:
            raise ValidationError("torsion level must be a nonzero integral ideal")
        self.E = E
        self.f = f
        self.ctx = E.ctx
        self.big = f.inverse() * E.lattice
        self.basis = self.big.zbasis()
        vecs = [self.coords(z) for z in E.lattice.zbasis()]
        self.A, self.B, self.C = _hnf2(vecs)
        self.size = self.A * self.C
        if self.size != f.norm_int():
            raise InternalConsistencyError(f"index of c in f^-1 c is {self.size}, not Nf = {f.norm_int()}")
        if self.size > cap:
            raise CapExceeded(f"torsion module of size {self.size} exceeds cap {cap}")
        self._generator = None
        self._dlog = None

    def coords(self, z):
        """Integer coordinates of z in the Z-basis of f^-1 c."""
        z = FieldElt.of(z, self.ctx)
        big = self.big
        zn, zd = z.num, z.den
        y = Fraction(zn.b * big.den, zd * big.c)
        x = (Fraction(zn.a * big.den, zd) - y * big.b) / big.a
        if x.denominator != 1 or y.denominator != 1:
            raise ValidationError(f"{z} is not in f^-1 c")
        return int(x), int(y)

    def reduce(self, v):
        x, y = v
        k = y // self.C
        return ((x - k * self.B) % self.A, y - k * self.C)

    def element(self, v):
        m1, m2 = self.basis
        return m1 * v[0] + m2 * v[1]

    def elements(self):
        return [(x, y) for y in range(self.C) for x in range(self.A)]

    def act(self, r, v):
        """r . v for r in O_K."""
        return self.reduce(self.coords(self.element(v) * FieldElt.of(r, self.ctx)))

    def generates(self, v):
        """Does the O_K-orbit of v exhaust the module?"""
        vecs = [self.element(v), self.element(v) * FieldElt.of(self.ctx.omega, self.ctx)]
        span = [self.coords(z) for z in vecs] + [self.coords(z) for z in self.E.lattice.zbasis()]
        try:
            a, _, c = _hnf2(span)
        except ValidationError:
            return False
        return a == 1 and c == 1

    @property
    def generator(self):
        if self._generator is None:
            for v in self.elements():
                if self.generates(v):
                    self._generator = v
                    break
            else:
                raise InternalConsistencyError("no cyclic generator found in a rank-one module")
        return self._generator

    def dlog(self, v):
        """The residue x in O_K/f with v = x . generator."""
        if self._dlog is None:
            ring = ResidueRing(self.f)
            table = {}
            for x in ring.elements():
                table[self.act(x, self.generator)] = x
            if len(table) != self.size:
                raise InternalConsistencyError("generator does not give a bijection O_K/f -> E[f]")
            self._dlog = table
        return self._dlog[self.reduce(v)]

    def to_json(self):
        return {
            "level": self.f.to_json(),
            "size": self.size,
            "generator": format_element(self.element(self.generator)) if self.size > 1 else "0",
        }


def torsion_module(E, f, cap=10**6):
    return TorsionModule(E, f, cap)


def isogeny_kernel(E, a, cap=10**6):
    """Kernel of C/c -> C/(a^-1 c), i.e. a^-1 c / c."""
    return TorsionModule(E, a, cap)


# -- level structures and moduli -------------------------------------------------------


@dataclass(frozen=True)
class LeveledCurve:
    """(E, beta) with beta(generator of E[f]) = image, a unit of O_K/f."""

    curve: CMLattice
    f: FracIdeal
    image: QuadInt

    def to_json(self):
        return {"curve": self.curve.to_json(), "level": self.f.to_json(), "image": format_element(self.image)}


def level_structures(E, f):
    ring = ResidueRing(f)
    return [LeveledCurve(E, f, u) for u in ring.units()]


def unit_orbits(E, f):
    """Orbits of O_K^x on the level structures of E: beta -> beta o [eps]^-1."""
    ring = ResidueRing(f)
    seen, orbits = set(), []
    for u in ring.units():
        key = ring.key(u)
        if key in seen:
            continue
        orbit = {ring.key(u * ring.inverse(e)) for e in unit_group(E.ctx)}
        seen |= orbit
        orbits.append(sorted(orbit))
    return orbits


class ModuliSet:
    """f-isomorphism classes of leveled CM curves with the CL^(f) action.

    A class is stored as (k, c): the curve C/r_k for the k-th class
    representative of CL, and the coset c of beta(e_k) modulo the image of
    O_K^x, with e_k the distinguished generator of its f-torsion.
    """

    def __init__(self, ctx, f, cap=10**6):
        self.ctx = ctx
        self.f = f
        self.group = ray_class_group(ctx, f, cap=cap)
        self.cl = class_group(ctx)
        self.ring = ResidueRing(f, cap=cap)
        self.curves = [CMLattice(ctx, r) for r in self.cl.reps]
        self.torsion = [TorsionModule(E, f, cap) for E in self.curves]
        self.classes = [(k, c) for k in range(self.cl.h) for c in range(self.group.m)]
        self.index = {x: i for i, x in enumerate(self.classes)}
        self._table = None

    def classify(self, leveled, generator_point):
        """Class of (C/c, beta) where beta(generator_point) = leveled.image."""
        c = leveled.curve.lattice
        k = self.cl.class_index(c)
        z = (self.curves[k].lattice * c.inverse()).generator()
        if z is None:
            raise InternalConsistencyError("lattices in one class are not homothetic")
        T = self.torsion[k]
        y = T.dlog(T.coords(generator_point * z))
        u = self.ring.mul(leveled.image, self.ring.inverse(y))
        return self.index[(k, self.group.coset_of[self.ring.key(u)])]

    def act_ideal(self, a, x):
        """[a] . x for an integral ideal a prime to f."""
        k, c = self.classes[x]
        E, T = self.curves[k], self.torsion[k]
        u = self.group.coset_reps[c] if self.ring.size > 1 else self.ring.reduce(1)
        xa = a.element_prime_to(self.f)
        point = T.element(T.generator) * xa
        image = self.ring.mul(u, self.ring.reduce(xa))
        new_curve = serre_tensor(E, a)
        return self.classify(LeveledCurve(new_curve, self.f, image), point)

    @property
    def table(self):
        """table[g][x] = g . x for g in CL^(f), using cheap ideal representatives."""
        if self._table is None:
            self._table = [
                [self.act_ideal(self.group.ideal_of(g), x) for x in range(len(self.classes))]
                for g in range(self.group.order)
            ]
        return self._table

    def certify(self, check_representatives=True):
        n = len(self.classes)
        G = self.group
        table = self.table
        free = all(table[g][x] != x for g in range(1, G.order) for x in range(n))
        transitive = all(set(table[g][x] for g in range(G.order)) == set(range(n)) for x in range(n))
        identity = all(table[0][x] == x for x in range(n))
        compatible = all(
            table[g][table[h][x]] == table[G.mul(g, h)][x]
            for g in range(G.order)
            for h in range(G.order)
            for x in range(n)
        )
        well_defined = True
        if check_representatives:
            for g in range(G.order):
                rep = G.canonical_rep(g)
                if any(self.act_ideal(rep, x) != table[g][x] for x in range(n)):
                    well_defined = False
        return {
            "size": n,
            "group_order": G.order,
            "free": free,
            "transitive": transitive,
            "identity_acts_trivially": identity,
            "action_law": compatible,
            "independent_of_representative": well_defined,
            "pass": free and transitive and identity and compatible and well_defined and n == G.order,
        }

    def to_json(self):
        cert = self.certify()
        return {
            "d": self.ctx.d,
            "conductor": self.f.to_json(),
            "classes": [
                {"lattice": self.cl.reps[k].to_json(), "level_image": format_element(self.group.coset_reps[c])}
                for k, c in self.classes
            ],
            "action": self.table,
            "certificate": cert,
        }


def moduli_set(ctx, f, cap=10**6):
    return ModuliSet(ctx, f, cap)


# -- ghost family -------------------------------------------------------------------------


@dataclass(frozen=True)
class LatticeMap:
    """The map C/source -> C/target induced by multiplication by z."""

    source: FracIdeal
    target: FracIdeal
    z: FieldElt

    def __post_init__(self):
        if not all(x * self.z in self.target for x in self.source.zbasis()):
            raise ValidationError("multiplier does not carry the source lattice into the target")

    def compose(self, after):
        """after o self."""
        if after.source != self.target:
            raise ValidationError("maps are not composable")
        return LatticeMap(self.source, after.target, self.z * after.z)

    def tensor(self, b):
        return LatticeMap(b * self.source, b * self.target, self.z)

    def kernel_size(self):
        """#(z^-1 target / source) = N(source) N(z) / N(target)."""
        n = self.source.norm() * self.z.norm() / self.target.norm()
        if n.denominator != 1:
            raise InternalConsistencyError("kernel index is not an integer")
        return int(n)

    def agrees_on_torsion(self, other, M):
        """Do the two maps agree on the M-torsion points of C/source?"""
        if self.source != other.source or self.target != other.target:
            return False
        diff = self.z - other.z
        pts = self.source.zbasis()
        return all((p / M) * diff in self.target for p in pts)


def ghost_family(E, bound):
    """{(a, E tensor a^-1, phi^a)} for integral a with Na <= bound."""
    fam = []
    one = FieldElt.of(1, E.ctx)
    for a in ideals_up_to(E.ctx, bound):
        target = a.inverse() * E.lattice
        fam.append((a, CMLattice(E.ctx, target), LatticeMap(E.lattice, target, one)))
    return fam


def phi(E, a):
    return LatticeMap(E.lattice, a.inverse() * E.lattice, FieldElt.of(1, E.ctx))


def ghost_composition_report(E, bound):
    """phi^{ab} = (phi^b tensor a^-1) o phi^a for all a, b with Na, Nb <= bound."""
    ideals = list(ideals_up_to(E.ctx, bound))
    failures = []
    kernels_ok = True
    for a in ideals:
        pa = phi(E, a)
        if pa.kernel_size() != a.norm_int() or isogeny_kernel(E, a).size != a.norm_int():
            kernels_ok = False
        for b in ideals:
            pb = phi(E, b).tensor(a.inverse())
            if pa.compose(pb) != phi(E, a * b):
                failures.append([a.to_json(), b.to_json()])
    return {"pairs": len(ideals) ** 2, "failures": failures, "kernels": kernels_ok, "pass": not failures and kernels_ok}


def ghost_rigidity_check(E, u, bound, override=None):
    """Automorphisms of the components commuting with every phi^a and equal to u
    on the O_K component: find, per component, every unit that commutes on the
    M-torsion with M^2 > 4*Na (enough to separate distinct units)."""
    units = unit_group(E.ctx)
    u = FieldElt.of(u, E.ctx)
    if u not in [FieldElt.of(e, E.ctx) for e in units]:
        raise ValidationError(f"{u} is not a unit of O_K")
    override = override or {}
    report = {"components": 0, "forced": True, "failures": []}
    for a, Ea, pa in ghost_family(E, bound):
        report["components"] += 1
        M = math.isqrt(4 * a.norm_int()) + 1
        # phi^a o [u] on the source versus [eps] o phi^a
        lhs = LatticeMap(E.lattice, Ea.lattice, pa.z * u)
        commuting = []
        for eps in units:
            eps = FieldElt.of(eps, E.ctx)
            rhs = LatticeMap(E.lattice, Ea.lattice, pa.z * eps)
            if lhs.agrees_on_torsion(rhs, M):
                commuting.append(eps)
        chosen = FieldElt.of(override.get(a, u), E.ctx)
        if commuting != [u] or chosen != u:
            report["forced"] = False
            report["failures"].append({"component": a.to_json(), "commuting": [str(e) for e in commuting], "chosen": str(chosen)})
    report["pass"] = report["forced"]
    return report


# -- j-invariants ------------------------------------------------------------------------


def reduce_tau(E):
    """tau in the standard fundamental domain, exactly, as an element of K."""
    ctx = E.ctx
    alpha, beta = E.lattice.zbasis()
    tau = beta / alpha
    if _im_sign(tau) < 0:
        tau = -tau
    half = Fraction(1, 2)
    for _ in range(10000):
        n = math.floor(_re(tau) + half)
        if n:
            tau = tau - n
        if tau.norm() < 1:
            tau = -tau.inverse()
            continue
        break
    else:
        raise InternalConsistencyError("tau reduction did not terminate")
    if tau.norm() == 1 and _re(tau) > 0:
        tau = -tau.inverse()
    return tau


def _re(x):
    # Re(a + b*w)/den with Re(w) = t/2
    return Fraction(2 * x.num.a + x.num.b * x.ctx.t, 2 * x.den)


def _im_sign(x):
    return (x.num.b > 0) - (x.num.b < 0)


def _j_series(tau_c, bits):
    prec = bits + 64
    with mpmath.workprec(prec):
        q = mpmath.exp(2j * mpmath.pi * tau_c)
        r = abs(q)
        eps = mpmath.mpf(2) ** (-prec)
        # E4 = 1 + 240 sum sigma_3(n) q^n, tail bounded by 2 * 240 * n^4 r^n once the ratio is below 1/2
        e4 = mpmath.mpc(1)
        qn = mpmath.mpc(1)
        n = 0
        while True:
            n += 1
            qn *= q
            sigma = sum(d ** 3 for d in range(1, n + 1) if n % d == 0)
            e4 += 240 * sigma * qn
            if 480 * (n + 1) ** 4 * r ** (n + 1) < eps:
                break
            if n > 100000:
                raise PrecisionError("q-expansion did not converge", advisory_bits=2 * bits)
        # eta product through the pentagonal number series
        s = mpmath.mpc(1)
        k = 1
        while True:
            e1 = k * (3 * k - 1) // 2
            e2 = k * (3 * k + 1) // 2
            sign = -1 if k % 2 else 1
            s += sign * (q ** e1 + q ** e2)
            if 2 * r ** (e2 + 1) < eps:
                break
            k += 1
        delta = q * s ** 24
        return e4 ** 3 / delta


def j_invariant(E, bits=256):
    if bits < 64:
        raise ValidationError("at least 64 bits are required")
    tau = reduce_tau(E)
    with mpmath.workprec(bits + 64):
        w = E.ctx.omega_complex(mpmath)
        tau_c = (tau.num.a + tau.num.b * w) / tau.den
        val = _j_series(tau_c, bits)
    return val


def j_invariants(ctx, bits=256):
    return [j_invariant(CMLattice(ctx, r), bits) for r in class_group(ctx).reps]


@dataclass(frozen=True)
class HilbertPolynomial:
    d: int
    coeffs: tuple  # integer coefficients, constant term first
    residual: float
    bits: int

    def to_json(self):
        return {"d": self.d, "coeffs": list(self.coeffs), "degree": len(self.coeffs) - 1, "residual": self.residual, "bits": self.bits}

    def __str__(self):
        terms = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            mono = "" if k == 0 else ("X" if k == 1 else f"X^{k}")
            if mono and abs(c) == 1:
                coef = "" if c > 0 else "-"
            else:
                coef = str(c) + ("*" if mono else "")
            terms.append(coef + mono)
        return " + ".join(terms).replace("+ -", "- ")


def hilbert_class_polynomial(ctx, bits=256, h_cap=64, tolerance=1e-10):
    cl = class_group(ctx)
    if cl.h > h_cap:
        raise CapExceeded(f"class number {cl.h} exceeds cap {h_cap}")
    js = j_invariants(ctx, bits)
    with mpmath.workprec(bits + 64):
        poly = [mpmath.mpc(1)]
        for j in js:
            nxt = [mpmath.mpc(0)] * (len(poly) + 1)
            for i, c in enumerate(poly):
                nxt[i + 1] += c
                nxt[i] -= c * j
            poly = nxt
        coeffs = [int(mpmath.nint(c.real)) for c in poly]
        residual = max(abs(c - k) for c, k in zip(poly, coeffs))
        residual = float(residual)
    if not residual < tolerance:
        size = max(abs(k) for k in coeffs).bit_length()
        raise PrecisionError(
            f"rounding residual {residual:.3g} at {bits} bits", advisory_bits=max(2 * bits, size + 128)
        )
    return HilbertPolynomial(ctx.d, tuple(coeffs), residual, bits)
