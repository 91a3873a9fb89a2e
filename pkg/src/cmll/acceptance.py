"""The acceptance suite: one check per criterion, each with a time budget.

Each check returns (passed, details).  `run_acceptance` adds wall-clock
timings; `selftest_report` drops them so the report is byte-stable.
"""

import random
import time
from dataclasses import dataclass
from math import comb

from .cmlattice import (
    cm_curve,
    evaluation,
    ghost_composition_report,
    ghost_rigidity_check,
    hilbert_class_polynomial,
    hom_ideal,
    isogeny_kernel,
    moduli_set,
    serre_tensor,
)
from .ideals import ideals_up_to, one_ideal, principal_ideal
from .lubintate import (
    PadicCoeffRing,
    PadicSeries,
    canonical_f,
    frobenius_congruence_check,
    lt_construct,
    multiplicative_f,
    torsion_quotient,
)
from .quadfield import QuadInt, make_field, unit_group
from .rayclass import (
    class_group,
    count_reduced_forms,
    exactness_report,
    in_prin_one_mod_f,
    ray_class_group,
)
from .tannaka import choose_generators, cocycle_report, relation_checks, specialization_check
from .wittlambda import (
    DeltaRing,
    OKCarrier,
    ZCarrier,
    delta_axioms_report,
    ghost_homomorphism_report,
    witt_params,
    witt_polynomials,
)


@dataclass(frozen=True)
class Criterion:
    number: int
    title: str
    budget: float
    check: object


def enumerate_ray_classes(K, f, bound=60):
    """Partition ideals prime to f into ray classes using only the definition."""
    reps = []
    for a in ideals_up_to(K, bound):
        if not a.is_coprime(f):
            continue
        if not any(in_prin_one_mod_f(a * r.inverse(), f) for r in reps):
            reps.append(a)
    return len(reps)


def crit_ray_class_orders():
    cases = [
        (1, QuadInt(3, 0, make_field(1)), 2),
        (1, QuadInt(2, 1, make_field(1)), 1),
        (5, None, 2),
        (23, None, 3),
    ]
    rows = []
    ok = True
    for d, gen, expected in cases:
        K = make_field(d)
        f = one_ideal(K) if gen is None else principal_ideal(K, gen)
        G = ray_class_group(K, f)
        formula = exactness_report(G)["order_formula"]
        counted = enumerate_ray_classes(K, f)
        forms = count_reduced_forms(K.disc) if gen is None else None
        good = G.order == expected and formula and counted == expected and forms in (None, expected)
        ok &= good
        rows.append({"d": d, "conductor": f.to_json(), "order": G.order, "enumerated": counted, "pass": good})
    return ok, {"cases": rows}


def crit_exactness():
    checked = 0
    bad = []
    for d in (1, 3, 5):
        K = make_field(d)
        for f in ideals_up_to(K, 200):
            checked += 1
            rep = exactness_report(ray_class_group(K, f))
            if not all(rep.values()):
                bad.append({"d": d, "conductor": f.to_json(), "report": rep})
    return not bad, {"conductors": checked, "counterexamples": bad}


def crit_witt():
    K = make_field(1)
    params = [witt_params(2), witt_params(3), witt_params(QuadInt(1, 1, K), K)]
    rows = []
    ok = True
    for P in params:
        W = witt_polynomials(P, 4)  # raises on a non-integral coefficient
        hom = ghost_homomorphism_report(P, 1000, seed=0)
        ok &= hom["pass"]
        rows.append({"params": P.to_json(), "terms_S": [len(s) for s in W.S], "ghost_hom_failures": hom["failures"]})
    rng = random.Random(0)
    zring = DeltaRing(ZCarrier(), params[0])
    zrep = delta_axioms_report(zring, [rng.randint(-50, 50) for _ in range(1000)])
    okc = OKCarrier(K)
    krep = delta_axioms_report(DeltaRing(okc, params[2]), [okc.random(rng) for _ in range(1000)])
    d3 = zring.delta(3)
    ok &= zrep["pass"] and krep["pass"] and d3 == 3
    return ok, {"witt": rows, "delta_Z": len(zrep["failures"]), "delta_OK": len(krep["failures"]), "delta(3)": d3}


def crit_lubin_tate():
    R = PadicCoeffRing(None, 2, 16)
    M = lt_construct(R, multiplicative_f(R, 32), 32)
    law = M.law
    expected = {(1, 0): 1, (0, 1): 1, (1, 1): 1}
    law_ok = all(R.is_zero(R.sub(law.coeffs.get(k, R.zero()), R.embed(expected.get(k, 0)))) for k in set(law.coeffs) | set(expected))
    binom_ok = all(M.endo(a) == PadicSeries.from_list(R, [0] + [comb(a, k) for k in range(1, 33)], 32) for a in range(11))
    rows = []
    ok = law_ok and binom_ok
    for p in (2, 3, 5):
        Rp = PadicCoeffRing(None, p, 16)
        Mp = lt_construct(Rp, canonical_f(Rp, 32), 32)
        fc = frobenius_congruence_check(Mp, 3)["pass"]
        degrees = []
        for n in range(1, 4):
            if p ** n > 32:
                break
            tq = torsion_quotient(Mp, n)
            good = tq["degree"] == p ** (n - 1) * (p - 1) and tq["eisenstein"]
            degrees.append([n, tq["degree"], good])
            ok &= good
        ok &= fc
        rows.append({"q": p, "frobenius": fc, "torsion_degrees": degrees})
    return ok, {"law_is_multiplicative": law_ok, "binomial_endos": binom_ok, "primes": rows}


def crit_cm_torsor():
    rows = []
    ok = True
    for d in (1, 2, 3, 5, 7, 11):
        K = make_field(d)
        for f in (one_ideal(K), principal_ideal(K, 3)):
            cert = moduli_set(K, f).certify()
            ok &= cert["pass"] and cert["size"] == cert["group_order"]
            rows.append({"d": d, "conductor": f.to_json(), "size": cert["size"], "pass": cert["pass"]})
        reps = class_group(K).reps
        kernels = True
        identities = True
        for r in reps:
            E = cm_curve(K, r)
            for a in ideals_up_to(K, 200):
                if isogeny_kernel(E, a).size != a.norm_int():
                    kernels = False
            for r2 in reps:
                E2 = cm_curve(K, r2)
                if serre_tensor(E, hom_ideal(E, E2)).lattice != r2 or evaluation(E, E2).lattice != r2:
                    identities = False
        ok &= kernels and identities
        rows.append({"d": d, "kernels": kernels, "hom_identities": identities})
    return ok, {"cases": rows}


def crit_hilbert():
    expected = {1: [-1728, 1], 2: [-8000, 1], 5: [-681472000, -1264000, 1]}
    rows = []
    ok = True
    for d in (1, 2, 3, 5, 23):
        K = make_field(d)
        H = hilbert_class_polynomial(K, 256)
        H2 = hilbert_class_polynomial(K, 512)
        good = H.residual < 1e-10 and H.coeffs == H2.coeffs and len(H.coeffs) - 1 == class_group(K).h
        if d in expected:
            good &= list(H.coeffs) == expected[d]
        ok &= good
        rows.append({"d": d, "poly": str(H), "residual_below_1e-10": H.residual < 1e-10, "stable": H.coeffs == H2.coeffs, "pass": good})
    return ok, {"cases": rows}


def crit_ghost_rigidity():
    K = make_field(1)
    E = cm_curve(K)
    forced = {str(u): ghost_rigidity_check(E, u, 20)["pass"] for u in unit_group(K)}
    comp = ghost_composition_report(E, 20)
    return all(forced.values()) and comp["pass"], {"forced": forced, "pairs": comp["pairs"], "composition_failures": len(comp["failures"])}


def crit_tannaka():
    rows = []
    ok = True
    for d, n in ((1, 3), (5, None)):
        K = make_field(d)
        f = one_ideal(K) if n is None else principal_ideal(K, n)
        data = choose_generators(ray_class_group(K, f))
        coc = cocycle_report(data, 60)
        rel = relation_checks(data, 100)
        special = specialization_check(data, 60)
        good = coc["pass"] and rel["pass"] and special["pass"]
        ok &= good
        rows.append({
            "d": d,
            "conductor": f.to_json(),
            "generators": data.to_json()["generators"],
            "pairs": coc["pairs"],
            "norm_rewrites": coc["rewrites"],
            "relations": rel["checked"],
            "pass": good,
        })
    return ok, {"cases": rows}


def crit_determinism():
    """Two fresh `selftest` processes must print byte-identical reports."""
    import subprocess
    import sys

    runs = [subprocess.run([sys.executable, "-m", "cmll", "selftest"], capture_output=True) for _ in range(2)]
    same = runs[0].stdout == runs[1].stdout
    codes = [r.returncode for r in runs]
    return same and codes == [0, 0], {"identical": same, "exit_codes": codes, "bytes": len(runs[0].stdout)}


CRITERIA = [
    Criterion(1, "ray class orders", 5, crit_ray_class_orders),
    Criterion(2, "exactness through (O_K/f)^x and CL^(f)", 30, crit_exactness),
    Criterion(3, "Witt polynomials, ghost homomorphism, delta axioms", 10, crit_witt),
    Criterion(4, "Lubin-Tate laws, endomorphisms, torsion", 10, crit_lubin_tate),
    Criterion(5, "CM torsor and isogeny kernels", 60, crit_cm_torsor),
    Criterion(6, "Hilbert class polynomials", 30, crit_hilbert),
    Criterion(7, "ghost family rigidity and composition", 10, crit_ghost_rigidity),
    Criterion(8, "Tannaka cocycle and gamma relations", 30, crit_tannaka),
    Criterion(9, "selftest determinism", None, crit_determinism),
]


def run_criterion(c):
    t0 = time.perf_counter()
    try:
        passed, details = c.check()
    except Exception as exc:  # a crash is a failure, reported as such
        passed, details = False, {"error": f"{type(exc).__name__}: {exc}"}
    elapsed = time.perf_counter() - t0
    in_budget = c.budget is None or elapsed < c.budget
    return {
        "criterion": c.number,
        "title": c.title,
        "pass": bool(passed) and in_budget,
        "checks_pass": bool(passed),
        "elapsed": elapsed,
        "budget": c.budget,
        "details": details,
    }


def format_line(result):
    status = "PASS" if result["pass"] else "FAIL"
    budget = "" if result["budget"] is None else f" / budget {result['budget']} s"
    return f"{status} [{result['criterion']}] {result['title']} ({result['elapsed']:.2f} s{budget})"


def run_acceptance(numbers=None, echo=print):
    out = []
    for c in CRITERIA:
        if numbers and c.number not in numbers:
            continue
        res = run_criterion(c)
        if echo:
            echo(format_line(res))
        out.append(res)
    return out


def _evaluate(c):
    try:
        passed, details = c.check()
    except Exception as exc:
        passed, details = False, {"error": f"{type(exc).__name__}: {exc}"}
    return {"criterion": c.number, "title": c.title, "pass": bool(passed), "details": details}


def selftest_report():
    """Criteria 1-8 without timings, evaluated twice; criterion 9 compares the two."""
    checks = [c for c in CRITERIA if c.number != 9]
    first = [_evaluate(c) for c in checks]
    second = [_evaluate(c) for c in checks]
    same = _render(first) == _render(second)
    results = first + [{"criterion": 9, "title": CRITERIA[-1].title, "pass": same, "details": {"identical_rerun": same}}]
    return {"criteria": results, "pass": all(r["pass"] for r in results)}


def _render(obj):
    import json

    return json.dumps(obj, sort_keys=True, default=str)
