"""Seeded randomized invariant suites spanning the whole package.

Every suite takes an explicit seed and case count, runs a deterministic
randomized check, and returns the number of cases together with the list
of failure descriptions (empty on success).  The CLI selftest command runs
all suites with a fixed default seed; the acceptance tests re-run them at
their own prescribed counts.
"""

from __future__ import annotations

import random
from typing import Callable

from .freeness import freeness_report
from .gallery import GALLERY, load_gallery
from .germs import Arrow, GermSystem
from .maps import PartialMap, agreement_region, local_agreement
from .orbits import lambda_matrix, orbit_basis, reduced_norm_probe
from .scalars import Scalar
from .sections import Section, delta, unit_section
from .semigroups import generate_closure, meet_witnesses, validate
from .topology import ConstructibleSet, OpenSet, Space, UPPoint, atoms

__all__ = ["SUITES", "run_suite", "run_all", "DEFAULT_SEED"]

DEFAULT_SEED = 7041982


# --- random generators -----------------------------------------------------


def rand_word(rng: random.Random, space: Space, max_len: int = 3) -> str:
    return "".join(rng.choice(space.alphabet) for _ in range(rng.randint(0, max_len)))


def rand_open(rng: random.Random, space: Space) -> OpenSet:
    if space.is_finite:
        return OpenSet.of_points(
            space, [i for i in range(space.size) if rng.random() < 0.5]
        )
    kind = rng.randint(0, 4)
    if kind == 0:
        return OpenSet.empty(space)
    if kind == 1:
        words = [rand_word(rng, space) for _ in range(rng.randint(1, 3))]
        return OpenSet.from_words(space, words)
    if kind == 2:
        return rand_open(rng, space).union(rand_open(rng, space))
    if kind == 3:
        return rand_open(rng, space).intersect(rand_open(rng, space))
    # a non-clopen staircase: cylinders along a tail
    stem = rand_word(rng, space, 2)
    step = rng.choice(space.alphabet)
    out = rng.choice([c for c in space.alphabet if c != step])
    words = [stem + step * k + out for k in range(3)]
    return OpenSet.from_words(space, words)


def rand_constructible(rng: random.Random, space: Space, depth: int = 2) -> ConstructibleSet:
    if depth == 0 or rng.random() < 0.4:
        return rand_open(rng, space).as_constructible()
    a = rand_constructible(rng, space, depth - 1)
    op = rng.randint(0, 2)
    if op == 0:
        return a.union(rand_open(rng, space))
    if op == 1:
        return a.intersect(rand_constructible(rng, space, depth - 1))
    return a.minus(rand_open(rng, space))


def rand_point(rng: random.Random, space: Space) -> UPPoint:
    if space.is_finite:
        return UPPoint.of_index(space, rng.randrange(space.size))
    u = rand_word(rng, space, 3)
    v = ""
    while not v:
        v = rand_word(rng, space, 2)
    return UPPoint.of_word(space, u, v)


def _prefix_free(rng: random.Random, space: Space, k: int, max_len: int) -> list[str] | None:
    words: list[str] = []
    for _ in range(40):
        w = rand_word(rng, space, max_len)
        if any(w.startswith(v) or v.startswith(w) for v in words):
            continue
        words.append(w)
        if len(words) == k:
            return words
    return None


def rand_prefix_exchange(rng: random.Random, space: Space) -> PartialMap:
    k = rng.randint(1, 3)
    while True:
        src = _prefix_free(rng, space, k, 3)
        dst = _prefix_free(rng, space, k, 3)
        if src is not None and dst is not None:
            return PartialMap.prefix_exchange(space, list(zip(src, dst)))


def rand_injection(rng: random.Random, n: int) -> PartialMap:
    space = Space.finite(n)
    srcs = [i for i in range(n) if rng.random() < 0.7]
    dsts = list(range(n))
    rng.shuffle(dsts)
    return PartialMap.of_pairs(space, dict(zip(srcs, dsts)))


def rand_regime_a(rng: random.Random) -> GermSystem:
    n = rng.choice((2, 2, 3, 3, 4))
    while True:
        gens = [rand_injection(rng, n) for _ in range(rng.randint(1, 3))]
        if all(not g.domain().is_empty() for g in gens):
            break
    sg, act = generate_closure(gens, cap=260)
    return GermSystem.from_semigroup_action(sg, act, name=f"random_a_{n}")


_SMALL_SCALARS = [
    Scalar.of(1),
    Scalar.of(-1),
    Scalar.of(2),
    Scalar.of(1, 1),
    Scalar.of(0, -1),
    Scalar.of(-1, 2),
    Scalar.of(1, -3),
]


def rand_section(rng: random.Random, gs: GermSystem, labels: list) -> Section:
    terms = []
    for _ in range(rng.randint(1, 2)):
        t = rng.choice(labels)
        dom = gs.h(t).domain()
        if dom.is_empty():
            continue
        if gs.space.is_finite:
            pts = [i for i in sorted(dom.points) if rng.random() < 0.8]
            support = OpenSet.of_points(gs.space, pts)
        else:
            words = dom.cylinders()
            keep = [w for w in words if rng.random() < 0.8]
            support = OpenSet.from_words(gs.space, [w + rand_word(rng, gs.space, 1) for w in keep])
            support = support.intersect(dom)
        terms.append((t, support, rng.choice(_SMALL_SCALARS)))
    return Section(gs, terms)


def _section_labels(gs: GermSystem, rng: random.Random, bound: int = 2) -> list:
    ts = gs.labels(bound if gs.regime == "B" else None)
    if len(ts) > 12:
        ts = [ts[0]] + rng.sample(ts[1:], 11)
    return ts


# --- suites ----------------------------------------------------------------


def topology_suite(seed: int, cases: int) -> tuple[int, list[str]]:
    failures: list[str] = []
    rng = random.Random(seed)
    space = Space.cantor("01")
    full = ConstructibleSet.full(space)
    for k in range(cases):
        a, b, c = (rand_open(rng, space) for _ in range(3))
        if a.union(b) != b.union(a) or a.intersect(b) != b.intersect(a):
            failures.append(f"case {k}: commutativity")
        if a.union(b.union(c)) != a.union(b).union(c):
            failures.append(f"case {k}: associativity")
        if a.intersect(b.union(c)) != a.intersect(b).union(a.intersect(c)):
            failures.append(f"case {k}: distributivity")
        # De Morgan on constructibles
        lhs = full.minus(a.union(b))
        rhs = full.minus(a).intersect(full.minus(b))
        if not lhs.equals(rhs):
            failures.append(f"case {k}: De Morgan")
        s = rand_constructible(rng, space)
        e1, e2, e3 = s.has_empty_interior(), s.is_nowhere_dense(), s.is_meagre()
        if not (e1 == e2 == e3):
            failures.append(f"case {k}: predicate routes disagree ({e1},{e2},{e3})")
        cl = s.closure()
        if not cl.closure().equals(cl):
            failures.append(f"case {k}: closure not idempotent")
        if not s.minus(cl).is_empty():
            failures.append(f"case {k}: closure lost points")
        # interior(complement) = complement(closure)
        if not full.minus(cl).equals(s.complement().interior().as_constructible()):
            failures.append(f"case {k}: interior/closure duality")
        x = rand_point(rng, space)
        if cl.contains(x) != _meets_every_cylinder(s, x):
            failures.append(f"case {k}: closure membership vs cylinder oracle at {x}")
    return cases, failures


def _meets_every_cylinder(s: ConstructibleSet, x: UPPoint, depth: int = 24) -> bool:
    space = s.space
    for d in range(depth + 1):
        cyl = OpenSet.cylinder(space, x.head(d))
        if s.intersect(cyl).is_empty():
            return False
    return True


def maps_suite(seed: int, cases: int) -> tuple[int, list[str]]:
    failures: list[str] = []
    rng = random.Random(seed)
    space = Space.cantor("01")
    for k in range(cases):
        f, g, h = (rand_prefix_exchange(rng, space) for _ in range(3))
        if f.compose(g).compose(h) != f.compose(g.compose(h)):
            failures.append(f"case {k}: composition associativity")
        if f.inverse().inverse() != f:
            failures.append(f"case {k}: double inverse")
        if f.compose(f.inverse()).compose(f) != f:
            failures.append(f"case {k}: pseudo-inverse law")
        fr = f.compose(f.inverse()).fix_region()
        if fr.clopen_part != f.codomain() or fr.isolated_points:
            failures.append(f"case {k}: fix region of f f^-1")
        agree = local_agreement(f, g)
        for _ in range(3):
            if agree.is_empty():
                break
            x = agree.sample_point()
            if f.apply(x) != g.apply(x):
                failures.append(f"case {k}: local agreement not pointwise at {x}")
            break
        u = rand_open(rng, space).intersect(f.domain())
        if not u.is_clopen():
            u = f.domain()
        im = f.image(u)
        if f.preimage(im) != u or f.image(f.preimage(im)) != im:
            failures.append(f"case {k}: image/preimage bijection")
        x = rand_point(rng, space)
        if f.domain().contains(x):
            y = f.apply(x)
            if not f.codomain().contains(y) or f.inverse().apply(y) != x:
                failures.append(f"case {k}: pointwise inverse at {x}")
    return cases, failures


def semigroup_suite(seed: int, cases: int) -> tuple[int, list[str]]:
    failures: list[str] = []
    rng = random.Random(seed)
    for k in range(cases):
        n = rng.choice((2, 3))
        gens = [rand_injection(rng, n) for _ in range(rng.randint(1, 2))]
        sg, act = generate_closure(gens, cap=80)
        try:
            validate(sg.names, sg.unit, sg.mult)  # full axioms, associativity included
        except Exception as e:
            failures.append(f"case {k}: closure failed validation: {e}")
            continue
        for _ in range(6):
            i, j = rng.randrange(sg.n), rng.randrange(sg.n)
            if sg.inv(sg.mul(i, j)) != sg.mul(sg.inv(j), sg.inv(i)):
                failures.append(f"case {k}: involution anti-multiplicativity")
            mw = meet_witnesses(sg, i, j)
            if mw != meet_witnesses(sg, j, i):
                failures.append(f"case {k}: meet witnesses not symmetric")
            for v in mw:
                for w in range(sg.n):
                    if sg.leq(w, v) and w not in mw:
                        failures.append(f"case {k}: meet witnesses not downward closed")
        idem = sorted(sg.idempotents)
        for e in idem:
            if not sg.leq(e, sg.unit):
                failures.append(f"case {k}: idempotent not below the unit")
    return cases, failures


def germ_suite(seed: int, cases: int) -> tuple[int, list[str]]:
    failures: list[str] = []
    rng = random.Random(seed)
    for k in range(cases):
        gs = rand_regime_a(rng)
        sg = gs.semigroup
        rep = gs.validate_system()
        if not rep.ok:
            failures.append(f"case {k}: random action failed validation: {rep}")
            continue
        space = gs.space
        for _ in range(8):
            t = sg.names[rng.randrange(sg.n)]
            u = sg.names[rng.randrange(sg.n)]
            x = rand_point(rng, space)
            ht, hu = gs.h(t), gs.h(u)
            if not (ht.domain().contains(x) and hu.domain().contains(x)):
                continue
            mine = gs.germ_eq(t, u, x)
            brute = _brute_germ_eq(sg, gs, t, u, x)
            if mine != brute:
                failures.append(f"case {k}: germ equality differs from witness search at {x}")
            if mine and ht.apply(x) != hu.apply(x):
                failures.append(f"case {k}: germ-equal labels disagree pointwise")
        # arrow algebra on composable pairs
        for _ in range(4):
            t = sg.names[rng.randrange(sg.n)]
            u = sg.names[rng.randrange(sg.n)]
            hu = gs.h(u)
            if hu.domain().is_empty():
                continue
            x = hu.domain().sample_point()
            if not gs.h(t).domain().contains(hu.apply(x)):
                continue
            a1 = gs.arrow(t, hu.apply(x))
            a2 = gs.arrow(u, x)
            prod = gs.arrow_mul(a1, a2)
            if prod.source != x or prod.target != gs.h(t).apply(hu.apply(x)):
                failures.append(f"case {k}: arrow multiplication endpoints")
            inv = gs.arrow_inv(a2)
            unit = gs.arrow_mul(a2, inv)
            if not gs.germ_eq(unit.label, gs.unit_label, unit.source):
                failures.append(f"case {k}: a · a^-1 is not a unit germ")
    return cases, failures


def _brute_germ_eq(sg, gs: GermSystem, t: str, u: str, x: UPPoint) -> bool:
    """Exhaustive witness search straight from the order definition."""
    i, j = sg.index(t), sg.index(u)
    for v in range(sg.n):
        below_i = sg.mul(i, sg.mul(sg.inv(v), v)) == v
        below_j = sg.mul(j, sg.mul(sg.inv(v), v)) == v
        if below_i and below_j and gs.h(sg.names[v]).domain().contains(x):
            return True
    return False


def freeness_suite(seed: int, systems: int) -> tuple[int, list[str]]:
    failures: list[str] = []
    rng = random.Random(seed)
    pool: list[GermSystem] = [load_gallery(name).system for name in GALLERY]
    for _ in range(systems):
        pool.append(rand_regime_a(rng))
    for gs in pool:
        r = freeness_report(gs, bound=2)
        eff, free = r.effective.holds, r.topologically_free.holds
        as_free, principal = r.as_topologically_free.holds, r.topologically_principal.holds
        if eff and not free:
            failures.append(f"{gs.name}: effective but not topologically free")
        if principal and not as_free:
            failures.append(f"{gs.name}: principal but finite-union condition fails")
        if as_free and not free:
            failures.append(f"{gs.name}: finite-union condition without freeness")
        if free != as_free:
            failures.append(f"{gs.name}: freeness and finite-union variant disagree")
        if free and not principal:
            failures.append(f"{gs.name}: free but not principal at the same bound")
        if r.hausdorff and eff != free:
            failures.append(f"{gs.name}: closed units but effective != free")
    return len(pool), failures


def algebra_suite(seed: int, cases_per_system: int) -> tuple[int, list[str]]:
    failures: list[str] = []
    rng = random.Random(seed)
    total = 0
    for name in GALLERY:
        scn = load_gallery(name)
        gs = scn.system
        labels = _section_labels(gs, rng)
        hausdorff = gs.is_hausdorff(2)
        # closedness of units against A-valued expectations, slice by slice
        for t in labels:
            if gs.h(t).domain().is_empty():
                continue
            clopen = delta(gs, t).expectation().support().is_clopen()
            if clopen != (
                gs.witness(t, gs.unit_label)
                .closure()
                .intersect(gs.h(t).domain())
                .minus(gs.witness(t, gs.unit_label))
                .is_empty()
            ):
                failures.append(f"{name}: slice expectation support vs closedness at {gs.display(t)}")
        for k in range(cases_per_system):
            total += 1
            f = rand_section(rng, gs, labels)
            g = rand_section(rng, gs, labels)
            h = rand_section(rng, gs, labels)
            if not f.mul(g).mul(h).equals(f.mul(g.mul(h))):
                failures.append(f"{name} case {k}: associativity")
            if not f.mul(g).star().equals(g.star().mul(f.star())):
                failures.append(f"{name} case {k}: involution anti-multiplicativity")
            if not f.mul(g.add(h)).equals(f.mul(g).add(f.mul(h))):
                failures.append(f"{name} case {k}: distributivity")
            if not f.mul(unit_section(gs)).equals(f) or not unit_section(gs).mul(f).equals(f):
                failures.append(f"{name} case {k}: unit law")
            # positivity of E(f* f) at sampled points
            ff = f.star().mul(f)
            eff = ff.expectation()
            for cell, value in eff.pieces:
                if value.im != 0 or value.re < 0:
                    failures.append(f"{name} case {k}: expectation of f*f not positive")
            # singularity routes agree; Hausdorff systems have no singular elements
            singular = f.is_singular()
            if singular != f.el_kernel_member():
                failures.append(f"{name} case {k}: singularity routes disagree")
            if hausdorff and singular != f.is_zero():
                failures.append(f"{name} case {k}: singular but nonzero on a closed-unit system")
            # expectation bimodule law over unit-label multipliers, pointwise
            a = rand_section(rng, gs, [gs.unit_label])
            afb = a.mul(f).mul(a).expectation()
            ea, ef = a.expectation(), f.expectation()
            for _ in range(2):
                x = rand_point(rng, gs.space)
                want = ea.value_at(x) * ef.value_at(x) * ea.value_at(x)
                if afb.value_at(x) != want:
                    failures.append(f"{name} case {k}: expectation bimodule law at {x}")
            # E is the identity on unit-label sections, pointwise
            for _ in range(2):
                x = rand_point(rng, gs.space)
                if ea.value_at(x) != a.j_eval(Arrow(gs.unit_label, x, x)):
                    failures.append(f"{name} case {k}: expectation not the identity on units at {x}")
            # essential equality is a congruence on samples
            if f.ess_equal(g):
                if not f.mul(h).ess_equal(g.mul(h)):
                    failures.append(f"{name} case {k}: essential equality not a right congruence")
                if not f.star().ess_equal(g.star()):
                    failures.append(f"{name} case {k}: essential equality not star-invariant")
    return total, failures


def orbit_suite(seed: int, cases: int) -> tuple[int, list[str]]:
    failures: list[str] = []
    rng = random.Random(seed)
    finite_gallery = [n for n in GALLERY if n in ("z2_point", "i2", "pair2", "pair3")]
    total = 0
    for name in finite_gallery:
        scn = load_gallery(name)
        gs = scn.system
        labels = _section_labels(gs, rng)
        for k in range(cases):
            total += 1
            f = rand_section(rng, gs, labels)
            g = rand_section(rng, gs, labels)
            x = rand_point(rng, gs.space)
            mf, mg = lambda_matrix(f, x), lambda_matrix(g, x)
            mfg = lambda_matrix(f.mul(g), x)
            if mfg.entries != mf.matmul(mg).entries:
                failures.append(f"{name} case {k}: lambda not multiplicative at {x}")
            if lambda_matrix(f.star(), x).entries != mf.conj_transpose().entries:
                failures.append(f"{name} case {k}: lambda not star-preserving at {x}")
            # unit-label faithfulness: nonzero unit sections act nonzero
            a = rand_section(rng, gs, [gs.unit_label])
            if not a.is_zero():
                supp = a.expectation().support()
                y = supp.sample_point()
                if lambda_matrix(a, y).is_zero():
                    failures.append(f"{name} case {k}: unit section vanished in its orbit")
            # probe dominates matrix entries
            probe = reduced_norm_probe(f, [x], tol=1e-9)
            entry_bound = max(
                (abs(complex(e)) for row in mf.entries for e in row), default=0.0
            )
            if probe.value + 1e-6 < entry_bound:
                failures.append(f"{name} case {k}: probe below an entry bound at {x}")
    return total, failures


SUITES: dict[str, Callable[[int, int], tuple[int, list[str]]]] = {
    "topology": topology_suite,
    "maps": maps_suite,
    "semigroups": semigroup_suite,
    "germs": germ_suite,
    "freeness": freeness_suite,
    "algebra": algebra_suite,
    "orbits": orbit_suite,
}

_DEFAULT_CASES = {
    "topology": 120,
    "maps": 100,
    "semigroups": 25,
    "germs": 25,
    "freeness": 25,
    "algebra": 40,
    "orbits": 20,
}


def run_suite(name: str, seed: int = DEFAULT_SEED, cases: int | None = None) -> dict:
    fn = SUITES[name]
    n = cases if cases is not None else _DEFAULT_CASES[name]
    ran, failures = fn(seed, n)
    return {"suite": name, "seed": seed, "cases": ran, "failures": failures}


def run_all(seed: int = DEFAULT_SEED, cases: int | None = None) -> dict:
    results = [run_suite(name, seed, cases) for name in SUITES]
    ok = all(not r["failures"] for r in results)
    return {"ok": ok, "seed": seed, "suites": results}
