"""Dynamical non-triviality analysis of germ systems.

Decides effectiveness, topological freeness, its finite-union variant
(every finite union of reduced fixed-point sets has empty interior),
topological principality, invariance and minimality, and searches for the
combinatorial pure-infiniteness witness.  Universally quantified verdicts
over implicit pseudogroups (regime B) are certified only up to a stated
composition bound; refutations are always exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .germs import GermSystem, Label
from .topology import ConstructibleSet, OpenSet

__all__ = [
    "Verdict",
    "FreenessReport",
    "fix_sets",
    "freeness_report",
    "invariant",
    "saturate",
    "Unstable",
    "is_minimal",
    "pure_infiniteness_witness",
    "Witness",
    "NotFoundUpTo",
]


@dataclass(frozen=True)
class Verdict:
    """true / false(witness) / verified up to a bound."""

    holds: bool
    exact: bool
    witness: str | None = None
    bound: int | None = None

    @staticmethod
    def yes() -> "Verdict":
        return Verdict(True, True)

    @staticmethod
    def no(witness: str) -> "Verdict":
        return Verdict(False, True, witness=witness)

    @staticmethod
    def up_to(bound: int) -> "Verdict":
        return Verdict(True, False, bound=bound)

    def render(self) -> str:
        if self.holds and self.exact:
            return "true"
        if self.holds:
            return f"true (verified up to bound {self.bound})"
        return f"false (witness {self.witness})" if self.witness else "false"

    def __repr__(self):
        return f"Verdict({self.render()})"


@dataclass(frozen=True)
class FreenessReport:
    system: str
    hausdorff: bool
    bound: int
    per_label: tuple[tuple[str, ConstructibleSet, ConstructibleSet], ...]
    effective: Verdict
    topologically_free: Verdict
    as_topologically_free: Verdict
    topologically_principal: Verdict

    def verdicts(self) -> dict[str, Verdict]:
        return {
            "effective": self.effective,
            "topologically_free": self.topologically_free,
            "as_topologically_free": self.as_topologically_free,
            "topologically_principal": self.topologically_principal,
        }


def fix_sets(gs: GermSystem, t: Label) -> tuple[ConstructibleSet, ConstructibleSet]:
    """Germ-level fixed sets of a label.

    fix: points of the domain fixed by the map but not witnessed trivial;
    reduced fix: the same with the closure of the witnessed-trivial locus
    removed.  Both are exact constructible sets.
    """
    region = gs.h(t).fix_region().as_constructible()
    d1 = gs.witness(t, gs.unit_label)
    fix = region.minus(d1)
    underline = region.minus(d1.closure())
    return fix, underline


def _verdict(all_pass: bool, exact: bool, bound: int, witness: str | None) -> Verdict:
    if not all_pass:
        return Verdict.no(witness or "")
    return Verdict.yes() if exact else Verdict.up_to(bound)


def freeness_report(gs: GermSystem, bound: int = 2) -> FreenessReport:
    """Decide the four non-triviality conditions for a germ system.

    Topological freeness asks each fixed set to have empty interior; the
    finite-union variant is decided through nowhere-density of each reduced
    fixed set, which is equivalent on constructible sets and closed under
    finite unions; principality bounds the union of all fixed sets; and
    effectiveness asks the locally fixed clopen locus of every label to be
    witnessed trivial.
    """
    if bound < 1:
        raise ValueError("bound must be at least 1")
    exact = gs.regime in ("A", "C")
    ts = gs.labels(bound)
    per_label = []
    free_witness = as_witness = eff_witness = None
    union_fix = ConstructibleSet.empty(gs.space)
    for t in ts:
        fix, underline = fix_sets(gs, t)
        per_label.append((gs.display(t), fix, underline))
        union_fix = union_fix.union(fix)
        if free_witness is None and not fix.has_empty_interior():
            free_witness = gs.display(t)
        if as_witness is None and not underline.is_nowhere_dense():
            as_witness = gs.display(t)
        if eff_witness is None:
            clopen_fixed = gs.h(t).fix_region().clopen_part
            if not clopen_fixed.is_subset(gs.witness(t, gs.unit_label)):
                eff_witness = gs.display(t)
    hausdorff = gs.is_hausdorff(bound)
    principal_ok = union_fix.has_empty_interior()
    return FreenessReport(
        system=gs.name,
        hausdorff=hausdorff,
        bound=bound,
        per_label=tuple(per_label),
        effective=_verdict(eff_witness is None, exact, bound, eff_witness),
        topologically_free=_verdict(free_witness is None, exact, bound, free_witness),
        as_topologically_free=_verdict(as_witness is None, exact, bound, as_witness),
        topologically_principal=_verdict(principal_ok, exact, bound, None if principal_ok else "union of fixed sets"),
    )


def _moving_labels(gs: GermSystem) -> list[Label]:
    """Labels generating all images: generators and inverses in regime B,
    the full label set otherwise."""
    if gs.regime == "B":
        return gs.labels(1)
    return gs.labels()


def invariant(gs: GermSystem, u: OpenSet) -> bool:
    """Whether the open set is carried into itself by every label."""
    for t in _moving_labels(gs):
        ht = gs.h(t)
        if not ht.image(u.intersect(ht.domain())).is_subset(u):
            return False
    return True


@dataclass(frozen=True)
class Unstable:
    """Saturation hit the iteration cap before stabilising."""

    iterations: int
    last: OpenSet

    def __repr__(self):
        return f"Unstable(after {self.iterations} iterations)"


def saturate(gs: GermSystem, u: OpenSet, iter_cap: int = 64) -> OpenSet | Unstable:
    """Smallest invariant open set containing u, by deterministic image sweeps."""
    current = u
    for _ in range(iter_cap):
        nxt = current
        for t in _moving_labels(gs):
            ht = gs.h(t)
            nxt = nxt.union(ht.image(current.intersect(ht.domain())))
        if nxt == current:
            return current
        current = nxt
    return Unstable(iter_cap, current)


def is_minimal(gs: GermSystem, depth: int = 2, iter_cap: int = 64) -> Verdict | Unstable:
    """Whether every basic open of depth up to the bound saturates to the
    whole space.  Exact on finite spaces; a depth-bounded certificate on
    Cantor backends."""
    space = gs.space
    if space.is_finite:
        cells = [(str(i), OpenSet.of_points(space, [i])) for i in range(space.size)]
    else:
        cells = []
        words = [""]
        for _ in range(depth + 1):
            cells.extend((w or "ε", OpenSet.cylinder(space, w)) for w in words)
            words = [w + c for w in words for c in space.alphabet]
    for desc, cell in cells:
        sat = saturate(gs, cell, iter_cap)
        if isinstance(sat, Unstable):
            return sat
        if not sat.is_full():
            return Verdict.no(f"saturation of [{desc}] is proper")
    return Verdict.yes() if space.is_finite else Verdict.up_to(depth)


@dataclass(frozen=True)
class Witness:
    """A verified pure-infiniteness witness: a basic open V and labels whose
    sources cover V, with pairwise disjoint ranges whose closure sits
    strictly inside V."""

    cell: OpenSet
    labels: tuple[str, ...]


@dataclass(frozen=True)
class NotFoundUpTo:
    depth: int
    length: int


def pure_infiniteness_witness(
    gs: GermSystem, u: OpenSet, depth: int = 2, length: int = 2
) -> Witness | NotFoundUpTo:
    """Exhaustive search for the local shrinking certificate.

    Scans basic opens V inside u (cylinders up to the given depth, subsets
    in the finite backend) and tuples of label compositions up to the given
    length, checking the three clauses exactly on open sets: ranges pairwise
    disjoint, sources covering V, and the closure of the union of ranges
    strictly contained in V.
    """
    if u.is_empty():
        raise ValueError("the search region must be a nonempty open set")
    space = gs.space
    if space.is_finite:
        candidates_v = []
        pts = sorted(u.points)
        for size in range(1, len(pts) + 1):
            for sub in combinations(pts, size):
                candidates_v.append(OpenSet.of_points(space, sub))
    else:
        candidates_v = []
        words = [""]
        for _ in range(depth + 1):
            for w in words:
                cyl = OpenSet.cylinder(space, w)
                if cyl.is_subset(u):
                    candidates_v.append(cyl)
            words = [w + c for w in words for c in space.alphabet]
    labels = gs.labels(length) if gs.regime == "B" else gs.labels()
    for v_cell in candidates_v:
        cands = []
        for t in labels:
            ht = gs.h(t)
            if ht.domain().is_empty():
                continue  # empty slices never help cover V
            if ht.domain().is_subset(v_cell) and ht.codomain().is_subset(v_cell):
                cands.append(t)
        found = _tuple_search(gs, v_cell, cands)
        if found is not None:
            return Witness(v_cell, tuple(gs.display(t) for t in found))
    return NotFoundUpTo(depth, length)


def _tuple_search(gs: GermSystem, v_cell: OpenSet, cands: list[Label]) -> list[Label] | None:
    """Depth-first search over candidate tuples in deterministic order.

    Prunes on overlapping ranges and on branches whose ranges already
    reach everywhere in V: ranges only grow along a branch, so the strict
    containment clause can never recover there.
    """

    def extend(chosen: list[Label], start: int, src_union: OpenSet, ran_union: OpenSet):
        if chosen:
            closure_ran = ran_union.closure()
            if not closure_ran.minus(v_cell).is_empty():
                return None  # ranges escape V; extensions only widen them
            if v_cell.as_constructible().minus(closure_ran).is_empty():
                return None  # ranges already fill V; strictness is unrecoverable
            if src_union == v_cell:
                return list(chosen)
        for i in range(start, len(cands)):
            t = cands[i]
            ht = gs.h(t)
            if not ht.codomain().intersect(ran_union).is_empty():
                continue
            chosen.append(t)
            got = extend(
                chosen, i + 1, src_union.union(ht.domain()), ran_union.union(ht.codomain())
            )
            if got is not None:
                return got
            chosen.pop()
        return None

    return extend([], 0, OpenSet.empty(gs.space), OpenSet.empty(gs.space))
