"""Germ systems: groupoid presentations over a witness family.

A system carries labels acting by partial homeomorphisms together with open
witness sets D(t,u) deciding when two labels have the same germ at a point:
the arrows [t,x] and [u,x] coincide exactly when x lies in D(t,u).  Three
regimes share the interface:

  A - a validated finite inverse semigroup action; D(t,u) is the union of
      the domains of all common lower bounds of t and u.
  B - an implicit pseudogroup given by finitely many prefix exchanges;
      labels are the canonical maps themselves, enumerated lazily by
      composition length, and D(t,u) is their local agreement set.
  C - an explicit finite presentation: labels, multiplication and star
      tables, maps, and user-supplied witness sets, validated against the
      germ axioms.

Hausdorffness (the unit space being closed), the dangerous-point locus and
isotropy are decided by closure computations on the witness sets.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable

from .maps import PartialMap, agreement_region, local_agreement
from .semigroups import InverseSemigroup, meet_witnesses
from .topology import ConstructibleSet, OpenSet, Space, UPPoint

__all__ = [
    "GermSystem",
    "Arrow",
    "Slice",
    "GermAxiomError",
    "ValidationReport",
    "UndefinedProductError",
]

Label = Hashable  # str in regimes A/C, canonical PartialMap in regime B


class GermAxiomError(ValueError):
    def __init__(self, axiom: str, labels: tuple, detail: str):
        self.axiom = axiom
        self.labels = labels
        super().__init__(f"{axiom} at {labels}: {detail}")


class UndefinedProductError(KeyError):
    """A product of labels falls outside the declared label set."""


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[GermAxiomError, ...]

    def __repr__(self):
        if self.ok:
            return "ValidationReport(ok)"
        return "ValidationReport(" + "; ".join(str(v) for v in self.violations) + ")"


@dataclass(frozen=True)
class Arrow:
    """A groupoid arrow [t, x] with source x and range h_t(x)."""

    label: Label
    source: UPPoint
    target: UPPoint

    def __repr__(self):
        return f"[{self.label}, {self.source}]"


@dataclass(frozen=True)
class Slice:
    """The open bisection {[t,x] : x in U} for a clopen U inside dom h_t."""

    label: Label
    support: OpenSet


class GermSystem:
    """A groupoid presentation; immutable after construction."""

    def __init__(
        self,
        space: Space,
        regime: str,
        *,
        semigroup: InverseSemigroup | None = None,
        action: dict[int, PartialMap] | None = None,
        generators: dict[str, PartialMap] | None = None,
        labels: list[str] | None = None,
        maps: dict[str, PartialMap] | None = None,
        mult: dict[tuple[str, str], str] | None = None,
        star: dict[str, str] | None = None,
        witness: dict[tuple[str, str], OpenSet] | None = None,
        name: str = "",
    ):
        self.space = space
        self.regime = regime
        self.name = name
        self._witness_cache: dict[tuple[Label, Label], OpenSet] = {}
        if regime == "A":
            assert semigroup is not None and action is not None
            self.semigroup = semigroup
            self._action = action
            self.unit_label: Label = semigroup.names[semigroup.unit]
            # the unit comes first in the fixed label order
            order = [semigroup.unit] + [i for i in range(semigroup.n) if i != semigroup.unit]
            self._labels = [semigroup.names[i] for i in order]
            self._index = {n: i for i, n in enumerate(self._labels)}
            if not action[semigroup.unit].is_identity():
                raise GermAxiomError("unit-action", (self.unit_label,), "the unit must act as the identity")
        elif regime == "B":
            assert generators is not None
            self.generators = dict(generators)
            ident = PartialMap.identity(space)
            self._gen_alphabet: list[tuple[str, PartialMap]] = []
            for gname, g in self.generators.items():
                self._gen_alphabet.append((gname, g))
                self._gen_alphabet.append((gname + "*", g.inverse()))
            self.unit_label = ident
            self._names: dict[PartialMap, str] = {ident: "1"}
            self._order: dict[PartialMap, int] = {ident: 0}
            self._levels: list[list[PartialMap]] = [[ident]]
        elif regime == "C":
            assert labels and maps is not None and star is not None
            self._labels = list(labels)
            self._index = {n: i for i, n in enumerate(self._labels)}
            if "1" not in self._index:
                raise GermAxiomError("unit-label", (), "regime C systems need the unit label '1'")
            self.unit_label = "1"
            self._maps = dict(maps)
            self._mult = dict(mult or {})
            self._star = dict(star)
            self._user_witness = dict(witness or {})
            if not self._maps.get("1", PartialMap.empty(space)).is_identity():
                raise GermAxiomError("unit-action", ("1",), "the unit must act as the identity")
        else:
            raise ValueError(f"unknown regime {regime!r}")

    # --- constructors ---

    @staticmethod
    def from_semigroup_action(
        semigroup: InverseSemigroup, action: dict[int, PartialMap], name: str = ""
    ) -> "GermSystem":
        space = action[semigroup.unit].space
        for i in range(semigroup.n):
            for j in range(semigroup.n):
                if action[i].compose(action[j]) != action[semigroup.mult[i][j]]:
                    raise GermAxiomError(
                        "action-multiplicativity",
                        (semigroup.names[i], semigroup.names[j]),
                        "h_t h_u differs from h_{tu}",
                    )
        return GermSystem(space, "A", semigroup=semigroup, action=action, name=name)

    @staticmethod
    def from_generators(space: Space, generators: dict[str, PartialMap], name: str = "") -> "GermSystem":
        return GermSystem(space, "B", generators=generators, name=name)

    @staticmethod
    def explicit(
        space: Space,
        labels: list[str],
        maps: dict[str, PartialMap],
        mult: dict[tuple[str, str], str],
        star: dict[str, str],
        witness: dict[tuple[str, str], OpenSet],
        name: str = "",
    ) -> "GermSystem":
        return GermSystem(
            space, "C", labels=labels, maps=maps, mult=mult, star=star, witness=witness, name=name
        )

    # --- label interface ---

    def labels(self, bound: int | None = None) -> list[Label]:
        """All labels (regimes A/C) or compositions up to the bound (B)."""
        if self.regime == "A":
            return list(self._labels)
        if self.regime == "C":
            return list(self._labels)
        bound = 1 if bound is None else bound
        while len(self._levels) <= bound:
            frontier = []
            for m in self._levels[-1]:
                for gname, g in self._gen_alphabet:
                    prod = m.compose(g)
                    if prod not in self._names:
                        word = gname if m.is_identity() else self._names[m] + " " + gname
                        self._names[prod] = word
                        self._order[prod] = len(self._order)
                        frontier.append(prod)
            self._levels.append(frontier)
        out: list[PartialMap] = []
        for level in self._levels[: bound + 1]:
            out.extend(level)
        return out

    def h(self, t: Label) -> PartialMap:
        if self.regime == "A":
            return self._action[self.semigroup.index(t)]
        if self.regime == "B":
            return t
        try:
            return self._maps[t]
        except KeyError:
            raise UndefinedProductError(t)

    def mul(self, t: Label, u: Label) -> Label:
        if self.regime == "A":
            sg = self.semigroup
            return sg.names[sg.mul(sg.index(t), sg.index(u))]
        if self.regime == "B":
            prod = t.compose(u)
            if prod not in self._names:
                word = self._names.get(t, "?") + " " + self._names.get(u, "?")
                self._names[prod] = word
                self._order[prod] = len(self._order)
            return prod
        try:
            return self._mult[(t, u)]
        except KeyError:
            raise UndefinedProductError((t, u))

    def star(self, t: Label) -> Label:
        if self.regime == "A":
            sg = self.semigroup
            return sg.names[sg.inv(sg.index(t))]
        if self.regime == "B":
            inv = t.inverse()
            if inv not in self._names:
                self._names[inv] = self._names.get(t, "?") + "*"
                self._order[inv] = len(self._order)
            return inv
        try:
            return self._star[t]
        except KeyError:
            raise UndefinedProductError(t)

    def label_key(self, t: Label):
        """Fixed total label order; the unit label is least."""
        if self.regime in ("A", "C"):
            return self._index.get(t, len(self._labels))
        if t in self._order:
            return (0, self._order[t])
        return (1, t.rules)

    def display(self, t: Label) -> str:
        if self.regime in ("A", "C"):
            return str(t)
        return self._names.get(t, repr(t))

    # --- witnesses and germs ---

    def _down_masks(self) -> list[int]:
        """Downsets of the natural order as bitmasks over element indices."""
        masks = getattr(self, "_downs", None)
        if masks is None:
            sg = self.semigroup
            masks = []
            for t in range(sg.n):
                m = 0
                for v in range(sg.n):
                    if sg.leq(v, t):
                        m |= 1 << v
                masks.append(m)
            self._downs = masks
        return masks

    def _dom(self, i: int) -> OpenSet:
        doms = getattr(self, "_dom_cache", None)
        if doms is None:
            doms = {}
            self._dom_cache = doms
        if i not in doms:
            doms[i] = self._action[i].domain()
        return doms[i]

    def witness(self, t: Label, u: Label) -> OpenSet:
        """The open set D(t,u) on which t and u define the same germ."""
        key = (t, u)
        if key in self._witness_cache:
            return self._witness_cache[key]
        if self.regime == "A":
            sg = self.semigroup
            masks = self._down_masks()
            meets = masks[sg.index(t)] & masks[sg.index(u)]
            out = OpenSet.empty(self.space)
            v = 0
            while meets:
                if meets & 1:
                    out = out.union(self._dom(v))
                meets >>= 1
                v += 1
        elif self.regime == "B":
            out = local_agreement(t, u)
        else:
            if t == u:
                out = self.h(t).domain()
            else:
                out = self._user_witness.get(
                    (t, u), self._user_witness.get((u, t), OpenSet.empty(self.space))
                )
        self._witness_cache[key] = out
        self._witness_cache[(u, t)] = out
        return out

    def germ_eq(self, t: Label, u: Label, x: UPPoint) -> bool:
        return self.witness(t, u).contains(x)

    def canonical_label(self, t: Label, x: UPPoint, pool: Iterable[Label] | None = None) -> Label:
        """Least label (in the fixed order) germ-equal to t at x."""
        if pool is None:
            if self.regime == "B":
                pool = [t]
            else:
                pool = self.labels()
        best = t
        for u in pool:
            if self.label_key(u) < self.label_key(best) and self.h(u).domain().contains(x) and self.germ_eq(t, u, x):
                best = u
        return best

    def arrow(self, t: Label, x: UPPoint, pool: Iterable[Label] | None = None) -> Arrow:
        ht = self.h(t)
        if not ht.domain().contains(x):
            raise ValueError(f"point {x} is outside the domain of {self.display(t)}")
        rep = self.canonical_label(t, x, pool)
        return Arrow(rep, x, ht.apply(x))

    def arrow_mul(self, a1: Arrow, a2: Arrow, pool: Iterable[Label] | None = None) -> Arrow:
        if a1.source != a2.target:
            raise ValueError("arrows are not composable: source(a1) must be the range of a2")
        return self.arrow(self.mul(a1.label, a2.label), a2.source, pool)

    def arrow_inv(self, a: Arrow, pool: Iterable[Label] | None = None) -> Arrow:
        return self.arrow(self.star(a.label), a.target, pool)

    def unit_arrow(self, x: UPPoint) -> Arrow:
        return Arrow(self.unit_label, x, x)

    # --- analysis ---

    def enumerate_arrows(self) -> list[list[Arrow]]:
        """All germ classes of a regime A system on a finite space.

        Classes are merged by sweeping, for every witness element v, the
        clique of labels above v at each point of dom h_v; the result is
        deterministically ordered by (source point, least label).
        """
        if self.regime != "A" or not self.space.is_finite:
            raise ValueError("arrow enumeration needs regime A on a finite space")
        sg = self.semigroup
        up_sets = [sorted(sg.up_set(v)) for v in range(sg.n)]
        classes: list[list[Arrow]] = []
        for p in range(self.space.size):
            x = UPPoint.of_index(self.space, p)
            here = [i for i in range(sg.n) if self._action[i].domain().contains(x)]
            parent = {i: i for i in here}

            def find(i: int) -> int:
                while parent[i] != i:
                    parent[i] = parent[parent[i]]
                    i = parent[i]
                return i

            for v in here:
                ups = [i for i in up_sets[v] if i in parent]
                for i in ups[1:]:
                    ri, r0 = find(i), find(ups[0])
                    if ri != r0:
                        parent[ri] = r0
            groups: dict[int, list[int]] = {}
            for i in here:
                groups.setdefault(find(i), []).append(i)
            for members in groups.values():
                members.sort(key=lambda i: self.label_key(sg.names[i]))
                arrows = [
                    Arrow(sg.names[i], x, self._action[i].apply(x)) for i in members
                ]
                classes.append(arrows)
        classes.sort(key=lambda arrows: (arrows[0].source.index, self.label_key(arrows[0].label)))
        return classes

    def is_hausdorff(self, bound: int | None = None) -> bool:
        """True iff every witness set is closed in the common domain."""
        if self.space.is_finite:
            return True  # every subset of a discrete space is closed
        ts = self.labels(bound)
        for i, t in enumerate(ts):
            for u in ts[i:]:
                d = self.witness(t, u)
                common = self.h(t).domain().intersect(self.h(u).domain())
                if not d.closure().intersect(common).minus(d).is_empty():
                    return False
        return True

    units_closed = is_hausdorff

    def dangerous_set(self, bound: int | None = None) -> ConstructibleSet:
        """Points where two distinct germs are limits of a single net.

        For a witness system these are the boundary points of some D(t,u)
        inside the common domain of two labels with distinct germs there.
        Regime C systems must be multiplication-closed for the label set to
        cover the groupoid; this is asserted during validation.
        """
        out = ConstructibleSet.empty(self.space)
        if self.space.is_finite:
            return out  # discrete: witness sets have empty boundary
        ts = self.labels(bound)
        for i, t in enumerate(ts):
            for u in ts[i + 1 :]:
                d = self.witness(t, u)
                common = self.h(t).domain().intersect(self.h(u).domain())
                out = out.union(d.closure().intersect(common).minus(d))
        return out

    def isotropy_at(self, x: UPPoint, bound: int | None = None) -> list[dict]:
        """Germ classes of labels fixing x, flagged trivial or not."""
        ts = [t for t in self.labels(bound) if self.h(t).domain().contains(x)]
        fixing = [t for t in ts if self.h(t).apply(x) == x]
        classes: list[list[Label]] = []
        for t in fixing:
            for cls in classes:
                if self.germ_eq(t, cls[0], x):
                    cls.append(t)
                    break
            else:
                classes.append([t])
        out = []
        for cls in classes:
            cls.sort(key=self.label_key)
            trivial = self.germ_eq(cls[0], self.unit_label, x) if self.h(self.unit_label).domain().contains(x) else False
            out.append(
                {
                    "labels": [self.display(t) for t in cls],
                    "representative": self.display(cls[0]),
                    "trivial": trivial,
                }
            )
        return out

    # --- validation ---

    def validate_system(self, bound: int | None = None) -> ValidationReport:
        violations: list[GermAxiomError] = []
        ts = self.labels(bound)

        def disp(*labels):
            return tuple(self.display(t) for t in labels)

        if self.regime == "C":
            for t in ts:
                if t not in self._star:
                    violations.append(GermAxiomError("star-total", disp(t), "missing star"))
                for u in ts:
                    if (t, u) not in self._mult:
                        violations.append(
                            GermAxiomError(
                                "multiplication-closure", disp(t, u), "product missing from the label set"
                            )
                        )
            if violations:
                return ValidationReport(False, tuple(violations))
            for t in ts:
                for u in ts:
                    prod = self._mult[(t, u)]
                    if prod not in self._index:
                        violations.append(
                            GermAxiomError("multiplication-closure", disp(t, u), f"product {prod} undeclared")
                        )
                        continue
                    if self.h(t).compose(self.h(u)) != self.h(prod):
                        violations.append(
                            GermAxiomError(
                                "action-multiplicativity", disp(t, u), "h_t h_u differs from h_{tu}"
                            )
                        )
            for t in ts:
                if self.h(self._star[t]) != self.h(t).inverse():
                    violations.append(
                        GermAxiomError("star-action", disp(t), "h_{t*} is not the inverse of h_t")
                    )
            for t in ts:
                for u in ts:
                    for w in ts:
                        if self._mult[(self._mult[(t, u)], w)] != self._mult[(t, self._mult[(u, w)])]:
                            violations.append(
                                GermAxiomError("associativity", disp(t, u, w), "label products differ")
                            )

        for t in ts:
            d = self.witness(t, t)
            if not (d.is_subset(self.h(t).domain()) and self.h(t).domain().is_subset(d)):
                violations.append(GermAxiomError("diagonal", disp(t), "D(t,t) must equal dom h_t"))
        for i, t in enumerate(ts):
            for u in ts[i + 1 :]:
                d = self.witness(t, u)
                common = self.h(t).domain().intersect(self.h(u).domain())
                if not d.is_subset(common):
                    violations.append(
                        GermAxiomError("containment", disp(t, u), "D(t,u) leaves the common domain")
                    )
                    continue
                if not d.is_empty():
                    region = agreement_region(self.h(t), self.h(u))
                    bad = d.as_constructible().minus(region.as_constructible())
                    if not bad.is_empty():
                        witness_pt = bad.sample_point()
                        violations.append(
                            GermAxiomError(
                                "agreement",
                                disp(t, u),
                                f"h_t and h_u disagree at {witness_pt} inside D(t,u)",
                            )
                        )
        for t in ts:
            for u in ts:
                for w in ts:
                    try:
                        dtu, duw, dtw = self.witness(t, u), self.witness(u, w), self.witness(t, w)
                    except UndefinedProductError:
                        continue
                    if not dtu.intersect(duw).is_subset(dtw):
                        violations.append(
                            GermAxiomError("transitivity", disp(t, u, w), "D(t,u) ∩ D(u,w) leaves D(t,w)")
                        )
        for t in ts:
            for u in ts:
                d = self.witness(t, u)
                try:
                    dsu = self.witness(self.star(t), self.star(u))
                except UndefinedProductError:
                    continue
                if not self.h(t).image(d.intersect(self.h(t).domain())).is_subset(dsu):
                    violations.append(
                        GermAxiomError("star-compatibility", disp(t, u), "image of D(t,u) leaves D(t*,u*)")
                    )
                for w in ts:
                    try:
                        tw, uw = self.mul(t, w), self.mul(u, w)
                        dtwuw = self.witness(tw, uw)
                    except UndefinedProductError:
                        continue
                    lhs = (
                        self.h(w)
                        .preimage(d)
                        .intersect(self.h(tw).domain())
                        .intersect(self.h(uw).domain())
                    )
                    if not lhs.is_subset(dtwuw):
                        violations.append(
                            GermAxiomError(
                                "right-multiplicativity", disp(t, u, w), "witnesses fail under right translation"
                            )
                        )
        return ValidationReport(not violations, tuple(violations))

    def __repr__(self):
        return f"GermSystem({self.name or self.regime}, regime {self.regime})"
