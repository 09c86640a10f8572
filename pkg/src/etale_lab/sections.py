"""The exact convolution *-algebra of quasi-continuous sections.

Elements are finite sums of coefficient-weighted slices (label, clopen
support) over a germ system, with scalar line fibres.  Products move
supports through the maps, the involution exchanges a slice with its
star label over the image support, and the unit-germ restriction E sends a
section to a piecewise-constant point function.  Zero-testing refines all
supports by the atoms of the slice supports together with the relevant
witness sets, so germ equality of labels is constant on every cell; a
section is singular when its germ function is supported over cells with
empty interior, and two sections are essentially equal when their
difference is singular.
"""

from __future__ import annotations

from dataclasses import dataclass

from .germs import Arrow, GermSystem, Label
from .scalars import ONE, ZERO, Scalar
from .topology import Atom, ConstructibleSet, OpenSet, UPPoint, atoms

__all__ = ["Section", "NormalForm", "PointFunction", "delta", "unit_section"]


@dataclass(frozen=True)
class NormalForm:
    """Canonical cell data of a section: per (cell, germ class) coefficients.

    Cells are the atoms of the boolean algebra generated by the slice
    supports and the witness sets between slice labels; entries keep only
    nonzero coefficients, keyed by the least label of the germ class.
    """

    entries: tuple[tuple[ConstructibleSet, Label, Scalar], ...]
    cells: tuple[Atom, ...]

    def is_zero(self) -> bool:
        return not self.entries


@dataclass(frozen=True)
class PointFunction:
    """A bounded function on the unit space, constant on finitely many
    disjoint constructible pieces and zero elsewhere."""

    space: object
    pieces: tuple[tuple[ConstructibleSet, Scalar], ...]

    def value_at(self, x: UPPoint) -> Scalar:
        for cell, value in self.pieces:
            if cell.contains(x):
                return value
        return ZERO

    def support(self) -> ConstructibleSet:
        out = ConstructibleSet.empty(self.space)
        for cell, value in self.pieces:
            if not value.is_zero():
                out = out.union(cell)
        return out

    def is_zero_function(self) -> bool:
        return all(v.is_zero() or cell.is_empty() for cell, v in self.pieces)

    def render(self) -> list[dict]:
        return [
            {"value": str(v), "sample": str(cell.sample_point())}
            for cell, v in self.pieces
            if not v.is_zero() and not cell.is_empty()
        ]


class Section:
    """A finite formal sum of slices with exact complex rational weights."""

    def __init__(self, gs: GermSystem, terms):
        self.gs = gs
        merged: dict[tuple[Label, OpenSet], Scalar] = {}
        for label, support, coeff in terms:
            if support.is_empty() or coeff.is_zero():
                continue
            key = (label, support)
            merged[key] = merged.get(key, ZERO) + coeff
        self.terms = tuple(
            (label, support, coeff) for (label, support), coeff in merged.items() if not coeff.is_zero()
        )
        self._nf: NormalForm | None = None

    # --- constructors ---

    @staticmethod
    def of_terms(gs: GermSystem, terms) -> "Section":
        for label, support, _ in terms:
            dom = gs.h(label).domain()
            if not support.is_subset(dom):
                raise ValueError(
                    f"slice support for {gs.display(label)} leaves the domain of its map"
                )
            if not gs.space.is_finite and not support.is_clopen():
                raise ValueError("slice supports must be clopen")
        return Section(gs, terms)

    @staticmethod
    def zero(gs: GermSystem) -> "Section":
        return Section(gs, [])

    # --- *-algebra ---

    def add(self, other: "Section") -> "Section":
        return Section(self.gs, self.terms + other.terms)

    def scalar_mul(self, c: Scalar) -> "Section":
        return Section(self.gs, [(t, u, c * d) for t, u, d in self.terms])

    def sub(self, other: "Section") -> "Section":
        return self.add(other.scalar_mul(Scalar.of(-1)))

    def mul(self, other: "Section") -> "Section":
        gs = self.gs
        out = []
        for t, u_sup, c in self.terms:
            for w, v_sup, d in other.terms:
                label = gs.mul(t, w)
                hw = gs.h(w)
                support = v_sup.intersect(hw.preimage(u_sup.intersect(hw.codomain())))
                out.append((label, support, c * d))
        return Section(gs, out)

    def star(self) -> "Section":
        gs = self.gs
        return Section(
            gs,
            [(gs.star(t), gs.h(t).image(u_sup), c.conj()) for t, u_sup, c in self.terms],
        )

    def __add__(self, other):
        return self.add(other)

    def __sub__(self, other):
        return self.sub(other)

    def __mul__(self, other):
        return self.mul(other)

    # --- normal form and evaluation ---

    def normal_form(self) -> NormalForm:
        if self._nf is not None:
            return self._nf
        gs = self.gs
        opens: list[OpenSet] = []
        position: dict[OpenSet, int] = {}

        def add_open(u: OpenSet) -> int:
            if u not in position:
                position[u] = len(opens)
                opens.append(u)
            return position[u]

        sup_pos = [add_open(u) for _, u, _ in self.terms]
        labels = [t for t, _, _ in self.terms]
        wit_pos: dict[tuple[int, int], int] = {}
        for i in range(len(labels)):
            for j in range(i + 1, len(labels)):
                if labels[i] != labels[j]:
                    wit_pos[(i, j)] = add_open(gs.witness(labels[i], labels[j]))
        cells = atoms(opens, gs.space) if opens else atoms([], gs.space)
        entries: list[tuple[ConstructibleSet, Label, Scalar]] = []
        for atom in cells:
            live = [i for i in range(len(labels)) if atom.pattern[sup_pos[i]]]
            classes: list[list[int]] = []
            for i in live:
                for cls in classes:
                    j0 = cls[0]
                    lo, hi = min(i, j0), max(i, j0)
                    same = labels[i] == labels[j0] or (
                        (lo, hi) in wit_pos and atom.pattern[wit_pos[(lo, hi)]]
                    )
                    if same:
                        cls.append(i)
                        break
                else:
                    classes.append([i])
            for cls in classes:
                coeff = ZERO
                for i in cls:
                    coeff = coeff + self.terms[i][2]
                if not coeff.is_zero():
                    rep = min((labels[i] for i in cls), key=gs.label_key)
                    entries.append((atom.cell, rep, coeff))
        self._nf = NormalForm(tuple(entries), tuple(cells))
        return self._nf

    def is_zero(self) -> bool:
        return self.normal_form().is_zero()

    def equals(self, other: "Section") -> bool:
        return self.sub(other).is_zero()

    def j_eval(self, a: Arrow) -> Scalar:
        """The coefficient the section attaches to the arrow's germ class."""
        gs = self.gs
        out = ZERO
        for t, u_sup, c in self.terms:
            if u_sup.contains(a.source) and gs.germ_eq(t, a.label, a.source):
                out = out + c
        return out

    # --- expectation and singularity ---

    def expectation(self) -> PointFunction:
        """Unit-germ restriction: each slice contributes on the part of its
        support where its label is witnessed trivial."""
        gs = self.gs
        opens: list[OpenSet] = []
        position: dict[OpenSet, int] = {}

        def add_open(u: OpenSet) -> int:
            if u not in position:
                position[u] = len(opens)
                opens.append(u)
            return position[u]

        locs = [
            (add_open(u_sup), add_open(gs.witness(t, gs.unit_label)), c)
            for t, u_sup, c in self.terms
        ]
        if not opens:
            return PointFunction(gs.space, ())
        cells = atoms(opens, gs.space)
        pieces = []
        for atom in cells:
            value = ZERO
            for iu, iw, c in locs:
                if atom.pattern[iu] and atom.pattern[iw]:
                    value = value + c
            if not value.is_zero():
                pieces.append((atom.cell, value))
        return PointFunction(gs.space, tuple(pieces))

    def is_singular(self) -> bool:
        """Whether the germ function is supported over cells with empty
        interior in the unit space (so the support has empty interior in
        the arrow space)."""
        return all(cell.has_empty_interior() for cell, _, _ in self.normal_form().entries)

    def el_kernel_member(self) -> bool:
        """Membership in the kernel of the essential expectation, decided
        along the independent route: the support of E(f* f) is meagre."""
        return self.star().mul(self).expectation().support().is_meagre()

    def ess_equal(self, other: "Section") -> bool:
        return self.sub(other).is_singular()

    def render(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for t, u_sup, c in self.terms:
            parts.append(f"{c} * ({self.gs.display(t)}, {_render_support(u_sup)})")
        return " + ".join(parts)

    def __repr__(self):
        return f"Section({self.render()})"


def _render_support(u: OpenSet) -> str:
    if u.space.is_finite:
        return "{" + ",".join(str(i) for i in sorted(u.points)) + "}"
    if u.is_full():
        return "ε"
    if u.is_empty():
        return "∅"
    try:
        return "|".join(u.cylinders())
    except ValueError:
        return f"<open:{u.dfa.n} states>"


def delta(gs: GermSystem, label: Label, coeff: Scalar = ONE) -> Section:
    """The section supported on a whole label slice with a constant weight."""
    return Section(gs, [(label, gs.h(label).domain(), coeff)])


def unit_section(gs: GermSystem) -> Section:
    return delta(gs, gs.unit_label)
