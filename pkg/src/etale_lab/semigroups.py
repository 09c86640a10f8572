"""Abstract finite inverse semigroups and closures of partial-map families.

A structure is a finite element list with a distinguished unit, a full
multiplication table and an involution.  Validation checks associativity,
uniqueness of pseudo-inverses and commuting idempotents, reporting a
concrete counterexample for each failure.  generate_closure materialises
the inverse semigroup generated by finitely many partial maps, up to a cap,
together with its tautological action.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .maps import PartialMap
from .topology import OpenSet

__all__ = [
    "InverseSemigroup",
    "SemigroupAxiomError",
    "CapExceeded",
    "validate",
    "generate_closure",
    "meet_witnesses",
    "witness_domain",
]


class SemigroupAxiomError(ValueError):
    """A violated inverse-semigroup axiom, with a concrete counterexample."""

    def __init__(self, axiom: str, elements: tuple, detail: str):
        self.axiom = axiom
        self.elements = elements
        super().__init__(f"{axiom}: {detail}")


class CapExceeded(Exception):
    """Closure generation outgrew the cap."""

    def __init__(self, count: int, frontier: int):
        self.count = count
        self.frontier = frontier
        super().__init__(f"closure exceeded cap at {count} elements ({frontier} on the frontier)")


@dataclass(frozen=True)
class InverseSemigroup:
    """Validated finite inverse semigroup with unit.

    Elements are indices 0..n-1 with display names; mult[i][j] is the
    product, star[i] the pseudo-inverse.  The unit is element `unit`.
    """

    names: tuple[str, ...]
    unit: int
    mult: tuple[tuple[int, ...], ...]
    star: tuple[int, ...]
    idempotents: frozenset[int] = field(default=frozenset())

    @property
    def n(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        idx = self.__dict__.get("_name_index")
        if idx is None:
            idx = {nm: i for i, nm in enumerate(self.names)}
            object.__setattr__(self, "_name_index", idx)
        try:
            return idx[name]
        except KeyError:
            raise KeyError(f"no element named {name!r}")

    def mul(self, i: int, j: int) -> int:
        return self.mult[i][j]

    def inv(self, i: int) -> int:
        return self.star[i]

    def leq(self, i: int, j: int) -> bool:
        """Natural partial order: i <= j iff i = j * (i* i)."""
        return self.mul(j, self.mul(self.star[i], i)) == i

    def order_witness(self, i: int, j: int) -> int | None:
        """An idempotent e with i = j e, when i <= j."""
        return self.mul(self.star[i], i) if self.leq(i, j) else None

    def natural_order(self) -> frozenset[tuple[int, int]]:
        return frozenset((i, j) for i in range(self.n) for j in range(self.n) if self.leq(i, j))

    def down_set(self, i: int) -> frozenset[int]:
        return frozenset(v for v in range(self.n) if self.leq(v, i))

    def up_set(self, i: int) -> frozenset[int]:
        return frozenset(v for v in range(self.n) if self.leq(i, v))

    def __repr__(self):
        return f"InverseSemigroup({self.n} elements, unit={self.names[self.unit]!r})"


def validate(names, unit, mult, star=None, assume_associative: bool = False) -> InverseSemigroup:
    """Validate a finite multiplication table as a unital inverse semigroup.

    star may be omitted, in which case pseudo-inverses are searched for;
    an ambiguous or missing pseudo-inverse is a reported violation.
    assume_associative skips the cubic triple check; it is set only when
    the table was built from function composition, which is associative.
    """
    names = tuple(names)
    n = len(names)
    mult = tuple(tuple(row) for row in mult)
    if len(mult) != n or any(len(row) != n for row in mult):
        raise SemigroupAxiomError("table-shape", (), f"need an {n}x{n} table")
    for row in mult:
        for v in row:
            if not 0 <= v < n:
                raise SemigroupAxiomError("table-closure", (v,), f"product index {v} out of range")
    if not 0 <= unit < n:
        raise SemigroupAxiomError("unit", (unit,), "unit index out of range")
    for i in range(n):
        if mult[unit][i] != i or mult[i][unit] != i:
            raise SemigroupAxiomError(
                "unit", (names[i],), f"{names[unit]} is not a two-sided unit at {names[i]}"
            )
    if not assume_associative:
        for i in range(n):
            for j in range(n):
                row_ij = mult[mult[i][j]]
                row_i = mult[i]
                row_j = mult[j]
                for k in range(n):
                    if row_ij[k] != row_i[row_j[k]]:
                        raise SemigroupAxiomError(
                            "associativity",
                            (names[i], names[j], names[k]),
                            f"({names[i]}{names[j]}){names[k]} != {names[i]}({names[j]}{names[k]})",
                        )
    found_star = []
    for t in range(n):
        candidates = [s for s in range(n) if mult[mult[t][s]][t] == t and mult[mult[s][t]][s] == s]
        if not candidates:
            raise SemigroupAxiomError("pseudo-inverse", (names[t],), f"{names[t]} has no pseudo-inverse")
        if len(candidates) > 1:
            raise SemigroupAxiomError(
                "pseudo-inverse",
                (names[t],) + tuple(names[c] for c in candidates),
                f"{names[t]} has {len(candidates)} pseudo-inverses",
            )
        found_star.append(candidates[0])
    if star is not None and tuple(star) != tuple(found_star):
        t = next(i for i in range(n) if star[i] != found_star[i])
        raise SemigroupAxiomError(
            "pseudo-inverse", (names[t],), f"declared star of {names[t]} is not its pseudo-inverse"
        )
    idem = frozenset(e for e in range(n) if mult[e][e] == e)
    for e in idem:
        for f in idem:
            if mult[e][f] != mult[f][e]:
                raise SemigroupAxiomError(
                    "commuting-idempotents",
                    (names[e], names[f]),
                    f"idempotents {names[e]}, {names[f]} do not commute",
                )
    return InverseSemigroup(names, unit, mult, tuple(found_star), idem)


def generate_closure(
    gens: list[PartialMap], cap: int, names: list[str] | None = None
) -> tuple[InverseSemigroup, dict[int, PartialMap]]:
    """Close a partial-map family under composition and inversion.

    Elements are enumerated breadth-first by word length in the generators
    and their inverses, lexicographically within a length; the identity is
    adjoined as the unit.  Raises CapExceeded when the closure outgrows the
    cap.  Returns the abstract structure and its tautological action.
    """
    if not gens:
        raise ValueError("need at least one generator")
    space = gens[0].space
    if names is None:
        names = [f"g{i}" for i in range(len(gens))]
    alphabet: list[tuple[str, PartialMap]] = []
    for name, g in zip(names, gens):
        alphabet.append((name, g))
        alphabet.append((name + "*", g.inverse()))
    ident = PartialMap.identity(space)
    elems: dict[PartialMap, str] = {ident: "1"}
    frontier: list[PartialMap] = [ident]
    while frontier:
        new: list[PartialMap] = []
        for m in frontier:
            for name, g in alphabet:
                prod = m.compose(g)
                if prod not in elems:
                    elems[prod] = name if m is ident else elems[m] + " " + name
                    new.append(prod)
                    if len(elems) > cap:
                        raise CapExceeded(len(elems), len(new))
        frontier = new
    order = list(elems)  # insertion order = BFS by word length, then lex
    index = {m: i for i, m in enumerate(order)}
    n = len(order)
    mult = tuple(tuple(index[order[i].compose(order[j])] for j in range(n)) for i in range(n))
    semigroup = validate([elems[m] for m in order], 0, mult, assume_associative=True)
    action = {i: order[i] for i in range(n)}
    return semigroup, action


def meet_witnesses(s: InverseSemigroup, t: int, u: int) -> frozenset[int]:
    """All elements below both t and u in the natural partial order."""
    return frozenset(v for v in range(s.n) if s.leq(v, t) and s.leq(v, u))


def witness_domain(
    s: InverseSemigroup, action: dict[int, PartialMap], t: int, u: int
) -> OpenSet:
    """The open set swept by the domains of all common lower bounds."""
    space = action[s.unit].space
    out = OpenSet.empty(space)
    for v in meet_witnesses(s, t, u):
        out = out.union(action[v].domain())
    return out
