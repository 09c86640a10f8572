"""Partial homeomorphisms of the two space backends.

Finite backend: partial injections of {0..n-1}.  Cantor backend: prefix
exchanges, finitely many rewrite rules a -> b acting by a.w |-> b.w, with
pairwise disjoint domain cylinders and pairwise disjoint range cylinders.
Rule lists are kept in a merged, sorted canonical form so that equality of
maps is equality of data.  Domains and ranges are always clopen and every
map is a homeomorphism from its domain onto its range.
"""

from __future__ import annotations

from dataclasses import dataclass

from .topology import (
    ConstructibleSet,
    Dfa,
    OpenSet,
    Space,
    UPPoint,
    _canonADfa,
    _dfa_empty,
    _dfa_from_words,
    _minimize,
    _reroot,
    _require_same_space,
)

__all__ = ["PartialMap", "FixRegion", "compose", "local_agreement", "agreement_region"]


def _incomparable(words: list[str]) -> bool:
    for i, a in enumerate(words):
        for b in words[i + 1 :]:
            if a.startswith(b) or b.startswith(a):
                return False
    return True


def _merge_rules(space: Space, rules: list[tuple[str, str]]) -> tuple[tuple[str, str], ...]:
    """Collapse sibling rules (a.c -> b.c for every symbol c) into (a -> b)."""
    rules = sorted(set(rules))
    changed = True
    while changed:
        changed = False
        buckets: dict[tuple[str, str], set[str]] = {}
        for a, b in rules:
            if a and b and a[-1] == b[-1]:
                buckets.setdefault((a[:-1], b[:-1]), set()).add(a[-1])
        for (pa, pb), syms in buckets.items():
            if syms == set(space.alphabet):
                rules = [
                    (a, b)
                    for a, b in rules
                    if not (a and b and a[-1] == b[-1] and (a[:-1], b[:-1]) == (pa, pb))
                ]
                rules.append((pa, pb))
                rules.sort()
                changed = True
                break
    return tuple(rules)


@dataclass(frozen=True)
class PartialMap:
    """A partial injection (finite) or a prefix exchange (Cantor)."""

    space: Space
    rules: tuple[tuple[str, str], ...] | None = None
    pairs: tuple[tuple[int, int], ...] | None = None

    # --- constructors ---

    @staticmethod
    def identity(space: Space) -> "PartialMap":
        if space.is_finite:
            return PartialMap(space, pairs=tuple((i, i) for i in range(space.size)))
        return PartialMap(space, rules=(("", ""),))

    @staticmethod
    def empty(space: Space) -> "PartialMap":
        if space.is_finite:
            return PartialMap(space, pairs=())
        return PartialMap(space, rules=())

    @staticmethod
    def of_pairs(space: Space, mapping: dict[int, int]) -> "PartialMap":
        if not space.is_finite:
            raise ValueError("pair maps live on finite spaces")
        items = sorted(mapping.items())
        srcs = [i for i, _ in items]
        dsts = [j for _, j in items]
        if len(set(dsts)) != len(dsts):
            raise ValueError("partial map must be injective")
        for v in srcs + dsts:
            if not 0 <= v < space.size:
                raise ValueError(f"point {v} outside space of size {space.size}")
        return PartialMap(space, pairs=tuple(items))

    @staticmethod
    def prefix_exchange(space: Space, rules) -> "PartialMap":
        if space.is_finite:
            raise ValueError("prefix exchanges live on Cantor spaces")
        rules = [(str(a), str(b)) for a, b in rules]
        for a, b in rules:
            space.check_word(a)
            space.check_word(b)
        if not _incomparable([a for a, _ in rules]):
            raise ValueError("domain cylinders of a prefix exchange must be disjoint")
        if not _incomparable([b for _, b in rules]):
            raise ValueError("range cylinders of a prefix exchange must be disjoint")
        return PartialMap(space, rules=_merge_rules(space, rules))

    @staticmethod
    def identity_on(u: OpenSet) -> "PartialMap":
        if u.space.is_finite:
            return PartialMap(u.space, pairs=tuple((i, i) for i in sorted(u.points)))
        return PartialMap.prefix_exchange(u.space, [(w, w) for w in u.cylinders()])

    # --- domains ---

    def domain(self) -> OpenSet:
        if self.space.is_finite:
            return OpenSet.of_points(self.space, [i for i, _ in self.pairs])
        return OpenSet.from_words(self.space, [a for a, _ in self.rules])

    def codomain(self) -> OpenSet:
        if self.space.is_finite:
            return OpenSet.of_points(self.space, [j for _, j in self.pairs])
        return OpenSet.from_words(self.space, [b for _, b in self.rules])

    def is_identity(self) -> bool:
        return self == PartialMap.identity(self.space)

    # --- algebra ---

    def inverse(self) -> "PartialMap":
        if self.space.is_finite:
            return PartialMap(self.space, pairs=tuple(sorted((j, i) for i, j in self.pairs)))
        return PartialMap(self.space, rules=_merge_rules(self.space, [(b, a) for a, b in self.rules]))

    def compose(self, other: "PartialMap") -> "PartialMap":
        """self o other: apply other first."""
        _require_same_space(self, other)
        if self.space.is_finite:
            inner = dict(other.pairs)
            outer = dict(self.pairs)
            out = {i: outer[j] for i, j in inner.items() if j in outer}
            return PartialMap.of_pairs(self.space, out)
        out: list[tuple[str, str]] = []
        for a, b in other.rules:
            for c, d in self.rules:
                if b.startswith(c):  # other lands inside [c]: b = c.s
                    s = b[len(c):]
                    out.append((a, d + s))
                elif c.startswith(b) and c != b:  # only part of [b] maps on: c = b.s
                    s = c[len(b):]
                    out.append((a + s, d))
        return PartialMap(self.space, rules=_merge_rules(self.space, out))

    def restrict(self, u: OpenSet) -> "PartialMap":
        _require_same_space(self, u)
        if self.space.is_finite:
            return PartialMap(self.space, pairs=tuple((i, j) for i, j in self.pairs if i in u.points))
        if not u.is_clopen():
            raise ValueError("restriction is only defined for clopen sets")
        dom = self.domain().intersect(u)
        out = []
        for w in dom.cylinders():
            for a, b in self.rules:
                if w.startswith(a):
                    out.append((w, b + w[len(a):]))
                elif a.startswith(w):
                    out.append((a, b))
        return PartialMap(self.space, rules=_merge_rules(self.space, out))

    # --- pointwise action ---

    def apply(self, x: UPPoint) -> UPPoint:
        if x.space != self.space:
            raise ValueError("point from a different space")
        if self.space.is_finite:
            m = dict(self.pairs)
            if x.index not in m:
                raise ValueError(f"point {x} outside the domain")
            return UPPoint.of_index(self.space, m[x.index])
        for a, b in self.rules:
            if x.head(len(a)) == a:
                return x.drop(len(a)).prepend(b)
        raise ValueError(f"point {x} outside the domain")

    def image(self, u: OpenSet) -> OpenSet:
        _require_same_space(self, u)
        if self.space.is_finite:
            m = dict(self.pairs)
            return OpenSet.of_points(self.space, [m[i] for i in u.points if i in m])
        out = OpenSet.empty(self.space)
        for a, b in self.rules:
            res = _residual(u, a)
            out = out.union(_prepend_open(self.space, b, res))
        return out

    def preimage(self, u: OpenSet) -> OpenSet:
        return self.inverse().image(u)

    def fix_region(self) -> "FixRegion":
        return agreement_region(self, PartialMap.identity(self.space))

    # --- operators ---

    def __mul__(self, other):
        return self.compose(other)

    def __repr__(self):
        if self.space.is_finite:
            return "PartialMap{" + ", ".join(f"{i}->{j}" for i, j in self.pairs) + "}"
        return "PartialMap{" + ", ".join(f"{a or 'ε'}->{b or 'ε'}" for a, b in self.rules) + "}"


@dataclass(frozen=True)
class FixRegion:
    """Exact agreement locus of two partial maps on their common domain.

    The locus of a prefix exchange against another is a clopen set together
    with finitely many isolated ultimately periodic points; in a perfect
    space it has empty interior exactly when the clopen part is empty.
    """

    clopen_part: OpenSet
    isolated_points: frozenset[UPPoint]

    def as_constructible(self) -> ConstructibleSet:
        out = self.clopen_part.as_constructible()
        for x in self.isolated_points:
            out = out.union(ConstructibleSet.from_point(x))
        return out

    def has_empty_interior(self) -> bool:
        return self.clopen_part.is_empty()

    def is_empty(self) -> bool:
        return self.clopen_part.is_empty() and not self.isolated_points

    def __repr__(self):
        pts = "{" + ", ".join(sorted(str(p) for p in self.isolated_points)) + "}"
        return f"FixRegion({self.clopen_part!r}, {pts})"


def _residual(u: OpenSet, word: str) -> OpenSet:
    """The open set {y : word.y in u}."""
    d = u.dfa
    q = d.run(word, u.space)
    return OpenSet(u.space, dfa=_reroot(d, q))


def _prepend_open(space: Space, word: str, u: OpenSet) -> OpenSet:
    """The open set {word.y : y in u}."""
    if u.is_empty():
        return OpenSet.empty(space)
    k = len(space.alphabet)
    d = u.dfa
    m = len(word)
    # states 0..m-1 spell the word, then u's automaton shifted by m; the
    # last state is a dead sink for deviations from the word.
    dead = m + d.n
    delta = []
    for i in range(m):
        a_good = space.sym_index(word[i])
        nxt = i + 1 if i + 1 < m else m  # m = u's initial state
        delta.append(tuple(nxt if a == a_good else dead for a in range(k)))
    for q in range(d.n):
        delta.append(tuple(m + d.delta[q][a] for a in range(k)))
    delta.append(tuple(dead for _ in range(k)))
    accepting = frozenset(m + q for q in d.accepting)
    return OpenSet(space, dfa=_canonADfa(Dfa(tuple(delta), accepting)))


def compose(f: PartialMap, g: PartialMap) -> PartialMap:
    """f o g on g^{-1}(dom f ∩ ran g)."""
    return f.compose(g)


def agreement_region(f: PartialMap, g: PartialMap) -> FixRegion:
    """The exact locus {x in dom f ∩ dom g : f(x) = g(x)}."""
    _require_same_space(f, g)
    space = f.space
    if space.is_finite:
        mf, mg = dict(f.pairs), dict(g.pairs)
        agree = [i for i in mf if i in mg and mf[i] == mg[i]]
        return FixRegion(OpenSet.of_points(space, agree), frozenset())
    cyl_words: list[str] = []
    points: set[UPPoint] = set()
    for a, b in f.rules:
        for c, d in g.rules:
            if a.startswith(c):
                m = a  # overlap cylinder [m]
                fb, gb = b, d + a[len(c):]
            elif c.startswith(a):
                m = c
                fb, gb = b + c[len(a):], d
            else:
                continue
            if fb == gb:
                cyl_words.append(m)
            elif fb.startswith(gb):
                e = fb[len(gb):]
                points.add(UPPoint.of_word(space, m, e))
            elif gb.startswith(fb):
                e = gb[len(fb):]
                points.add(UPPoint.of_word(space, m, e))
    clopen = OpenSet.from_words(space, cyl_words)
    points = frozenset(p for p in points if not clopen.contains(p))
    return FixRegion(clopen, points)


def local_agreement(f: PartialMap, g: PartialMap) -> OpenSet:
    """The largest open set on which f and g agree locally (always clopen)."""
    return agreement_region(f, g).clopen_part
