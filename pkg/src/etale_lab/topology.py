"""Exact topology of the two space backends.

A space is either a finite discrete set {0..n-1} or the Cantor space of
infinite words over a finite alphabet.  Open sets of the Cantor backend are
the *regular cylinder opens*: unions of cylinders [w] indexed by a regular
language.  Every open set is stored as a canonical complete DFA, so set
equality is syntactic, and closure, interior and meagreness questions are
decided by automaton constructions.  Points are the ultimately periodic
words u.v^w, which are dense and have decidable membership.

Constructible sets are finite unions of differences of opens (plus, in the
finite backend, plain subsets).  On constructible sets the predicates
"meagre", "nowhere dense" and "has empty interior" provably coincide; the
three are implemented along genuinely different routes and the test suite
asserts their agreement.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator

__all__ = [
    "Space",
    "UPPoint",
    "OpenSet",
    "ConstructibleSet",
    "Atom",
    "atoms",
    "set_algebra",
    "closure",
    "interior",
    "has_empty_interior",
    "is_nowhere_dense",
    "is_meagre",
    "contains_point",
    "sample_point",
    "RegexSyntaxError",
]


class RegexSyntaxError(ValueError):
    """Raised for malformed anchored regular expressions."""


def _require_same_space(a, b) -> None:
    if a.space != b.space:
        raise ValueError(f"mixed-space operands: {a.space} vs {b.space}")


@dataclass(frozen=True)
class Space:
    """A finite discrete set or the Cantor space over a finite alphabet."""

    kind: str  # "finite" | "cantor"
    size: int = 0
    alphabet: tuple[str, ...] = ()

    @staticmethod
    def finite(n: int) -> "Space":
        if n < 1:
            raise ValueError("finite space needs at least one point")
        return Space("finite", size=n)

    @staticmethod
    def cantor(alphabet: Iterable[str]) -> "Space":
        syms = tuple(alphabet)
        if len(syms) < 2:
            raise ValueError("Cantor alphabet needs at least two symbols")
        if len(set(syms)) != len(syms) or any(len(s) != 1 for s in syms):
            raise ValueError("alphabet symbols must be distinct single characters")
        return Space("cantor", alphabet=syms)

    @property
    def is_finite(self) -> bool:
        return self.kind == "finite"

    def sym_index(self, c: str) -> int:
        try:
            return self.alphabet.index(c)
        except ValueError:
            raise ValueError(f"symbol {c!r} not in alphabet {''.join(self.alphabet)}")

    def check_word(self, w: str) -> None:
        for c in w:
            self.sym_index(c)

    def __repr__(self):
        if self.is_finite:
            return f"Space.finite({self.size})"
        return f"Space.cantor({''.join(self.alphabet)!r})"


# ---------------------------------------------------------------------------
# Canonical DFAs for regular cylinder opens.
#
# Invariants of a canonical automaton:
#   * complete, initial state 0, all states reachable;
#   * accepting states are absorbing (the language is closed under extension);
#   * the language is maximal: w is accepted iff the cylinder [w] lies in
#     the open set (every infinite run from an accepting-free state that can
#     only accept is already accepting);
#   * minimized and breadth-first renumbered, so equal opens have equal DFAs.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Dfa:
    delta: tuple[tuple[int, ...], ...]  # delta[state][symbol] -> state
    accepting: frozenset[int]

    @property
    def n(self) -> int:
        return len(self.delta)

    def run(self, word: str, space: Space, start: int = 0) -> int:
        q = start
        for c in word:
            q = self.delta[q][space.sym_index(c)]
        return q


def _dfa_empty(k: int) -> Dfa:
    return Dfa(((tuple(0 for _ in range(k)),)), frozenset())


def _dfa_full(k: int) -> Dfa:
    return Dfa(((tuple(0 for _ in range(k)),)), frozenset([0]))


def _saturate(d: Dfa) -> Dfa:
    """Make accepting states absorbing: the language becomes its upward closure."""
    k = len(d.delta[0])
    delta = tuple(
        tuple(i for _ in range(k)) if i in d.accepting else d.delta[i]
        for i in range(d.n)
    )
    return Dfa(delta, d.accepting)


def _maximalize(d: Dfa) -> Dfa:
    """Accept every w with [w] inside the open set.

    Requires accepting states absorbing.  A state is *bad* if some infinite
    run from it avoids acceptance forever; the new accepting set is the
    complement of the bad states.
    """
    k = len(d.delta[0])
    bad = set(range(d.n)) - d.accepting
    changed = True
    while changed:
        changed = False
        for q in list(bad):
            if not any(d.delta[q][a] in bad for a in range(k)):
                bad.discard(q)
                changed = True
    return Dfa(d.delta, frozenset(set(range(d.n)) - bad))


def _minimize(d: Dfa) -> Dfa:
    """Moore partition refinement plus BFS renumbering from the initial state."""
    k = len(d.delta[0])
    reach = [0]
    seen = {0}
    for q in reach:
        for a in range(k):
            t = d.delta[q][a]
            if t not in seen:
                seen.add(t)
                reach.append(t)
    # partition refinement on reachable states
    block = {q: (q in d.accepting) for q in reach}
    while True:
        sig = {q: (block[q],) + tuple(block[d.delta[q][a]] for a in range(k)) for q in reach}
        relabel: dict = {}
        for q in reach:
            relabel.setdefault(sig[q], len(relabel))
        new_block = {q: relabel[sig[q]] for q in reach}
        if new_block == block:
            break
        block = new_block
    # BFS renumber blocks from the initial block
    order: dict[int, int] = {block[0]: 0}
    queue = [0]
    rep = {block[0]: 0}
    for q in queue:
        for a in range(k):
            t = d.delta[q][a]
            if block[t] not in order:
                order[block[t]] = len(order)
                rep[block[t]] = t
                queue.append(t)
    delta = []
    accepting = set()
    for b, idx in sorted(order.items(), key=lambda kv: kv[1]):
        q = rep[b]
        delta.append(tuple(order[block[d.delta[q][a]]] for a in range(k)))
        if q in d.accepting:
            accepting.add(idx)
    return Dfa(tuple(delta), frozenset(accepting))


def _canonADfa(d: Dfa) -> Dfa:
    return _minimize(_maximalize(_saturate(d)))


@lru_cache(maxsize=None)
def _product(d1: Dfa, d2: Dfa, mode: str) -> Dfa:
    """Reachable product automaton; mode is 'union' or 'intersect'."""
    k = len(d1.delta[0])
    index = {(0, 0): 0}
    queue = [(0, 0)]
    delta: list[tuple[int, ...]] = []
    accepting = set()
    for q1, q2 in queue:
        row = []
        for a in range(k):
            t = (d1.delta[q1][a], d2.delta[q2][a])
            if t not in index:
                index[t] = len(index)
                queue.append(t)
            row.append(index[t])
        delta.append(tuple(row))
        acc1, acc2 = q1 in d1.accepting, q2 in d2.accepting
        if (acc1 or acc2) if mode == "union" else (acc1 and acc2):
            accepting.add(index[(q1, q2)])
    return _minimize(_maximalize(Dfa(tuple(delta), frozenset(accepting))))


@lru_cache(maxsize=None)
def _subset(d1: Dfa, d2: Dfa) -> bool:
    """Containment of the open sets (canonical automata assumed)."""
    k = len(d1.delta[0])
    seen = {(0, 0)}
    queue = [(0, 0)]
    for q1, q2 in queue:
        if q1 in d1.accepting and q2 not in d2.accepting:
            return False
        if q2 in d2.accepting:
            continue  # inside d2 for good; nothing to check further
        for a in range(k):
            t = (d1.delta[q1][a], d2.delta[q2][a])
            if t not in seen:
                seen.add(t)
                queue.append(t)
    return True


@lru_cache(maxsize=None)
def _avoiding_interior(d: Dfa) -> Dfa:
    """Automaton of the largest open set disjoint from the given open set.

    This is the interior of the closed complement: accept w iff acceptance
    is unreachable from the state reached by w.
    """
    k = len(d.delta[0])
    can_accept = set(d.accepting)
    changed = True
    while changed:
        changed = False
        for q in range(d.n):
            if q not in can_accept and any(d.delta[q][a] in can_accept for a in range(k)):
                can_accept.add(q)
                changed = True
    return _minimize(Dfa(d.delta, frozenset(set(range(d.n)) - can_accept)))


@lru_cache(maxsize=None)
def _reroot(d: Dfa, q: int) -> Dfa:
    """The open set of the residual language from state q (canonicalised)."""
    if q == 0:
        return _minimize(d)
    perm = list(range(d.n))
    perm[0], perm[q] = q, 0
    inv = {p: i for i, p in enumerate(perm)}
    delta = tuple(
        tuple(inv[d.delta[perm[i]][a]] for a in range(len(d.delta[0])))
        for i in range(d.n)
    )
    accepting = frozenset(inv[p] for p in d.accepting)
    return _minimize(_maximalize(Dfa(delta, accepting)))


def _dfa_from_words(space: Space, words: Iterable[str]) -> Dfa:
    """DFA for the union of cylinders over the listed finite words."""
    k = len(space.alphabet)
    trie: dict[int, dict[int, int]] = {0: {}}
    accept = set()
    for w in words:
        space.check_word(w)
        q = 0
        for c in w:
            a = space.sym_index(c)
            if a not in trie[q]:
                nxt = len(trie)
                trie[q][a] = nxt
                trie[nxt] = {}
            q = trie[q][a]
        accept.add(q)
    dead = len(trie)
    delta = []
    for q in range(len(trie)):
        delta.append(tuple(trie[q].get(a, dead) for a in range(k)))
    delta.append(tuple(dead for _ in range(k)))
    return _canonADfa(Dfa(tuple(delta), frozenset(accept)))


# --- anchored regular expressions (scenario syntax) ------------------------


def _regex_to_dfa(space: Space, pattern: str) -> Dfa:
    """Compile an anchored regex (symbols, concatenation, |, *, parentheses,
    ε, ∅) to the canonical automaton of the open set it generates."""
    tokens = [c for c in pattern if not c.isspace()]
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else None

    # Thompson construction; NFA states are ints, transitions (q, a|None, r).
    trans: list[tuple[int, int | None, int]] = []
    counter = [0]

    def new_state() -> int:
        counter[0] += 1
        return counter[0] - 1

    def parse_alt() -> tuple[int, int]:
        nonlocal pos
        frags = [parse_concat()]
        while peek() == "|":
            pos += 1
            frags.append(parse_concat())
        if len(frags) == 1:
            return frags[0]
        s, e = new_state(), new_state()
        for fs, fe in frags:
            trans.append((s, None, fs))
            trans.append((fe, None, e))
        return s, e

    def parse_concat() -> tuple[int, int]:
        nonlocal pos
        frags = []
        while peek() is not None and peek() not in "|)":
            frags.append(parse_repeat())
        if not frags:
            s = new_state()
            return s, s  # empty concatenation = ε
        s, e = frags[0]
        for fs, fe in frags[1:]:
            trans.append((e, None, fs))
            e = fe
        return s, e

    def parse_repeat() -> tuple[int, int]:
        nonlocal pos
        s, e = parse_atom()
        while peek() == "*":
            pos += 1
            s2, e2 = new_state(), new_state()
            trans.append((s2, None, s))
            trans.append((s2, None, e2))
            trans.append((e, None, s))
            trans.append((e, None, e2))
            s, e = s2, e2
        return s, e

    def parse_atom() -> tuple[int, int]:
        nonlocal pos
        c = peek()
        if c is None:
            raise RegexSyntaxError(f"unexpected end of pattern: {pattern!r}")
        if c == "(":
            pos += 1
            frag = parse_alt()
            if peek() != ")":
                raise RegexSyntaxError(f"unbalanced parenthesis in {pattern!r}")
            pos += 1
            return frag
        if c == "*":
            raise RegexSyntaxError(f"dangling '*' in {pattern!r}")
        pos += 1
        if c in ("ε", "e") and c == "ε":
            s = new_state()
            return s, s
        if c == "∅":
            s, e = new_state(), new_state()
            return s, e  # no path: matches nothing
        a = space.sym_index(c)
        s, e = new_state(), new_state()
        trans.append((s, a, e))
        return s, e

    start, end = parse_alt()
    if pos != len(tokens):
        raise RegexSyntaxError(f"trailing characters in {pattern!r}")

    # subset construction
    k = len(space.alphabet)
    eps: dict[int, set[int]] = {}
    sym: dict[tuple[int, int], set[int]] = {}
    for q, a, r in trans:
        if a is None:
            eps.setdefault(q, set()).add(r)
        else:
            sym.setdefault((q, a), set()).add(r)

    def closure_of(states: frozenset[int]) -> frozenset[int]:
        todo = list(states)
        out = set(states)
        while todo:
            q = todo.pop()
            for r in eps.get(q, ()):
                if r not in out:
                    out.add(r)
                    todo.append(r)
        return frozenset(out)

    init = closure_of(frozenset([start]))
    index = {init: 0}
    queue = [init]
    delta: list[tuple[int, ...]] = []
    accepting = set()
    for st in queue:
        row = []
        for a in range(k):
            nxt = closure_of(frozenset(r for q in st for r in sym.get((q, a), ())))
            if nxt not in index:
                index[nxt] = len(index)
                queue.append(nxt)
            row.append(index[nxt])
        delta.append(tuple(row))
        if end in st:
            accepting.add(index[st])
    return _canonADfa(Dfa(tuple(delta), frozenset(accepting)))


# ---------------------------------------------------------------------------
# Ultimately periodic points
# ---------------------------------------------------------------------------


def _primitive(v: str) -> str:
    n = len(v)
    for d in range(1, n + 1):
        if n % d == 0 and v == v[:d] * (n // d):
            return v[:d]
    return v


@dataclass(frozen=True)
class UPPoint:
    """A point of the space: an index (finite) or u.v^w in canonical form."""

    space: Space
    index: int = -1
    prefix: str = ""
    period: str = ""

    @staticmethod
    def of_index(space: Space, i: int) -> "UPPoint":
        if not space.is_finite:
            raise ValueError("index points live in finite spaces")
        if not 0 <= i < space.size:
            raise ValueError(f"point {i} outside space of size {space.size}")
        return UPPoint(space, index=i)

    @staticmethod
    def of_word(space: Space, prefix: str, period: str) -> "UPPoint":
        if space.is_finite:
            raise ValueError("word points live in Cantor spaces")
        if not period:
            raise ValueError("period must be nonempty")
        space.check_word(prefix)
        space.check_word(period)
        period = _primitive(period)
        while prefix and prefix[-1] == period[-1]:
            prefix = prefix[:-1]
            period = period[-1] + period[:-1]
        return UPPoint(space, prefix=prefix, period=period)

    @staticmethod
    def parse(space: Space, text: str) -> "UPPoint":
        """Parse "u(v)" meaning u.v^w, or an index in the finite backend."""
        text = text.strip()
        if space.is_finite:
            return UPPoint.of_index(space, int(text))
        if "(" not in text or not text.endswith(")"):
            raise ValueError(f"point syntax is 'u(v)': {text!r}")
        u, v = text[:-1].split("(", 1)
        return UPPoint.of_word(space, u, v)

    def letter(self, i: int) -> str:
        if i < len(self.prefix):
            return self.prefix[i]
        return self.period[(i - len(self.prefix)) % len(self.period)]

    def head(self, n: int) -> str:
        return "".join(self.letter(i) for i in range(n))

    def drop(self, n: int) -> "UPPoint":
        """The point with the first n letters removed."""
        if n <= len(self.prefix):
            return UPPoint.of_word(self.space, self.prefix[n:], self.period)
        r = (n - len(self.prefix)) % len(self.period)
        return UPPoint.of_word(self.space, "", self.period[r:] + self.period[:r])

    def prepend(self, w: str) -> "UPPoint":
        return UPPoint.of_word(self.space, w + self.prefix, self.period)

    def __str__(self):
        if self.space.is_finite:
            return str(self.index)
        return f"{self.prefix}({self.period})"


# ---------------------------------------------------------------------------
# Open sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OpenSet:
    """An open set: a subset (finite backend) or a canonical automaton."""

    space: Space
    points: frozenset[int] | None = None
    dfa: Dfa | None = None

    # --- constructors ---

    @staticmethod
    def empty(space: Space) -> "OpenSet":
        if space.is_finite:
            return OpenSet(space, points=frozenset())
        return OpenSet(space, dfa=_dfa_empty(len(space.alphabet)))

    @staticmethod
    def full(space: Space) -> "OpenSet":
        if space.is_finite:
            return OpenSet(space, points=frozenset(range(space.size)))
        return OpenSet(space, dfa=_dfa_full(len(space.alphabet)))

    @staticmethod
    def of_points(space: Space, pts: Iterable[int]) -> "OpenSet":
        pts = frozenset(pts)
        if not all(0 <= p < space.size for p in pts):
            raise ValueError("point outside finite space")
        return OpenSet(space, points=pts)

    @staticmethod
    def cylinder(space: Space, word: str) -> "OpenSet":
        return OpenSet(space, dfa=_dfa_from_words(space, [word]))

    @staticmethod
    def from_words(space: Space, words: Iterable[str]) -> "OpenSet":
        return OpenSet(space, dfa=_dfa_from_words(space, words))

    @staticmethod
    def from_regex(space: Space, pattern: str) -> "OpenSet":
        return OpenSet(space, dfa=_regex_to_dfa(space, pattern))

    # --- boolean structure ---

    def union(self, other: "OpenSet") -> "OpenSet":
        _require_same_space(self, other)
        if self.space.is_finite:
            return OpenSet(self.space, points=self.points | other.points)
        return OpenSet(self.space, dfa=_product(self.dfa, other.dfa, "union"))

    def intersect(self, other: "OpenSet") -> "OpenSet":
        _require_same_space(self, other)
        if self.space.is_finite:
            return OpenSet(self.space, points=self.points & other.points)
        return OpenSet(self.space, dfa=_product(self.dfa, other.dfa, "intersect"))

    def minus(self, other: "OpenSet") -> "ConstructibleSet":
        _require_same_space(self, other)
        if self.space.is_finite:
            return ConstructibleSet(self.space, points=self.points - other.points)
        return ConstructibleSet(self.space, pieces=((self, other),)).normalized()

    def is_subset(self, other: "OpenSet") -> bool:
        _require_same_space(self, other)
        if self.space.is_finite:
            return self.points <= other.points
        return _subset(self.dfa, other.dfa)

    def is_empty(self) -> bool:
        if self.space.is_finite:
            return not self.points
        return not self.dfa.accepting

    def is_full(self) -> bool:
        if self.space.is_finite:
            return len(self.points) == self.space.size
        return 0 in self.dfa.accepting

    def complement_interior(self) -> "OpenSet":
        """The largest open set disjoint from this one."""
        if self.space.is_finite:
            return OpenSet(self.space, points=frozenset(range(self.space.size)) - self.points)
        return OpenSet(self.space, dfa=_avoiding_interior(self.dfa))

    def closure(self) -> "ConstructibleSet":
        return ConstructibleSet.co_open(self.complement_interior())

    def is_clopen(self) -> bool:
        if self.space.is_finite:
            return True
        return self.union(self.complement_interior()).is_full()

    def cylinders(self) -> list[str]:
        """Decompose a clopen set into a prefix-free list of cylinder words."""
        if self.space.is_finite:
            raise ValueError("cylinder decomposition is a Cantor-backend notion")
        if not self.is_clopen():
            raise ValueError("cylinder decomposition needs a clopen set")
        d = self.dfa
        k = len(self.space.alphabet)
        dead = _avoiding_interior(d)
        out: list[str] = []

        def walk(q: int, w: str, depth: int) -> None:
            if q in d.accepting:
                out.append(w)
                return
            if dead.run(w, self.space) in dead.accepting:
                return
            if depth > d.n + 1:
                raise AssertionError("clopen decomposition failed to terminate")
            for a in range(k):
                walk(d.delta[q][a], w + self.space.alphabet[a], depth + 1)

        walk(0, "", 0)
        return out

    # --- points ---

    def contains(self, x: UPPoint) -> bool:
        if x.space != self.space:
            raise ValueError("point from a different space")
        if self.space.is_finite:
            return x.index in self.points
        d = self.dfa
        q = d.run(x.prefix, self.space)
        if q in d.accepting:
            return True
        seen = set()
        while (q, 0) not in seen:
            seen.add((q, 0))
            for c in x.period:
                q = d.delta[q][self.space.sym_index(c)]
                if q in d.accepting:
                    return True
        return False

    def sample_point(self) -> UPPoint:
        if self.is_empty():
            raise ValueError("cannot sample a point from the empty set")
        if self.space.is_finite:
            return UPPoint.of_index(self.space, min(self.points))
        return _sample_piece(self.space, self.dfa, _dfa_empty(len(self.space.alphabet)))

    def as_constructible(self) -> "ConstructibleSet":
        if self.space.is_finite:
            return ConstructibleSet(self.space, points=self.points)
        return ConstructibleSet(self.space, pieces=((self, OpenSet.empty(self.space)),))

    # --- operators ---

    def __or__(self, other):
        return self.union(other)

    def __and__(self, other):
        return self.intersect(other)

    def __sub__(self, other):
        return self.minus(other)

    def __le__(self, other):
        return self.is_subset(other)

    def __contains__(self, x: UPPoint):
        return self.contains(x)

    def __repr__(self):
        if self.space.is_finite:
            return f"OpenSet({sorted(self.points)})"
        if self.is_empty():
            return "OpenSet(∅)"
        if self.is_full():
            return "OpenSet(X)"
        return f"OpenSet(dfa[{self.dfa.n}])"


def _sample_piece(space: Space, du: Dfa, dv: Dfa) -> UPPoint:
    """A deterministic ultimately periodic point of U \\ V (assumed nonempty).

    First walk the lexicographic greedy path through prefixes that still meet
    U \\ V; its limit is the lexicographically least point of the closure of
    the piece, ultimately periodic because the walk only depends on the
    current product state.  If that point lies in the piece it is the least
    point of the piece; otherwise fall back to the shortest-lex entry word
    into U avoiding V, continued by the least V-avoiding tail.
    """
    k = len(space.alphabet)

    @lru_cache(maxsize=None)
    def piece_nonempty(q1: int, q2: int) -> bool:
        return not _subset(_reroot(du, q1), _reroot(dv, q2))

    # greedy lexicographic walk
    path: list[int] = []
    state = (0, 0)
    seen: dict[tuple[int, int], int] = {state: 0}
    while True:
        q1, q2 = state
        for a in range(k):
            t = (du.delta[q1][a], dv.delta[q2][a])
            if piece_nonempty(*t):
                path.append(a)
                state = t
                break
        else:  # pragma: no cover - piece was nonempty by precondition
            raise AssertionError("greedy walk escaped a nonempty piece")
        if state in seen:
            cut = seen[state]
            u = "".join(space.alphabet[a] for a in path[:cut])
            v = "".join(space.alphabet[a] for a in path[cut:])
            x = UPPoint.of_word(space, u, v)
            break
        seen[state] = len(path)

    if OpenSet(space, dfa=du).contains(x) and not OpenSet(space, dfa=dv).contains(x):
        return x

    # fallback: shortest-lex word entering U while avoiding V, then the
    # least V-avoiding infinite tail
    bad_v = set(range(dv.n)) - _maximalize(dv).accepting
    # bad_v: states of V from which some infinite run avoids acceptance forever
    best: dict[tuple[int, int], str] = {(0, 0): ""}
    queue = [(0, 0)]
    target = None
    for st in queue:
        q1, q2 = st
        if q1 in du.accepting and q2 in bad_v:
            target = st
            break
        for a in range(k):
            t = (du.delta[q1][a], dv.delta[q2][a])
            if t[1] in dv.accepting:
                continue
            if t not in best:
                best[t] = best[st] + space.alphabet[a]
                queue.append(t)
    if target is None:
        raise AssertionError("sample requested from an empty piece")
    w = best[target]
    q = target[1]
    tail: list[str] = []
    seen_q: dict[int, int] = {q: 0}
    while True:
        for a in range(k):
            if dv.delta[q][a] in bad_v:
                tail.append(space.alphabet[a])
                q = dv.delta[q][a]
                break
        else:  # pragma: no cover - bad states always have a bad successor
            raise AssertionError("V-avoiding tail walk escaped")
        if q in seen_q:
            cut = seen_q[q]
            return UPPoint.of_word(space, w + "".join(tail[:cut]), "".join(tail[cut:]))
        seen_q[q] = len(tail)


# ---------------------------------------------------------------------------
# Constructible sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConstructibleSet:
    """A finite union of pieces U \\ V with U, V regular opens.

    The finite backend stores a plain subset instead.  The class is closed
    under union, intersection, difference and complement.
    """

    space: Space
    pieces: tuple[tuple[OpenSet, OpenSet], ...] = ()
    points: frozenset[int] | None = None

    @staticmethod
    def empty(space: Space) -> "ConstructibleSet":
        if space.is_finite:
            return ConstructibleSet(space, points=frozenset())
        return ConstructibleSet(space, pieces=())

    @staticmethod
    def full(space: Space) -> "ConstructibleSet":
        return OpenSet.full(space).as_constructible()

    @staticmethod
    def co_open(u: OpenSet) -> "ConstructibleSet":
        """The closed complement of an open set."""
        if u.space.is_finite:
            return ConstructibleSet(u.space, points=frozenset(range(u.space.size)) - u.points)
        return ConstructibleSet(u.space, pieces=((OpenSet.full(u.space), u),)).normalized()

    @staticmethod
    def from_point(x: UPPoint) -> "ConstructibleSet":
        if x.space.is_finite:
            return ConstructibleSet(x.space, points=frozenset([x.index]))
        # {x} is closed: the full space minus the open set of words that
        # deviate from x at some position.
        space = x.space
        v = _point_complement_dfa(space, x)
        return ConstructibleSet(
            space, pieces=((OpenSet.full(space), OpenSet(space, dfa=v)),)
        ).normalized()

    def normalized(self) -> "ConstructibleSet":
        if self.space.is_finite:
            return self
        keep = tuple((u, v) for u, v in self.pieces if not u.is_subset(v))
        return ConstructibleSet(self.space, pieces=keep)

    # --- boolean structure ---

    def union(self, other) -> "ConstructibleSet":
        other = _as_constructible(other)
        _require_same_space(self, other)
        if self.space.is_finite:
            return ConstructibleSet(self.space, points=self.points | other.points)
        return ConstructibleSet(self.space, pieces=self.pieces + other.pieces).normalized()

    def intersect(self, other) -> "ConstructibleSet":
        other = _as_constructible(other)
        _require_same_space(self, other)
        if self.space.is_finite:
            return ConstructibleSet(self.space, points=self.points & other.points)
        pieces = []
        for u1, v1 in self.pieces:
            for u2, v2 in other.pieces:
                pieces.append((u1.intersect(u2), v1.union(v2)))
        return ConstructibleSet(self.space, pieces=tuple(pieces)).normalized()

    def minus(self, other) -> "ConstructibleSet":
        other = _as_constructible(other)
        _require_same_space(self, other)
        if self.space.is_finite:
            return ConstructibleSet(self.space, points=self.points - other.points)
        return self.intersect(other.complement())

    def complement(self) -> "ConstructibleSet":
        if self.space.is_finite:
            return ConstructibleSet(
                self.space, points=frozenset(range(self.space.size)) - self.points
            )
        out = ConstructibleSet.full(self.space)
        for u, v in self.pieces:
            # complement of U \ V is (X \ U) union V
            co_piece = ConstructibleSet(
                self.space,
                pieces=((OpenSet.full(self.space), u), (v, OpenSet.empty(self.space))),
            )
            out = out.intersect(co_piece)
        return out.normalized()

    def is_empty(self) -> bool:
        if self.space.is_finite:
            return not self.points
        return all(u.is_subset(v) for u, v in self.pieces)

    def equals(self, other) -> bool:
        other = _as_constructible(other)
        return self.minus(other).is_empty() and other.minus(self).is_empty()

    # --- topology ---

    def closure(self) -> "ConstructibleSet":
        """Closure; distributes over the finite union of pieces."""
        if self.space.is_finite:
            return self
        out = ConstructibleSet.empty(self.space)
        for u, v in self.pieces:
            w = _piece_closure_complement(self.space, u, v)
            out = out.union(ConstructibleSet.co_open(w))
        return out

    def interior(self) -> OpenSet:
        if self.space.is_finite:
            return OpenSet(self.space, points=self.points)
        if not self.pieces:
            return OpenSet.empty(self.space)
        if len(self.pieces) == 1:
            u, v = self.pieces[0]
            return u.intersect(v.complement_interior())
        return _joint_interior(self.space, self.pieces)

    def has_empty_interior(self) -> bool:
        return self.interior().is_empty()

    def is_nowhere_dense(self) -> bool:
        return self.closure().interior().is_empty()

    def is_clopen(self) -> bool:
        if self.space.is_finite:
            return True
        return (
            self.minus(self.interior().as_constructible()).is_empty()
            and self.closure().minus(self).is_empty()
        )

    def is_meagre(self) -> bool:
        if self.space.is_finite:
            return not self.points
        return all(
            _piece_closure_complement(self.space, u, v)
            .complement_interior()
            .is_empty()
            for u, v in self.normalized().pieces
        )

    # --- points ---

    def contains(self, x: UPPoint) -> bool:
        if self.space.is_finite:
            return x.index in self.points
        return any(u.contains(x) and not v.contains(x) for u, v in self.pieces)

    def sample_point(self) -> UPPoint:
        if self.space.is_finite:
            if not self.points:
                raise ValueError("cannot sample a point from the empty set")
            return UPPoint.of_index(self.space, min(self.points))
        for u, v in self.pieces:
            if not u.is_subset(v):
                return _sample_piece(self.space, u.dfa, v.dfa)
        raise ValueError("cannot sample a point from the empty set")

    def __or__(self, other):
        return self.union(other)

    def __and__(self, other):
        return self.intersect(other)

    def __sub__(self, other):
        return self.minus(other)

    def __contains__(self, x: UPPoint):
        return self.contains(x)

    def __repr__(self):
        if self.space.is_finite:
            return f"ConstructibleSet({sorted(self.points)})"
        return f"ConstructibleSet({len(self.pieces)} pieces)"


def _as_constructible(s) -> ConstructibleSet:
    return s.as_constructible() if isinstance(s, OpenSet) else s


@lru_cache(maxsize=None)
def _piece_closure_complement(space: Space, u: OpenSet, v: OpenSet) -> OpenSet:
    """Open complement of the closure of U \\ V.

    A point lies in the closure iff every cylinder around it meets the
    piece, so the complement collects the prefixes whose cylinder misses it.
    """
    du, dv = u.dfa, v.dfa
    k = len(space.alphabet)
    index = {(0, 0): 0}
    queue = [(0, 0)]
    delta = []
    accepting = set()
    for q1, q2 in queue:
        row = []
        for a in range(k):
            t = (du.delta[q1][a], dv.delta[q2][a])
            if t not in index:
                index[t] = len(index)
                queue.append(t)
            row.append(index[t])
        delta.append(tuple(row))
        if _subset(_reroot(du, q1), _reroot(dv, q2)):
            accepting.add(index[(q1, q2)])
    return OpenSet(space, dfa=_minimize(Dfa(tuple(delta), frozenset(accepting))))


def _joint_interior(space: Space, pieces: tuple[tuple[OpenSet, OpenSet], ...]) -> OpenSet:
    """Interior of a union of pieces via the joint product automaton."""
    comps: list[Dfa] = []
    for u, v in pieces:
        comps.append(u.dfa)
        comps.append(v.dfa)
    k = len(space.alphabet)
    index: dict[tuple[int, ...], int] = {tuple(0 for _ in comps): 0}
    queue = [tuple(0 for _ in comps)]
    delta = []
    accepting = set()

    @lru_cache(maxsize=None)
    def residual_full(state: tuple[int, ...]) -> bool:
        rest = ConstructibleSet.full(space)
        for i in range(0, len(state), 2):
            u_res = _reroot(comps[i], state[i])
            v_res = _reroot(comps[i + 1], state[i + 1])
            co_piece = ConstructibleSet(
                space,
                pieces=(
                    (OpenSet.full(space), OpenSet(space, dfa=u_res)),
                    (OpenSet(space, dfa=v_res), OpenSet.empty(space)),
                ),
            )
            rest = rest.intersect(co_piece)
            if rest.is_empty():
                return True
        return rest.is_empty()

    for st in queue:
        row = []
        for a in range(k):
            t = tuple(comps[i].delta[st[i]][a] for i in range(len(comps)))
            if t not in index:
                index[t] = len(index)
                queue.append(t)
            row.append(index[t])
        delta.append(tuple(row))
        if residual_full(st):
            accepting.add(index[st])
    return OpenSet(space, dfa=_minimize(Dfa(tuple(delta), frozenset(accepting))))


def _point_complement_dfa(space: Space, x: UPPoint) -> Dfa:
    """Open set of words that deviate from x somewhere (the complement of {x})."""
    k = len(space.alphabet)
    m, p = len(x.prefix), len(x.period)
    # states 0..m+p-1 track position along x; state m+p = accepted (deviated)
    nstates = m + p + 1
    acc = nstates - 1
    delta = []
    for i in range(m + p):
        row = []
        expected = x.letter(i)
        nxt = i + 1
        if nxt >= m + p:
            nxt = m  # wrap to the period
        for a in range(k):
            row.append(nxt if space.alphabet[a] == expected else acc)
        delta.append(tuple(row))
    delta.append(tuple(acc for _ in range(k)))
    return _canonADfa(Dfa(tuple(delta), frozenset([acc])))


# ---------------------------------------------------------------------------
# Module-level operations
# ---------------------------------------------------------------------------


def set_algebra(a, b, op: str):
    """union / intersect / minus on open or constructible sets.

    Unions and intersections of opens stay open; every other combination is
    returned as a constructible set.
    """
    _require_same_space(a, b)
    if op == "union":
        if isinstance(a, OpenSet) and isinstance(b, OpenSet):
            return a.union(b)
        return _as_constructible(a).union(b)
    if op == "intersect":
        if isinstance(a, OpenSet) and isinstance(b, OpenSet):
            return a.intersect(b)
        return _as_constructible(a).intersect(b)
    if op == "minus":
        if a.space.is_finite and isinstance(a, OpenSet) and isinstance(b, OpenSet):
            return OpenSet(a.space, points=a.points - b.points)
        return _as_constructible(a).minus(b)
    raise ValueError(f"unknown set operation {op!r}")


def closure(s) -> ConstructibleSet:
    return _as_constructible(s).closure()


def interior(s) -> OpenSet:
    if isinstance(s, OpenSet):
        return s
    return s.interior()


def has_empty_interior(s) -> bool:
    return _as_constructible(s).has_empty_interior()


def is_nowhere_dense(s) -> bool:
    return _as_constructible(s).is_nowhere_dense()


def is_meagre(s) -> bool:
    return _as_constructible(s).is_meagre()


def contains_point(s, x: UPPoint) -> bool:
    return s.contains(x)


def sample_point(s) -> UPPoint:
    return s.sample_point()


@dataclass(frozen=True)
class Atom:
    """A cell of the boolean algebra generated by a list of opens."""

    pattern: tuple[bool, ...]
    cell: ConstructibleSet
    sample: UPPoint


def atoms(opens: list[OpenSet], space: Space | None = None) -> list[Atom]:
    """Nonempty cells of the boolean algebra generated by the inputs.

    Cells are pairwise disjoint, cover the space, and each carries its
    membership pattern and a deterministic sample point.  Every nonempty
    cell of regular opens contains an ultimately periodic point; sampling
    asserts this.  With an empty input list the single cell is the whole
    space, which must then be passed explicitly.
    """
    if not opens:
        if space is None:
            raise ValueError("atoms([]) needs the ambient space")
        cell = ConstructibleSet.full(space)
        return [Atom((), cell, cell.sample_point())]
    space = opens[0].space
    for u in opens:
        _require_same_space(opens[0], u)
    cells: list[tuple[tuple[bool, ...], ConstructibleSet]] = [
        ((), ConstructibleSet.full(space))
    ]
    for u in opens:
        nxt = []
        for pattern, cell in cells:
            inside = cell.intersect(u)
            outside = cell.minus(u)
            if not inside.is_empty():
                nxt.append((pattern + (True,), inside))
            if not outside.is_empty():
                nxt.append((pattern + (False,), outside))
        cells = nxt
    return [Atom(pattern, cell, cell.sample_point()) for pattern, cell in cells]
