"""Orbit representations and reduced-norm probing.

For a base point x, the arrows with source x carry the regular
representation of the section algebra by exact scalar matrices: the entry
at (a, b) is the coefficient the section attaches to the arrow a.b^{-1}.
Bases are exact for finite label sets and truncated by composition length
over implicit pseudogroups, with the truncation recorded.  Operator norms
are the only inexact quantity in the package: they are approximated from
the exact matrices by deterministic power iteration on m*m with a stated
relative tolerance.

The summed point-orbit representation (matrices over orbit points rather
than arrows, collapsing isotropy) is also provided; its kernel is the
classical obstruction when a system fails to be topologically free.
"""

from __future__ import annotations

from dataclasses import dataclass

from .germs import Arrow, GermSystem, Label
from .scalars import ZERO, Scalar
from .sections import Section
from .topology import OpenSet, UPPoint, atoms

__all__ = [
    "OrbitBasis",
    "OrbitMatrix",
    "NormProbe",
    "NonConvergenceError",
    "orbit_basis",
    "lambda_matrix",
    "operator_norm",
    "reduced_norm_probe",
    "orbit_points",
    "orbit_sum_matrix",
]


class NonConvergenceError(RuntimeError):
    """Power iteration failed to reach the tolerance within the cap."""


@dataclass(frozen=True)
class OrbitBasis:
    """Pairwise germ-inequivalent arrows with a common source point."""

    point: UPPoint
    arrows: tuple[Arrow, ...]
    truncated: bool
    bound: int | None

    def __len__(self):
        return len(self.arrows)


@dataclass(frozen=True)
class OrbitMatrix:
    basis: OrbitBasis
    entries: tuple[tuple[Scalar, ...], ...]
    truncated: bool

    def conj_transpose(self) -> "OrbitMatrix":
        n = len(self.entries)
        return OrbitMatrix(
            self.basis,
            tuple(tuple(self.entries[j][i].conj() for j in range(n)) for i in range(n)),
            self.truncated,
        )

    def matmul(self, other: "OrbitMatrix") -> "OrbitMatrix":
        n = len(self.entries)
        out = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = ZERO
                for k in range(n):
                    acc = acc + self.entries[i][k] * other.entries[k][j]
                row.append(acc)
            out.append(tuple(row))
        return OrbitMatrix(self.basis, tuple(out), self.truncated)

    def is_zero(self) -> bool:
        return all(e.is_zero() for row in self.entries for e in row)

    def render(self) -> list[list[str]]:
        return [[str(e) for e in row] for row in self.entries]


def orbit_basis(gs: GermSystem, x: UPPoint, bound: int = 2) -> OrbitBasis:
    """All germ classes of arrows with source x, one canonical arrow each."""
    truncated = gs.regime == "B"
    ts = gs.labels(bound if truncated else None)
    reps: list[Label] = []
    for t in ts:
        if not gs.h(t).domain().contains(x):
            continue
        for r in reps:
            if gs.germ_eq(t, r, x):
                break
        else:
            reps.append(t)
    reps.sort(key=gs.label_key)
    arrows = tuple(Arrow(t, x, gs.h(t).apply(x)) for t in reps)
    return OrbitBasis(x, arrows, truncated, bound if truncated else None)


def lambda_matrix(f: Section, x: UPPoint, bound: int = 2) -> OrbitMatrix:
    """The regular-representation matrix of a section at a base point."""
    gs = f.gs
    basis = orbit_basis(gs, x, bound)
    entries = []
    for a in basis.arrows:
        row = []
        for b in basis.arrows:
            # a.b^{-1} has source at the range of b
            label = gs.mul(a.label, gs.star(b.label))
            if gs.h(label).domain().contains(b.target):
                row.append(f.j_eval(Arrow(label, b.target, a.target)))
            else:
                row.append(ZERO)
        entries.append(tuple(row))
    return OrbitMatrix(basis, tuple(entries), basis.truncated)


def operator_norm(m: OrbitMatrix, tol: float = 1e-9, iter_cap: int = 100000) -> float:
    """Spectral norm by power iteration on m*m from the first basis vector.

    Deterministic: fixed start, fixed advance rule when the iterate dies.
    Raises NonConvergenceError when the Rayleigh quotients fail to settle
    to the relative tolerance within the cap.
    """
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    n = len(m.entries)
    if n == 0:
        return 0.0
    a = [[complex(e) for e in row] for row in m.entries]
    # gram = a^H a
    gram = [
        [sum(a[k][i].conjugate() * a[k][j] for k in range(n)) for j in range(n)]
        for i in range(n)
    ]

    def apply(v):
        return [sum(gram[i][j] * v[j] for j in range(n)) for i in range(n)]

    for start in range(n):
        v = [0.0 + 0.0j] * n
        v[start] = 1.0 + 0.0j
        lam_prev = None
        for _ in range(iter_cap):
            w = apply(v)
            norm_w = sum(abs(c) ** 2 for c in w) ** 0.5
            if norm_w == 0.0:
                break  # start vector in the kernel; advance deterministically
            v = [c / norm_w for c in w]
            lam = sum((apply(v)[i] * v[i].conjugate()).real for i in range(n))
            if lam_prev is not None and abs(lam - lam_prev) <= tol * max(lam, 1e-12):
                return max(lam, 0.0) ** 0.5
            lam_prev = lam
        else:
            raise NonConvergenceError(f"no convergence within {iter_cap} iterations")
        continue
    return 0.0


@dataclass(frozen=True)
class NormProbe:
    value: float
    exact: bool
    points: tuple[str, ...]


def reduced_norm_probe(
    f: Section, points: list[UPPoint] | None = None, bound: int = 2, tol: float = 1e-9
) -> NormProbe:
    """

    Largest operator norm of the regular representation over the probed
    points.  With default points the probe is exact for finite label sets:
    the unit space is refined so that the representation matrix is constant
    on every cell, and one sample per cell meets the supremum.  Explicit
    point lists and truncated pseudogroup bases yield lower bounds.
    """
    gs = f.gs
    exact = False
    if points is None:
        if gs.space.is_finite:
            points = [UPPoint.of_index(gs.space, i) for i in range(gs.space.size)]
            exact = gs.regime in ("A", "C")
        elif gs.regime in ("A", "C"):
            points = [a.sample for a in atoms(_probe_opens(f), gs.space)]
            exact = True
        else:
            points = [cell.sample_point() for cell, _, _ in f.normal_form().entries]
            if not points:
                points = [OpenSet.full(gs.space).sample_point()]
    value = 0.0
    for x in points:
        value = max(value, operator_norm(lambda_matrix(f, x, bound), tol))
    return NormProbe(value, exact, tuple(str(p) for p in points))


def _probe_opens(f: Section) -> list[OpenSet]:
    """Opens refining the unit space so the representation matrix is
    constant per cell: label domains, witness sets, and their preimages
    through every label against the slice supports."""
    gs = f.gs
    out: list[OpenSet] = []
    seen = set()

    def push(u: OpenSet):
        if u not in seen:
            seen.add(u)
            out.append(u)

    ts = gs.labels()
    for t in ts:
        push(gs.h(t).domain())
    for i, t in enumerate(ts):
        for u in ts[i + 1 :]:
            push(gs.witness(t, u))
    for u in ts:
        hu = gs.h(u)
        for t in ts:
            label = gs.mul(t, gs.star(u))
            for tt, sup, _ in f.terms:
                push(hu.preimage(sup.intersect(hu.codomain())))
                push(hu.preimage(gs.witness(tt, label).intersect(hu.codomain())))
    return out


def orbit_points(gs: GermSystem, x: UPPoint, bound: int = 2) -> list[UPPoint]:
    """The orbit of x under the labels (truncated by composition length for
    implicit pseudogroups), in deterministic first-reached order."""
    ts = gs.labels(bound if gs.regime == "B" else None)
    out: list[UPPoint] = [x]
    seen = {x}
    for t in ts:
        if gs.h(t).domain().contains(x):
            y = gs.h(t).apply(x)
            if y not in seen:
                seen.add(y)
                out.append(y)
    return out


def orbit_sum_matrix(f: Section, x: UPPoint, bound: int = 2) -> tuple[list[UPPoint], list[list[Scalar]]]:
    """The point-orbit representation matrix of a section at the orbit of x.

    Entry (y, z) sums the coefficients of all germ classes of arrows from z
    to y; isotropy collapses into a single entry, which is what makes this
    representation lossy on systems that are not topologically free.
    """
    gs = f.gs
    pts = orbit_points(gs, x, bound)
    ts = gs.labels(bound if gs.regime == "B" else None)
    matrix: list[list[Scalar]] = []
    for y in pts:
        row = []
        for z in pts:
            reps: list[Label] = []
            for t in ts:
                if gs.h(t).domain().contains(z) and gs.h(t).apply(z) == y:
                    if not any(gs.germ_eq(t, r, z) for r in reps):
                        reps.append(t)
            acc = ZERO
            for r in reps:
                acc = acc + f.j_eval(Arrow(r, z, y))
            row.append(acc)
        matrix.append(row)
    return pts, matrix
