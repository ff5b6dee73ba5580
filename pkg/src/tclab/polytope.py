"""Delzant polytopes as facet systems <x, mu_m> >= lambda_m.

Vertices, Delzant test, exact moment integrals over a face-recursive
triangulation, and the toric Futaki vector (reported without the (2 pi)^n
factor).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from .exactalg import MPoly, mat_det, mat_solve, q_str, rank_q, to_q


class PolytopeError(ValueError):
    pass


@dataclass(frozen=True)
class Facet:
    mu: tuple
    lam: Fraction

    def value(self, x) -> Fraction:
        """l(x) = <x, mu> - lambda."""
        return sum((m * xi for m, xi in zip(self.mu, x)), Fraction(0)) - self.lam


@dataclass(frozen=True)
class Polytope:
    n: int
    facets: tuple
    name: str = field(default="", compare=False)

    def __post_init__(self):
        for f in self.facets:
            if len(f.mu) != self.n:
                raise PolytopeError("facet normal has wrong length")
            if math.gcd(*f.mu) != 1:
                raise PolytopeError(f"facet normal {f.mu} is not primitive")

    @classmethod
    def from_facets(cls, n, facets, name=""):
        fs = tuple(Facet(tuple(int(m) for m in mu), to_q(lam)) for mu, lam in facets)
        return cls(n, fs, name)

    @classmethod
    def from_json(cls, data: dict) -> "Polytope":
        return cls.from_facets(
            int(data["n"]), [(f["mu"], f["lambda"]) for f in data["facets"]], data.get("name", "")
        )

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "facets": [{"mu": list(f.mu), "lambda": q_str(f.lam)} for f in self.facets],
        }

    def l_values(self, x) -> list[Fraction]:
        return [f.value(x) for f in self.facets]

    def is_interior(self, x) -> bool:
        return all(v > 0 for v in self.l_values(x))

    def translate(self, v) -> "Polytope":
        v = [to_q(a) for a in v]
        fs = tuple(Facet(f.mu, f.lam + sum((m * a for m, a in zip(f.mu, v)), Fraction(0)))
                   for f in self.facets)
        return Polytope(self.n, fs, self.name)

    def transform_normals(self, U) -> "Polytope":
        """Replace each mu by U mu (U integral, det +-1): the image under U^{-T}."""
        fs = []
        for f in self.facets:
            mu = tuple(int(sum(U[i][j] * f.mu[j] for j in range(self.n))) for i in range(self.n))
            fs.append(Facet(mu, f.lam))
        return Polytope(self.n, tuple(fs), self.name)

    def is_bounded(self) -> bool:
        """Exact test that the normals positively span R^n."""
        bases = [S for S in itertools.combinations(range(len(self.facets)), self.n)
                 if mat_det([self.facets[i].mu for i in S]) != 0]
        for i in range(self.n):
            for s in (1, -1):
                target = [Fraction(s * int(j == i)) for j in range(self.n)]
                ok = False
                for S in bases:
                    # columns are the normals
                    A = [[Fraction(self.facets[k].mu[r]) for k in S] for r in range(self.n)]
                    c = mat_solve(A, target)
                    if all(v >= 0 for v in c):
                        ok = True
                        break
                if not ok:
                    return False
        return True

    @cached_property
    def _vertex_data(self):
        if not self.is_bounded():
            raise PolytopeError("polytope is unbounded")
        verts = {}
        for S in itertools.combinations(range(len(self.facets)), self.n):
            A = [list(self.facets[i].mu) for i in S]
            if mat_det(A) == 0:
                continue
            x = tuple(mat_solve(A, [self.facets[i].lam for i in S]))
            if x in verts:
                continue
            vals = self.l_values(x)
            if all(v >= 0 for v in vals):
                verts[x] = frozenset(i for i, v in enumerate(vals) if v == 0)
        if not verts:
            raise PolytopeError("polytope is empty")
        pts = sorted(verts)
        if rank_q([[a - b for a, b in zip(p, pts[0])] for p in pts[1:]]) < self.n:
            raise PolytopeError("polytope has empty interior")
        return pts, verts

    def vertices(self) -> list[tuple]:
        return list(self._vertex_data[0])

    def active_facets(self, v) -> frozenset:
        return self._vertex_data[1][tuple(v)]

    def interior_point(self) -> tuple:
        pts = self.vertices()
        return tuple(sum(p[i] for p in pts) / len(pts) for i in range(self.n))


def vertices(P: Polytope) -> list[tuple]:
    return P.vertices()


@dataclass
class DelzantVerdict:
    is_delzant: bool
    failures: list  # (vertex, reason)

    def to_json(self):
        return {
            "is_delzant": self.is_delzant,
            "failures": [{"vertex": [q_str(a) for a in v], "reason": r} for v, r in self.failures],
        }


def is_delzant(P: Polytope) -> DelzantVerdict:
    failures = []
    for v in P.vertices():
        act = sorted(P.active_facets(v))
        if len(act) != P.n:
            failures.append((v, "wrong facet count"))
            continue
        d = mat_det([P.facets[i].mu for i in act])
        if abs(d) != 1:
            failures.append((v, "non-unimodular cone"))
    return DelzantVerdict(not failures, failures)


# ---------------------------------------------------------------------------
# triangulation and exact integration


def _affine_dim(pts) -> int:
    if not pts:
        return -1
    p0 = pts[0]
    return rank_q([[a - b for a, b in zip(p, p0)] for p in pts[1:]])


def triangulate(P: Polytope) -> list[tuple]:
    """Simplices (tuples of n+1 vertices) covering P, fanned recursively from
    the lexicographically smallest vertex of each face."""
    verts = P.vertices()
    on = [frozenset(v for v in verts if i in P.active_facets(v)) for i in range(len(P.facets))]

    def rec(vs: frozenset, dim: int):
        if dim == 0:
            return [(next(iter(vs)),)]
        anchor = min(vs)
        out = []
        seen = set()
        for F in on:
            G = vs & F
            if anchor in G or G in seen or G == vs:
                continue
            if _affine_dim(sorted(G)) != dim - 1:
                continue
            seen.add(G)
            out.extend((anchor,) + s for s in rec(G, dim - 1))
        return out

    return rec(frozenset(verts), P.n)


def _simplex_monomial_integral(simplex, exponent) -> Fraction:
    n = len(exponent)
    v0 = simplex[0]
    edges = [[a - b for a, b in zip(v, v0)] for v in simplex[1:]]
    jac = abs(mat_det([[edges[k][i] for k in range(n)] for i in range(n)]))
    if jac == 0:
        return Fraction(0)
    poly = MPoly.const(n, 1)
    for i, k in enumerate(exponent):
        if k == 0:
            continue
        xi = MPoly.affine([edges[j][i] for j in range(n)], v0[i])
        poly = poly * (xi ** k)
    total = Fraction(0)
    for beta, c in poly.terms.items():
        num = 1
        for b in beta:
            num *= math.factorial(b)
        total += c * Fraction(num, math.factorial(n + sum(beta)))
    return jac * total


def moment_integral(P: Polytope, exponent) -> Fraction:
    exponent = tuple(int(k) for k in exponent)
    if len(exponent) != P.n:
        raise PolytopeError("exponent length mismatch")
    return sum((_simplex_monomial_integral(s, exponent) for s in triangulate(P)), Fraction(0))


def futaki_toric(P: Polytope) -> list[Fraction]:
    return [moment_integral(P, tuple(int(i == j) for j in range(P.n))) for i in range(P.n)]


# ---------------------------------------------------------------------------
# catalog


def _pos(name, v):
    v = to_q(v)
    if v <= 0:
        raise PolytopeError(f"parameter {name} must be > 0")
    return v


def catalog(name: str, **params) -> Polytope:
    name = name.lower()
    if name in ("cp1", "interval"):
        return Polytope.from_facets(1, [((1,), -1), ((-1,), -1)], "cp1")
    if name == "cp2":
        return Polytope.from_facets(2, [((1, 0), -1), ((0, 1), -1), ((-1, -1), -1)], "cp2")
    if name in ("cp1xcp1", "square"):
        return Polytope.from_facets(
            2, [((1, 0), -1), ((-1, 0), -1), ((0, 1), -1), ((0, -1), -1)], "cp1xcp1")
    if name == "box":
        # [-1,1] x [-s,s]; s integer so the normals stay primitive
        s = _pos("s", params.get("s", 1))
        return Polytope.from_facets(
            2, [((1, 0), -1), ((-1, 0), -1), ((0, 1), -s), ((0, -1), -s)], "box")
    if name == "hexagon":
        return Polytope.from_facets(
            2,
            [((1, 0), -1), ((-1, 0), -1), ((0, 1), -1), ((0, -1), -1), ((1, 1), -1), ((-1, -1), -1)],
            "hexagon",
        )
    if name == "blowup1":
        a = _pos("a", params.get("a", 1))
        return Polytope.from_facets(
            2, [((1, 0), -1), ((0, 1), -1), ((-1, -1), -a), ((-1, 0), -1)], "blowup1")
    if name == "sakane6":
        return Polytope.from_facets(
            3,
            [((1, 0, 0), -1), ((-1, 0, 0), -1), ((0, 1, 0), -1), ((0, 0, 1), -1),
             ((-1, -1, 0), -1), ((1, 0, -1), -1)],
            "sakane6",
        )
    if name == "sixdim":
        a = _pos("a", params.get("a", 1))
        c = _pos("c", params.get("c", 1))
        return Polytope.from_facets(
            3,
            [((1, 0, 0), -1), ((-1, 0, 0), -1), ((0, 1, 0), -1), ((0, 0, 1), -1),
             ((-1, -1, 0), -a), ((1, 0, -1), -c)],
            "sixdim",
        )
    raise PolytopeError(f"unknown polytope {name!r}")


CATALOG_NAMES = ("cp1", "cp2", "cp1xcp1", "hexagon", "blowup1", "sakane6", "sixdim", "box")
