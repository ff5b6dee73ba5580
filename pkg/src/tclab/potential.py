"""Symplectic potentials Phi = Phi_P + Psi and exact metric jets.

Phi_P = 1/2 sum l_m log l_m is the canonical potential of a polytope.  The
correction Psi is given through its exact Hessian (rational functions), so
every derivative of order >= 2 is exact.  Orders 0 and 1 involve logs and
are returned in floating point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .exactalg import (
    MultiRatFunc,
    leading_minors,
    mat_add,
    mat_det,
    mat_inv,
    mat_mul,
    mat_scale,
    mat_trace,
    mat_zero,
    multi_index_tuples,
    parse_multi_ratfunc,
    q_str,
    to_q,
)
from .polytope import Polytope, catalog


class MetricPointError(ValueError):
    pass


def _key(idx) -> tuple:
    return tuple(sorted(idx))


def canonical_jets(P: Polytope, x, max_order: int = 4) -> dict:
    """Partial derivatives of Phi_P at x keyed by sorted index tuples.

    Orders 2..max_order are exact Fractions; orders 0 and 1 are floats.
    """
    x = [to_q(v) for v in x]
    ls = P.l_values(x)
    if any(v <= 0 for v in ls):
        raise MetricPointError("point is not strictly interior")
    n = P.n
    out: dict = {}
    out[()] = 0.5 * sum(float(l) * math.log(float(l)) for l in ls)
    for i in range(n):
        out[(i,)] = 0.5 * sum(f.mu[i] * (math.log(float(l)) + 1.0) for f, l in zip(P.facets, ls))
    for k in range(2, max_order + 1):
        coef = Fraction((-1) ** k * math.factorial(k - 2), 2)
        for e in multi_index_tuples(n, k):
            idx = tuple(i for i in range(n) for _ in range(e[i]))
            s = Fraction(0)
            for f, l in zip(P.facets, ls):
                prod = 1
                for i in idx:
                    prod *= f.mu[i]
                if prod:
                    s += Fraction(prod) / l ** (k - 1)
            out[idx] = coef * s
    return out


@dataclass
class Potential:
    polytope: Polytope
    correction_hessian: Optional[list] = None  # n x n MultiRatFunc or None
    numeric_closure: Optional[Callable] = None  # x -> (Psi, grad Psi) floats
    name: str = ""
    meta: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.polytope.n

    def __post_init__(self):
        C = self.correction_hessian
        if C is None:
            return
        n = self.n
        if len(C) != n or any(len(r) != n for r in C):
            raise ValueError("correction Hessian has wrong shape")
        for i in range(n):
            for j in range(i + 1, n):
                a, b = C[i][j], C[j][i]
                if (a.num * b.den) != (b.num * a.den):
                    raise ValueError("correction Hessian is not symmetric")

    @classmethod
    def canonical(cls, P: Polytope, name: str = "") -> "Potential":
        return cls(P, None, None, name or P.name)

    @classmethod
    def with_fxx(cls, P: Polytope, fxx, name: str = "", closure=None) -> "Potential":
        """Correction f(x1) whose only Hessian entry is d^2 f/dx1^2 = fxx."""
        n = P.n
        if isinstance(fxx, str):
            fxx = parse_multi_ratfunc(fxx, n)
        zero = MultiRatFunc.const(n, 0)
        C = [[zero] * n for _ in range(n)]
        C[0][0] = fxx
        return cls(P, C, closure, name)

    @classmethod
    def from_json(cls, data: dict) -> "Potential":
        P = Polytope.from_json(data)
        C = data.get("correction_hessian")
        if C is None:
            return cls.canonical(P, data.get("name", ""))
        n = P.n
        flat = [c for row in C for c in row] if isinstance(C[0], list) else list(C)
        if len(flat) != n * n:
            raise ValueError("correction_hessian must have n*n entries")
        M = [[parse_multi_ratfunc(flat[i * n + j], n) for j in range(n)] for i in range(n)]
        return cls(P, M, None, data.get("name", ""))

    def correction_jets(self, x) -> list:
        """[i][j] -> jets dict of the correction entry (orders 0..2)."""
        n = self.n
        if self.correction_hessian is None:
            return None
        return [[self.correction_hessian[i][j].jets(x, 2) for j in range(n)] for i in range(n)]


@dataclass
class MetricPoint:
    x: tuple
    h_inv: list
    h: list
    det_h: Fraction
    dH: list  # dH[a] = d_a h_inv
    ddH: list  # ddH[a][b] = d_a d_b h_inv
    dh: list
    ddh: list
    dD: list
    ddD: list

    def to_json(self):
        return {
            "point": [q_str(v) for v in self.x],
            "h_inv": [[q_str(v) for v in r] for r in self.h_inv],
            "h": [[q_str(v) for v in r] for r in self.h],
            "det_h": q_str(self.det_h),
        }


def hessian_jets(pot: Potential, x):
    """h_inv and its first and second partials at x (exact)."""
    x = tuple(to_q(v) for v in x)
    n = pot.n
    J = canonical_jets(pot.polytope, x, 4)
    C = pot.correction_jets(x)

    def entry(i, j, extra=()):
        v = J[_key((i, j) + tuple(extra))]
        if C is not None:
            cj = C[i][j]
            v = v + cj[_key(extra)]
        return v

    H = [[entry(i, j) for j in range(n)] for i in range(n)]
    dH = [[[entry(i, j, (a,)) for j in range(n)] for i in range(n)] for a in range(n)]
    ddH = [[[[entry(i, j, (a, b)) for j in range(n)] for i in range(n)] for b in range(n)]
           for a in range(n)]
    return x, H, dH, ddH


def metric_at(pot: Potential, x) -> MetricPoint:
    x, H, dH, ddH = hessian_jets(pot, x)
    n = pot.n
    if any(m <= 0 for m in leading_minors(H)):
        raise MetricPointError("not a metric point: Hessian is not positive definite")
    h = mat_inv(H)
    D = mat_det(h)
    dh = [mat_scale(mat_mul(mat_mul(h, dH[a]), h), -1) for a in range(n)]
    ddh = [[None] * n for _ in range(n)]
    for a in range(n):
        for b in range(n):
            t1 = mat_mul(mat_mul(dh[b], dH[a]), h)
            t2 = mat_mul(mat_mul(h, ddH[a][b]), h)
            t3 = mat_mul(mat_mul(h, dH[a]), dh[b])
            ddh[a][b] = mat_scale(mat_add(mat_add(t1, t2), t3), -1)
    trs = [mat_trace(mat_mul(h, dH[a])) for a in range(n)]
    dD = [-D * trs[a] for a in range(n)]
    ddD = [[-dD[b] * trs[a] - D * (mat_trace(mat_mul(dh[b], dH[a])) + mat_trace(mat_mul(h, ddH[a][b])))
            for b in range(n)] for a in range(n)]
    return MetricPoint(x, H, h, D, dH, ddH, dh, ddh, dD, ddD)


@dataclass
class BoundaryVerdict:
    passed: bool
    sites: list  # dicts: site, kind, deltas

    def to_json(self):
        return {"pass": self.passed, "sites": self.sites}


def boundary_determinant_check(pot: Potential, eps=(Fraction(1, 100), Fraction(1, 1000), Fraction(1, 10000))) -> BoundaryVerdict:
    """Sample delta = [det(h_inv) prod l_m]^-1 approaching facet midpoints and vertices."""
    P = pot.polytope
    verts = P.vertices()
    c = P.interior_point()
    sites = []
    for i in range(len(P.facets)):
        on = [v for v in verts if i in P.active_facets(v)]
        if on:
            mid = tuple(sum(v[k] for v in on) / len(on) for k in range(P.n))
            sites.append(("facet", i, mid))
    for v in verts:
        sites.append(("vertex", None, v))
    ok = True
    report = []
    for kind, idx, s in sites:
        deltas = []
        good = True
        for e in eps:
            p = tuple(a + e * (b - a) for a, b in zip(s, c))
            try:
                _, H, _, _ = hessian_jets(pot, p)
            except (MetricPointError, ZeroDivisionError):
                good = False
                deltas.append(None)
                continue
            prod = Fraction(1)
            for l in P.l_values(p):
                prod *= l
            dH = mat_det(H) * prod
            if dH == 0:
                good = False
                deltas.append(None)
                continue
            d = 1 / dH
            deltas.append(d)
            if d <= 0:
                good = False
        if good:
            a, b = float(deltas[-2]), float(deltas[-1])
            if abs(a - b) > 0.1 * abs(b):
                good = False
        ok = ok and good
        report.append({
            "kind": kind,
            "facet": idx,
            "site": [q_str(v) for v in s],
            "deltas": [None if d is None else float(d) for d in deltas],
            "pass": good,
        })
    return BoundaryVerdict(ok, report)


def phi_value_grad(pot: Potential, x) -> tuple[float, list]:
    """Floating point value and gradient of Phi (needs a numeric closure for Psi)."""
    J = canonical_jets(pot.polytope, x, 2)
    val = J[()]
    grad = [J[(i,)] for i in range(pot.n)]
    if pot.correction_hessian is not None:
        if pot.numeric_closure is None:
            raise ValueError("correction has no numeric closure for orders 0-1")
        v, g = pot.numeric_closure([float(a) for a in x])
        val += v
        grad = [a + b for a, b in zip(grad, g)]
    return val, grad


def legendre_dual_1d(pot: Potential, u: float, tol: float = 1e-14) -> tuple[float, float]:
    """For n = 1 solve Phi'(x) = u by safeguarded Newton; return (x, eta(u)).

    eta(u) = x u - Phi(x) is the Legendre dual, so d eta/du = x.
    """
    if pot.n != 1:
        raise ValueError("legendre_dual_1d needs n = 1")
    lo, hi = (float(v[0]) for v in (min(pot.polytope.vertices()), max(pot.polytope.vertices())))
    x = 0.5 * (lo + hi)
    for _ in range(200):
        xq = Fraction(x)
        _, g = phi_value_grad(pot, [xq])
        H = float(hessian_jets(pot, [xq])[1][0][0])
        step = (g[0] - u) / H
        xn = x - step
        if not (lo < xn < hi):
            xn = 0.5 * (x + (lo if xn <= lo else hi))
        if abs(xn - x) < tol:
            x = xn
            break
        x = xn
    val, _ = phi_value_grad(pot, [Fraction(x)])
    return x, x * u - val


# ---------------------------------------------------------------------------
# catalog potentials


def blowup_fxx(a) -> str:
    """Extremal correction on the one-point blowup polytope with parameter a."""
    a = to_q(a)
    return (f"1/(2*(x-{a}-1)) + ({a})/(({a})*x^2 - ({3 * a * a + 6 * a + 2})*x"
            f" + ({3 * a ** 3 + 9 * a * a + 7 * a + 2}))")


SAKANE_FXX = "(x^2-10)/((x^2-4)*(x^2-7))"


def potential_catalog(name: str, **params) -> Potential:
    name = name.lower()
    if name in ("cp1", "cp2", "cp1xcp1", "hexagon", "sixdim", "box"):
        return Potential.canonical(catalog(name, **params), name)
    if name == "blowup1":
        a = params.get("a", 1)
        return Potential.with_fxx(catalog("blowup1", a=a), blowup_fxx(a), "blowup1")
    if name == "blowup1-canonical":
        return Potential.canonical(catalog("blowup1", **params), name)
    if name == "sakane6":
        return Potential.with_fxx(catalog("sakane6"), SAKANE_FXX, "sakane6")
    raise ValueError(f"unknown potential {name!r}")


POTENTIAL_CATALOG = ("cp1", "cp2", "cp1xcp1", "hexagon", "blowup1", "sakane6", "sixdim")
