"""Curvature of (fiberwise) Kaehler toric metrics in symplectic coordinates.

All quantities are exact at rational points.  Laplacians use the analyst's
sign convention (on CP^1, Delta x = -2x).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .exactalg import mat_solve, to_q
from .potential import MetricPoint, Potential, metric_at, phi_value_grad


def _mp(pot_or_mp, x=None) -> MetricPoint:
    return pot_or_mp if isinstance(pot_or_mp, MetricPoint) else metric_at(pot_or_mp, x)


def abreu_scalar(pot: Potential, x=None) -> Fraction:
    """S = -d_i d_j h_ij."""
    m = _mp(pot, x)
    n = len(m.h)
    return -sum((m.ddh[i][j][i][j] for i in range(n) for j in range(n)), Fraction(0))


def abreu_scalar_simplified(pot: Potential, x=None) -> Fraction:
    """S = -(1/det h) h_ij d_i d_j det h."""
    m = _mp(pot, x)
    n = len(m.h)
    return -sum((m.h[i][j] * m.ddD[i][j] for i in range(n) for j in range(n)), Fraction(0)) / m.det_h


def adjugate_divergence(pot: Potential, x=None) -> list[Fraction]:
    """d_i M_ij for the adjugate M = h / det h of h_inv."""
    m = _mp(pot, x)
    n = len(m.h)
    D = m.det_h
    out = []
    for j in range(n):
        s = Fraction(0)
        for i in range(n):
            s += m.dh[i][i][j] / D - m.h[i][j] * m.dD[i] / (D * D)
        out.append(s)
    return out


def laplacians(pot: Potential, f_jet, x) -> tuple:
    """(Delta f, quotient Delta f) from f_jet = (value, gradient, Hessian).

    Jets may be floats when f is irrational; the metric part stays exact.
    """
    m = _mp(pot, x)
    n = len(m.h)
    _, g, H = f_jet
    D = m.det_h
    trace = sum(m.h[i][j] * H[i][j] for i in range(n) for j in range(n))
    first = sum(m.h[i][j] * m.dD[i] * g[j] for i in range(n) for j in range(n))
    return trace + first / D, trace + first / (2 * D)


@dataclass
class ExtremalFit:
    alpha: list
    beta: Fraction
    max_residual: Fraction
    values: list

    @property
    def exact(self) -> bool:
        return self.max_residual == 0


def extremal_fit(pot: Potential, points) -> ExtremalFit:
    """Exact least-squares fit S ~ <alpha, x> + beta over sample points."""
    pts = [tuple(to_q(v) for v in p) for p in points]
    n = pot.n
    if len(pts) < n + 1:
        raise ValueError("degenerate sample configuration: need n+1 points")
    S = [abreu_scalar(pot, p) for p in pts]
    rows = [list(p) + [Fraction(1)] for p in pts]
    N = [[sum(r[a] * r[b] for r in rows) for b in range(n + 1)] for a in range(n + 1)]
    rhs = [sum(r[a] * s for r, s in zip(rows, S)) for a in range(n + 1)]
    try:
        coef = mat_solve(N, rhs)
    except ZeroDivisionError:
        raise ValueError("degenerate sample configuration: points not affinely independent") from None
    res = [abs(s - sum(c * v for c, v in zip(coef, r))) for r, s in zip(rows, S)]
    return ExtremalFit(coef[:n], coef[n], max(res), S)


def einstein_residual(pot: Potential, lam, x) -> list:
    """M_ik d_k(M_lj d_l D) + 2 lam M_ij with M = h/D, D = det h."""
    m = _mp(pot, x)
    lam = to_q(lam)
    n = len(m.h)
    D = m.det_h
    M = [[m.h[i][j] / D for j in range(n)] for i in range(n)]
    dM = [[[m.dh[k][i][j] / D - m.h[i][j] * m.dD[k] / (D * D) for j in range(n)] for i in range(n)]
          for k in range(n)]
    # T_kj = d_k (M_lj d_l D)
    T = [[sum(dM[k][l][j] * m.dD[l] + M[l][j] * m.ddD[k][l] for l in range(n)) for j in range(n)]
         for k in range(n)]
    return [[sum(M[i][k] * T[k][j] for k in range(n)) + 2 * lam * M[i][j] for j in range(n)]
            for i in range(n)]


@dataclass
class IntegratedEinstein:
    values: list
    spread: float
    constant: bool


def integrated_einstein_check(pot: Potential, lam, points, C=None, w=None, tol: float = 1e-8) -> IntegratedEinstein:
    """Constancy of log(det h V^1/2) - sum (-2 lam x_j + C_j) dPhi/dx_j - 2 lam Phi.

    Needs Phi and its gradient, so floating point; C defaults to zero.
    """
    lam = float(to_q(lam))
    vals = []
    for x in points:
        m = _mp(pot, x)
        n = len(m.h)
        Cj = [0.0] * n if C is None else [float(to_q(c)) for c in C]
        logv = math.log(float(m.det_h))
        if w is not None and w.entries:
            A = _fiber_values(w, m)
            logv += sum(0.5 * d * math.log(float(a)) for (d, _, _), a in zip(w.entries, A))
        phi, grad = phi_value_grad(pot, m.x)
        vals.append(logv - sum((-2 * lam * float(xj) + c) * g for xj, c, g in zip(m.x, Cj, grad)) - 2 * lam * phi)
    spread = max(vals) - min(vals) if vals else 0.0
    return IntegratedEinstein(vals, spread, spread < tol)


# ---------------------------------------------------------------------------
# fiberwise Kaehler toric


@dataclass(frozen=True)
class FiberWeight:
    entries: tuple  # (d, b_vec tuple, a)

    @classmethod
    def make(cls, entries) -> "FiberWeight":
        out = []
        for d, b, a in entries:
            d = int(d)
            if d < 2 or d % 2:
                raise ValueError("fiber dimensions must be even and >= 2")
            b = tuple(to_q(v) for v in (b if isinstance(b, (list, tuple)) else [b]))
            out.append((d, b, to_q(a)))
        return cls(tuple(out))

    def A(self, x) -> list[Fraction]:
        return [sum((bk * xk for bk, xk in zip(b, x)), Fraction(0)) + a for _, b, a in self.entries]


def _fiber_values(w: FiberWeight, m: MetricPoint):
    A = w.A(m.x)
    if any(v <= 0 for v in A):
        raise ValueError("fiber coefficient A_j is not positive at the point")
    return A


def fkt_scalar(pot: Potential, w: FiberWeight, x) -> Fraction:
    m = _mp(pot, x)
    n = len(m.h)
    S = abreu_scalar(m)
    if not w.entries:
        return S
    A = _fiber_values(w, m)
    D = m.det_h
    h = m.h
    ent = w.entries
    for (d, b, _), Ar in zip(ent, A):
        S -= d * sum(h[k][l] * m.dD[k] * b[l] for k in range(n) for l in range(n)) / (D * Ar)
        S += Fraction(d, 2) * sum(h[k][l] * b[k] * b[l] for k in range(n) for l in range(n)) / (Ar * Ar)
        S += d / Ar
    for (dr, br, _), Ar in zip(ent, A):
        for (ds, bs, _), As in zip(ent, A):
            S -= Fraction(dr * ds, 4) * sum(h[k][l] * br[k] * bs[l] for k in range(n) for l in range(n)) / (Ar * As)
    return S


def fkt_einstein_residual(pot: Potential, w: FiberWeight, lam, x):
    """Residuals of the two fiberwise Einstein equations.

    A: h_ik d_k(h_lj d_l L) + 2 lam h_ij, with L = log det h + 1/2 sum d_r log A_r.
    B_i: (h_kl d_l L + 2 lam x_k) b_ki - 2(1 - lam a_i).
    """
    m = _mp(pot, x)
    lam = to_q(lam)
    n = len(m.h)
    h, D = m.h, m.det_h
    A = _fiber_values(w, m) if w.entries else []
    dL = [m.dD[l] / D + sum(Fraction(d, 2) * b[l] / Ar for (d, b, _), Ar in zip(w.entries, A))
          for l in range(n)]
    ddL = [[m.ddD[k][l] / D - m.dD[k] * m.dD[l] / (D * D)
            - sum(Fraction(d, 2) * b[k] * b[l] / (Ar * Ar) for (d, b, _), Ar in zip(w.entries, A))
            for l in range(n)] for k in range(n)]
    T = [[sum(m.dh[k][l][j] * dL[l] + h[l][j] * ddL[k][l] for l in range(n)) for j in range(n)]
         for k in range(n)]
    resA = [[sum(h[i][k] * T[k][j] for k in range(n)) + 2 * lam * h[i][j] for j in range(n)]
            for i in range(n)]
    grad = [sum(h[k][l] * dL[l] for l in range(n)) + 2 * lam * m.x[k] for k in range(n)]
    resB = [sum(grad[k] * b[k] for k in range(n)) - 2 * (1 - lam * a) for _, b, a in w.entries]
    return resA, resB


# ---------------------------------------------------------------------------
# four-dimensional conformal checks


@dataclass
class DerdzinskiReport:
    values: list
    is_constant: bool


def derdzinski_value(pot: Potential, alpha, beta, x) -> Fraction:
    """S^3 + 6 S Delta S - 12 |grad S|^2 for affine S = <alpha, x> + beta."""
    m = _mp(pot, x)
    n = len(m.h)
    if n != 2:
        raise ValueError("derdzinski_check is four-dimensional (n = 2)")
    al = [to_q(v) for v in alpha]
    S = sum(a * v for a, v in zip(al, m.x)) + to_q(beta)
    grad2 = sum(m.h[i][j] * al[i] * al[j] for i in range(n) for j in range(n))
    lapS = sum(m.h[i][j] * m.dD[i] * al[j] for i in range(n) for j in range(n)) / m.det_h
    return S ** 3 + 6 * S * lapS - 12 * grad2


def derdzinski_check(pot: Potential, alpha, beta, points) -> DerdzinskiReport:
    vals = [derdzinski_value(pot, alpha, beta, p) for p in points]
    return DerdzinskiReport(vals, all(v == vals[0] for v in vals))


def _hermitian_lhs(pot, alpha, beta, x):
    m = _mp(pot, x)
    n = len(m.h)
    if n != 2:
        raise ValueError("hermitian Einstein check is four-dimensional (n = 2)")
    al = [to_q(v) for v in alpha]
    S = sum(a * v for a, v in zip(al, m.x)) + to_q(beta)
    if S == 0:
        raise ValueError("scalar curvature vanishes: point on the singular locus")
    h, D = m.h, m.det_h
    dlog = [m.dD[l] / D for l in range(n)]
    ddlog = [[m.ddD[k][l] / D - m.dD[k] * m.dD[l] / (D * D) for l in range(n)] for k in range(n)]
    T = [[sum(m.dh[k][l][j] * dlog[l] + h[l][j] * ddlog[k][l] for l in range(n)) for j in range(n)]
         for k in range(n)]
    first = [[sum(h[i][k] * T[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    second = [[sum(h[i][k] * m.dh[k][l][j] * al[l] for k in range(n) for l in range(n)) for j in range(n)]
              for i in range(n)]
    c = (sum(h[k][l] * dlog[k] * al[l] for k in range(n) for l in range(n)) / S
         - 3 * sum(h[k][l] * al[k] * al[l] for k in range(n) for l in range(n)) / (S * S))
    L = [[-first[i][j] / 2 + second[i][j] / S + c * h[i][j] for j in range(n)] for i in range(n)]
    return L, h, S


def hermitian_einstein_lambda(pot: Potential, alpha, beta, x) -> Fraction:
    """Constant lambda read off from the (0,0) entry at one point."""
    L, h, S = _hermitian_lhs(pot, alpha, beta, x)
    return L[0][0] * S * S / h[0][0]


def hermitian_einstein_toric_residual(pot: Potential, alpha, beta, lam, x) -> list:
    """Residual of the Einstein equation for the conformal metric S^-2 g."""
    L, h, S = _hermitian_lhs(pot, alpha, beta, x)
    lam = to_q(lam)
    return [[L[i][j] - lam * h[i][j] / (S * S) for j in range(2)] for i in range(2)]


def max_abs(M) -> Fraction:
    if isinstance(M[0], list):
        return max(abs(v) for r in M for v in r)
    return max((abs(v) for v in M), default=Fraction(0))
