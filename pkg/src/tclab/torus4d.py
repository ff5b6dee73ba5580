"""Four-manifolds with an orthogonally transitive T^2 isometry.

Metrics are g = A dR^2 + B dtheta^2 + h_ij dphi^i dphi^j on a coordinate
rectangle. Closures take numpy arrays and must be pure. Derivatives are
fourth-order finite differences; the quotient Laplacian uses the analyst's
sign (on the round S^2 a linear coordinate function has eigenvalue -2).
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import simpson
from scipy.optimize import brentq


class TorusError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Orlik-Raymond data


def _normalize_pair(p):
    m, n = int(p[0]), int(p[1])
    if m < 0 or (m == 0 and n < 0):
        m, n = -m, -n
    return m, n


def _det(u, v):
    return u[0] * v[1] - u[1] * v[0]


def validate_orbit(pairs) -> list:
    ps = [_normalize_pair(p) for p in pairs]
    if len(ps) < 2:
        raise TorusError("need at least two pairs")
    for m, n in ps:
        if math.gcd(m, n) != 1:
            raise TorusError(f"pair ({m},{n}) is not coprime")
    k = len(ps)
    for j in range(k):
        if abs(_det(ps[j], ps[(j + 1) % k])) != 1:
            raise TorusError(f"adjacent pairs {ps[j]}, {ps[(j + 1) % k]} do not have determinant +-1")
    return ps


def parse_orbit_pairs(text: str) -> list:
    """"(1,0);(0,1)" -> [(1,0),(0,1)]."""
    out = []
    for chunk in text.split(";"):
        chunk = chunk.strip().strip("()")
        if not chunk:
            continue
        a, b = chunk.split(",")
        out.append((int(a), int(b)))
    return out


@dataclass
class OrbitInvariants:
    chi: int
    tau: int
    spin: bool
    hitchin_thorpe_pass: bool
    manifold: str
    blowup_kl: Optional[tuple] = None
    einstein_possible: Optional[bool] = None

    def to_json(self):
        return {
            "chi": self.chi,
            "tau": self.tau,
            "spin": self.spin,
            "hitchin_thorpe_pass": self.hitchin_thorpe_pass,
            "manifold": self.manifold,
            "blowup_kl": list(self.blowup_kl) if self.blowup_kl else None,
            "einstein_possible": self.einstein_possible,
        }


def orbit_invariants(pairs) -> OrbitInvariants:
    ps = validate_orbit(pairs)
    k = len(ps)
    chi = k
    tau = -sum(_det(ps[j], ps[(j + 1) % k]) for j in range(k))
    spin = all(_det(ps[j], ps[(j + 2) % k]) % 2 == 0 for j in range(k))
    ht = 2 * chi >= 3 * abs(tau)
    if tau == 0 and spin:
        manifold = "S^4" if chi == 2 else f"#{(chi - 2) // 2}(S^2xS^2)"
        return OrbitInvariants(chi, tau, spin, ht, manifold, None, ht)
    kk, ll = (chi - 2 + tau) // 2, (chi - 2 - tau) // 2
    ok = 4 + 5 * kk > ll and 5 * ll > kk - 4
    return OrbitInvariants(chi, tau, spin, ht, f"{kk}CP^2#{ll}-CP^2", (kk, ll), ok)


# ---------------------------------------------------------------------------
# metrics


@dataclass
class TorusMetric:
    name: str
    A: Callable
    B: Callable
    h: Callable  # (R, theta) -> (h11, h12, h22)
    domain: tuple  # ((R0, R1), (t0, t1))
    lam: Optional[float] = None
    orbit: tuple = ()
    bolts: tuple = ()  # (coord index, value, (m, n))
    meta: dict = field(default_factory=dict)

    def h_stack(self, X, Y):
        h11, h12, h22 = self.h(X, Y)
        z = np.zeros(np.broadcast(X, Y).shape)
        return np.stack([h11 + z, h12 + z, h22 + z])

    def base_stack(self, X, Y):
        z = np.zeros(np.broadcast(X, Y).shape)
        return np.stack([self.A(X, Y) + z, self.B(X, Y) + z])

    def is_diagonal(self, n=9) -> bool:
        X, Y = _grid(self.domain, n)
        return bool(np.all(np.abs(self.h_stack(X, Y)[1]) < 1e-14))

    def is_isothermal(self, n=9) -> bool:
        X, Y = _grid(self.domain, n)
        a, b = self.base_stack(X, Y)
        return bool(np.allclose(a, b, rtol=1e-13, atol=0))


def _grid(domain, k):
    (r0, r1), (t0, t1) = domain
    r = r0 + (np.arange(k) + 0.5) * (r1 - r0) / k
    t = t0 + (np.arange(k) + 0.5) * (t1 - t0) / k
    return np.meshgrid(r, t, indexing="ij")


def page_nu() -> float:
    """Root of 4 nu (3 + nu^2) = 3 + 6 nu^2 - nu^4 in (0.28, 0.29)."""
    return brentq(lambda v: 4 * v * (3 + v * v) - (3 + 6 * v * v - v ** 4), 0.28, 0.29, xtol=1e-15)


def _s4():
    return TorusMetric(
        "s4",
        lambda R, t: 1.0,
        lambda R, t: np.sin(R) ** 2,
        lambda R, t: (np.sin(R) ** 2 * np.sin(t) ** 2, 0.0, np.sin(R) ** 2 * np.cos(t) ** 2),
        ((0.0, math.pi), (0.0, math.pi / 2)),
        3.0,
        ((1, 0), (0, 1)),
        ((1, 0.0, (1, 0)), (1, math.pi / 2, (0, 1))),
    )


def _cp2():
    def h(R, t):
        s2, st2, ct2 = np.sin(R) ** 2, np.sin(t) ** 2, np.cos(t) ** 2
        return (s2 * st2 * (1 - s2 * st2), -s2 * s2 * st2 * ct2, s2 * ct2 * (1 - s2 * ct2))

    return TorusMetric(
        "cp2",
        lambda R, t: 1.0,
        lambda R, t: np.sin(R) ** 2,
        h,
        ((0.0, math.pi / 2), (0.0, math.pi / 2)),
        6.0,
        ((0, 1), (1, 0), (1, 1)),
        ((1, 0.0, (1, 0)), (1, math.pi / 2, (0, 1)), (0, math.pi / 2, (1, 1))),
    )


def _s2xs2(radius2=1.0):
    r2 = radius2 * radius2
    return TorusMetric(
        "s2xs2" if radius2 == 1.0 else f"s2xs2-r{radius2:g}",
        lambda R, t: 1.0,
        lambda R, t: r2,
        lambda R, t: (np.sin(R) ** 2, 0.0, r2 * np.sin(t) ** 2),
        ((0.0, math.pi), (0.0, math.pi)),
        1.0,
        ((0, 1), (1, 0), (0, 1), (1, 0)),
        ((0, 0.0, (1, 0)), (0, math.pi, (1, 0)), (1, 0.0, (0, 1)), (1, math.pi, (0, 1))),
    )


def _page(lam0=1.0):
    nu = page_nu()
    v2 = nu * nu
    c = 3 * (1 + v2) / lam0
    q = 3 + 6 * v2 - v2 * v2

    def P(R):
        return 1 - v2 * np.cos(R) ** 2

    def N(R):
        return 3 - v2 - v2 * (1 + v2) * np.cos(R) ** 2

    def F(R):
        return c * N(R) * np.sin(R) ** 2 / ((3 + v2) ** 2 * P(R))

    def h(R, t):
        s = np.sin(t / 2) ** 2
        f = F(R)
        return (c * P(R) / q * np.sin(t) ** 2 + f * s * s, -f * s, f)

    return TorusMetric(
        "page",
        lambda R, t: c * P(R) / N(R),
        lambda R, t: c * P(R) / q,
        h,
        ((0.0, math.pi), (0.0, math.pi)),
        None,
        ((0, 1), (1, 1), (0, 1), (1, 0)),
        ((0, 0.0, (0, 1)), (0, math.pi, (0, 1)), (1, 0.0, (1, 0)), (1, math.pi, (1, 1))),
        {"nu": nu, "formula_lambda": lam0},
    )


def _s4_iso(perturb=0.0, span=2.0):
    # u = log tan(R/2): dR^2 + sin^2R dtheta^2 = sech^2 u (du^2 + dtheta^2)
    def Rof(u):
        return 2 * np.arctan(np.exp(u))

    def h(u, t):
        s2 = 1 / np.cosh(u) ** 2
        f = 1 + perturb * Rof(u)
        return (f * s2 * np.sin(t) ** 2, 0.0, f * s2 * np.cos(t) ** 2)

    return TorusMetric(
        "s4-iso" if not perturb else "s4-iso-perturbed",
        lambda u, t: 1 / np.cosh(u) ** 2,
        lambda u, t: 1 / np.cosh(u) ** 2,
        h,
        ((-span, span), (0.0, math.pi / 2)),
        3.0 if not perturb else None,
        ((1, 0), (0, 1)),
        (),
    )


def _flat():
    return TorusMetric(
        "flat",
        lambda x, y: 1.0,
        lambda x, y: 1.0,
        lambda x, y: (1.0, 0.0, 1.0),
        ((0.0, 1.0), (0.0, 1.0)),
        0.0,
    )


_CATALOG = {
    "s4": _s4,
    "cp2": _cp2,
    "s2xs2": _s2xs2,
    "page": _page,
    "s4-iso": _s4_iso,
    "s4-iso-perturbed": lambda: _s4_iso(0.1),
    "flat": _flat,
    "s2xs2-scaled": lambda: _s2xs2(2.0),
}
METRIC_NAMES = tuple(_CATALOG)


def metric_catalog(name: str) -> TorusMetric:
    try:
        return _CATALOG[name.lower()]()
    except KeyError:
        raise TorusError(f"unknown metric {name!r}") from None


# ---------------------------------------------------------------------------
# finite differences

# integer numerators over 12 so that constants differentiate to exactly zero
_C1 = (1, -8, 0, 8, -1)
_C2 = (-1, 16, -30, 16, -1)
_OFF = (-2, -1, 0, 1, 2)


def _jets4(F, X, Y, sx, sy):
    vals = {}

    def at(a, b):
        if (a, b) not in vals:
            vals[(a, b)] = F(X + a * sx, Y + b * sy)
        return vals[(a, b)]

    f = at(0, 0)
    fx = sum(c * at(a, 0) for c, a in zip(_C1, _OFF) if c) / (12 * sx)
    fy = sum(c * at(0, b) for c, b in zip(_C1, _OFF) if c) / (12 * sy)
    fxx = sum(c * at(a, 0) for c, a in zip(_C2, _OFF)) / (12 * sx ** 2)
    fyy = sum(c * at(0, b) for c, b in zip(_C2, _OFF)) / (12 * sy ** 2)
    fxy = sum(ca * cb * at(a, b) for ca, a in zip(_C1, _OFF) if ca for cb, b in zip(_C1, _OFF) if cb) / (
        144 * sx * sy)
    return [f, fx, fy, fxx, fxy, fyy]


def _jets(F, X, Y, sx, sy):
    """Value, first and second partials of a stacked field.

    Fourth-order central differences at steps s and s/2 combined by one
    Richardson step. Grids are promoted to long double, which keeps the
    roundoff floor low where h degenerates.
    """
    X = np.asarray(X, dtype=np.longdouble)
    Y = np.asarray(Y, dtype=np.longdouble)
    sx, sy = np.longdouble(sx), np.longdouble(sy)
    a = _jets4(F, X, Y, sx, sy)
    b = _jets4(F, X, Y, sx / 2, sy / 2)
    f, fx, fy, fxx, fxy, fyy = [(16 * v2 - v1) / 15 for v1, v2 in zip(a, b)]
    return b[0], (fx, fy), ((fxx, fxy), (fxy, fyy))


def _inv2(M):
    d = _det2(M)
    out = np.empty_like(M)
    out[..., 0, 0] = M[..., 1, 1] / d
    out[..., 1, 1] = M[..., 0, 0] / d
    out[..., 0, 1] = -M[..., 0, 1] / d
    out[..., 1, 0] = -M[..., 1, 0] / d
    return out


def _det2(M):
    return M[..., 0, 0] * M[..., 1, 1] - M[..., 0, 1] * M[..., 1, 0]


def _tr2(M):
    return M[..., 0, 0] + M[..., 1, 1]


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("TCLAB_THREADS", "1")))
    except ValueError:
        return 1


def _mat(h):
    """Stacked (h11, h12, h22) -> array [..., 2, 2]."""
    h11, h12, h22 = h
    return np.stack([np.stack([h11, h12], -1), np.stack([h12, h22], -1)], -2)


def _geometry(tm: TorusMetric, X, Y, sx, sy):
    h, dh, ddh = _jets(tm.h_stack, X, Y, sx, sy)
    g, dg, ddg = _jets(tm.base_stack, X, Y, sx, sy)
    H = _mat(h)
    if np.any(H[..., 0, 0] <= 0) or np.any(_det2(H) <= 0):
        raise TorusError("fiber metric h is not positive definite at a sample")
    if np.any(g <= 0):
        raise TorusError("base metric is not positive definite at a sample")
    A, B = g
    dA, dB = (dg[0][0], dg[1][0]), (dg[0][1], dg[1][1])
    # Christoffel symbols of A dR^2 + B dtheta^2, Gam[c][a][b]
    Gam = [[[dA[0] / (2 * A), dA[1] / (2 * A)], [dA[1] / (2 * A), -dB[0] / (2 * A)]],
           [[-dA[1] / (2 * B), dB[0] / (2 * B)], [dB[0] / (2 * B), dB[1] / (2 * B)]]]
    ginv = (1 / A, 1 / B)
    dH = [_mat(dh[a]) for a in range(2)]
    hess = [[_mat(ddh[a][b]) - sum(Gam[c][a][b][..., None, None] * dH[c] for c in range(2)) for b in range(2)]
            for a in range(2)]
    # scalar curvature of the base, s = 2K
    W = np.sqrt(A * B)
    WR = (dA[0] * B + A * dB[0]) / (2 * W)
    Wt = (dA[1] * B + A * dB[1]) / (2 * W)
    ARR, Att = ddg[0][0][0], ddg[1][1][0]
    BRR = ddg[0][0][1]
    K = -(BRR / W - dB[0] * WR / W ** 2 + Att / W - dA[1] * Wt / W ** 2) / (2 * W)
    return {"H": H, "dH": dH, "hess": hess, "ginv": ginv, "g": (A, B), "s_base": 2 * K}


def _einstein_lhs(geo):
    H, dH, hess, ginv = geo["H"], geo["dH"], geo["hess"], geo["ginv"]
    Hi = _inv2(H)
    D = _det2(H)
    dHi = [-Hi @ dH[a] @ Hi for a in range(2)]
    dD = [D * _tr2(Hi @ dH[a]) for a in range(2)]
    lap = sum(ginv[a][..., None, None] * hess[a][a] for a in range(2))
    gradD_gradh = sum((ginv[a] * dD[a] / D)[..., None, None] * dH[a] for a in range(2))
    cross = sum(ginv[a][..., None, None] * (H @ dHi[a] @ dH[a]) for a in range(2))
    L3 = -0.5 * lap - 0.25 * gradD_gradh - 0.5 * cross
    L4 = [[-0.5 * _tr2(Hi @ hess[a][b])
           - 0.25 * _tr2(dHi[a] @ dH[b]) for b in range(2)] for a in range(2)]
    return L3, L4


@dataclass
class EinsteinResidual:
    lam: float
    max_residual: float
    max_fiber: float
    max_base: float
    grid: int

    def to_json(self):
        return {"lambda": self.lam, "max_residual": self.max_residual, "max_fiber_residual": self.max_fiber,
                "max_base_residual": self.max_base, "grid": self.grid}


def derive_lambda(tm: TorusMetric, point=None) -> float:
    """Einstein constant from the trace of the fiber equation at one interior point."""
    (r0, r1), (t0, t1) = tm.domain
    x = np.array([[0.5 * (r0 + r1) if point is None else point[0]]])
    y = np.array([[0.5 * (t0 + t1) if point is None else point[1]]])
    s = 1e-3
    geo = _geometry(tm, x, y, s * (r1 - r0), s * (t1 - t0))
    L3, _ = _einstein_lhs(geo)
    return float(0.5 * _tr2(_inv2(geo["H"]) @ L3)[0, 0])


def _residual_block(tm, X, Y, sx, sy, lam):
    geo = _geometry(tm, X, Y, sx, sy)
    L3, L4 = _einstein_lhs(geo)
    r3 = np.max(np.abs(L3 - lam * geo["H"]))
    A, B = geo["g"]
    c = lam - geo["s_base"] / 2
    r4 = max(np.max(np.abs(L4[0][0] - c * A)), np.max(np.abs(L4[1][1] - c * B)),
             np.max(np.abs(L4[0][1])), np.max(np.abs(L4[1][0])))
    return float(r3), float(r4)


def torus_einstein_residual(tm: TorusMetric, k: int = 32, lam: Optional[float] = None) -> EinsteinResidual:
    """Max residual of the fiber and base Einstein equations on a k x k cell-centred grid.

    Derivative step is (domain side)/(4k) in each direction.
    """
    if lam is None:
        lam = tm.lam if tm.lam is not None else derive_lambda(tm)
    X, Y = _grid(tm.domain, k)
    (r0, r1), (t0, t1) = tm.domain
    sx, sy = (r1 - r0) / (4 * k), (t1 - t0) / (4 * k)
    nt = min(_threads(), k)
    chunks = np.array_split(np.arange(k), nt)
    if nt == 1:
        parts = [_residual_block(tm, X, Y, sx, sy, lam)]
    else:
        with ThreadPoolExecutor(nt) as ex:
            parts = list(ex.map(lambda rows: _residual_block(tm, X[rows], Y[rows], sx, sy, lam), chunks))
    r3 = max(p[0] for p in parts)
    r4 = max(p[1] for p in parts)
    return EinsteinResidual(float(lam), max(r3, r4), r3, r4, k)


# ---------------------------------------------------------------------------
# isothermal form


def _rhoQ(tm: TorusMetric, X, Y, sx, sy):
    """rho Q on a grid for an isothermal metric Omega^2 (dx^2 + dy^2) + h."""
    def rho_f(x, y):
        H = _mat(tm.h_stack(x, y))
        return np.sqrt(_det2(H))[None]

    def logom_f(x, y):
        z = np.zeros(np.broadcast(x, y).shape)
        return (0.5 * np.log(tm.A(x, y) + z))[None]

    def K_f(x, y):
        hs = tm.h_stack(x, y)
        return hs / rho_f(x, y)

    rho, drho, ddrho = _jets(rho_f, X, Y, sx, sy)
    _, dlo, _ = _jets(logom_f, X, Y, sx, sy)
    Kv, dK, _ = _jets(K_f, X, Y, sx, sy)
    rho, drho = rho[0], (drho[0][0], drho[1][0])
    d_rho = 0.5 * (drho[0] - 1j * drho[1])
    dd_rho = 0.25 * (ddrho[0][0][0] - 2j * ddrho[0][1][0] - ddrho[1][1][0])
    d_lo = 0.5 * (dlo[0][0] - 1j * dlo[1][0])
    Km = _mat(Kv)
    dKm = 0.5 * (_mat(dK[0]) - 1j * _mat(dK[1]))
    Ki = _inv2(Km)
    M = Ki @ dKm
    tr = _tr2(M @ M)
    return 8 * d_lo * d_rho - 4 * dd_rho + 2 * d_rho * d_rho / rho - rho * tr


def rhoQ_holomorphicity(tm: TorusMetric, k: int = 32) -> float:
    """Max |dbar(rho Q)| over a k x k grid; metric must be isothermal (A = B)."""
    if not tm.is_isothermal():
        raise TorusError("metric is not in isothermal form (A != B)")
    X, Y = _grid(tm.domain, k)
    (x0, x1), (y0, y1) = tm.domain
    # outer stencil stays a quarter cell inside the domain, inner one is finer
    sx, sy = (x1 - x0) / (8 * k), (y1 - y0) / (8 * k)
    si, sj = sx / 32, sy / 32

    def F(x, y):
        q = _rhoQ(tm, x, y, si, sj)
        return np.stack([q.real, q.imag])

    _, d, _ = _jets(F, X, Y, sx, sy)
    dbar = 0.5 * ((d[0][0] + 1j * d[0][1]) + 1j * (d[1][0] + 1j * d[1][1]))
    return float(np.max(np.abs(dbar)))


# ---------------------------------------------------------------------------
# bolts

_F1 = (-25, 48, -36, 16, -3)  # over 12
_F2 = (45, -154, 214, -156, 61, -10)  # over 12


def _side_points(tm, coord, value, n, margin):
    lo, hi = tm.domain[1 - coord]
    t = np.linspace(lo + margin * (hi - lo), hi - margin * (hi - lo), n)
    v = np.full_like(t, value)
    return (v, t) if coord == 0 else (t, v)


@dataclass
class SurfaceGravity:
    kappa2: list
    mean: float
    spread: float
    constant: bool

    def to_json(self):
        return {"kappa2": self.kappa2, "mean": self.mean, "spread": self.spread, "constant": self.constant}


def surface_gravity(tm: TorusMetric, side: tuple, pair: tuple, n: int = 21, margin: float = 0.05,
                    tol: float = 1e-6) -> SurfaceGravity:
    """kappa^2 = (m^2 Lap h11 + 2mn Lap h12 + n^2 Lap h22)/2 along a boundary side.

    side = (coord index, value); normal derivatives use one-sided stencils.
    """
    coord, value = side
    m, nn = pair
    X, Y = _side_points(tm, coord, value, n, margin)
    L = tm.domain[coord][1] - tm.domain[coord][0]
    T = tm.domain[1 - coord][1] - tm.domain[1 - coord][0]
    s, st = 1e-3 * L, 1e-3 * T
    if abs(value - tm.domain[coord][0]) < 1e-12:
        sign = 1.0
    elif abs(value - tm.domain[coord][1]) < 1e-12:
        sign = -1.0
    else:
        raise TorusError("side must lie on the domain boundary")

    def Hf(x, y):
        h11, h12, h22 = tm.h_stack(x, y)
        return m * m * h11 + 2 * m * nn * h12 + nn * nn * h22

    def shift(F, a, b):
        return F(X + a, Y + b)

    def normal(F):
        e = (sign * s, 0.0) if coord == 0 else (0.0, sign * s)
        v = [shift(F, j * e[0], j * e[1]) for j in range(6)]
        d1 = sign * sum(c * v[j] for j, c in enumerate(_F1)) / (12 * s)
        d2 = sum(c * v[j] for j, c in enumerate(_F2)) / (12 * s ** 2)
        return v[0], d1, d2

    def tangent(F):
        e = (0.0, st) if coord == 0 else (st, 0.0)
        v = [shift(F, j * e[0], j * e[1]) for j in _OFF]
        return (sum(c * w for c, w in zip(_C1, v)) / (12 * st),
                sum(c * w for c, w in zip(_C2, v)) / (12 * st ** 2))

    H0, Hn, Hnn = normal(Hf)
    scale = max(1.0, float(np.max(np.abs(tm.h_stack(*_grid(tm.domain, 5))))))
    if np.max(np.abs(H0)) > 1e-9 * scale:
        raise TorusError("side is not degenerate for this Killing vector")
    Ht, Htt = tangent(Hf)

    def Af(x, y):
        return tm.base_stack(x, y)

    g0, gn, _ = normal(Af)
    gt, _ = tangent(Af)
    A, B = g0
    if coord == 0:
        dA, dB = (gn[0], gt[0]), (gn[1], gt[1])
        HR, Ht_, HRR, Htt_ = Hn, Ht, Hnn, Htt
    else:
        dA, dB = (gt[0], gn[0]), (gt[1], gn[1])
        HR, Ht_, HRR, Htt_ = Ht, Hn, Htt, Hnn
    # Laplacian of a diagonal 2-metric: g^aa (f_aa - Gam^c_aa f_c)
    lap = (HRR - dA[0] / (2 * A) * HR + dA[1] / (2 * B) * Ht_) / A \
        + (Htt_ + dB[0] / (2 * A) * HR - dB[1] / (2 * B) * Ht_) / B
    k2 = 0.5 * lap
    vals = [float(v) for v in k2]
    spread = max(vals) - min(vals)
    return SurfaceGravity(vals, float(np.mean(k2)), spread, spread < tol)


@dataclass
class BoltIdentity:
    bolt_A: float
    bolt_B: float
    lam_vol: float
    rel_error: float

    def to_json(self):
        return {"two_pi_area_A": self.bolt_A, "two_pi_area_B": self.bolt_B, "lambda_vol": self.lam_vol,
                "relative_error": self.rel_error}


def bolt_area_identity(tm: TorusMetric, n: int = 2000, lam: Optional[float] = None) -> BoltIdentity:
    """(2 pi sum Area(A_i), 2 pi sum Area(B_i), lambda Vol(M)) for a diagonal metric.

    A_i are bolts of the first Killing field (f1 = sqrt h11 = 0), B_i of the second.
    """
    if not tm.is_diagonal():
        raise TorusError("bolt area identity needs a diagonal fiber metric")
    lam = tm.lam if lam is None else lam
    if lam is None:
        lam = derive_lambda(tm)
    if n % 2:
        n += 1
    (r0, r1), (t0, t1) = tm.domain
    areas = [0.0, 0.0]
    for coord in (0, 1):
        for value in tm.domain[coord]:
            lo, hi = tm.domain[1 - coord]
            t = np.linspace(lo, hi, n + 1)
            v = np.full_like(t, value)
            X, Y = (v, t) if coord == 0 else (t, v)
            h11, _, h22 = tm.h_stack(X, Y)
            A, B = tm.base_stack(X, Y)
            ds = np.sqrt(B if coord == 0 else A)
            if float(simpson(ds, x=t)) < 1e-12:
                continue  # side collapsed to a point
            f1, f2 = np.sqrt(np.abs(h11)), np.sqrt(np.abs(h22))
            mid = len(t) // 2
            if f1[mid] < 1e-12 <= f2[mid]:
                areas[0] += 2 * math.pi * float(simpson(f2 * ds, x=t))
            elif f2[mid] < 1e-12 <= f1[mid]:
                areas[1] += 2 * math.pi * float(simpson(f1 * ds, x=t))
    r = np.linspace(r0, r1, n + 1)
    t = np.linspace(t0, t1, n + 1)
    X, Y = np.meshgrid(r, t, indexing="ij")
    h11, _, h22 = tm.h_stack(X, Y)
    A, B = tm.base_stack(X, Y)
    dens = np.sqrt(np.abs(h11 * h22) * A * B)
    vol = (2 * math.pi) ** 2 * float(simpson(simpson(dens, x=t, axis=1), x=r))
    a, b = 2 * math.pi * areas[0], 2 * math.pi * areas[1]
    lv = lam * vol
    err = max(abs(a - lv), abs(b - lv), abs(a - b)) / abs(lv)
    return BoltIdentity(a, b, lv, err)
