"""Cohomogeneity-one fiberwise Kaehler toric metrics.

The base metric is h(x) dx-type data on an interval, the fibers carry
A_j(x) = b_j x + a_j with real dimension d_j.  With Q = V^{1/2} =
prod A_j^{d_j/2} the scalar curvature ODE integrates to
h = P/Q, P'' = (sum d_j/A_j - S) Q.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .exactalg import (
    Poly,
    RatFunc,
    SignCertificate,
    mat_solve,
    poly_double_antiderivative,
    q_str,
    sturm_sign_certificate,
    to_q,
)

X = Poly.x()


class FiberDataError(ValueError):
    pass


class EinsteinInfeasible(ValueError):
    pass


@dataclass(frozen=True)
class FiberData:
    entries: tuple  # (d, b, a)

    @classmethod
    def make(cls, entries) -> "FiberData":
        out = []
        for d, b, a in entries:
            d = int(d)
            if d < 2 or d % 2:
                raise FiberDataError("fiber dimensions must be even and >= 2")
            out.append((d, to_q(b), to_q(a)))
        if not out:
            raise FiberDataError("fiber data needs at least one entry")
        return cls(tuple(out))

    @classmethod
    def parse(cls, text: str) -> "FiberData":
        """Parse "d=2,b=1/2,a=1;d=2,b=-1/2,a=1"."""
        entries = []
        for chunk in text.split(";"):
            chunk = chunk.strip()
            if not chunk:
                continue
            kv = {}
            for part in chunk.split(","):
                k, _, v = part.partition("=")
                kv[k.strip()] = v.strip()
            try:
                entries.append((int(kv["d"]), kv["b"], kv["a"]))
            except KeyError as exc:
                raise FiberDataError(f"missing field {exc} in {chunk!r}") from None
        return cls.make(entries)

    def A(self, j: int) -> Poly:
        _, b, a = self.entries[j]
        return Poly([a, b])

    def Q(self) -> Poly:
        """V^{1/2} = prod A_j^{d_j/2}."""
        q = Poly([1])
        for j, (d, _, _) in enumerate(self.entries):
            q = q * self.A(j) ** (d // 2)
        return q

    def sigma_Q(self) -> Poly:
        """(sum d_j / A_j) Q as a polynomial."""
        Q = self.Q()
        out = Poly()
        for j, (d, _, _) in enumerate(self.entries):
            out = out + Q.exact_div(self.A(j)) * d
        return out

    def to_json(self):
        return [{"d": d, "b": q_str(b), "a": q_str(a)} for d, b, a in self.entries]


def _as_poly(S) -> Poly:
    if isinstance(S, Poly):
        return S
    if isinstance(S, (list, tuple)):
        return Poly(S)
    return Poly([S])


def h_from_scalar(w: FiberData, S, e=0, f=0) -> RatFunc:
    """h = P/Q with P'' = (sum d_j/A_j - S) Q, P'(0) = e, P(0) = f."""
    Q = w.Q()
    P = poly_double_antiderivative(w.sigma_Q() - _as_poly(S) * Q, (e, f))
    return RatFunc(P, Q)


def scalar_of_h(w: FiberData, h: RatFunc) -> RatFunc:
    h = RatFunc.of(h)
    h1, h2 = h.deriv(1), h.deriv(2)
    s1 = RatFunc(0)  # sum d b / A
    s2 = RatFunc(0)  # sum d b^2 / A^2
    s0 = RatFunc(0)  # sum d / A
    for j, (d, b, _) in enumerate(w.entries):
        A = RatFunc(w.A(j))
        s1 = s1 + RatFunc(Poly([d * b])) / A
        s2 = s2 + RatFunc(Poly([d * b * b])) / (A * A)
        s0 = s0 + RatFunc(Poly([d])) / A
    return -h2 - h1 * s1 + h * (s2 * Fraction(1, 2) - s1 * s1 * Fraction(1, 4)) + s0


# ---------------------------------------------------------------------------
# boundary problems


@dataclass
class ExtremalSolution:
    h: RatFunc
    alpha: Fraction
    beta: Fraction
    interval: tuple
    smooth_left: bool
    smooth_right: bool
    positivity: SignCertificate
    special_orbit_types: tuple
    fiber: FiberData = None

    @property
    def S(self) -> Poly:
        return Poly([self.beta, self.alpha])

    def to_json(self) -> dict:
        return {
            "h": self.h.to_json(),
            "alpha": q_str(self.alpha),
            "beta": q_str(self.beta),
            "interval": [q_str(v) for v in self.interval],
            "smooth_left": self.smooth_left,
            "smooth_right": self.smooth_right,
            "special_orbit_types": list(self.special_orbit_types),
            "positivity": self.positivity.to_json(),
        }


def _collapsing(w: FiberData, x) -> list[int]:
    return [j for j in range(len(w.entries)) if w.A(j)(x) == 0]


def _orbit_type(w: FiberData, x) -> str:
    col = _collapsing(w, x)
    if not col:
        return "S1-collapse"
    k = sum(w.entries[j][0] for j in col) // 2 + 1
    return f"CP^{k}-collapse"


def _check_fibers_positive(w: FiberData, x0, x1):
    for j in range(len(w.entries)):
        A = w.A(j)
        v0, v1 = A(x0), A(x1)
        if v0 < 0 or v1 < 0 or (v0 == 0 and v1 == 0):
            raise FiberDataError(f"A_{j + 1} is not positive on the interval")


def _fold_constant_entries(w: FiberData):
    """Drop b = 0 entries; their d/a shifts beta (beta_bar = beta - sum d/a)."""
    keep = tuple(e for e in w.entries if e[1] != 0)
    shift = sum((Fraction(d) / a for d, b, a in w.entries if b == 0), Fraction(0))
    return (FiberData(keep) if keep else None), shift


def _boundary_rows(Q: Poly, pieces, x, slope):
    """Linear rows for P(x) = 0 and P'(x) = slope*Q(x), or P = P' = 0 if Q(x) = 0."""
    rows = []
    vals = [p(x) for p in pieces]
    ders = [p.deriv()(x) for p in pieces]
    qx = Q(x)
    rows.append((vals[1:], -vals[0]))
    rows.append((ders[1:], (slope * qx if qx != 0 else 0) - ders[0]))
    return rows


def _smooth_at(h: RatFunc, x, slope) -> bool:
    try:
        return h(x) == 0 and h.deriv()(x) == slope
    except ZeroDivisionError:
        return False


def positivity_certificate(h: RatFunc, x0, x1) -> SignCertificate:
    """Sturm certificate that num*den > 0 on the open interval."""
    lo = None if x0 is None else to_q(x0)
    hi = None if x1 is None else to_q(x1)
    return sturm_sign_certificate(h.num * h.den, (lo, hi), (True, True))


def solve_compact_extremal(w: FiberData, interval=(-1, 1)) -> ExtremalSolution:
    x0, x1 = (to_q(v) for v in interval)
    if x0 >= x1:
        raise ValueError("empty interval")
    _check_fibers_positive(w, x0, x1)
    wf, shift = _fold_constant_entries(w)
    if wf is None:
        Q, sig = Poly([1]), Poly()
    else:
        Q, sig = wf.Q(), wf.sigma_Q()
    # P = G0 + alpha*Ga + beta_bar*Gb + e*x + f
    pieces = [
        poly_double_antiderivative(sig),
        poly_double_antiderivative(-X * Q),
        poly_double_antiderivative(-Q),
        X,
        Poly([1]),
    ]
    rows = _boundary_rows(Q, pieces, x0, 2) + _boundary_rows(Q, pieces, x1, -2)
    try:
        al, bb, e, f = mat_solve([r for r, _ in rows], [v for _, v in rows])
    except ZeroDivisionError:
        raise ValueError("singular boundary system") from None
    P = pieces[0] + pieces[1] * al + pieces[2] * bb + pieces[3] * e + pieces[4] * f
    h = RatFunc(P, Q)
    cert = positivity_certificate(h, x0, x1)
    return ExtremalSolution(
        h=h,
        alpha=al,
        beta=bb + shift,
        interval=(x0, x1),
        smooth_left=_smooth_at(h, x0, 2),
        smooth_right=_smooth_at(h, x1, -2),
        positivity=cert,
        special_orbit_types=(_orbit_type(w, x0), _orbit_type(w, x1)),
        fiber=w,
    )


def special_orbit_conditions(w: FiberData, endpoint, collapsing_set=()) -> dict:
    """Smoothness requirements for fibers collapsing at an endpoint.

    With k - 1 = sum d_j over the collapsing set the requirement is
    sum d_j/|b_j| = (k^2 - 1)/2 (for one entry: |b| = 2/(d+2)).
    """
    x = to_q(endpoint)
    idx = list(collapsing_set)
    for j in idx:
        if w.A(j)(x) != 0:
            raise FiberDataError(f"entry {j} does not vanish at {x}")
    req = ["h(x)=0", "|h'(x)|=2"]
    if not idx:
        return {"endpoint": q_str(x), "requirements": req, "satisfied": True, "collapsing": []}
    ds = [w.entries[j][0] for j in idx]
    bs = [abs(w.entries[j][1]) for j in idx]
    k = sum(ds) + 1
    lhs = sum((Fraction(d) / b for d, b in zip(ds, bs)), Fraction(0))
    rhs = Fraction(k * k - 1, 2)
    req.append(f"sum d_j/|b_j| = {q_str(rhs)}")
    ok = lhs == rhs
    if len(idx) == 1:
        need = Fraction(2, ds[0] + 2)
        req.append(f"|b| = {q_str(need)}")
        ok = ok and bs[0] == need
    return {
        "endpoint": q_str(x),
        "collapsing": idx,
        "requirements": req,
        "satisfied": ok,
        "value": q_str(lhs),
    }


# ---------------------------------------------------------------------------
# symbolic-parameter CSC locus (sympy)


def _sym_solution(entries, interval):
    import sympy as sp

    x, al, be, e, f = sp.symbols("x alpha beta e f")
    x0, x1 = (sp.Rational(str(to_q(v))) for v in interval)
    Q = sp.Integer(1)
    sig = sp.Integer(0)
    for d, b, a in entries:
        A = b * x + a
        Q *= A ** (d // 2)
    for d, b, a in entries:
        A = b * x + a
        sig += d * sp.cancel(Q / A)
    integrand = sp.expand(sig - (al * x + be) * Q)
    P = sp.integrate(sp.integrate(integrand, (x, 0, x)), (x, 0, x)) + e * x + f
    dP = sp.diff(P, x)
    eqs = []
    for pt, slope in ((x0, 2), (x1, -2)):
        qv = sp.simplify(Q.subs(x, pt))
        eqs.append(P.subs(x, pt))
        eqs.append(dP.subs(x, pt) - (slope * qv if qv != 0 else 0))
    sol = sp.solve(eqs, [al, be, e, f], dict=True)
    if not sol:
        raise ValueError("singular boundary system")
    return sp.factor(sol[0][al]), sp.factor(sol[0][be])


def csc_locus(entries, interval=(-1, 1), params=None, samples=(3, 5, 7, 11)) -> dict:
    """alpha(params) and its vanishing set for fiber data with symbolic entries.

    ``entries`` are (d, b, a) with b, a sympy expressions or strings in at
    most two parameter symbols.
    """
    import sympy as sp

    ents = []
    for d, b, a in entries:
        ents.append((int(d), sp.sympify(b), sp.sympify(a)))
    syms = sorted(set().union(*[b.free_symbols | a.free_symbols for _, b, a in ents]), key=str)
    if params is not None:
        syms = [sp.Symbol(p) if isinstance(p, str) else p for p in params]
    if len(syms) > 2:
        raise ValueError("more than two parameters unsupported")
    alpha, beta = _sym_solution(ents, interval)
    out = {
        "params": [str(s) for s in syms],
        "alpha": str(alpha),
        "beta": str(beta),
        "alpha_expr": alpha,
        "beta_expr": beta,
    }
    if alpha == 0:
        out.update(identically_zero=True, factors=[], feasible_factors=[], csc_exists=True)
        return out
    num, _ = sp.fraction(sp.together(alpha))
    factors = [fac for fac, _ in sp.factor_list(num)[1] if fac.free_symbols]
    comps = []
    for fac in factors:
        feasible_pts = []
        tried = []
        if len(syms) == 1:
            cands = [{syms[0]: r} for r in sp.solve(fac, syms[0])]
        else:
            cands = []
            for s in samples:
                for val in (sp.Rational(s, 2), sp.Rational(2, s)):
                    for r in sp.solve(fac.subs(syms[0], val), syms[1]):
                        cands.append({syms[0]: val, syms[1]: r})
        for sub in cands:
            if not all(v.is_rational for v in sub.values()):
                continue
            tried.append({str(k): str(v) for k, v in sub.items()})
            try:
                w = FiberData.make([(d, str(b.subs(sub)), str(a.subs(sub))) for d, b, a in ents])
                if _strictly_feasible(w, interval):
                    feasible_pts.append({str(k): str(v) for k, v in sub.items()})
            except (FiberDataError, ValueError, ZeroDivisionError):
                pass
        comps.append({"factor": str(fac), "samples": tried, "feasible_samples": feasible_pts,
                      "feasible": bool(feasible_pts)})
    out.update(
        identically_zero=False,
        factors=[c["factor"] for c in comps],
        components=comps,
        feasible_factors=[c["factor"] for c in comps if c["feasible"]],
        csc_exists=any(c["feasible"] for c in comps),
    )
    return out


def _strictly_feasible(w: FiberData, interval) -> bool:
    x0, x1 = (to_q(v) for v in interval)
    for j in range(len(w.entries)):
        A = w.A(j)
        if A(x0) <= 0 or A(x1) <= 0:
            return False
    sol = solve_compact_extremal(w, interval)
    return sol.positivity.verdict == "positive" and sol.smooth_left and sol.smooth_right


# ---------------------------------------------------------------------------
# Einstein, noncompact, Futaki


@dataclass
class EinsteinSolution:
    h: RatFunc
    D: Fraction
    lam: Fraction
    interval: tuple
    smooth_left: bool
    smooth_right: bool

    def to_json(self):
        return {
            "h": self.h.to_json(),
            "D": q_str(self.D),
            "lambda": q_str(self.lam),
            "interval": [q_str(v) for v in self.interval],
            "smooth_left": self.smooth_left,
            "smooth_right": self.smooth_right,
        }


def einstein_h(w: FiberData, lam, interval=(-1, 1)) -> EinsteinSolution:
    """h = (2/Q) int_{x0}^x (D - lam t) Q dt with D = (1 - lam a_i)/b_i."""
    lam = to_q(lam)
    x0, x1 = (to_q(v) for v in interval)
    Ds = set()
    for d, b, a in w.entries:
        if b == 0:
            if 1 != lam * a:
                raise EinsteinInfeasible(f"b=0 entry needs 1 = lambda*a, got lambda*a = {lam * a}")
        else:
            Ds.add((1 - lam * a) / b)
    if len(Ds) > 1:
        raise EinsteinInfeasible(f"inconsistent (1 - lambda a_i)/b_i values {sorted(Ds)}")
    Q = w.Q()
    F = (Poly.x() * Q * (-lam)).antideriv()
    G = Q.antideriv()
    if Ds:
        D = Ds.pop()
    else:
        # D is free: close the interval, int_{x0}^{x1} (D - lam t) Q = 0
        gq = G(x1) - G(x0)
        if gq == 0:
            raise EinsteinInfeasible("cannot fix D")
        D = -(F(x1) - F(x0)) / gq
    integral = G * D + F
    integral = integral - integral(x0)
    h = RatFunc(integral * 2, Q)
    return EinsteinSolution(h, D, lam, (x0, x1), _smooth_at(h, x0, 2), _smooth_at(h, x1, -2))


@dataclass
class NoncompactSolution:
    h: RatFunc
    beta: Fraction
    accepted: bool
    reason: str
    witness: object = None
    orbit_type: str = ""

    def to_json(self):
        return {
            "h": self.h.to_json(),
            "beta": q_str(self.beta),
            "accepted": self.accepted,
            "reason": self.reason,
            "witness": self.witness,
            "orbit_type": self.orbit_type,
        }


def _left_smooth_P(Q: Poly, base: Poly) -> Poly:
    """Add e x + f to base so that h = P/Q is smooth at x = 0."""
    q0 = Q(Fraction(0))
    f = -base(Fraction(0))
    e = (2 * q0 if q0 != 0 else 0) - base.deriv()(Fraction(0))
    return base + Poly([f, e])


def noncompact_csc(w: FiberData, beta) -> NoncompactSolution:
    beta = to_q(beta)
    for j, (d, b, a) in enumerate(w.entries):
        if b < 0:
            raise FiberDataError("noncompact solutions need b_j >= 0")
        if a <= 0:
            if a == 0 and j == 0:
                rep = special_orbit_conditions(w, 0, [0])
                if not rep["satisfied"]:
                    raise FiberDataError("collapsed first entry violates smoothness")
            else:
                raise FiberDataError("noncompact solutions need a_j > 0")
    Q = w.Q()
    base = poly_double_antiderivative(w.sigma_Q() - Q * beta)
    P = _left_smooth_P(Q, base)
    h = RatFunc(P, Q)
    otype = _orbit_type(w, 0)
    if beta > 0:
        return NoncompactSolution(h, beta, False, "P -> -inf", {"leading_coefficient": q_str(P.lc())}, otype)
    if all(c >= 0 for c in P.c) and all(c >= 0 for c in Q.c):
        return NoncompactSolution(h, beta, True, "all coefficients nonnegative", None, otype)
    cert = positivity_certificate(h, 0, None)
    if cert.verdict == "positive":
        return NoncompactSolution(h, beta, True, "Sturm positive on (0, inf)", None, otype)
    return NoncompactSolution(h, beta, False, "h not positive", cert.to_json(), otype)


def futaki_fiberwise(w: FiberData, interval=(-1, 1)) -> Fraction:
    """int_{x0}^{x1} x V^{1/2} dx."""
    x0, x1 = (to_q(v) for v in interval)
    return (Poly.x() * w.Q()).integrate(x0, x1)


# ---------------------------------------------------------------------------
# named families


def hirzebruch_fiber(b, a) -> FiberData:
    return FiberData.make([(2, b, a)])


def blowup_fiber(a) -> FiberData:
    """Fiber data of the one-point blowup polytope {1+x,1+y,a-x-y,1-x} over x."""
    a = to_q(a)
    return FiberData.make([(2, Fraction(-1, 2), (a + 1) / 2)])


def sixdim_fiber(a, c) -> FiberData:
    """Fiber data of the six-dimensional polytope with facets a-x-y, c+x-z."""
    a, c = to_q(a), to_q(c)
    return FiberData.make([(2, Fraction(-1, 2), (a + 1) / 2), (2, Fraction(1, 2), (c + 1) / 2)])


SAKANE_FIBER = ((2, Fraction(1, 2), 1), (2, Fraction(-1, 2), 1))


def sakane_fiber() -> FiberData:
    return FiberData.make(SAKANE_FIBER)


def toric_fxx_from_h(h: RatFunc, w: FiberData) -> RatFunc:
    """Correction f_xx of a toric potential whose base h comes from fiber data.

    Each fiber facet contributes (d_j/2) b_j^2 / A_j to the base Hessian
    entry, and the interval [-1,1] contributes 1/(1-x^2).
    """
    out = 1 / RatFunc.of(h) - RatFunc(1, Poly([1, 0, -1]))
    for j, (d, b, _) in enumerate(w.entries):
        out = out - RatFunc(Poly([Fraction(d, 2) * b * b]), w.A(j))
    return out
