"""Non-Kaehler Hermitian cohomogeneity-one constructions.

Fibers carry A_j(x) of degree 1 or 2 and a torsion constant b_j.  When
sum d_j mu_j = 0 the scalar curvature equation integrates exactly as in
the Kaehler case: h = P/Q with Q = prod A_j^{d_j/2}.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .cohom1 import positivity_certificate
from .exactalg import (
    Poly,
    RatFunc,
    SignCertificate,
    mat_solve,
    poly_double_antiderivative,
    q_str,
    to_q,
)

X = Poly.x()


class ProfileError(ValueError):
    pass


@dataclass(frozen=True)
class FiberProfile:
    entries: tuple  # (d, A Poly, b)

    @classmethod
    def make(cls, entries) -> "FiberProfile":
        out = []
        for d, A, b in entries:
            d = int(d)
            if d < 2 or d % 2:
                raise ProfileError("fiber dimensions must be even and >= 2")
            A = A if isinstance(A, Poly) else Poly(A)
            if A.deg not in (1, 2):
                raise ProfileError("A_j must have degree 1 or 2")
            b = to_q(b)
            if A.deg == 1 and A.coeff(1) != b:
                raise ProfileError("linear entries need A_j = b_j x + a_j")
            out.append((d, A, b))
        return cls(tuple(out))

    @classmethod
    def parse(cls, text: str) -> "FiberProfile":
        """Grammar: "d=2,quad(e,l,t),b=1;d=2,lin(b,a)"."""
        entries = []
        for chunk in text.split(";"):
            chunk = chunk.strip()
            if not chunk:
                continue
            m_d = re.search(r"d\s*=\s*(\d+)", chunk)
            m_q = re.search(r"quad\(([^)]*)\)", chunk)
            m_l = re.search(r"lin\(([^)]*)\)", chunk)
            m_b = re.search(r"(?<![a-z])b\s*=\s*([-+0-9/]+)", chunk)
            if not m_d or not (m_q or m_l):
                raise ProfileError(f"cannot parse profile entry {chunk!r}")
            d = int(m_d.group(1))
            if m_q:
                e, l, t = (to_q(v) for v in m_q.group(1).split(","))
                if not m_b:
                    raise ProfileError("quadratic entries need b=...")
                entries.append((d, Poly([t, l, e]), to_q(m_b.group(1))))
            else:
                b, a = (to_q(v) for v in m_l.group(1).split(","))
                entries.append((d, Poly([a, b]), b))
        return cls.make(entries)

    def Q(self) -> Poly:
        q = Poly([1])
        for d, A, _ in self.entries:
            q = q * A ** (d // 2)
        return q

    def sigma_Q(self) -> Poly:
        Q = self.Q()
        out = Poly()
        for d, A, _ in self.entries:
            out = out + Q.exact_div(A) * d
        return out

    def to_json(self):
        return [{"d": d, "A": A.to_json(), "b": q_str(b)} for d, A, b in self.entries]


def mu_invariant(entry) -> RatFunc:
    """mu = 2A''/A - (A'/A)^2 + b^2/A^2 for one entry (d, A, b)."""
    _, A, b = entry
    A = A if isinstance(A, Poly) else Poly(A)
    b = to_q(b)
    Ar = RatFunc(A)
    r1 = RatFunc(A.deriv()) / Ar
    return RatFunc(A.deriv(2) * 2) / Ar - r1 * r1 + RatFunc(Poly([b * b])) / (Ar * Ar)


def mu_sum(profile: FiberProfile) -> RatFunc:
    out = RatFunc(0)
    for ent in profile.entries:
        out = out + mu_invariant(ent) * ent[0]
    return out


def quadratic_solution(e, c, b) -> Poly:
    """A = e (x + c)^2 - b^2/(4e), the quadratic family with mu = 0."""
    e, c, b = (to_q(v) for v in (e, c, b))
    return Poly([c, 1]) ** 2 * e - b * b / (4 * e)


def general_h_integration(profile: FiberProfile | None, S, e=0, f=0, s_star: RatFunc | None = None,
                          Q: Poly | None = None) -> RatFunc:
    """h = (1/Q) double-integral of (sum d_j/A_j - S) Q, constants (e, f) at 0.

    With ``s_star`` the fiber sum is replaced by a caller-supplied S*; then
    ``Q`` may be given directly when no profile is supplied.
    """
    S = to_q(S)
    if profile is not None:
        bad = mu_sum(profile)
        if bad != RatFunc(0):
            raise ProfileError(f"sum d_j mu_j = {bad} is not zero")
        Q = profile.Q()
    if Q is None:
        raise ProfileError("need a profile or Q")
    if s_star is None:
        if profile is None:
            raise ProfileError("need a profile or S*")
        lead = profile.sigma_Q()
    else:
        prod = RatFunc.of(s_star) * RatFunc(Q)
        if not prod.is_poly():
            raise ProfileError("S* Q is not a polynomial")
        lead = prod.num
    P = poly_double_antiderivative(lead - Q * S, (e, f))
    return RatFunc(P, Q)


def wang_scalar(profile: FiberProfile, h: RatFunc) -> RatFunc:
    """Scalar curvature of the Hermitian metric from h and the A_j."""
    h = RatFunc.of(h)
    s1 = s2 = s3 = s4 = s0 = RatFunc(0)
    for d, A, b in profile.entries:
        Ar = RatFunc(A)
        r1 = RatFunc(A.deriv()) / Ar
        s1 = s1 + r1 * d
        s2 = s2 + RatFunc(A.deriv(2)) / Ar * d
        s3 = s3 + r1 * r1 * d
        s4 = s4 + RatFunc(Poly([d * b * b])) / (Ar * Ar)
        s0 = s0 + RatFunc(Poly([d])) / Ar
    bracket = -s2 + s3 * Fraction(3, 4) - s1 * s1 * Fraction(1, 4) - s4 * Fraction(1, 4)
    return -h.deriv(2) - h.deriv() * s1 + h * bracket + s0


def _boundary_solve(profile: FiberProfile, conds, S=None):
    """Solve for (S, e, f) or (e, f) from linear boundary conditions.

    ``conds`` are (x, kind, value) with kind "h" (h(x) = value, value 0)
    or "dh" (h'(x) = value).  Requires Q(x) != 0 at those points unless
    the value is 0.
    """
    Q = profile.Q()
    sig = profile.sigma_Q()
    pieces = [poly_double_antiderivative(sig)]
    unknown = []
    if S is None:
        pieces.append(poly_double_antiderivative(-Q))
        unknown.append("S")
    else:
        pieces[0] = poly_double_antiderivative(sig - Q * to_q(S))
    pieces += [X, Poly([1])]
    rows, rhs = [], []
    for x, kind, val in conds:
        x = to_q(x)
        qx = Q(x)
        if kind == "h":
            rows.append([p(x) for p in pieces[1:]])
            rhs.append(-pieces[0](x))
        else:
            # (P/Q)' = (P' Q - P Q')/Q^2 with P(x) = 0 imposed alongside
            if qx == 0:
                rows.append([p.deriv()(x) for p in pieces[1:]])
                rhs.append(-pieces[0].deriv()(x))
            else:
                rows.append([p.deriv()(x) for p in pieces[1:]])
                rhs.append(to_q(val) * qx - pieces[0].deriv()(x))
    sol = mat_solve(rows, rhs)
    P = pieces[0]
    for c, p in zip(sol, pieces[1:]):
        P = P + p * c
    Sval = sol[0] if S is None else to_q(S)
    return RatFunc(P, Q), Sval


@dataclass
class HermitianFamilyMember:
    q: int
    l: Fraction
    b: Fraction
    h: RatFunc
    A1: Poly
    S: Fraction
    valid: bool
    violated: list
    boundary_ok: bool
    positivity: SignCertificate | None

    def to_json(self):
        return {
            "q": self.q,
            "l": q_str(self.l),
            "b": q_str(self.b),
            "h": self.h.to_json(),
            "A1": self.A1.to_json(),
            "S": q_str(self.S),
            "valid": self.valid,
            "violated": self.violated,
            "boundary_ok": self.boundary_ok,
            "positivity": None if self.positivity is None else self.positivity.to_json(),
        }


def hirzebruch_hermitian_family(q: int, l) -> HermitianFamilyMember:
    """Four-dimensional Hermitian family over [-1, 1] with S = 6.

    b = -q/2 and A_1 = 1/2 ((l+b)x + 1)((l-b)x + 1).
    """
    q = int(q)
    l = to_q(l)
    b = Fraction(-q, 2)
    A1 = Poly([1, l + b]) * Poly([1, l - b]) * Fraction(1, 2)
    violated = []
    if not (1 - abs(l) > abs(b)):
        if not (1 - l > abs(b)):
            violated.append("1 - l > |b|")
        if not (1 + l > abs(b)):
            violated.append("1 + l > |b|")
    # built directly: A1 drops to degree 1 when l = +-b, or 0 when l = b = 0
    prof = FiberProfile(((2, A1, b),))
    h, S = _boundary_solve(prof, [(-1, "h", 0), (-1, "dh", 2)], S=6)
    try:
        boundary_ok = h(Fraction(1)) == 0 and h.deriv()(Fraction(1)) == -2
    except ZeroDivisionError:
        boundary_ok = False
    cert = None
    if not violated:
        cert = positivity_certificate(h, -1, 1)
        if cert.verdict != "positive":
            violated.append("h > 0 on (-1, 1)")
    valid = not violated and boundary_ok
    return HermitianFamilyMember(q, l, b, h, A1, Fraction(6), valid, violated, boundary_ok, cert)


@dataclass
class CompactHermitianSolution:
    param: Fraction
    beta: Fraction
    h: RatFunc
    residuals: dict
    positivity: SignCertificate
    profile: FiberProfile

    def to_json(self):
        return {
            "param": q_str(self.param),
            "param_float": float(self.param),
            "beta": float(self.beta),
            "h": self.h.to_json(),
            "residuals": {k: float(v) for k, v in self.residuals.items()},
            "positivity": self.positivity.to_json(),
        }


class NotFoundInRange(ValueError):
    pass


def _right_slope_defect(profile: FiberProfile):
    h, S = _boundary_solve(profile, [(0, "h", 0), (0, "dh", 2), (1, "h", 0)])
    return h.deriv()(Fraction(1)) + 2, h, S


def _profile_ok(profile: FiberProfile) -> bool:
    for _, A, _ in profile.entries:
        cert = positivity_certificate(RatFunc(A), 0, 1)
        if cert.verdict != "positive" or A(Fraction(0)) <= 0 or A(Fraction(1)) <= 0:
            return False
    return True


def solve_compact_hermitian(make_profile: Callable, bracket, scan: int = 64,
                            tol: float = 1e-12, max_iter: int = 200) -> CompactHermitianSolution:
    """Find the free parameter t with h'(1) = -2 on [0, 1].

    ``make_profile(t)`` returns the FiberProfile for a rational t.  The
    constants (S, e, f) are fixed exactly by h(0) = 0, h'(0) = 2, h(1) = 0;
    the remaining defect h'(1) + 2 is bisected in t.
    """
    lo, hi = (to_q(v) for v in bracket)
    grid = [lo + (hi - lo) * Fraction(k, scan) for k in range(scan + 1)]
    prev = None
    found = None
    for t in grid:
        prof = make_profile(t)
        if mu_sum(prof) != RatFunc(0):
            raise ProfileError("profile violates sum d_j mu_j = 0")
        if not _profile_ok(prof):
            prev = None
            continue
        try:
            F, _, _ = _right_slope_defect(prof)
        except ZeroDivisionError:
            prev = None
            continue
        if F == 0:
            found = (t, t)
            break
        if prev is not None and (prev[1] < 0) != (F < 0):
            found = (prev[0], t)
            break
        prev = (t, F)
    if found is None:
        raise NotFoundInRange("no sign change of h'(1)+2 in the scanned range")
    a, b = found
    Fa = _right_slope_defect(make_profile(a))[0]
    t = a
    for _ in range(max_iter):
        t = (a + b) / 2
        t = Fraction(t).limit_denominator(10 ** 30) if t.denominator > 10 ** 40 else t
        F, _, _ = _right_slope_defect(make_profile(t))
        if abs(F) < tol or a == b:
            break
        if (F < 0) == (Fa < 0):
            a, Fa = t, F
        else:
            b = t
    prof = make_profile(t)
    F, h, S = _right_slope_defect(prof)
    res = {
        "h(0)": h(Fraction(0)),
        "h'(0)-2": h.deriv()(Fraction(0)) - 2,
        "h(1)": h(Fraction(1)),
        "h'(1)+2": F,
    }
    cert = positivity_certificate(h, 0, 1)
    return CompactHermitianSolution(t, S, h, res, cert, prof)


def compact_example_profile(c, e=1):
    """Linear (2, x + c, b = 1) plus quadratic (2, e (x + c_m)^2 - 1/(4e), b = 1)."""
    c = to_q(c)
    e = to_q(e)

    def make(cm):
        return FiberProfile.make([(2, Poly([c, 1]), 1), (2, quadratic_solution(e, cm, 1), 1)])

    return make


def compact_example_bracket(c):
    """Scan range for c_m: the quadratic factor must stay positive on [0, 1]."""
    c = to_q(c)
    return (-6 * c, Fraction(-3, 2) - Fraction(1, 1000))


@dataclass
class NoncompactHermitianSolution:
    h: RatFunc
    beta: Fraction
    accepted: bool
    reason: str
    witness: object = None

    def to_json(self):
        return {"h": self.h.to_json(), "beta": q_str(self.beta), "accepted": self.accepted,
                "reason": self.reason, "witness": self.witness}


def noncompact_hermitian(profile: FiberProfile, beta) -> NoncompactHermitianSolution:
    beta = to_q(beta)
    for j, (d, A, b) in enumerate(profile.entries):
        if A.deg == 2:
            t, l, e = A.coeff(0), A.coeff(1), A.coeff(2)
            if j == 0 and t == 0:
                if l != Fraction(2, d + 2) or e <= 0:
                    raise ProfileError("collapsed first entry needs A = e x^2 + (2/(d+2)) x, e > 0")
            elif not (e > 0 and l > 0 and t > 0):
                raise ProfileError("quadratic entries need e, l, t > 0")
        else:
            if b < 0 or A.coeff(0) <= 0:
                raise ProfileError("linear entries need b >= 0 and a > 0")
    bad = mu_sum(profile)
    if bad != RatFunc(0):
        raise ProfileError(f"sum d_j mu_j = {bad} is not zero")
    h, _ = _boundary_solve(profile, [(0, "h", 0), (0, "dh", 2)], S=beta)
    if beta > 0:
        return NoncompactHermitianSolution(h, beta, False, "P -> -inf",
                                           {"leading_coefficient": q_str(h.num.lc())})
    if all(c >= 0 for c in h.num.c) and all(c >= 0 for c in h.den.c):
        return NoncompactHermitianSolution(h, beta, True, "all coefficients nonnegative")
    cert = positivity_certificate(h, 0, None)
    if cert.verdict == "positive":
        return NoncompactHermitianSolution(h, beta, True, "Sturm positive on (0, inf)")
    return NoncompactHermitianSolution(h, beta, False, "h not positive", cert.to_json())
