"""Exact rational, polynomial and rational-function arithmetic.

Rationals are ``fractions.Fraction``. ``Poly`` stores coefficients lowest
degree first. ``RatFunc`` is kept gcd-reduced with a monic denominator so
equality is structural. ``MPoly``/``MultiRatFunc`` cover the multivariate
entries of potential Hessians.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

Q = Fraction


def to_q(v) -> Fraction:
    """Coerce ints, Fractions and "p/q" strings to Fraction."""
    if isinstance(v, Fraction):
        return v
    if isinstance(v, bool):
        raise TypeError("bool is not a rational")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v.strip())
    if isinstance(v, float):
        raise TypeError("floats are not accepted as exact rationals")
    # sympy Rational and friends
    try:
        return Fraction(int(v.p), int(v.q))
    except AttributeError:
        raise TypeError(f"cannot convert {v!r} to a rational") from None


def q_str(v: Fraction) -> str:
    v = to_q(v)
    return f"{v.numerator}/{v.denominator}"


# ---------------------------------------------------------------------------
# univariate polynomials


class Poly:
    __slots__ = ("c",)

    def __init__(self, coeffs: Iterable = ()):
        c = [to_q(a) for a in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.c = tuple(c)

    @classmethod
    def x(cls) -> "Poly":
        return cls([0, 1])

    @classmethod
    def const(cls, a) -> "Poly":
        return cls([a])

    @property
    def deg(self) -> int:
        return len(self.c) - 1

    def is_zero(self) -> bool:
        return not self.c

    def lc(self) -> Fraction:
        return self.c[-1] if self.c else Fraction(0)

    def coeff(self, k: int) -> Fraction:
        return self.c[k] if 0 <= k < len(self.c) else Fraction(0)

    def __call__(self, x):
        if isinstance(x, float):
            acc = 0.0
            for a in reversed(self.c):
                acc = acc * x + float(a)
            return acc
        acc = Fraction(0)
        for a in reversed(self.c):
            acc = acc * x + a
        return acc

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly([other])
        return isinstance(other, Poly) and self.c == other.c

    def __hash__(self):
        return hash(self.c)

    def __repr__(self):
        return f"Poly([{', '.join(str(a) for a in self.c)}])"

    def __str__(self):
        if not self.c:
            return "0"
        terms = []
        for k, a in enumerate(self.c):
            if a == 0:
                continue
            mono = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
            if mono and a == 1:
                terms.append(mono)
            elif mono and a == -1:
                terms.append("-" + mono)
            elif mono:
                terms.append(f"({a})*{mono}")
            else:
                terms.append(f"({a})")
        return " + ".join(terms)

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            return other
        return Poly([other])

    def __add__(self, other):
        if isinstance(other, RatFunc):
            return NotImplemented
        o = self._coerce(other)
        n = max(len(self.c), len(o.c))
        return Poly([self.coeff(k) + o.coeff(k) for k in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return Poly([-a for a in self.c])

    def __sub__(self, other):
        if isinstance(other, RatFunc):
            return NotImplemented
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, RatFunc):
            return NotImplemented
        o = self._coerce(other)
        if not self.c or not o.c:
            return Poly()
        out = [Fraction(0)] * (len(self.c) + len(o.c) - 1)
        for i, a in enumerate(self.c):
            if a == 0:
                continue
            for j, b in enumerate(o.c):
                out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power of a polynomial")
        out = Poly([1])
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return Poly([a / to_q(other) for a in self.c])
        return RatFunc(self, other)

    def __rtruediv__(self, other):
        return RatFunc(other, self)

    def divmod(self, other: "Poly"):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.c)
        dq = len(r) - len(other.c)
        if dq < 0:
            return Poly(), self
        q = [Fraction(0)] * (dq + 1)
        lead = other.c[-1]
        for k in range(dq, -1, -1):
            t = r[k + len(other.c) - 1] / lead
            q[k] = t
            if t:
                for j, b in enumerate(other.c):
                    r[k + j] -= t * b
        return Poly(q), Poly(r[: len(other.c) - 1])

    def __floordiv__(self, other):
        return self.divmod(self._coerce(other))[0]

    def __mod__(self, other):
        return self.divmod(self._coerce(other))[1]

    def exact_div(self, other: "Poly") -> "Poly":
        q, r = self.divmod(other)
        if not r.is_zero():
            raise ArithmeticError("polynomial division is not exact")
        return q

    def monic(self) -> "Poly":
        if not self.c:
            return self
        return self / self.c[-1]

    def deriv(self, order: int = 1) -> "Poly":
        c = list(self.c)
        for _ in range(order):
            c = [k * c[k] for k in range(1, len(c))]
        return Poly(c)

    def antideriv(self, const=0) -> "Poly":
        return Poly([to_q(const)] + [a / (k + 1) for k, a in enumerate(self.c)])

    def compose(self, other: "Poly") -> "Poly":
        acc = Poly()
        for a in reversed(self.c):
            acc = acc * other + a
        return acc

    def shift(self, t) -> "Poly":
        """p(x + t)."""
        return self.compose(Poly([t, 1]))

    def integrate(self, lo, hi) -> Fraction:
        F = self.antideriv()
        return F(to_q(hi)) - F(to_q(lo))

    def to_json(self) -> list[str]:
        return [q_str(a) for a in self.c]


def poly_gcd(a: Poly, b: Poly) -> Poly:
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def poly_double_antiderivative(p: Poly, constants=(0, 0)) -> Poly:
    """Return F with F'' = p, F'(0) = e, F(0) = f for constants (e, f)."""
    e, f = (to_q(v) for v in constants)
    return p.antideriv(e).antideriv(f)


# ---------------------------------------------------------------------------
# rational functions


class RatFunc:
    __slots__ = ("num", "den")

    def __init__(self, num, den=1):
        num = num if isinstance(num, Poly) else Poly([num])
        den = den if isinstance(den, Poly) else Poly([den])
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            self.num, self.den = Poly(), Poly([1])
            return
        g = poly_gcd(num, den)
        if g.deg > 0:
            num, den = num.exact_div(g), den.exact_div(g)
        lead = den.lc()
        self.num, self.den = num / lead, den / lead

    @classmethod
    def of(cls, v) -> "RatFunc":
        return v if isinstance(v, RatFunc) else cls(v)

    def __call__(self, x):
        d = self.den(x)
        if d == 0:
            raise ZeroDivisionError(f"pole at {x}")
        return self.num(x) / d

    def __eq__(self, other):
        if not isinstance(other, RatFunc):
            try:
                other = RatFunc.of(other)
            except TypeError:
                return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        return f"RatFunc({self.num!r}, {self.den!r})"

    def __str__(self):
        if self.den == Poly([1]):
            return str(self.num)
        return f"({self.num})/({self.den})"

    def __add__(self, other):
        o = RatFunc.of(other)
        return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den)

    def __sub__(self, other):
        return self + (-RatFunc.of(other))

    def __rsub__(self, other):
        return RatFunc.of(other) - self

    def __mul__(self, other):
        o = RatFunc.of(other)
        return RatFunc(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = RatFunc.of(other)
        return RatFunc(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        return RatFunc.of(other) / self

    def __pow__(self, k: int):
        if k >= 0:
            return RatFunc(self.num ** k, self.den ** k)
        return RatFunc(self.den ** (-k), self.num ** (-k))

    def is_poly(self) -> bool:
        return self.den.deg == 0

    def deriv(self, order: int = 1) -> "RatFunc":
        r = self
        for _ in range(order):
            r = RatFunc(r.num.deriv() * r.den - r.num * r.den.deriv(), r.den * r.den)
        return r

    def to_json(self) -> dict:
        return {"num": self.num.to_json(), "den": self.den.to_json()}


def ratfunc_derivative(r: RatFunc, order: int = 1) -> RatFunc:
    if order < 1:
        raise ValueError("order must be >= 1")
    return RatFunc.of(r).deriv(order)


# ---------------------------------------------------------------------------
# Sturm sequences


def sturm_sequence(p: Poly) -> list[Poly]:
    seq = [p, p.deriv()]
    while not seq[-1].is_zero():
        seq.append(-(seq[-2] % seq[-1]))
    return seq[:-1]


def _sign(v) -> int:
    return (v > 0) - (v < 0)


def _variations(signs: Sequence[int]) -> int:
    s = [v for v in signs if v != 0]
    return sum(1 for a, b in zip(s, s[1:]) if a != b)


def _var_at(seq: list[Poly], x) -> int:
    return _variations([_sign(q(x)) for q in seq])


def _var_inf(seq: list[Poly], positive: bool) -> int:
    signs = []
    for q in seq:
        s = _sign(q.lc())
        if not positive and q.deg % 2 == 1:
            s = -s
        signs.append(s)
    return _variations(signs)


def cauchy_bound(p: Poly) -> Fraction:
    lc = abs(p.lc())
    return 1 + max((abs(a) / lc for a in p.c[:-1]), default=Fraction(0))


def squarefree(p: Poly) -> Poly:
    g = poly_gcd(p, p.deriv())
    return p.exact_div(g) if g.deg > 0 else p


def count_roots_open(p: Poly, lo, hi, seq=None) -> int:
    """Number of distinct real roots of squarefree p in the open interval (lo, hi).

    ``lo``/``hi`` may be ``None`` for -inf/+inf.  Endpoints may be roots:
    with zeros dropped the variation count at a root equals the count just
    to its right, so one is subtracted when the right endpoint is a root.
    """
    seq = seq or sturm_sequence(p)
    vlo = _var_inf(seq, False) if lo is None else _var_at(seq, lo)
    if hi is None:
        vhi = _var_inf(seq, True)
    else:
        vhi = _var_at(seq, hi) + (1 if p(hi) == 0 else 0)
    return vlo - vhi


@dataclass(frozen=True)
class RootInterval:
    lo: Fraction
    hi: Fraction

    @property
    def exact(self) -> bool:
        return self.lo == self.hi

    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def to_json(self):
        return [q_str(self.lo), q_str(self.hi)]


def isolate_roots(p: Poly, lo, hi, width=Fraction(1, 10 ** 6)) -> list[RootInterval]:
    """Isolate the distinct real roots of p in the open interval (lo, hi).

    Each root is returned as a closed rational interval of width < ``width``
    (degenerate when the root is rational and hit exactly).
    """
    if p.is_zero():
        raise ValueError("indeterminate sign")
    q = squarefree(p)
    if q.deg <= 0:
        return []
    B = cauchy_bound(q)
    lo = -B if lo is None else max(to_q(lo), -B)
    hi = B if hi is None else min(to_q(hi), B)
    if lo >= hi:
        return []
    seq = sturm_sequence(q)
    out: list[RootInterval] = []
    stack = [(lo, hi)]
    while stack:
        a, b = stack.pop()
        n = count_roots_open(q, a, b, seq)
        if n == 0:
            continue
        if n == 1 and b - a < width:
            out.append(RootInterval(a, b))
            continue
        m = (a + b) / 2
        if q(m) == 0:
            out.append(RootInterval(m, m))
        stack.append((m, b))
        stack.append((a, m))
    out.sort(key=lambda r: r.lo)
    return out


@dataclass
class SignCertificate:
    verdict: str  # "positive" | "nonnegative-with-roots" | "fails"
    roots: list[RootInterval]
    witness: object = None  # a point where p < 0, or a root across which p changes sign
    interval: tuple = (None, None)

    @property
    def ok(self) -> bool:
        return self.verdict != "fails"

    def to_json(self) -> dict:
        w = self.witness
        if isinstance(w, RootInterval):
            w = {"root": w.to_json()}
        elif w is not None:
            w = {"point": q_str(w)}
        return {
            "verdict": self.verdict,
            "roots": [r.to_json() for r in self.roots],
            "witness": w,
        }


def sturm_sign_certificate(p: Poly, interval=(None, None), openness=(False, False)) -> SignCertificate:
    """Exact sign certificate for p on an interval.

    ``interval`` entries may be None for an infinite end; ``openness`` marks
    which finite ends are excluded.  The verdict is "positive" when p > 0 on
    the set, "nonnegative-with-roots" when p >= 0 with isolated zeros, and
    "fails" otherwise, with a witness point where p < 0.
    """
    if p.is_zero():
        raise ValueError("indeterminate sign")
    lo, hi = interval
    lo = None if lo is None else to_q(lo)
    hi = None if hi is None else to_q(hi)
    if lo is not None and hi is not None and lo > hi:
        raise ValueError("empty interval")
    if lo is not None and hi is not None and lo == hi:
        v = p(lo)
        if openness[0] or openness[1]:
            raise ValueError("empty interval")
        if v > 0:
            return SignCertificate("positive", [], None, (lo, hi))
        if v == 0:
            return SignCertificate("nonnegative-with-roots", [RootInterval(lo, lo)], None, (lo, hi))
        return SignCertificate("fails", [], lo, (lo, hi))

    inner = isolate_roots(p, lo, hi)
    roots = list(inner)
    if lo is not None and not openness[0] and p(lo) == 0:
        roots.insert(0, RootInterval(lo, lo))
    if hi is not None and not openness[1] and p(hi) == 0:
        roots.append(RootInterval(hi, hi))

    # one sample point in every root-free gap of the open interval
    B = cauchy_bound(p) + 1
    left = lo if lo is not None else -B
    right = hi if hi is not None else B
    cuts = [left] + [x for r in inner for x in (r.lo, r.hi)] + [right]
    samples = []
    for a, b in zip(cuts[0::2], cuts[1::2]):
        if a < b:
            samples.append((a + b) / 2)
    # also test the finite closed endpoints themselves
    if lo is not None and not openness[0] and p(lo) != 0:
        samples.append(lo)
    if hi is not None and not openness[1] and p(hi) != 0:
        samples.append(hi)
    for s in samples:
        if p(s) < 0:
            return SignCertificate("fails", roots, s, (lo, hi))
    verdict = "positive" if not roots else "nonnegative-with-roots"
    return SignCertificate(verdict, roots, None, (lo, hi))


# ---------------------------------------------------------------------------
# small exact matrix helpers (n <= 3 in practice)


def mat_zero(n: int, m: int | None = None):
    return [[Fraction(0)] * (n if m is None else m) for _ in range(n)]


def mat_eye(n: int):
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def mat_mul(A, B):
    return [[sum((A[i][k] * B[k][j] for k in range(len(B))), Fraction(0))
             for j in range(len(B[0]))] for i in range(len(A))]


def mat_add(A, B, s=1):
    return [[a + s * b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_scale(A, s):
    return [[s * a for a in row] for row in A]


def mat_trace(A):
    return sum((A[i][i] for i in range(len(A))), Fraction(0))


def mat_solve(A, b):
    """Solve A x = b exactly by Gauss-Jordan; b may be a vector or a matrix."""
    n = len(A)
    vec = not isinstance(b[0], (list, tuple))
    B = [[v] for v in b] if vec else [list(r) for r in b]
    M = [list(map(to_q, A[i])) + list(map(to_q, B[i])) for i in range(n)]
    w = len(M[0])
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        M[col], M[piv] = M[piv], M[col]
        inv = 1 / M[col][col]
        M[col] = [v * inv for v in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [a - f * c for a, c in zip(M[r], M[col])]
    X = [row[n:w] for row in M]
    return [r[0] for r in X] if vec else X


def mat_inv(A):
    return mat_solve(A, mat_eye(len(A)))


def mat_det(A) -> Fraction:
    n = len(A)
    M = [list(map(to_q, r)) for r in A]
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            M[col], M[piv] = M[piv], M[col]
            det = -det
        det *= M[col][col]
        for r in range(col + 1, n):
            f = M[r][col] / M[col][col]
            if f:
                M[r] = [a - f * c for a, c in zip(M[r], M[col])]
    return det


def leading_minors(A) -> list[Fraction]:
    return [mat_det([row[:k] for row in A[:k]]) for k in range(1, len(A) + 1)]


def rank_q(rows) -> int:
    """Rank over Q of a list of rational vectors."""
    M = [list(map(to_q, r)) for r in rows if r]
    if not M:
        return 0
    rank, ncol = 0, len(M[0])
    for col in range(ncol):
        piv = next((r for r in range(rank, len(M)) if M[r][col] != 0), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        for r in range(len(M)):
            if r != rank and M[r][col] != 0:
                f = M[r][col] / M[rank][col]
                M[r] = [a - f * c for a, c in zip(M[r], M[rank])]
        rank += 1
    return rank


# ---------------------------------------------------------------------------
# multivariate polynomials and rational functions


class MPoly:
    """Sparse multivariate polynomial: {exponent tuple: Fraction}."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms=None):
        self.n = n
        t = {}
        for e, a in (terms or {}).items():
            a = to_q(a)
            if a != 0:
                e = tuple(e)
                if len(e) != n:
                    raise ValueError("exponent length mismatch")
                t[e] = t.get(e, Fraction(0)) + a
        self.terms = {e: a for e, a in t.items() if a != 0}

    @classmethod
    def const(cls, n, a):
        return cls(n, {(0,) * n: a})

    @classmethod
    def var(cls, n, i):
        e = [0] * n
        e[i] = 1
        return cls(n, {tuple(e): 1})

    @classmethod
    def affine(cls, coeffs, const):
        n = len(coeffs)
        p = cls.const(n, const)
        for i, c in enumerate(coeffs):
            p = p + cls.var(n, i) * to_q(c)
        return p

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        return isinstance(other, MPoly) and self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        return f"MPoly({self.n}, {self.terms})"

    def _c(self, o):
        return o if isinstance(o, MPoly) else MPoly.const(self.n, o)

    def __add__(self, other):
        o = self._c(other)
        t = dict(self.terms)
        for e, a in o.terms.items():
            t[e] = t.get(e, Fraction(0)) + a
        return MPoly(self.n, t)

    __radd__ = __add__

    def __neg__(self):
        return MPoly(self.n, {e: -a for e, a in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._c(other))

    def __rsub__(self, other):
        return self._c(other) - self

    def __mul__(self, other):
        o = self._c(other)
        t: dict = {}
        for e1, a in self.terms.items():
            for e2, b in o.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                t[e] = t.get(e, Fraction(0)) + a * b
        return MPoly(self.n, t)

    __rmul__ = __mul__

    def __pow__(self, k):
        out = MPoly.const(self.n, 1)
        for _ in range(k):
            out = out * self
        return out

    def diff(self, i: int) -> "MPoly":
        t = {}
        for e, a in self.terms.items():
            if e[i]:
                e2 = list(e)
                e2[i] -= 1
                t[tuple(e2)] = a * e[i]
        return MPoly(self.n, t)

    def __call__(self, x):
        acc = Fraction(0)
        for e, a in self.terms.items():
            v = a
            for xi, k in zip(x, e):
                if k:
                    v *= xi ** k
            acc += v
        return acc

    def content(self) -> Fraction:
        """Positive rational g with self/g having coprime integer coefficients."""
        if not self.terms:
            return Fraction(1)
        from math import gcd, lcm

        vals = list(self.terms.values())
        num = 0
        den = 1
        for v in vals:
            num = gcd(num, v.numerator)
            den = lcm(den, v.denominator)
        return Fraction(num, den)


class MultiRatFunc:
    """num/den in variables x1..xn, reduced by rational content."""

    __slots__ = ("num", "den")

    def __init__(self, num: MPoly, den: MPoly | None = None):
        den = den if den is not None else MPoly.const(num.n, 1)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            self.num, self.den = num, MPoly.const(num.n, 1)
            return
        cn, cd = num.content(), den.content()
        # make the leading (lex-max) denominator coefficient positive
        lead = den.terms[max(den.terms)]
        if lead < 0:
            cd = -cd
        self.num = MPoly(num.n, {e: a / cn for e, a in num.terms.items()}) * (cn / cd)
        self.den = MPoly(den.n, {e: a / cd for e, a in den.terms.items()})

    @property
    def n(self):
        return self.num.n

    @classmethod
    def const(cls, n, a):
        return cls(MPoly.const(n, a))

    def __call__(self, x) -> Fraction:
        x = [to_q(v) for v in x]
        d = self.den(x)
        if d == 0:
            raise ZeroDivisionError(f"pole at {x}")
        return self.num(x) / d

    def evalf(self, x) -> float:
        return float(self([Fraction(v) for v in x]))

    def __add__(self, other):
        o = other if isinstance(other, MultiRatFunc) else MultiRatFunc.const(self.n, other)
        if self.den == o.den:
            return MultiRatFunc(self.num + o.num, self.den)
        return MultiRatFunc(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return MultiRatFunc(-self.num, self.den)

    def __sub__(self, other):
        return self + (-other if isinstance(other, MultiRatFunc) else -to_q(other))

    def __mul__(self, other):
        o = other if isinstance(other, MultiRatFunc) else MultiRatFunc.const(self.n, other)
        return MultiRatFunc(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = other if isinstance(other, MultiRatFunc) else MultiRatFunc.const(self.n, other)
        return MultiRatFunc(self.num * o.den, self.den * o.num)

    def diff(self, i: int) -> "MultiRatFunc":
        return MultiRatFunc(
            self.num.diff(i) * self.den - self.num * self.den.diff(i), self.den * self.den
        )

    def jets(self, x, order: int = 2) -> dict:
        """Exact partial derivatives at x, keyed by sorted index tuples, up to ``order``."""
        out = {(): self(x)}
        frontier = {(): self}
        for _ in range(order):
            nxt = {}
            for key, f in frontier.items():
                start = key[-1] if key else 0
                for i in range(start, self.n):
                    g = f.diff(i)
                    k2 = key + (i,)
                    nxt[k2] = g
                    out[k2] = g(x)
            frontier = nxt
        return out


def parse_multi_ratfunc(text: str, n: int) -> MultiRatFunc:
    """Parse a rational-function string in x1..xn (x, y, z also accepted for n <= 3)."""
    import sympy as sp

    syms = sp.symbols(" ".join(f"x{i + 1}" for i in range(n)))
    syms = (syms,) if n == 1 else tuple(syms)
    local = {f"x{i + 1}": s for i, s in enumerate(syms)}
    for name, i in (("x", 0), ("y", 1), ("z", 2)):
        if i < n:
            local[name] = syms[i]
    expr = sp.sympify(text.replace("^", "**"), locals=local)
    num, den = sp.fraction(sp.together(expr))

    def conv(e) -> MPoly:
        P = sp.Poly(sp.expand(e), *syms)
        terms = {}
        for mono, coef in P.terms():
            c = sp.Rational(coef)
            terms[tuple(int(k) for k in mono)] = Fraction(int(c.p), int(c.q))
        return MPoly(n, terms)

    return MultiRatFunc(conv(num), conv(den))


def ratfunc_to_multi(r: RatFunc, n: int, var: int = 0) -> MultiRatFunc:
    """Lift a univariate RatFunc in x_var to n variables."""

    def lift(p: Poly) -> MPoly:
        terms = {}
        for k, a in enumerate(p.c):
            e = [0] * n
            e[var] = k
            terms[tuple(e)] = a
        return MPoly(n, terms)

    return MultiRatFunc(lift(r.num), lift(r.den))


def ratfunc_from_sympy(expr, sym) -> RatFunc:
    import sympy as sp

    num, den = sp.fraction(sp.cancel(sp.together(expr)))

    def conv(e):
        P = sp.Poly(sp.expand(e), sym)
        return Poly([to_q(sp.Rational(c)) for c in reversed(P.all_coeffs())])

    return RatFunc(conv(num), conv(den))


def multi_index_tuples(n: int, total: int):
    """All exponent tuples of length n with given total degree."""
    for combo in itertools.combinations_with_replacement(range(n), total):
        e = [0] * n
        for i in combo:
            e[i] += 1
        yield tuple(e)
