"""Matrix Lie algebras over the Gaussian rationals and the span tests that
decide when a cohomogeneity-one Einstein metric can be diagonalized.

Background form: Q(X, Y) = -q_scale * Re tr(XY), with q_scale chosen so the
listed basis vectors of each catalog decomposition are unit.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .exactalg import q_str, rank_q


class LieAlgError(ValueError):
    pass


def _mm(A, B):
    n = len(A)
    out = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        row = out[i]
        for k in range(n):
            a = A[i][k]
            if not a:
                continue
            Bk = B[k]
            for j in range(n):
                if Bk[j]:
                    row[j] += a * Bk[j]
    return tuple(map(tuple, out))


def _madd(A, B, s=1):
    return tuple(tuple(a + s * b for a, b in zip(ra, rb)) for ra, rb in zip(A, B))


@dataclass(frozen=True)
class AlgElement:
    """Complex matrix re + i*im with rational entries."""

    re: tuple
    im: tuple

    @property
    def n(self) -> int:
        return len(self.re)

    @classmethod
    def zero(cls, n):
        z = tuple(tuple(Fraction(0) for _ in range(n)) for _ in range(n))
        return cls(z, z)

    @classmethod
    def from_entries(cls, n, entries):
        """entries: {(i, j): (re, im)} with 1-based indices."""
        re = [[Fraction(0)] * n for _ in range(n)]
        im = [[Fraction(0)] * n for _ in range(n)]
        for (i, j), (a, b) in entries.items():
            re[i - 1][j - 1] += Fraction(a)
            im[i - 1][j - 1] += Fraction(b)
        return cls(tuple(map(tuple, re)), tuple(map(tuple, im)))

    def __add__(self, o):
        return AlgElement(_madd(self.re, o.re), _madd(self.im, o.im))

    def __sub__(self, o):
        return AlgElement(_madd(self.re, o.re, -1), _madd(self.im, o.im, -1))

    def scale(self, s):
        s = Fraction(s)
        return AlgElement(tuple(tuple(s * a for a in r) for r in self.re),
                          tuple(tuple(s * a for a in r) for r in self.im))

    def __neg__(self):
        return self.scale(-1)

    def matmul(self, o):
        re = _madd(_mm(self.re, o.re), _mm(self.im, o.im), -1)
        im = _madd(_mm(self.re, o.im), _mm(self.im, o.re))
        return AlgElement(re, im)

    def is_zero(self) -> bool:
        return all(a == 0 for r in self.re for a in r) and all(a == 0 for r in self.im for a in r)

    def re_trace_prod(self, o) -> Fraction:
        """Re tr(self * o)."""
        n = self.n
        return sum((self.re[i][k] * o.re[k][i] - self.im[i][k] * o.im[k][i]
                    for i in range(n) for k in range(n)), Fraction(0))

    def is_skew_hermitian(self) -> bool:
        n = self.n
        return all(self.re[i][j] == -self.re[j][i] and self.im[i][j] == self.im[j][i]
                   for i in range(n) for j in range(n))

    def trace(self):
        n = self.n
        return (sum((self.re[i][i] for i in range(n)), Fraction(0)),
                sum((self.im[i][i] for i in range(n)), Fraction(0)))

    def sparse(self) -> list:
        out = []
        for i in range(self.n):
            for j in range(self.n):
                a, b = self.re[i][j], self.im[i][j]
                if a or b:
                    out.append({"i": i + 1, "j": j + 1, "re": q_str(a), "im": q_str(b)})
        return out


def bracket(X: AlgElement, Y: AlgElement) -> AlgElement:
    if X.n != Y.n:
        raise LieAlgError("dimension mismatch")
    return X.matmul(Y) - Y.matmul(X)


def E(n, i, j) -> AlgElement:
    """E_ij = e_ij - e_ji (1-based)."""
    return AlgElement.from_entries(n, {(i, j): (1, 0), (j, i): (-1, 0)})


@dataclass
class Summand:
    basis: list
    type: str  # orthogonal | unitary | symplectic | trivial
    label: str = ""

    @property
    def dim(self):
        return len(self.basis)


@dataclass
class IsotropyDecomposition:
    algebra: str
    n: int
    k_basis: list
    summands: list
    families: list  # lists of summand indices that are pairwise equivalent
    q_scale: Fraction = Fraction(1, 2)
    name: str = ""

    def Q(self, X, Y) -> Fraction:
        return -self.q_scale * X.re_trace_prod(Y)

    def p_coefficients(self, X) -> list:
        """Q-coefficients of X on every p basis vector, summand by summand."""
        return [[self.Q(X, Y) / self.Q(Y, Y) for Y in s.basis] for s in self.summands]

    def project_p(self, X) -> AlgElement:
        out = AlgElement.zero(self.n)
        for s, cs in zip(self.summands, self.p_coefficients(X)):
            for c, Y in zip(cs, s.basis):
                if c:
                    out = out + Y.scale(c)
        return out

    def project_k(self, X) -> AlgElement:
        out = AlgElement.zero(self.n)
        for K in self.k_basis:
            c = self.Q(X, K) / self.Q(K, K)
            if c:
                out = out + K.scale(c)
        return out

    def all_basis(self):
        return list(self.k_basis) + [Y for s in self.summands for Y in s.basis]

    def validate(self) -> dict:
        """Orthonormality, orthogonality between summands, Ad(k) invariance, span."""
        issues = []
        for si, s in enumerate(self.summands):
            for a, Y in enumerate(s.basis):
                if self.Q(Y, Y) != 1:
                    issues.append(f"p{si + 1} basis {a + 1} not unit")
                for Z in s.basis[a + 1:]:
                    if self.Q(Y, Z) != 0:
                        issues.append(f"p{si + 1} basis not orthogonal")
        basis = self.all_basis()
        for A, B in itertools.combinations(basis, 2):
            same = any(A in s.basis and B in s.basis for s in self.summands)
            if not same and self.Q(A, B) != 0:
                issues.append("summands not Q-orthogonal")
                break
        for K in self.k_basis:
            for si, s in enumerate(self.summands):
                for Y in s.basis:
                    Z = bracket(K, Y)
                    coeffs = self.p_coefficients(Z)
                    if any(c for sj, cs in enumerate(coeffs) if sj != si for c in cs):
                        issues.append(f"p{si + 1} not Ad(k)-invariant")
                    if not (Z - self.project_p(Z) - self.project_k(Z)).is_zero():
                        issues.append("basis does not span the bracket")
        dim_total = len(basis)
        return {"ok": not issues, "issues": sorted(set(issues)), "dim": dim_total}


def bracket_project(X, Y, decomp: IsotropyDecomposition):
    Z = bracket(X, Y)
    return Z, decomp.p_coefficients(Z), decomp.project_p(Z)


# ---------------------------------------------------------------------------
# catalog decompositions


def _stiefel(n: int) -> IsotropyDecomposition:
    if n < 3:
        raise LieAlgError("stiefel needs n >= 3")
    N = n + 1
    k = [E(N, a, b) for a in range(3, N + 1) for b in range(a + 1, N + 1)]
    p1 = Summand([E(N, 1, 2 + i) for i in range(1, n)], "orthogonal", "p1")
    p2 = Summand([E(N, 2, 2 + i) for i in range(1, n)], "orthogonal", "p2")
    p3 = Summand([E(N, 1, 2)], "trivial", "p3")
    return IsotropyDecomposition(f"so({N})", N, k, [p1, p2, p3], [[0, 1], [2]], Fraction(1, 2),
                                 f"stiefel:{n}")


def _flag(n1: int, n2: int) -> IsotropyDecomposition:
    if n1 < 2 or n2 < 2:
        raise LieAlgError("flag needs n1, n2 >= 2")
    N = n1 + n2 + 2
    A = [2 + j for j in range(1, n1 + 1)]
    B = [2 + n1 + j for j in range(1, n2 + 1)]
    k = [E(N, a, b) for a, b in itertools.combinations(A, 2)] + \
        [E(N, a, b) for a, b in itertools.combinations(B, 2)]
    p1 = Summand([E(N, a, b) for a in A for b in B], "orthogonal", "p1")
    p2 = Summand([E(N, 1, a) for a in A], "orthogonal", "p2")
    p3 = Summand([E(N, 2, a) for a in A], "orthogonal", "p3")
    p4 = Summand([E(N, 1, b) for b in B], "orthogonal", "p4")
    p5 = Summand([E(N, 2, b) for b in B], "orthogonal", "p5")
    p6 = Summand([E(N, 1, 2)], "trivial", "p6")
    return IsotropyDecomposition(f"so({N})", N, k, [p1, p2, p3, p4, p5, p6],
                                 [[0], [1, 2], [3, 4], [5]], Fraction(1, 2), f"flag:{n1},{n2}")


def _su3u1() -> IsotropyDecomposition:
    M = AlgElement.from_entries
    Y11 = M(3, {(1, 2): (1, 0), (2, 1): (-1, 0)})
    Y12 = M(3, {(1, 2): (0, 1), (2, 1): (0, 1)})
    Y21 = M(3, {(1, 3): (1, 0), (3, 1): (-1, 0)})
    Y22 = M(3, {(1, 3): (0, 1), (3, 1): (0, 1)})
    T3 = M(3, {(2, 2): (0, 1), (3, 3): (0, -1)})
    T4 = M(3, {(2, 3): (1, 0), (3, 2): (-1, 0)})
    T5 = M(3, {(2, 3): (0, 1), (3, 2): (0, 1)})
    # traceless generator commuting with the su(2) on indices 2,3
    K = M(3, {(1, 1): (0, 2), (2, 2): (0, -1), (3, 3): (0, -1)})
    summands = [
        Summand([Y11, Y12], "unitary", "p1"),
        Summand([Y21, Y22], "unitary", "p2"),
        Summand([T3], "trivial", "p3"),
        Summand([T4], "trivial", "p4"),
        Summand([T5], "trivial", "p5"),
    ]
    return IsotropyDecomposition("su(3)", 3, [K], summands, [[0, 1], [2, 3, 4]], Fraction(1, 2), "su3u1")


def _su2() -> IsotropyDecomposition:
    M = AlgElement.from_entries
    half = Fraction(1, 2)
    # X_j = -(i/2) sigma_j
    X1 = M(2, {(1, 2): (0, -half), (2, 1): (0, -half)})
    X2 = M(2, {(1, 2): (-half, 0), (2, 1): (half, 0)})
    X3 = M(2, {(1, 1): (0, -half), (2, 2): (0, half)})
    summands = [Summand([X], "trivial", f"p{j + 1}") for j, X in enumerate((X1, X2, X3))]
    return IsotropyDecomposition("su(2)", 2, [], summands, [[0, 1, 2]], Fraction(2), "su2")


def _t3() -> IsotropyDecomposition:
    M = AlgElement.from_entries
    summands = [Summand([M(3, {(j, j): (0, 1)})], "trivial", f"p{j}") for j in (1, 2, 3)]
    return IsotropyDecomposition("u(1)^3", 3, [], summands, [[0, 1, 2]], Fraction(1), "t3")


def standard_decomposition(name: str, params=()) -> IsotropyDecomposition:
    key = name.lower()
    if key == "stiefel":
        (n,) = params
        return _stiefel(int(n))
    if key == "flag":
        n1, n2 = params
        return _flag(int(n1), int(n2))
    if key == "su3u1":
        return _su3u1()
    if key == "su2":
        return _su2()
    if key in ("t3", "torus3"):
        return _t3()
    raise LieAlgError(f"unknown decomposition {name!r}")


def parse_orbit(spec: str) -> IsotropyDecomposition:
    """"stiefel:4", "flag:2,2", "su3u1", "su2", "t3"."""
    name, _, rest = spec.partition(":")
    params = [p for p in rest.split(",") if p.strip()] if rest else []
    return standard_decomposition(name.strip(), params)


# ---------------------------------------------------------------------------
# span tests


def _family_type(decomp, fam) -> str:
    t = decomp.summands[fam[0]].type
    return "orthogonal" if t == "trivial" else t


def equivalence_vectors(decomp: IsotropyDecomposition, pair) -> dict:
    """Projected bracket sums for an equivalent pair (0-based summand indices)."""
    i, j = pair
    if not any(i in fam and j in fam for fam in decomp.families) or i == j:
        raise LieAlgError("summands are not equivalent")
    Si, Sj = decomp.summands[i], decomp.summands[j]
    if Si.dim != Sj.dim:
        raise LieAlgError("equivalent summands must have equal dimension")
    d = Si.dim
    Yi, Yj = Si.basis, Sj.basis
    P = decomp.project_p
    zero = AlgElement.zero(decomp.n)

    def bsum(pairs):
        acc = zero
        for a, b in pairs:
            acc = acc + bracket(Yi[a], Yj[b])
        return P(acc)

    t = _family_type(decomp, [i])
    out = {}
    if t == "orthogonal":
        out["Z"] = bsum([(k, k) for k in range(d)])
    elif t == "unitary":
        h = d // 2
        out["Z"] = bsum([(k, k) for k in range(d)])
        out["W"] = P(sum((bracket(Yi[k], Yj[k + h]) - bracket(Yi[k + h], Yj[k]) for k in range(h)), zero))
    elif t == "symplectic":
        h = d // 2
        out["Z1"] = bsum([(k, k) for k in range(h)])
        out["Z3"] = bsum([(k, k + h) for k in range(h)])
        out["Z2"] = bsum([(k, k - h) for k in range(h, d)])
        out["Z4"] = bsum([(k, k) for k in range(h, d)])
    else:
        raise LieAlgError(f"unknown summand type {t}")
    return out


_RULE = {"orthogonal": lambda r: r * (r - 1) // 2, "unitary": lambda r: r * (r - 1),
         "symplectic": lambda r: 2 * r * (r - 1)}


@dataclass
class DiagVerdict:
    diagonalizable: bool | None
    status: str
    required_dim: int
    achieved_dim: int
    rule_applied: str
    vectors: dict = field(default_factory=dict)
    partial: list = field(default_factory=list)

    def to_json(self):
        return {
            "diagonalizable": self.diagonalizable,
            "status": self.status,
            "required_dim": self.required_dim,
            "achieved_dim": self.achieved_dim,
            "rule_applied": self.rule_applied,
            "vectors": {k: v.sparse() for k, v in self.vectors.items()},
            "partial": self.partial,
        }


def _coords(decomp, X) -> list:
    return [c for cs in decomp.p_coefficients(X) for c in cs]


def _family_test(decomp, fams):
    vecs = {}
    req = 0
    for fam in fams:
        t = _family_type(decomp, fam)
        req += _RULE[t](len(fam))
        for i, j in itertools.combinations(fam, 2):
            for name, v in equivalence_vectors(decomp, (i, j)).items():
                vecs[f"{name}_{i + 1}{j + 1}"] = v
    got = rank_q([_coords(decomp, v) for v in vecs.values()])
    return req, got, vecs


def diagonalizability_verdict(decomp: IsotropyDecomposition) -> DiagVerdict:
    fams = [f for f in decomp.families if len(f) >= 2]
    if not fams:
        return DiagVerdict(True, "diagonalizable", 0, 0, "monotypic")
    types = sorted({_family_type(decomp, f) for f in fams})
    if len(types) > 1:
        partial = []
        allvecs = {}
        for f in fams:
            req, got, vecs = _family_test(decomp, [f])
            allvecs.update(vecs)
            partial.append({
                "family": [i + 1 for i in f],
                "type": _family_type(decomp, f),
                "required_dim": req,
                "achieved_dim": got,
                "diagonalizable_if_others_diagonal": got == req,
            })
        req = sum(p["required_dim"] for p in partial)
        got = sum(p["achieved_dim"] for p in partial)
        return DiagVerdict(None, "method inconclusive", req, got, "mixed families: " + ",".join(types),
                           allvecs, partial)
    req, got, vecs = _family_test(decomp, fams)
    t = types[0]
    rule = {"orthogonal": "r(r-1)/2", "unitary": "r(r-1)", "symplectic": "2r(r-1)"}[t]
    ok = got == req
    return DiagVerdict(ok, "diagonalizable" if ok else "not diagonalizable by this method", req, got,
                       f"{t} {rule}", vecs)
