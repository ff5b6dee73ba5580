import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from tclab.exactalg import rank_q
from tclab.liealg import (
    AlgElement,
    E,
    LieAlgError,
    bracket,
    bracket_project,
    diagonalizability_verdict,
    equivalence_vectors,
    parse_orbit,
    standard_decomposition,
)

CATALOG = [("stiefel", (3,)), ("stiefel", (4,)), ("stiefel", (5,)), ("flag", (2, 2)), ("flag", (2, 3)),
           ("su3u1", ()), ("su2", ()), ("t3", ())]


def decomp(name, params):
    return standard_decomposition(name, params)


def test_bracket_so4():
    d = decomp("stiefel", (3,))
    Z, coeffs, proj = bracket_project(E(4, 1, 3), E(4, 2, 3), d)
    assert Z == E(4, 1, 2).scale(-1)
    assert proj == E(4, 1, 2).scale(-1)


def test_bracket_self_and_mismatch():
    X = E(4, 1, 3)
    assert bracket(X, X).is_zero()
    with pytest.raises(LieAlgError):
        bracket(E(3, 1, 2), E(4, 1, 2))


def test_su2_relations():
    d = decomp("su2", ())
    X1, X2, X3 = (s.basis[0] for s in d.summands)
    assert bracket(X1, X2) == X3
    assert bracket(X2, X3) == X1
    assert bracket(X3, X1) == X2


@pytest.mark.parametrize("name,params,dims", [
    ("stiefel", (3,), [2, 2, 1]),
    ("stiefel", (5,), [4, 4, 1]),
    ("flag", (2, 2), [4, 2, 2, 2, 2, 1]),
    ("flag", (2, 3), [6, 2, 2, 3, 3, 1]),
    ("su3u1", (), [2, 2, 1, 1, 1]),
])
def test_summand_dims(name, params, dims):
    assert [s.dim for s in decomp(name, params).summands] == dims


@pytest.mark.parametrize("name,params", CATALOG)
def test_decompositions_validate(name, params):
    d = decomp(name, params)
    rep = d.validate()
    assert rep["ok"], rep["issues"]
    for Y in d.all_basis():
        assert Y.is_skew_hermitian()


@pytest.mark.parametrize("name,params", CATALOG)
def test_jacobi(name, params):
    basis = decomp(name, params).all_basis()
    triples = list(itertools.combinations(basis, 3))
    if len(triples) > 200:
        triples = random.Random(0).sample(triples, 200)
    for X, Y, Z in triples:
        J = bracket(X, bracket(Y, Z)) + bracket(Y, bracket(Z, X)) + bracket(Z, bracket(X, Y))
        assert J.is_zero()


coef = st.integers(-3, 3)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(CATALOG), st.lists(coef, min_size=24, max_size=24), st.integers(0, 10 ** 6))
def test_q_ad_invariant(entry, cs, seed):
    d = decomp(*entry)
    basis = d.all_basis()
    m = len(basis)

    def combo(offset):
        out = AlgElement.zero(d.n)
        for k in range(m):
            c = cs[(offset + k + seed) % len(cs)]
            if c:
                out = out + basis[k].scale(c)
        return out

    X, Y, Z = combo(0), combo(5), combo(11)
    assert d.Q(bracket(X, Y), Z) + d.Q(Y, bracket(X, Z)) == 0


@pytest.mark.parametrize("name,params", CATALOG)
def test_projection_orthogonal(name, params):
    d = decomp(name, params)
    basis = d.all_basis()
    for X, Y in itertools.combinations(basis, 2):
        Z = bracket(X, Y)
        rest = Z - d.project_p(Z)
        for s in d.summands:
            for B in s.basis:
                assert d.Q(rest, B) == 0


@pytest.mark.parametrize("n", [3, 4, 5])
def test_stiefel_vector(n):
    d = decomp("stiefel", (n,))
    v = equivalence_vectors(d, (0, 1))
    assert v["Z"] == E(n + 1, 1, 2).scale(-(n - 1))
    verdict = diagonalizability_verdict(d)
    assert verdict.diagonalizable and verdict.required_dim == 1 and verdict.achieved_dim == 1


@pytest.mark.parametrize("n1,n2", [(2, 2), (2, 3)])
def test_flag_vectors(n1, n2):
    d = decomp("flag", (n1, n2))
    verdict = diagonalizability_verdict(d)
    assert verdict.diagonalizable is False
    assert verdict.status == "not diagonalizable by this method"
    assert verdict.required_dim == 2 and verdict.achieved_dim == 1
    got = sorted((v for v in verdict.vectors.values()), key=lambda v: v.sparse()[0]["re"])
    n = n1 + n2 + 2
    expected = {E(n, 1, 2).scale(-n1), E(n, 1, 2).scale(-n2)}
    assert set(got) == expected


def test_su3u1_unitary_span():
    d = decomp("su3u1", ())
    v = equivalence_vectors(d, (0, 1))
    assert set(v) == {"Z", "W"}
    coords = [[c for cs in d.p_coefficients(x) for c in cs] for x in v.values()]
    assert rank_q(coords) == 2
    verdict = diagonalizability_verdict(d)
    assert verdict.diagonalizable is None
    assert verdict.status == "method inconclusive"
    unitary = [p for p in verdict.partial if p["type"] == "unitary"][0]
    assert unitary["required_dim"] == 2 and unitary["achieved_dim"] == 2


def test_trivial_isotropy():
    v = diagonalizability_verdict(decomp("su2", ()))
    assert v.diagonalizable and v.required_dim == 3 and v.achieved_dim == 3
    v = diagonalizability_verdict(decomp("t3", ()))
    assert v.diagonalizable is False and v.required_dim == 3 and v.achieved_dim == 0


def test_non_equivalent_pair():
    d = decomp("stiefel", (4,))
    with pytest.raises(LieAlgError, match="not equivalent"):
        equivalence_vectors(d, (0, 2))


def test_parse_orbit():
    assert parse_orbit("stiefel:4").n == 5
    assert parse_orbit("flag:2,3").n == 7
    with pytest.raises(LieAlgError):
        parse_orbit("g2")


def test_sparse_serialization():
    assert E(3, 1, 2).sparse() == [
        {"i": 1, "j": 2, "re": "1/1", "im": "0/1"},
        {"i": 2, "j": 1, "re": "-1/1", "im": "0/1"},
    ]
    assert AlgElement.zero(2).scale(Fraction(3)).is_zero()
