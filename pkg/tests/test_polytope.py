from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from tclab.polytope import (
    CATALOG_NAMES,
    Polytope,
    PolytopeError,
    catalog,
    futaki_toric,
    is_delzant,
    moment_integral,
    vertices,
)


def test_vertices_square():
    assert set(vertices(catalog("cp1xcp1"))) == {(1, 1), (1, -1), (-1, 1), (-1, -1)}


def test_vertices_cp2():
    assert set(vertices(catalog("cp2"))) == {(-1, -1), (2, -1), (-1, 2)}


def test_vertices_interval():
    assert vertices(catalog("cp1")) == [(-1,), (1,)]


def test_unbounded_and_empty():
    half = Polytope.from_facets(2, [((1, 0), 0), ((0, 1), 0)])
    with pytest.raises(PolytopeError):
        vertices(half)
    empty = Polytope.from_facets(1, [((1,), 1), ((-1,), 1)])  # x >= 1, x <= -1
    with pytest.raises(PolytopeError):
        vertices(empty)


def test_non_primitive_normal_rejected():
    with pytest.raises(PolytopeError):
        Polytope.from_facets(1, [((2,), -1), ((-1,), -1)])


def test_delzant_examples():
    assert is_delzant(catalog("cp1xcp1")).is_delzant
    assert is_delzant(catalog("hexagon")).is_delzant
    # triangle with vertices (0,0), (1,0), (0,2)
    tri = Polytope.from_facets(2, [((1, 0), 0), ((0, 1), 0), ((-2, -1), -2)])
    v = is_delzant(tri)
    assert not v.is_delzant
    assert ((1, 0), "non-unimodular cone") in v.failures
    assert all(r == "non-unimodular cone" for _, r in v.failures)


def test_degenerate_vertex_reported():
    # square pyramid apex has four active facets
    pyr = Polytope.from_facets(
        3, [((0, 0, 1), 0), ((-1, 0, -1), -1), ((1, 0, -1), -1), ((0, -1, -1), -1), ((0, 1, -1), -1)])
    v = is_delzant(pyr)
    assert not v.is_delzant
    assert ((0, 0, 1), "wrong facet count") in v.failures


def test_moment_integrals():
    unit = Polytope.from_facets(2, [((1, 0), 0), ((-1, 0), -1), ((0, 1), 0), ((0, -1), -1)])
    assert moment_integral(unit, (0, 0)) == 1
    assert moment_integral(unit, (2, 1)) == Fraction(1, 6)
    assert moment_integral(catalog("hexagon"), (1, 0)) == 0
    assert moment_integral(catalog("cp2"), (1, 0)) == 0
    assert moment_integral(catalog("cp2"), (0, 0)) == Fraction(9, 2)


def test_futaki():
    assert futaki_toric(catalog("hexagon")) == [0, 0]
    assert futaki_toric(catalog("cp2")) == [0, 0]
    assert futaki_toric(catalog("cp1xcp1")) == [0, 0]
    f = futaki_toric(catalog("blowup1", a=1))
    assert any(v != 0 for v in f)
    # oracle: iterated integral over -1 <= x <= 1, -1 <= y <= 1 - x
    x, y = sp.symbols("x y")
    fx = sp.integrate(sp.integrate(x, (y, -1, 1 - x)), (x, -1, 1))
    fy = sp.integrate(sp.integrate(y, (y, -1, 1 - x)), (x, -1, 1))
    assert f == [Fraction(str(fx)), Fraction(str(fy))]
    assert f == [Fraction(-2, 3), Fraction(1, 3)]


def test_catalog_facets():
    b = catalog("blowup1", a=1)
    vals = [f.value((Fraction(0), Fraction(0))) for f in b.facets]
    assert vals == [1, 1, 1, 1]
    s = catalog("sakane6")
    assert {(f.mu, f.lam) for f in s.facets} == {
        ((1, 0, 0), -1), ((-1, 0, 0), -1), ((0, 1, 0), -1), ((0, 0, 1), -1), ((-1, -1, 0), -1), ((1, 0, -1), -1)}
    with pytest.raises(PolytopeError):
        catalog("blowup1", a=0)
    with pytest.raises(PolytopeError):
        catalog("nope")


@pytest.mark.parametrize("name", CATALOG_NAMES)
def test_catalog_volume_positive(name):
    P = catalog(name)
    assert moment_integral(P, (0,) * P.n) > 0


shifts = st.fractions(min_value=-3, max_value=3, max_denominator=5)


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(["cp2", "hexagon", "blowup1"]), shifts, shifts)
def test_translation_covariance(name, v0, v1):
    P = catalog(name)
    Pv = P.translate((v0, v1))
    vol = moment_integral(P, (0, 0))
    for i, vi in enumerate((v0, v1)):
        e = tuple(int(i == j) for j in range(2))
        assert moment_integral(Pv, e) == moment_integral(P, e) + vi * vol


SL2 = [((1, 1), (0, 1)), ((0, -1), (1, 0)), ((2, 1), (1, 1)), ((1, 0), (-3, 1))]


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(["cp2", "hexagon", "blowup1", "cp1xcp1"]), st.lists(st.sampled_from(SL2), min_size=1, max_size=3))
def test_delzant_unimodular_invariance(name, mats):
    P = catalog(name)
    Q = P
    for U in mats:
        Q = Q.transform_normals(U)
    assert is_delzant(Q).is_delzant == is_delzant(P).is_delzant
    tri = Polytope.from_facets(2, [((1, 0), 0), ((0, 1), 0), ((-2, -1), -2)])
    T = tri
    for U in mats:
        T = T.transform_normals(U)
    assert not is_delzant(T).is_delzant
