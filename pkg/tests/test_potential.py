import math
import random
from fractions import Fraction

import pytest

from tclab.exactalg import mat_det, mat_eye, mat_mul
from tclab.polytope import catalog
from tclab.potential import (
    POTENTIAL_CATALOG,
    MetricPointError,
    Potential,
    blowup_fxx,
    boundary_determinant_check,
    canonical_jets,
    legendre_dual_1d,
    metric_at,
    phi_value_grad,
    potential_catalog,
)


def interior_points(P, count, seed=0):
    """Random rational convex combinations of the vertices."""
    rng = random.Random(seed)
    verts = P.vertices()
    out = []
    while len(out) < count:
        w = [Fraction(rng.randint(1, 20)) for _ in verts]
        s = sum(w)
        x = tuple(sum(wi * v[i] for wi, v in zip(w, verts)) / s for i in range(P.n))
        if P.is_interior(x):
            out.append(x)
    return out


def test_canonical_jets_cp1():
    J = canonical_jets(catalog("cp1"), [0])
    assert J[(0, 0)] == 1
    assert J[(0, 0, 0)] == 0


def test_canonical_jets_cp2():
    J = canonical_jets(catalog("cp2"), [0, 0])
    assert J[(0, 0)] == 1 and J[(1, 1)] == 1
    assert J[(0, 1)] == Fraction(1, 2)


def test_canonical_jets_square_third_order_vanish():
    J = canonical_jets(catalog("cp1xcp1"), [0, 0])
    assert all(v == 0 for k, v in J.items() if len(k) == 3)


def test_canonical_jets_boundary_rejected():
    with pytest.raises(MetricPointError):
        canonical_jets(catalog("cp1"), [1])


def test_metric_at_examples():
    m = metric_at(potential_catalog("cp1"), [0])
    assert m.h == [[1]] and m.det_h == 1
    m = metric_at(potential_catalog("cp2"), [0, 0])
    assert m.h == [[Fraction(4, 3), Fraction(-2, 3)], [Fraction(-2, 3), Fraction(4, 3)]]
    assert m.det_h == Fraction(4, 3)
    m = metric_at(potential_catalog("blowup1", a=1), [0, 0])
    assert m.h_inv[0][0] > 0 and mat_det(m.h_inv) > 0


def test_metric_at_rejects_indefinite():
    bad = Potential.with_fxx(catalog("cp1"), "-2/(1-x1^2)")
    with pytest.raises(MetricPointError, match="not a metric point"):
        metric_at(bad, [0])


@pytest.mark.parametrize("name", POTENTIAL_CATALOG)
def test_inverse_and_determinant_exact(name):
    pot = potential_catalog(name)
    for x in interior_points(pot.polytope, 20, seed=len(name)):
        m = metric_at(pot, x)
        assert mat_mul(m.h, m.h_inv) == mat_eye(pot.n)
        assert m.det_h * mat_det(m.h_inv) == 1


def test_boundary_check_cp1():
    v = boundary_determinant_check(potential_catalog("cp1"))
    assert v.passed
    assert all(d == pytest.approx(1.0) for s in v.sites for d in s["deltas"])


def test_boundary_check_hexagon_and_blowup():
    assert boundary_determinant_check(potential_catalog("hexagon")).passed
    assert boundary_determinant_check(potential_catalog("blowup1", a=1)).passed


def test_boundary_check_facet_mismatch():
    # blowup correction placed on the CP^2 triangle blows up at the corner x = 2
    pot = Potential.with_fxx(catalog("cp2"), blowup_fxx(1))
    v = boundary_determinant_check(pot)
    assert not v.passed
    failed = [s["site"] for s in v.sites if not s["pass"]]
    assert ["2/1", "-1/1"] in failed


def test_legendre_consistency_cp1():
    pot = potential_catalog("cp1")
    for u in [-2.0, -1.2, -0.5, -0.1, 0.0, 0.3, 0.7, 1.1, 1.8, 2.5]:
        x, eta = legendre_dual_1d(pot, u)
        assert 0.5 * math.log((1 + x) / (1 - x)) == pytest.approx(u, abs=1e-8)
        # d eta / du = x
        du = 1e-5
        dp = legendre_dual_1d(pot, u + du)[1]
        dm = legendre_dual_1d(pot, u - du)[1]
        assert (dp - dm) / (2 * du) == pytest.approx(x, abs=1e-8)


def test_phi_gradient_needs_closure():
    with pytest.raises(ValueError):
        phi_value_grad(potential_catalog("sakane6"), [0, 0, 0])


def test_product_block_diagonal():
    pot = potential_catalog("cp1xcp1")
    for x in interior_points(pot.polytope, 10):
        m = metric_at(pot, x)
        assert m.h_inv[0][1] == 0 and m.h_inv[1][0] == 0
        assert all(dH[0][1] == 0 for dH in m.dH)
