import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tclab.torus4d import (
    TorusError,
    bolt_area_identity,
    derive_lambda,
    metric_catalog,
    orbit_invariants,
    page_nu,
    parse_orbit_pairs,
    rhoQ_holomorphicity,
    surface_gravity,
    torus_einstein_residual,
    validate_orbit,
)

# derived once from the trace equation at the domain centre, then frozen
PAGE_LAMBDA = 1.000000000000024


class TestOrbits:
    def test_s4(self):
        o = orbit_invariants([(1, 0), (0, 1)])
        assert (o.chi, o.tau, o.hitchin_thorpe_pass) == (2, 0, True)
        assert o.spin and o.manifold == "S^4"

    def test_cp2(self):
        o = orbit_invariants([(0, 1), (1, 0), (1, 1)])
        assert o.chi == 3 and abs(o.tau) == 1 and o.hitchin_thorpe_pass
        assert not o.spin

    def test_page(self):
        o = orbit_invariants([(0, 1), (1, 1), (0, 1), (1, 0)])
        assert (o.chi, o.tau, o.hitchin_thorpe_pass) == (4, 0, True)
        assert o.blowup_kl == (1, 1) and o.einstein_possible

    def test_s2xs2_spin(self):
        o = orbit_invariants([(0, 1), (1, 0), (0, 1), (1, 0)])
        assert o.spin and o.tau == 0 and o.manifold == "#1(S^2xS^2)"

    def test_invalid(self):
        with pytest.raises(TorusError, match="coprime"):
            validate_orbit([(2, 0), (0, 1)])
        with pytest.raises(TorusError, match="determinant"):
            validate_orbit([(1, 0), (1, 2), (0, 1)])
        with pytest.raises(TorusError):
            validate_orbit([(1, 0)])

    def test_parse(self):
        assert parse_orbit_pairs("(1,0);(0,1)") == [(1, 0), (0, 1)]
        assert parse_orbit_pairs(" (0,1) ; (1,1);(1,0) ") == [(0, 1), (1, 1), (1, 0)]


def random_orbit(rng):
    """Blow up a random base list; each blowup between u and v adds one to chi
    and shifts tau by -det(u, v)."""
    if rng.random() < 0.5:
        ps, tau = [(0, 1), (1, 0), (1, 1)], -1
    else:
        ps, tau = [(1, 0), (0, 1)], 0
    for _ in range(rng.randint(0, 10)):
        j = rng.randrange(len(ps))
        u, v = ps[j], ps[(j + 1) % len(ps)]
        tau -= u[0] * v[1] - u[1] * v[0]
        ps.insert(j + 1, (u[0] + v[0], u[1] + v[1]))
    return ps, tau


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_orbit_invariants_closed_forms(seed):
    ps, tau = random_orbit(random.Random(seed))
    o = orbit_invariants(ps)
    assert o.chi == len(ps)
    assert o.tau == tau
    assert o.hitchin_thorpe_pass == (2 * o.chi >= 3 * abs(o.tau))
    assert orbit_invariants(ps[::-1]).tau == -o.tau


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_reversal_flips_signature(seed):
    ps, _ = random_orbit(random.Random(seed))
    rng = random.Random(seed + 1)
    r = rng.randrange(len(ps))
    rotated = ps[r:] + ps[:r]
    assert orbit_invariants(rotated).tau == orbit_invariants(ps).tau
    assert orbit_invariants(rotated[::-1]).tau == -orbit_invariants(ps).tau


def test_hitchin_thorpe_matches_blowup_bound():
    rng = random.Random(7)
    seen = 0
    while seen < 50:
        ps, _ = random_orbit(rng)
        o = orbit_invariants(ps)
        if o.blowup_kl is None:
            continue
        k, l = o.blowup_kl
        assert (o.chi, o.tau) == (2 + k + l, k - l)
        assert o.einstein_possible == (4 + 5 * k > l > (k - 4) / 5)
        if 2 * o.chi != 3 * abs(o.tau):
            assert o.einstein_possible == o.hitchin_thorpe_pass
        else:
            # equality case: the gate passes, the strict bound does not
            assert o.hitchin_thorpe_pass and not o.einstein_possible
        seen += 1


class TestCatalog:
    def test_s4_fiber(self):
        tm = metric_catalog("s4")
        R, t = 0.7, 0.3
        h11, h12, h22 = tm.h(R, t)
        assert h11 == pytest.approx(math.sin(R) ** 2 * math.sin(t) ** 2, rel=1e-15)
        assert h12 == 0
        assert h22 == pytest.approx(math.sin(R) ** 2 * math.cos(t) ** 2, rel=1e-15)

    def test_cp2_offdiagonal(self):
        tm = metric_catalog("cp2")
        R, t = 0.9, 0.4
        assert tm.h(R, t)[1] == pytest.approx(-math.sin(R) ** 4 * math.sin(t) ** 2 * math.cos(t) ** 2,
                                              rel=1e-15)

    def test_page_nu(self):
        nu = page_nu()
        assert 0.28 < nu < 0.29
        assert 4 * nu * (3 + nu * nu) / (3 + 6 * nu * nu - nu ** 4) == pytest.approx(1, abs=1e-14)
        assert nu == pytest.approx(0.2817, abs=1e-4)

    def test_unknown(self):
        with pytest.raises(TorusError):
            metric_catalog("k3")

    def test_positive_definite_interior(self):
        for name in ("s4", "cp2", "s2xs2", "page"):
            tm = metric_catalog(name)
            (r0, r1), (t0, t1) = tm.domain
            X, Y = np.meshgrid(np.linspace(r0, r1, 23)[1:-1], np.linspace(t0, t1, 23)[1:-1], indexing="ij")
            h11, h12, h22 = tm.h_stack(X, Y)
            A, B = tm.base_stack(X, Y)
            assert np.all(h11 > 0) and np.all(h11 * h22 - h12 * h12 > 0)
            assert np.all(A > 0) and np.all(B > 0)


class TestEinsteinResidual:
    @pytest.mark.parametrize("name,lam", [("s4", 3.0), ("s2xs2", 1.0), ("cp2", 6.0)])
    def test_catalog(self, name, lam):
        res = torus_einstein_residual(metric_catalog(name), 32, lam)
        assert res.lam == lam
        assert res.max_residual < 1e-8

    @pytest.mark.parametrize("name", ["s4", "cp2"])
    def test_convergence(self, name):
        coarse = torus_einstein_residual(metric_catalog(name), 16).max_residual
        fine = torus_einstein_residual(metric_catalog(name), 32).max_residual
        assert coarse / fine >= 8

    def test_wrong_lambda(self):
        assert torus_einstein_residual(metric_catalog("s4"), 16, 2.0).max_residual > 0.1

    def test_page_derived_lambda(self):
        tm = metric_catalog("page")
        lam = derive_lambda(tm)
        assert lam == pytest.approx(PAGE_LAMBDA, abs=1e-9)
        res = torus_einstein_residual(tm, 64)
        assert res.lam == lam
        assert res.max_residual < 1e-6

    def test_scaled_product_not_einstein(self):
        assert torus_einstein_residual(metric_catalog("s2xs2-scaled"), 16, 1.0).max_residual > 0.1


class TestRhoQ:
    def test_s4_isothermal(self):
        assert rhoQ_holomorphicity(metric_catalog("s4-iso"), 32) < 1e-6

    def test_flat(self):
        assert rhoQ_holomorphicity(metric_catalog("flat"), 16) == 0

    def test_perturbed(self):
        assert rhoQ_holomorphicity(metric_catalog("s4-iso-perturbed"), 16) > 1e-3

    def test_requires_isothermal(self):
        with pytest.raises(TorusError, match="isothermal"):
            rhoQ_holomorphicity(metric_catalog("s4"))

    def test_isothermal_s4_is_einstein(self):
        assert torus_einstein_residual(metric_catalog("s4-iso"), 32).max_residual < 1e-7


class TestSurfaceGravity:
    @pytest.mark.parametrize("side,pair", [((1, 0.0), (1, 0)), ((1, math.pi / 2), (0, 1))])
    def test_s4(self, side, pair):
        sg = surface_gravity(metric_catalog("s4"), side, pair)
        assert sg.constant
        assert all(abs(k - 1) < 1e-6 for k in sg.kappa2)

    def test_s2xs2(self):
        sg = surface_gravity(metric_catalog("s2xs2"), (0, 0.0), (1, 0))
        assert sg.mean == pytest.approx(1, abs=1e-6) and sg.constant

    def test_wrong_pair(self):
        with pytest.raises(TorusError, match="not degenerate"):
            surface_gravity(metric_catalog("s4"), (1, 0.0), (0, 1))

    def test_interior_side(self):
        with pytest.raises(TorusError):
            surface_gravity(metric_catalog("s4"), (1, 0.5), (1, 0))


class TestBolts:
    def test_s2xs2(self):
        b = bolt_area_identity(metric_catalog("s2xs2"))
        assert b.bolt_A == pytest.approx(16 * math.pi ** 2, rel=1e-6)
        assert b.bolt_B == pytest.approx(16 * math.pi ** 2, rel=1e-6)
        assert b.lam_vol == pytest.approx(16 * math.pi ** 2, rel=1e-6)
        assert b.rel_error < 1e-6

    def test_s4(self):
        assert bolt_area_identity(metric_catalog("s4")).rel_error < 1e-6

    def test_scaled_fails(self):
        assert bolt_area_identity(metric_catalog("s2xs2-scaled"), lam=1.0).rel_error > 0.1

    def test_nondiagonal_rejected(self):
        with pytest.raises(TorusError, match="diagonal"):
            bolt_area_identity(metric_catalog("cp2"))
