import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ebe import models
from ebe.grids import AxiGrid


def test_charge_validation():
    with pytest.raises(ValueError):
        models.ModelCharge(-1)
    assert models.ModelCharge(0).k == 0


def test_model_u_k0_is_log_y():
    y = np.linspace(0.2, 5.0, 40)
    assert np.max(np.abs(models.model_u(0, 1.0, y) - np.log(y))) < 1e-14
    assert models.model_u(0, 1.0, 1.0) == pytest.approx(0.0, abs=1e-15)


def test_model_u_k1_frozen_value():
    # ((sqrt2+1)^2 - (sqrt2-1)^2) / 4 = sqrt2
    assert models.model_u(1, 1.0, 1.0) == pytest.approx(math.log(math.sqrt(2.0)),
                                                        abs=1e-14)


def test_model_u_k1_closed_form_identity():
    r = np.linspace(0.05, 6.0, 57)[:, None]
    y = np.linspace(0.05, 6.0, 53)[None, :]
    want = np.log(y * np.hypot(r, y))
    assert np.max(np.abs(models.model_u(1, r, y) - want)) < 1e-12


def test_model_u_domain_error_at_origin():
    with pytest.raises(models.DomainError):
        models.model_u(2, 0.0, 0.0)


def test_model_u_small_y_stability():
    # exp(u_k) ~ y R^k as y -> 0; the sum form must not cancel
    for k in (1, 3, 5):
        got = models.model_u(k, 10.0, 1e-12)
        want = math.log(1e-12) + k * math.log(10.0)
        assert abs(got - want) < 1e-9


def test_model_u_matches_ode_family_k0():
    y = np.linspace(0.3, 4.0, 23)
    ode = models.ode_u0(models.OdeParams(b=0.0, c=0.0), y)
    assert np.max(np.abs(models.model_u(0, 2.2, y) - ode)) < 1e-14


def test_ode_u0_values():
    assert models.ode_u0(models.OdeParams(0.0, 0.0), 1.0) == pytest.approx(0.0)
    assert models.ode_u0(models.OdeParams(1.0, 0.0), 1.0) == pytest.approx(
        math.log(math.sinh(1.0)), abs=1e-14)


def test_ode_u0_small_b_limit():
    y = np.array([0.5, 1.0, 2.0])
    near = models.ode_u0(models.OdeParams(1e-5, 0.0), y)
    assert np.max(np.abs(near - np.log(y))) < 1e-8


def test_ode_u0_large_argument_no_overflow():
    v = models.ode_u0(models.OdeParams(2.0, 0.0), 500.0)
    assert v == pytest.approx(1000.0 - math.log(2.0) - math.log(2.0), abs=1e-10)


def test_ode_u0_domain():
    with pytest.raises(models.DomainError):
        models.ode_u0(models.OdeParams(0.0, -2.0), 1.0)


@given(st.integers(0, 4), st.floats(0.2, 3.0), st.floats(0.2, 3.0),
       st.sampled_from([0.5, 2.0]))
def test_v_profile_scale_invariance(k, r, y, lam):
    v1 = models.model_v(k, r, y)
    v2 = models.model_v(k, lam * r, lam * y)
    assert abs(v1 - v2) < 1e-12


@given(st.integers(0, 4), st.floats(0.3, 4.0))
def test_near_boundary_log_split(k, r):
    # u_k - log(y) tends to k log(r): evaluate at tiny y
    got = models.model_u(k, r, 1e-10) - math.log(1e-10)
    assert abs(got - k * math.log(r)) < 1e-6


def test_analytic_pde_residual_all_charges():
    r = np.linspace(0.1, 4.0, 33)[:, None]
    y = np.linspace(0.1, 4.0, 37)[None, :]
    for k in range(4):
        res = models.model_residual_analytic(k, r, y)
        assert np.max(np.abs(res)) < 1e-10


def test_model_u_smoothness_fd_vs_analytic():
    # centered differences of model_u agree with the analytic derivatives at O(h^2)
    k, r0, y0 = 2, 1.4, 0.9
    _, ur, uy, _, urr, uyy = models.model_u_derivs(k, r0, y0)
    errs = []
    for h in (1e-2, 5e-3):
        fd_rr = (models.model_u(k, r0 + h, y0) - 2 * models.model_u(k, r0, y0)
                 + models.model_u(k, r0 - h, y0)) / h ** 2
        errs.append(abs(fd_rr - urr))
    assert errs[1] < errs[0] / 3.0  # second-order decay
    h = 1e-6
    assert abs((models.model_u(k, r0 + h, y0)
                - models.model_u(k, r0 - h, y0)) / (2 * h) - ur) < 1e-8
    assert abs((models.model_u(k, r0, y0 + h)
                - models.model_u(k, r0, y0 - h)) / (2 * h) - uy) < 1e-8


def test_unitary_triple_structure():
    triple = models.model_unitary_triple(2)
    a2, a3, ay, phi_z, phi1 = triple.sample(1.3, 0.4, 0.8)
    for m in (a2, a3, ay):
        assert np.max(np.abs(m + np.conj(m.T))) < 1e-12
    assert abs(np.trace(phi1)) < 1e-15
    assert abs(np.trace(phi_z)) < 1e-15


def test_unitary_triple_k0():
    triple = models.model_unitary_triple(0)
    a2, a3, ay, phi_z, phi1 = triple.sample(1.0, 0.0, 2.0)
    assert np.max(np.abs(a2)) == 0.0 and np.max(np.abs(a3)) == 0.0
    assert abs(phi_z[0, 1]) == pytest.approx(0.5)  # e^{-u0} = 1/y
    assert phi1[0, 0] == pytest.approx(0.25j)      # (1/y) * i/2


def test_unitary_triple_singular_locus():
    with pytest.raises(models.DomainError):
        models.model_unitary_triple(1).sample(1.0, 0.0, 0.0)


def _geometric_grid(n=48, lo=5e-3, hi=0.5):
    # uniform grid fine enough to give >= 8 distinct rho samples per decade
    return AxiGrid(np.linspace(lo, hi, n), np.linspace(lo, hi, n))


def _perturbed_cfg(grid, k, pert):
    from ebe.fields import model_field_config

    cfg = model_field_config(k, grid)
    rr, yy = grid.mesh()
    rho = np.hypot(rr, yy)
    psi = np.arctan2(rr, yy)
    bump = pert(rho, psi)
    cfg.phi_z = cfg.phi_z + bump[..., None, None] * np.array([[0, 1], [0, 0]],
                                                             dtype=complex)
    return cfg


def test_deviation_exact_model():
    grid = _geometric_grid()
    from ebe.fields import model_field_config

    cfg = model_field_config(1, grid)
    rep = models.nahm_pole_deviation(cfg, grid, 1, epsilon=0.4)
    assert rep.weighted_sup < 1e-12
    assert rep.bounded


def test_deviation_bounded_perturbation():
    grid = _geometric_grid()
    cfg = _perturbed_cfg(grid, 1, lambda rho, psi: rho ** -0.5 * psi ** -0.5)
    rep = models.nahm_pole_deviation(cfg, grid, 1, epsilon=0.4)
    # weighted deviation scales like (rho psi)^0.1: bounded
    assert rep.bounded
    assert rep.growth_slope > -0.02


def test_deviation_unbounded_perturbation():
    grid = _geometric_grid()
    cfg = _perturbed_cfg(grid, 1, lambda rho, psi: rho ** -1.0)
    rep = models.nahm_pole_deviation(cfg, grid, 1, epsilon=0.1)
    # weighted sup grows like rho^-0.1 toward the knot
    assert not rep.bounded
    assert rep.growth_slope < -0.02


def test_deviation_grid_too_coarse():
    grid = AxiGrid(np.linspace(0.5, 0.6, 5), np.linspace(0.5, 0.6, 5))
    from ebe.fields import model_field_config

    cfg = model_field_config(0, grid)
    with pytest.raises(models.GridTooCoarse):
        models.nahm_pole_deviation(cfg, grid, 0, epsilon=0.3)
