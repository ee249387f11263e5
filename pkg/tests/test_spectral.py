import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cohomlab import (BoundaryCondition, ConvergenceError, InvariantField,
                      InvariantFunction, OperatorKind, Topology, assemble,
                      convergence_study, energy_functional,
                      first_nonzero_scalar_eigenvalue, grid_for, make_preset,
                      orbit_geometry, smallest_eigenpair, solve_smallest)


def _op(profile, kind, N=512):
    grid = grid_for(profile, N)
    geom = orbit_geometry(profile, grid)
    return assemble(kind, profile, geom, grid), grid, geom


def test_assemble_shapes_and_boundaries(round_n2, periodic_n3):
    op, grid, _ = _op(round_n2, OperatorKind.ROUGH_VECTOR)
    assert op.size == grid.N - 1
    assert op.boundary is BoundaryCondition.DIRICHLET
    assert op.corner == 0.0
    op, _, _ = _op(round_n2, OperatorKind.SCALAR_LAPLACIAN)
    assert op.boundary is BoundaryCondition.NEUMANN
    op, grid, _ = _op(periodic_n3, OperatorKind.ROUGH_VECTOR)
    assert op.size == grid.N
    assert op.boundary is BoundaryCondition.PERIODIC
    assert op.corner < 0.0


def test_mass_is_positive(round_n2, periodic_n3):
    for prof in (round_n2, periodic_n3):
        for kind in OperatorKind:
            op, _, _ = _op(prof, kind)
            assert np.all(op.weight > 0)


def test_scalar_operator_annihilates_constants(round_n2, periodic_n3):
    for prof in (round_n2, periodic_n3):
        op, _, _ = _op(prof, OperatorKind.SCALAR_LAPLACIAN)
        ones = np.ones(op.size)
        resid = np.max(np.abs(op.matvec(ones)))
        assert resid <= 1e-12 * np.max(op.diag)


def test_round_vector_eigenvalue(round_n2):
    res = solve_smallest(round_n2, OperatorKind.ROUGH_VECTOR, 1024)
    assert res.lam == pytest.approx(1.0, rel=1e-5)
    assert res.iterations > 0
    assert isinstance(res.eigenfunction, InvariantField)


def test_round_scalar_mu1(round_n3):
    res = solve_smallest(round_n3, OperatorKind.SCALAR_LAPLACIAN, 1024)
    assert res.lam == pytest.approx(3.0, rel=1e-5)
    assert isinstance(res.eigenfunction, InvariantFunction)
    # W-orthogonal to constants
    grid = res.eigenfunction.grid
    geom = orbit_geometry(round_n3, grid)
    mean = float(np.sum(res.eigenfunction.interior
                        * geom.w_interior)) * grid.dx
    assert abs(mean) <= 1e-8


def test_rayleigh_consistency(round_n2, bump01_n2, periodic_n3):
    for prof in (round_n2, bump01_n2, periodic_n3):
        res = solve_smallest(prof, OperatorKind.ROUGH_VECTOR, 512)
        assert abs(res.rayleigh - res.lam) <= 1e-10 * max(1.0, abs(res.lam))


def test_residual_certificate(bump01_n2):
    op, _, _ = _op(bump01_n2, OperatorKind.ROUGH_VECTOR, 1024)
    res = smallest_eigenpair(op, tol=1e-8)
    x = res.eigenfunction.interior
    r = op.matvec(x) - res.lam * op.weight * x
    assert np.linalg.norm(r) <= 1e-8 * np.linalg.norm(op.weight * x)


def test_eigenvalue_normalization(round_n2):
    res = solve_smallest(round_n2, OperatorKind.ROUGH_VECTOR, 512)
    grid = res.eigenfunction.grid
    geom = orbit_geometry(round_n2, grid)
    fi = res.eigenfunction.interior
    assert float(np.sum(fi * fi * geom.w_interior) * grid.dx) \
        == pytest.approx(1.0, rel=1e-12)
    nz = fi[np.abs(fi) > 1e-12 * np.max(np.abs(fi))]
    assert nz[0] > 0  # deterministic sign


def test_flat_periodic_is_exact_kernel():
    flat = make_preset("PeriodicProduct", n=3, c=1.0, a=0.0)
    res = solve_smallest(flat, OperatorKind.ROUGH_VECTOR, 256)
    assert res.lam == 0.0
    assert res.iterations == 0  # the seed already solves it
    v = res.eigenfunction.values
    assert np.max(np.abs(v - v[0])) == 0.0


def test_periodic_modulated_eigenvalue(periodic_n3):
    res = solve_smallest(periodic_n3, OperatorKind.ROUGH_VECTOR, 1024)
    assert res.lam == pytest.approx(0.0843062568, abs=1e-7)
    assert res.lam > 0


def test_flat_periodic_scalar_mu1():
    flat = make_preset("PeriodicProduct", n=3, c=1.0, a=0.0)
    res = solve_smallest(flat, OperatorKind.SCALAR_LAPLACIAN, 512)
    # first nonzero mode cos(2 pi r / L), eigenvalue (2 pi / L)^2 = 1
    assert res.lam == pytest.approx(1.0, rel=1e-4)


def test_richardson_extrapolation(round_n2):
    res = solve_smallest(round_n2, OperatorKind.ROUGH_VECTOR, 1024,
                         richardson=True)
    assert res.extrapolated is not None
    assert abs(res.extrapolated - 1.0) <= 1e-9
    with pytest.raises(ValueError, match="even"):
        solve_smallest(round_n2, OperatorKind.ROUGH_VECTOR, 129,
                       richardson=True)


def test_first_nonzero_requires_scalar(round_n2):
    op, _, _ = _op(round_n2, OperatorKind.ROUGH_VECTOR)
    with pytest.raises(ValueError, match="scalar"):
        first_nonzero_scalar_eigenvalue(op)


def test_solver_rejects_bad_tol(round_n2):
    op, _, _ = _op(round_n2, OperatorKind.ROUGH_VECTOR)
    with pytest.raises(ValueError):
        smallest_eigenpair(op, tol=0.0)


def test_convergence_error_carries_residual(round_n2):
    op, _, _ = _op(round_n2, OperatorKind.ROUGH_VECTOR, 1024)
    with pytest.raises(ConvergenceError) as info:
        smallest_eigenpair(op, tol=1e-8, max_iter=1)
    assert info.value.last_residual > 0


def test_convergence_study_orders(round_n2):
    study = convergence_study(round_n2, OperatorKind.ROUGH_VECTOR,
                              [256, 512, 1024])
    assert len(study.orders) == 1
    assert study.orders[0] == pytest.approx(2.0, abs=0.2)
    with pytest.raises(ValueError, match="double"):
        convergence_study(round_n2, OperatorKind.ROUGH_VECTOR, [256, 700, 1400])
    with pytest.raises(ValueError, match="3 grids"):
        convergence_study(round_n2, OperatorKind.ROUGH_VECTOR, [256, 512])


def test_convergence_study_exact_case():
    flat = make_preset("PeriodicProduct", n=3, c=1.0, a=0.0)
    study = convergence_study(flat, OperatorKind.ROUGH_VECTOR, [64, 128, 256])
    assert study.orders == (None,)  # reported as exact


def test_eigenfunction_matches_sine(round_n2):
    res = solve_smallest(round_n2, OperatorKind.ROUGH_VECTOR, 2048)
    grid = res.eigenfunction.grid
    geom = orbit_geometry(round_n2, grid)
    fi = res.eigenfunction.interior
    ti = np.sin(grid.interior)
    c = float(np.sum(fi * ti * geom.w_interior)
              / np.sum(ti * ti * geom.w_interior))
    err = math.sqrt(float(np.sum((fi - c * ti) ** 2 * geom.w_interior)
                          / np.sum(fi * fi * geom.w_interior)))
    assert err <= 1e-4


def test_variational_bound_on_eigenfunction(round_n2, bump01_n2):
    # quotient and operator share one quadrature: F(eigf) = lambda
    for prof in (round_n2, bump01_n2):
        res = solve_smallest(prof, OperatorKind.ROUGH_VECTOR, 512)
        geom = orbit_geometry(prof, res.eigenfunction.grid)
        assert energy_functional(res.eigenfunction, geom) \
            == pytest.approx(res.lam, abs=1e-12)


@settings(max_examples=15, deadline=None)
@given(c=st.floats(0.5, 2.0))
def test_curvature_scaling_covariance(c):
    lam1 = solve_smallest(make_preset("Round", n=3, k=1.0),
                          OperatorKind.ROUGH_VECTOR, 256).lam
    lam2 = solve_smallest(make_preset("Round", n=3, k=c),
                          OperatorKind.ROUGH_VECTOR, 256).lam
    assert lam2 == pytest.approx(c * c * lam1, rel=1e-6)


@settings(max_examples=15, deadline=None)
@given(eps=st.floats(0.0, 0.45))
def test_solver_converges_across_bump_family(eps):
    res = solve_smallest(make_preset("Bump", n=3, eps=eps),
                         OperatorKind.ROUGH_VECTOR, 256)
    assert res.residual <= 1e-8 * 10  # certificate recorded
    assert res.lam > 0
