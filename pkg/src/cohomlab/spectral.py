"""Flux-form discretization of the rough Laplacian on invariant fields
and of the scalar Laplacian on invariant functions, plus extremal
eigenpair solvers.

Both operators reduce to singular Sturm-Liouville problems in the
radial variable: -(w f')'/w + |B|^2 f = lambda f for the vector case
(Dirichlet at sphere-like poles, where fields must vanish) and
-(w h')'/w = mu h for the scalar case (Neumann, realized by dropping
the pole fluxes).  The divergence (flux) form with half-node weights
w_{i+1/2} = phi^{n-1}(midpoint) keeps the stiffness symmetric and
never evaluates 1/phi at a pole, and it gives the discrete problem the
same variational structure as the energy quotient, so the Rayleigh
principle holds exactly at the discrete level.

Eigenvalues are the positive-spectrum convention: K approximates
-(w f')' + w |B|^2 f >= 0, so the reported spectrum is that of -div
grad (nonnegative).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional, Union

import numpy as np
from scipy.linalg import cho_solve_banded, cholesky_banded

from .fields import InvariantField, InvariantFunction
from .geometry import OrbitGeometry
from .warp import MIN_GRID, RadialGrid, Topology, WarpProfile

# relative residual target; 1e-8 sits an order of magnitude above the
# roundoff floor of the residual evaluation on the tightest grids
DEFAULT_TOL = 1e-8
MAX_ITER = 200


class OperatorKind(Enum):
    ROUGH_VECTOR = "rough_vector"
    SCALAR_LAPLACIAN = "scalar_laplacian"


class BoundaryCondition(Enum):
    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"
    PERIODIC = "periodic"


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, last_residual: float):
        super().__init__(message)
        self.last_residual = last_residual


@dataclass(frozen=True, eq=False)
class DiscreteOperator:
    """Generalized symmetric eigenproblem K f = lambda W f.

    diag/offdiag hold the (cyclic) tridiagonal stiffness K, weight the
    diagonal mass W = w_i dx (positive at every retained node), corner
    the single wrap-around stiffness entry (periodic only, else 0).
    """

    kind: OperatorKind
    diag: np.ndarray
    offdiag: np.ndarray
    weight: np.ndarray
    boundary: BoundaryCondition
    grid: RadialGrid
    corner: float = 0.0

    @property
    def size(self) -> int:
        return self.diag.size

    def matvec(self, x: np.ndarray) -> np.ndarray:
        y = self.diag * x
        y[:-1] += self.offdiag * x[1:]
        y[1:] += self.offdiag * x[:-1]
        if self.corner != 0.0:
            y[0] += self.corner * x[-1]
            y[-1] += self.corner * x[0]
        return y

    def quadform(self, x: np.ndarray) -> float:
        return float(x @ self.matvec(x))


@dataclass(frozen=True)
class SpectralResult:
    lam: float
    eigenfunction: Union[InvariantField, InvariantFunction]
    rayleigh: float
    iterations: int
    residual: float
    grid_N: int
    extrapolated: Optional[float] = None
    shift_perturbed: bool = False


def assemble(kind: OperatorKind, profile: WarpProfile, geom: OrbitGeometry,
             grid: RadialGrid) -> DiscreteOperator:
    """Build the flux-form operator pair (K, W) on the retained nodes.

    Sphere-like grids retain the interior nodes 1..N-1 (the poles carry
    zero weight and either a Dirichlet value or no flux); periodic
    grids retain all N distinct nodes with a cyclic corner entry.
    """
    dx = grid.dx
    wm = geom.w_mid
    if grid.topology is Topology.SPHERE_LIKE:
        if kind is OperatorKind.ROUGH_VECTOR and grid.N < MIN_GRID:
            raise ValueError(f"vector problem needs N >= {MIN_GRID}")
        w_int = geom.w_interior
        diag = (wm[:-1] + wm[1:]) / dx
        off = -wm[1:-1] / dx
        if kind is OperatorKind.ROUGH_VECTOR:
            diag = diag + dx * w_int * geom.B2
            boundary = BoundaryCondition.DIRICHLET
        else:
            # no flux through the poles: drop the two boundary cells
            diag = diag.copy()
            diag[0] -= wm[0] / dx
            diag[-1] -= wm[-1] / dx
            boundary = BoundaryCondition.NEUMANN
        weight = w_int * dx
        corner = 0.0
    else:
        diag = (np.roll(wm, 1) + wm) / dx
        if kind is OperatorKind.ROUGH_VECTOR:
            diag = diag + dx * geom.w * geom.B2
        off = -wm[:-1] / dx
        corner = float(-wm[-1] / dx)
        weight = geom.w * dx
        boundary = BoundaryCondition.PERIODIC
    if not np.all(weight > 0):
        raise ValueError("mass entries must be positive at retained nodes")
    return DiscreteOperator(kind=kind, diag=diag, offdiag=off, weight=weight,
                            boundary=boundary, grid=grid, corner=corner)


# --- banded solves -------------------------------------------------------

def _factor(op: DiscreteOperator, sigma: float):
    """Cholesky factor of K - sigma W (cyclic corner handled separately).

    For the periodic case K_c = T' + c u u^T with u = e_0 + e_{M-1} and
    c = corner < 0, so T' = K_c - c u u^T stays positive definite and a
    single Sherman-Morrison correction recovers the cyclic solve.
    """
    d = op.diag - sigma * op.weight
    if op.boundary is BoundaryCondition.PERIODIC:
        d = d.copy()
        d[0] -= op.corner
        d[-1] -= op.corner
    ab = np.zeros((2, op.size))
    ab[0, 1:] = op.offdiag
    ab[1, :] = d
    cb = cholesky_banded(ab)

    if op.boundary is not BoundaryCondition.PERIODIC:
        return lambda b: cho_solve_banded((cb, False), b)

    u = np.zeros(op.size)
    u[0] = 1.0
    u[-1] = 1.0
    z = cho_solve_banded((cb, False), u)
    denom = 1.0 + op.corner * float(u @ z)

    def solve(b):
        y = cho_solve_banded((cb, False), b)
        return y - (op.corner * float(u @ y) / denom) * z

    return solve


def _default_seed(op: DiscreteOperator) -> np.ndarray:
    if (op.kind is OperatorKind.ROUGH_VECTOR
            and op.boundary is BoundaryCondition.DIRICHLET):
        r = op.grid.nodes[1:-1]
        return np.sin(math.pi * r / op.grid.L)
    return np.ones(op.size)


def _b_normalize(x: np.ndarray, W: np.ndarray) -> np.ndarray:
    return x / math.sqrt(float(x @ (W * x)))


def _fix_sign(x: np.ndarray) -> np.ndarray:
    nz = np.where(np.abs(x) > 1e-12 * float(np.max(np.abs(x))))[0]
    if nz.size and x[nz[0]] < 0:
        return -x
    return x


def _inverse_iterate(op: DiscreteOperator, tol: float, max_iter: int,
                     seed: np.ndarray, deflate: Optional[np.ndarray]):
    """Shifted inverse iteration on K f = lambda W f.

    deflate, when given, is a direction removed W-orthogonally from
    every iterate (used to step past the constant kernel of the scalar
    problem).  Converged when ||K x - lambda W x|| <= tol ||W x||.
    """
    W = op.weight

    def project(v):
        if deflate is None:
            return v
        return v - (float(deflate @ (W * v))
                    / float(deflate @ (W * deflate))) * deflate

    x = project(np.asarray(seed, float))
    norm = float(x @ (W * x))
    if norm <= 0:
        raise ValueError("seed vector vanishes after deflation")
    x = x / math.sqrt(norm)

    def residual_of(v):
        lam = float(v @ op.matvec(v))
        r = op.matvec(v) - lam * (W * v)
        return lam, float(np.linalg.norm(r)), float(np.linalg.norm(W * v))

    lam, rnorm, wnorm = residual_of(x)
    if rnorm <= tol * wnorm:
        return lam, x, 0, rnorm, False

    sigma = -1e-8 * max(1.0, abs(lam))
    shift_perturbed = False
    solve = None
    for attempt in range(4):
        try:
            solve = _factor(op, sigma)
            break
        except np.linalg.LinAlgError:
            # singular shift: nudge it further into the definite region
            sigma = sigma * 10.0 - 1e-12 * max(1.0, abs(lam))
            shift_perturbed = True
    if solve is None:
        raise ConvergenceError("could not factor the shifted operator",
                               last_residual=float("inf"))

    for it in range(1, max_iter + 1):
        x = project(solve(W * x))
        x = _b_normalize(x, W)
        lam, rnorm, wnorm = residual_of(x)
        if rnorm <= tol * wnorm:
            return lam, x, it, rnorm, shift_perturbed
    raise ConvergenceError(
        f"no convergence after {max_iter} iterations "
        f"(residual {rnorm:.3e}, target {tol * wnorm:.3e})",
        last_residual=rnorm)


def _package(op: DiscreteOperator, lam: float, x: np.ndarray, iterations: int,
             residual: float, shift_perturbed: bool) -> SpectralResult:
    x = _fix_sign(_b_normalize(x, op.weight))
    rayleigh = op.quadform(x) / float(x @ (op.weight * x))
    grid = op.grid
    if grid.topology is Topology.SPHERE_LIKE:
        if op.kind is OperatorKind.ROUGH_VECTOR:
            full = np.zeros(grid.N + 1)
            full[1:-1] = x
            fn = InvariantField(values=full, grid=grid)
        else:
            full = np.empty(grid.N + 1)
            full[1:-1] = x
            # parabolic even extension h = a + b r^2 onto the poles
            full[0] = (4.0 * x[0] - x[1]) / 3.0
            full[-1] = (4.0 * x[-1] - x[-2]) / 3.0
            fn = InvariantFunction(values=full, grid=grid)
    else:
        if op.kind is OperatorKind.ROUGH_VECTOR:
            fn = InvariantField(values=x, grid=grid)
        else:
            fn = InvariantFunction(values=x, grid=grid)
    return SpectralResult(lam=lam, eigenfunction=fn, rayleigh=rayleigh,
                          iterations=iterations, residual=residual,
                          grid_N=grid.N, shift_perturbed=shift_perturbed)


def smallest_eigenpair(op: DiscreteOperator, tol: float = DEFAULT_TOL,
                       max_iter: int = MAX_ITER) -> SpectralResult:
    """Smallest eigenvalue of K f = lambda W f by shifted inverse iteration.

    Deterministic: the seed is sin(pi r / L) for the Dirichlet vector
    problem and the constant vector otherwise.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    lam, x, it, res, pert = _inverse_iterate(
        op, tol, max_iter, _default_seed(op), deflate=None)
    return _package(op, lam, x, it, res, pert)


def first_nonzero_scalar_eigenvalue(op: DiscreteOperator,
                                    tol: float = DEFAULT_TOL,
                                    max_iter: int = MAX_ITER) -> SpectralResult:
    """Smallest eigenvalue on the subspace W-orthogonal to constants.

    The scalar operator annihilates constants (the flux form
    telescopes), so the first nonzero eigenvalue is found by deflating
    the constant mode from every iterate.
    """
    if op.kind is not OperatorKind.SCALAR_LAPLACIAN:
        raise ValueError("first nonzero eigenvalue is a scalar-operator query")
    r = (op.grid.nodes[1:-1] if op.grid.topology is Topology.SPHERE_LIKE
         else op.grid.nodes)
    period = 1.0 if op.grid.topology is Topology.SPHERE_LIKE else 2.0
    seed = np.cos(period * math.pi * r / op.grid.L)
    ones = np.ones(op.size)
    lam, x, it, res, pert = _inverse_iterate(
        op, tol, max_iter, seed, deflate=ones)
    return _package(op, lam, x, it, res, pert)


def solve_smallest(profile: WarpProfile, kind: OperatorKind, N: int,
                   tol: float = DEFAULT_TOL,
                   richardson: bool = False) -> SpectralResult:
    """Assemble and solve at grid N; optionally Richardson-extrapolate
    the eigenvalue against the halved grid (second-order scheme, so
    lam_extrap = lam_N + (lam_N - lam_{N/2}) / 3).

    The scalar kind reports the first nonzero eigenvalue.
    """
    from .geometry import orbit_geometry
    from .warp import grid_for

    def run(m: int) -> SpectralResult:
        grid = grid_for(profile, m)
        geom = orbit_geometry(profile, grid)
        oper = assemble(kind, profile, geom, grid)
        if kind is OperatorKind.SCALAR_LAPLACIAN:
            return first_nonzero_scalar_eigenvalue(oper, tol=tol)
        return smallest_eigenpair(oper, tol=tol)

    result = run(N)
    if richardson:
        if N % 2:
            raise ValueError("richardson extrapolation needs an even N")
        coarse = run(N // 2)
        extrap = result.lam + (result.lam - coarse.lam) / 3.0
        result = replace(result, extrapolated=extrap)
    return result


@dataclass(frozen=True)
class ConvergenceStudy:
    grids: tuple
    lambdas: tuple
    orders: tuple  # one entry per successive grid triple; None means exact


def convergence_study(profile: WarpProfile, kind: OperatorKind,
                      grids, tol: float = DEFAULT_TOL) -> ConvergenceStudy:
    """Eigenvalues over a doubling family of grids with observed orders.

    order p = log2((lam_N - lam_2N) / (lam_2N - lam_4N)) per triple;
    when successive eigenvalues agree to roundoff (a degenerate exact
    case such as the flat periodic product) the order is reported as
    exact (None).
    """
    grids = [int(g) for g in grids]
    if len(grids) < 3:
        raise ValueError("convergence study needs at least 3 grids")
    for a, b in zip(grids, grids[1:]):
        if b != 2 * a:
            raise ValueError("grids must double: got %d after %d" % (b, a))
    lams = [solve_smallest(profile, kind, g, tol=tol).lam for g in grids]
    orders = []
    for l1, l2, l3 in zip(lams, lams[1:], lams[2:]):
        d1 = l1 - l2
        d2 = l2 - l3
        scale = max(1.0, abs(l3))
        if abs(d1) < 1e-13 * scale and abs(d2) < 1e-13 * scale:
            orders.append(None)
        elif d2 == 0.0 or d1 / d2 <= 0.0:
            orders.append(float("nan"))
        else:
            orders.append(math.log2(d1 / d2))
    return ConvergenceStudy(grids=tuple(grids), lambdas=tuple(lams),
                            orders=tuple(orders))
