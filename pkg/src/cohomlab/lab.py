"""Numerical experiments on the spectral gap bound lambda_min >= kappa2
for invariant fields on warped products, with rigidity diagnostics and
the first-eigenvalue (Obata) sphere criterion.

Everything here composes the geometry, field calculus and spectral
modules into falsifiable checks: check_bound produces a verdict, the
rigidity residuals quantify how far a minimizer is from the round
equality case, and sweep runs families of profiles in parallel.

Tolerance policy: tol_disc is the discretization uncertainty, measured
by a grid-doubling difference of the vector eigenvalue (floored at
1e-8); tol_rigid = max(1e-4, 10 * tol_disc) is the detection band for
the equality case.  An exact "if and only if" statement needs a
declared band before it can be tested numerically.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .fields import InvariantField, derivative, weighted_integral
from .geometry import OrbitGeometry, RicciProfile, orbit_geometry, ricci_profile
from .spectral import (DEFAULT_TOL, OperatorKind, SpectralResult, assemble,
                       first_nonzero_scalar_eigenvalue, smallest_eigenpair)
from .warp import RadialGrid, Topology, WarpProfile, ensure_usable, grid_for

RIGID_FLOOR = 1e-4
DISC_FLOOR = 1e-8


class Verdict(Enum):
    ROUND_SPHERE_DETECTED = "RoundSphereDetected"
    STRICTLY_ABOVE_BOUND = "StrictlyAboveBound"
    HYPOTHESIS_NOT_MET = "HypothesisNotMet"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class RigidityDiagnostics:
    """Residuals of the three equality-case identities.

    umbilic_residual: max of f^2 |H^2 - |B|^2/(n-1)| over nodes.  The
    f^2 weighting matters: the identity is only forced where the
    minimizer does not vanish.  (For warped products this residual is
    zero for every profile, round or not: the orbits are always
    umbilic.  It is a one-way diagnostic.)
    radial_ode_residual: L2(w) norm of f' + H f.
    laplacian_equality_residual: |I2 - n*Ih| / max(1, I2) with
    I2 = integral of (lap h)^2 and Ih = integral of |Hess h|^2 for the
    potential h of the minimizer.
    """

    umbilic_residual: float
    radial_ode_residual: float
    laplacian_equality_residual: float

    @property
    def max_residual(self) -> float:
        return max(self.umbilic_residual, self.radial_ode_residual,
                   self.laplacian_equality_residual)


@dataclass(frozen=True)
class TheoremReport:
    kappa2: float
    lambda_min: float
    gap: float
    bound_holds: bool
    rigidity: RigidityDiagnostics
    obata_mu1: float
    verdict: Verdict
    tol_disc: float
    tol_rigid: float
    grid_N: int
    n: int
    profile_tag: str


@dataclass(frozen=True)
class ObataReport:
    """First-eigenvalue sphere criterion.

    defect = |mu1 - n*kappa2| vanishes (numerically) only on round
    profiles.  g_residual checks the complementary fact that on a round
    profile the derivative g = f' of the vector minimizer is itself a
    scalar eigenfunction: ||lap g + n*kappa2*g||_{L2(w)}, evaluated
    with an exact-resistance finite-volume Laplacian (cell resistance
    integral ds/w, node mass integral w; the pole cells have infinite
    resistance, so the boundary fluxes vanish identically).
    """

    defect: float
    mu1: float
    kappa2: float
    g_residual: float
    lambda_min: float
    grid_N: int


@dataclass(frozen=True)
class SweepRow:
    param: float
    kappa2: float
    lambda_min: float
    gap: float
    obata_defect: float
    verdict: Optional[Verdict]
    error: Optional[str] = None


def rigidity_diagnostics(minimizer: InvariantField,
                         geom: OrbitGeometry) -> RigidityDiagnostics:
    """Equality-case residuals for a computed vector minimizer."""
    grid = minimizer.grid
    n = geom.n
    fi = minimizer.interior
    fp = derivative(minimizer.values, grid, parity="odd")
    fpi = fp if grid.topology is Topology.PERIODIC else fp[1:-1]

    umb = float(np.max(fi * fi * np.abs(geom.H ** 2 - geom.B2 / (n - 1))))
    rad = math.sqrt(weighted_integral((fpi + geom.H * fi) ** 2, geom))

    # the minimizer is the gradient profile f = h', so the Laplacian of
    # its potential is f' - (n-1) f H directly
    lap = fpi - (n - 1) * fi * geom.H
    hess2 = fpi * fpi + fi * fi * geom.B2
    i2 = weighted_integral(lap * lap, geom)
    ih = weighted_integral(hess2, geom)
    lap_eq = abs(i2 - n * ih) / max(1.0, i2)
    return RigidityDiagnostics(umbilic_residual=umb, radial_ode_residual=rad,
                               laplacian_equality_residual=lap_eq)


def _vector_solve(profile: WarpProfile, N: int, tol: float):
    grid = grid_for(profile, N)
    geom = orbit_geometry(profile, grid)
    op = assemble(OperatorKind.ROUGH_VECTOR, profile, geom, grid)
    return smallest_eigenpair(op, tol=tol), geom, grid


def check_bound(profile: WarpProfile, N: int = 2048,
                tol: float = DEFAULT_TOL,
                tol_disc: Optional[float] = None) -> TheoremReport:
    """Run the bound lambda_min >= kappa2 as an experiment with verdict.

    tol_disc defaults to the grid-doubling eigenvalue difference
    |lambda_N - lambda_{N/2}| floored at 1e-8; pass a value to override.
    """
    ensure_usable(profile)
    if N % 2:
        raise ValueError("check_bound needs an even N for the doubling test")
    fine, geom, grid = _vector_solve(profile, N, tol)
    if tol_disc is None:
        coarse, _, _ = _vector_solve(profile, N // 2, tol)
        tol_disc = max(DISC_FLOOR, abs(fine.lam - coarse.lam))
    tol_rigid = max(RIGID_FLOOR, 10.0 * tol_disc)

    ricci = ricci_profile(profile, grid)
    scal_op = assemble(OperatorKind.SCALAR_LAPLACIAN, profile, geom, grid)
    mu1 = first_nonzero_scalar_eigenvalue(scal_op, tol=tol).lam
    rigid = rigidity_diagnostics(fine.eigenfunction, geom)

    kappa2 = ricci.kappa2
    gap = fine.lam - kappa2
    bound_holds = gap >= -tol_disc

    n = profile.n
    if kappa2 <= 0:
        verdict = Verdict.HYPOTHESIS_NOT_MET
    elif (abs(gap) <= tol_rigid
          and abs(mu1 - n * kappa2) <= tol_rigid * n
          and rigid.max_residual < tol_rigid):
        verdict = Verdict.ROUND_SPHERE_DETECTED
    elif gap > tol_rigid:
        verdict = Verdict.STRICTLY_ABOVE_BOUND
    else:
        verdict = Verdict.INCONCLUSIVE

    return TheoremReport(kappa2=kappa2, lambda_min=fine.lam, gap=gap,
                         bound_holds=bound_holds, rigidity=rigid,
                         obata_mu1=mu1, verdict=verdict, tol_disc=tol_disc,
                         tol_rigid=tol_rigid, grid_N=N, n=n,
                         profile_tag=profile.preset_tag)


# --- Obata criterion -----------------------------------------------------

_GLX, _GLW = np.polynomial.legendre.leggauss(8)


def _cell_integrals(fn, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Gauss-Legendre integral of fn over each interval [a_i, b_i]."""
    mid = 0.5 * (a + b)[:, None]
    half = 0.5 * (b - a)[:, None]
    return (fn(mid + half * _GLX[None, :]) * _GLW[None, :]).sum(axis=1) \
        * half[:, 0]


def _fv_scalar_residual(profile: WarpProfile, grid: RadialGrid,
                        g: np.ndarray, eig: float) -> float:
    """||lap g + eig * g||_{L2(w)} with exact-resistance FV fluxes.

    g is given at the interior nodes.  Fluxes between adjacent interior
    nodes are (g_{j+1} - g_j) / R with R the resistance integral of
    1/w over the gap; the gaps touching the poles have infinite
    resistance (w vanishes like r^{n-1}), so those fluxes are zero and
    the operator needs no boundary condition.  Node masses are the cell
    integrals of w, which also serve as the L2(w) quadrature weights.
    """
    n = profile.n
    dx = grid.dx
    r = grid.interior

    def wfun(s):
        return profile.phi(s) ** (n - 1)

    R = _cell_integrals(lambda s: 1.0 / wfun(s), r[:-1], r[1:])
    F = (g[1:] - g[:-1]) / R
    flux_left = np.concatenate(([0.0], F))
    flux_right = np.concatenate((F, [0.0]))
    m = _cell_integrals(wfun, np.maximum(r - dx / 2, 0.0),
                        np.minimum(r + dx / 2, profile.L))
    lap_g = (flux_right - flux_left) / m
    res = lap_g + eig * g
    return float(np.sqrt(np.sum(res * res * m)))


def obata_check(profile: WarpProfile, N: int = 4096,
                tol: float = DEFAULT_TOL) -> ObataReport:
    """First-eigenvalue criterion: mu1 = n*kappa2 detects the round sphere.

    Refuses profiles with kappa2 <= 0: the criterion presupposes the
    curvature hypothesis.  Besides the defect |mu1 - n*kappa2| the
    report carries the residual of the derived function g = f' of the
    vector minimizer against the scalar eigenvalue n*kappa2 (zero in
    the round equality case, where g is itself an eigenfunction).
    """
    ensure_usable(profile)
    grid = grid_for(profile, N)
    ricci = ricci_profile(profile, grid)
    if ricci.kappa2 <= 0:
        raise ValueError(
            f"Obata criterion needs kappa2 > 0; profile "
            f"{profile.preset_tag!r} has kappa2 = {ricci.kappa2:.6g}")
    geom = orbit_geometry(profile, grid)
    mu1 = first_nonzero_scalar_eigenvalue(
        assemble(OperatorKind.SCALAR_LAPLACIAN, profile, geom, grid),
        tol=tol).lam
    vec = smallest_eigenpair(
        assemble(OperatorKind.ROUGH_VECTOR, profile, geom, grid), tol=tol)
    n = profile.n
    defect = abs(mu1 - n * ricci.kappa2)
    g = derivative(vec.eigenfunction.values, grid, parity="odd")[1:-1]
    g_res = _fv_scalar_residual(profile, grid, g, n * ricci.kappa2)
    return ObataReport(defect=defect, mu1=mu1, kappa2=ricci.kappa2,
                       g_residual=g_res, lambda_min=vec.lam, grid_N=N)


# --- parameter sweeps ----------------------------------------------------

_SWEEP_PARAM = {"round": "k", "bump": "eps", "periodicproduct": "a"}


def _thread_cap(n_jobs: int) -> int:
    cap = os.environ.get("COHOMLAB_THREADS")
    if cap is not None:
        return max(1, min(n_jobs, int(cap)))
    return max(1, min(n_jobs, os.cpu_count() or 1))


def sweep(family: str, values: Sequence[float], n: int, N: int = 1024,
          tol: float = DEFAULT_TOL, param: Optional[str] = None,
          base_params: Optional[dict] = None) -> tuple:
    """check_bound across a preset family; one row per parameter value.

    Rows are computed in parallel (COHOMLAB_THREADS caps the workers)
    but returned in input order.  A failing row carries its error
    message instead of aborting the sweep.  obata_defect is
    |mu1 - n*kappa2| (well-defined for any sign of kappa2).
    """
    from .warp import make_preset

    key = family.lower().replace("_", "")
    if param is None:
        try:
            param = _SWEEP_PARAM[key]
        except KeyError:
            raise ValueError(f"unknown sweep family {family!r}") from None
    base = dict(base_params or {})

    def run(value: float) -> SweepRow:
        try:
            prof = make_preset(family, n=n, **{**base, param: float(value)})
            rep = check_bound(prof, N=N, tol=tol)
            return SweepRow(param=float(value), kappa2=rep.kappa2,
                            lambda_min=rep.lambda_min, gap=rep.gap,
                            obata_defect=abs(rep.obata_mu1 - n * rep.kappa2),
                            verdict=rep.verdict)
        except Exception as exc:  # per-row capture, sweep continues
            return SweepRow(param=float(value), kappa2=float("nan"),
                            lambda_min=float("nan"), gap=float("nan"),
                            obata_defect=float("nan"), verdict=None,
                            error=f"{type(exc).__name__}: {exc}")

    values = [float(v) for v in values]
    if len(values) <= 1 or _thread_cap(len(values)) == 1:
        return tuple(run(v) for v in values)
    with ThreadPoolExecutor(max_workers=_thread_cap(len(values))) as pool:
        return tuple(pool.map(run, values))
