"""Per-orbit extrinsic geometry and Ricci curvature of a warped product.

With unit normal N = +d/dr the principal orbit {r} x S^{n-1} has mean
curvature H = -phi'/phi and second-fundamental-form norm
|B|^2 = (n-1)(phi'/phi)^2; the sign convention is fixed so that
Delta h = N(f) - (n-1) f H holds verbatim for radial h with f = h'.
Orbits in this class are umbilic, so |B|^2 = (n-1) H^2 exactly.

Flipping the orientation of N flips H but leaves H^2, |B|^2, f*H
products and every reported residual unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .warp import RadialGrid, Topology, WarpProfile, ensure_usable


@dataclass(frozen=True)
class OrbitGeometry:
    """H, |B|^2 over interior nodes; weight w = phi^{n-1} over all nodes.

    For sphere-like profiles w vanishes at the two pole nodes and the
    per-orbit arrays cover nodes 1..N-1 only; periodic profiles have no
    singular nodes and all arrays cover nodes 0..N-1.
    """

    H: np.ndarray
    B2: np.ndarray
    w: np.ndarray
    w_mid: np.ndarray
    grid: RadialGrid
    n: int

    @property
    def w_interior(self) -> np.ndarray:
        if self.grid.topology is Topology.PERIODIC:
            return self.w
        return self.w[1:-1]


@dataclass(frozen=True)
class RicciProfile:
    """Radial and tangential Ricci values with the best lower bound.

    kappa2 = ric_min / (n-1) is the largest constant with
    Ric >= (n-1) * kappa2; it may be zero or negative, in which case the
    positive-Ricci hypothesis of the bound has no content.
    """

    ric_radial: np.ndarray
    ric_tangential: np.ndarray
    ric_min: float
    kappa2: float
    argmin_r: float
    grid: RadialGrid
    n: int


def orbit_geometry(profile: WarpProfile, grid: RadialGrid) -> OrbitGeometry:
    ensure_usable(profile)
    n = profile.n
    ri = grid.interior
    phi = np.asarray(profile.phi(ri), float)
    dphi = np.asarray(profile.dphi(ri), float)
    quot = dphi / phi
    H = -quot
    B2 = (n - 1) * quot * quot
    w = np.asarray(profile.phi(grid.nodes), float) ** (n - 1)
    if grid.topology is Topology.SPHERE_LIKE:
        # poles carry zero weight exactly, whatever roundoff phi(L) left
        w[0] = 0.0
        w[-1] = 0.0
    # half-node weights: evaluating phi at cell midpoints sidesteps the
    # coordinate singularity without special-casing the pole cells
    w_mid = np.asarray(profile.phi(grid.midpoints), float) ** (n - 1)
    for name, arr in (("H", H), ("B2", B2), ("w", w), ("w_mid", w_mid)):
        bad = np.where(~np.isfinite(arr))[0]
        if bad.size:
            raise ValueError(
                f"{name} is not finite at node {int(bad[0])} "
                f"(profile {profile.preset_tag})")
    return OrbitGeometry(H=H, B2=B2, w=w, w_mid=w_mid, grid=grid, n=n)


def ricci_profile(profile: WarpProfile, grid: RadialGrid) -> RicciProfile:
    """Warped-product Ricci values on interior nodes.

    ric_radial = -(n-1) phi''/phi (any unit normal direction) and
    ric_tangential = -phi''/phi + (n-2)(1 - phi'^2)/phi^2 (any unit
    orbit direction); the adapted frame diagonalizes Ric, so every
    direction is a convex combination of these two and the global
    minimum is the nodewise min over both arrays.  Smooth closure makes
    the omitted pole limits agree with neighboring interior values.
    """
    ensure_usable(profile)
    n = profile.n
    ri = grid.interior
    phi = np.asarray(profile.phi(ri), float)
    dphi = np.asarray(profile.dphi(ri), float)
    d2phi = np.asarray(profile.d2phi(ri), float)
    ric_radial = -(n - 1) * d2phi / phi
    ric_tangential = -d2phi / phi + (n - 2) * (1.0 - dphi * dphi) / (phi * phi)
    for name, arr in (("ric_radial", ric_radial),
                      ("ric_tangential", ric_tangential)):
        bad = np.where(~np.isfinite(arr))[0]
        if bad.size:
            raise ValueError(
                f"{name} is not finite at node {int(bad[0])} "
                f"(profile {profile.preset_tag})")
    stacked = np.minimum(ric_radial, ric_tangential)
    i = int(np.argmin(stacked))
    ric_min = float(stacked[i])
    return RicciProfile(
        ric_radial=ric_radial,
        ric_tangential=ric_tangential,
        ric_min=ric_min,
        kappa2=ric_min / (n - 1),
        argmin_r=float(ri[i]),
        grid=grid,
        n=n,
    )
