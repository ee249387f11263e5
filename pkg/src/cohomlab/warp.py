"""Warped-product manifold profiles over an interval or a circle.

A profile describes a metric dr^2 + phi(r)^2 g_{S^{n-1}} on either
[0, L] x S^{n-1} (sphere-like, two singular point-orbits at the ends)
or S^1 x S^{n-1} (periodic).  Smooth closure of a sphere-like profile
requires phi(0) = phi(L) = 0 with phi'(0) = 1 and phi'(L) = -1; a
periodic profile must match value and first two derivatives at the
seam.  Profiles are immutable and safe to share across workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

ANALYTIC_CLOSURE_TOL = 1e-10
SPLINE_CLOSURE_TOL = 1e-6
MIN_GRID = 16


class Topology(Enum):
    SPHERE_LIKE = "sphere_like"
    PERIODIC = "periodic"


@dataclass(frozen=True, eq=False)
class WarpProfile:
    """Warping function phi with its first two derivatives.

    phi, dphi, d2phi accept and return numpy arrays (or floats).
    closure_tol separates modeling error from discretization error:
    analytic presets must close to 1e-10, sampled splines to 1e-6.
    """

    n: int
    topology: Topology
    L: float
    phi: Callable
    dphi: Callable
    d2phi: Callable
    preset_tag: str
    closure_tol: float = ANALYTIC_CLOSURE_TOL

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"dimension n must be >= 2, got {self.n}")
        if not self.L > 0:
            raise ValueError(f"domain length must be positive, got {self.L}")


@dataclass(frozen=True)
class RadialGrid:
    """Uniform nodes r_i = i * (L / N), i = 0..N."""

    N: int
    L: float
    topology: Topology

    def __post_init__(self):
        if self.N < MIN_GRID:
            raise ValueError(f"grid needs N >= {MIN_GRID}, got {self.N}")

    @property
    def dx(self) -> float:
        return self.L / self.N

    @property
    def nodes(self) -> np.ndarray:
        """All nodes 0..N (periodic arrays drop the duplicate seam node)."""
        if self.topology is Topology.PERIODIC:
            return np.arange(self.N) * self.dx
        return np.arange(self.N + 1) * self.dx

    @property
    def interior(self) -> np.ndarray:
        """Nodes carrying per-orbit data: poles excluded when singular."""
        if self.topology is Topology.PERIODIC:
            return self.nodes
        return self.nodes[1:-1]

    @property
    def midpoints(self) -> np.ndarray:
        if self.topology is Topology.PERIODIC:
            return (np.arange(self.N) + 0.5) * self.dx
        return (np.arange(self.N) + 0.5) * self.dx


def grid_for(profile: WarpProfile, N: int) -> RadialGrid:
    return RadialGrid(N=N, L=profile.L, topology=profile.topology)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    residual: float
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    profile_tag: str
    checks: tuple

    @property
    def usable(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.passed]


def round_profile(k: float, n: int) -> WarpProfile:
    """Round sphere of curvature k^2: phi = sin(kr)/k on [0, pi/k]."""
    if not k > 0:
        raise ValueError(f"curvature scale k must be positive, got {k}")
    return WarpProfile(
        n=n,
        topology=Topology.SPHERE_LIKE,
        L=math.pi / k,
        phi=lambda r: np.sin(k * np.asarray(r, float)) / k,
        dphi=lambda r: np.cos(k * np.asarray(r, float)),
        d2phi=lambda r: -k * np.sin(k * np.asarray(r, float)),
        preset_tag=f"round(k={k!r})",
    )


def bump_profile(eps: float, n: int) -> WarpProfile:
    """One-parameter deformation of the unit round profile on [0, pi].

    phi = sin(r) * (1 + eps * sin(r)^2).  eps = 0 collapses to round(k=1).
    """
    if not abs(eps) < 1:
        raise ValueError(f"bump needs |eps| < 1 to keep phi positive, got {eps}")

    def phi(r):
        s = np.sin(np.asarray(r, float))
        return s * (1.0 + eps * s * s)

    def dphi(r):
        r = np.asarray(r, float)
        s, c = np.sin(r), np.cos(r)
        return c * (1.0 + 3.0 * eps * s * s)

    def d2phi(r):
        r = np.asarray(r, float)
        s = np.sin(r)
        return -s * (1.0 - 6.0 * eps + 9.0 * eps * s * s)

    return WarpProfile(
        n=n,
        topology=Topology.SPHERE_LIKE,
        L=math.pi,
        phi=phi,
        dphi=dphi,
        d2phi=d2phi,
        preset_tag=f"bump(eps={eps!r})",
    )


def periodic_product_profile(c: float, a: float, n: int,
                             L: float = 2.0 * math.pi) -> WarpProfile:
    """Fiber radius c modulated by a * sin(2 pi r / L) around a circle.

    a = 0 is the flat metric product S^1 x S^{n-1}.
    """
    if not (0 <= a < c):
        raise ValueError(f"periodic product needs 0 <= a < c, got a={a}, c={c}")
    om = 2.0 * math.pi / L
    return WarpProfile(
        n=n,
        topology=Topology.PERIODIC,
        L=L,
        phi=lambda r: c + a * np.sin(om * np.asarray(r, float)),
        dphi=lambda r: a * om * np.cos(om * np.asarray(r, float)),
        d2phi=lambda r: -a * om * om * np.sin(om * np.asarray(r, float)),
        preset_tag=f"periodic_product(c={c!r}, a={a!r})",
    )


def profile_from_samples(r: Sequence[float], phi: Sequence[float], n: int,
                         topology: Topology = Topology.SPHERE_LIKE) -> WarpProfile:
    """Cubic-spline profile through (r, phi) samples.

    Sphere-like splines are clamped to the closure slopes +1 / -1 at the
    ends; periodic splines wrap.  C^2 evaluation is needed because the
    Ricci formulas read phi''.
    """
    r = np.asarray(r, float)
    phi = np.asarray(phi, float)
    if r.ndim != 1 or r.shape != phi.shape or r.size < 4:
        raise ValueError("samples need matching 1-d arrays of length >= 4")
    if not np.all(np.diff(r) > 0):
        raise ValueError("sample abscissae must be strictly increasing")
    if topology is Topology.SPHERE_LIKE:
        spline = CubicSpline(r, phi, bc_type=((1, 1.0), (1, -1.0)))
    else:
        if abs(phi[0] - phi[-1]) > SPLINE_CLOSURE_TOL:
            raise ValueError("periodic samples must match at the seam")
        spline = CubicSpline(r, phi, bc_type="periodic")
    d1 = spline.derivative(1)
    d2 = spline.derivative(2)
    return WarpProfile(
        n=n,
        topology=topology,
        L=float(r[-1] - r[0]),
        phi=lambda x: spline(np.asarray(x, float) + r[0]),
        dphi=lambda x: d1(np.asarray(x, float) + r[0]),
        d2phi=lambda x: d2(np.asarray(x, float) + r[0]),
        preset_tag=f"samples(m={r.size})",
        closure_tol=SPLINE_CLOSURE_TOL,
    )


def make_preset(kind: str, n: int, **params) -> WarpProfile:
    """Build a named preset: Round(k), Bump(eps), PeriodicProduct(c, a).

    Kind is case-insensitive and underscore-insensitive, so the config
    spelling "periodic_product" and the display name "PeriodicProduct"
    both work.
    """
    kind = kind.lower().replace("_", "")
    if kind == "round":
        return round_profile(k=params.pop("k", 1.0), n=n)
    if kind == "bump":
        return bump_profile(eps=params.pop("eps", 0.0), n=n)
    if kind == "periodicproduct":
        return periodic_product_profile(
            c=params.pop("c", 1.0), a=params.pop("a", 0.0), n=n,
            L=params.pop("L", 2.0 * math.pi))
    raise ValueError(f"unknown preset kind {kind!r}")


def _fd1(fn, r, h):
    return (fn(r + h) - fn(r - h)) / (2.0 * h)


def validate(profile: WarpProfile, samples: int = 512) -> ValidationReport:
    """Run positivity, closure and derivative-consistency checks.

    Report-valued: failures never raise here.  Downstream operations
    refuse profiles whose report is not usable.
    """
    L, tol = profile.L, profile.closure_tol
    checks = []

    rs = (np.arange(1, samples) / samples) * L
    vals = np.asarray(profile.phi(rs), float)
    bad = np.where(~(vals > 0))[0]
    if bad.size:
        i = int(bad[0])
        checks.append(CheckResult(
            "positivity", False, float(vals[i]),
            f"phi(r) <= 0 at r={rs[i]:.6g} (sample {i + 1}/{samples})"))
    else:
        checks.append(CheckResult("positivity", True, float(vals.min())))

    if profile.topology is Topology.SPHERE_LIKE:
        res = {
            "closure phi(0)=0": abs(float(profile.phi(0.0))),
            "closure phi(L)=0": abs(float(profile.phi(L))),
            "closure phi'(0)=1": abs(float(profile.dphi(0.0)) - 1.0),
            "closure phi'(L)=-1": abs(float(profile.dphi(L)) + 1.0),
        }
    else:
        res = {
            "periodic phi": abs(float(profile.phi(0.0)) - float(profile.phi(L))),
            "periodic phi'": abs(float(profile.dphi(0.0)) - float(profile.dphi(L))),
            "periodic phi''": abs(float(profile.d2phi(0.0)) - float(profile.d2phi(L))),
        }
    for name, r in res.items():
        checks.append(CheckResult(name, r <= tol, r,
                                  "" if r <= tol else f"residual {r:.3g} > {tol:g}"))

    # supplied derivatives must agree with finite differences of phi itself
    probe = (np.arange(1, 32) / 32.0) * L
    h = 1e-5 * L
    e1 = float(np.max(np.abs(_fd1(profile.phi, probe, h)
                             - profile.dphi(probe))))
    e2 = float(np.max(np.abs(_fd1(profile.dphi, probe, h)
                             - profile.d2phi(probe))))
    scale = max(1.0, float(np.max(np.abs(profile.dphi(probe)))))
    checks.append(CheckResult("phi' consistent with phi", e1 <= 1e-6 * scale, e1))
    checks.append(CheckResult("phi'' consistent with phi'", e2 <= 1e-4 * scale, e2))

    return ValidationReport(profile_tag=profile.preset_tag, checks=tuple(checks))


_VALIDATION_CACHE: dict = {}


def ensure_usable(profile: WarpProfile) -> None:
    """Raise if the profile fails validation (cached per instance)."""
    key = id(profile)
    report = _VALIDATION_CACHE.get(key)
    if report is None or report[0] is not profile:
        report = (profile, validate(profile))
        if len(_VALIDATION_CACHE) > 256:
            _VALIDATION_CACHE.clear()
        _VALIDATION_CACHE[key] = report
    rep = report[1]
    if not rep.usable:
        names = ", ".join(c.name for c in rep.failures())
        raise ValueError(
            f"profile {profile.preset_tag} is not usable; failed: {names}")


# --- JSON config schema -------------------------------------------------
#
# {"n": int, "topology": "sphere_like"|"periodic",
#  "preset": {"type": "round"|"bump"|"periodic_product"|"samples", ...},
#  "grid": {"N": int}}

def _cfg_get(cfg: dict, key: str, path: str):
    if key not in cfg:
        raise ValueError(f"config path '{path}{key}': missing")
    return cfg[key]


def profile_from_config(cfg: dict) -> tuple[WarpProfile, RadialGrid]:
    n = _cfg_get(cfg, "n", "")
    if not isinstance(n, int) or n < 2:
        raise ValueError(f"config path 'n': expected integer >= 2, got {n!r}")
    topo_name = _cfg_get(cfg, "topology", "")
    try:
        topology = Topology(topo_name)
    except ValueError:
        raise ValueError(
            f"config path 'topology': expected 'sphere_like' or 'periodic', "
            f"got {topo_name!r}") from None
    preset = _cfg_get(cfg, "preset", "")
    ptype = _cfg_get(preset, "type", "preset.")

    if ptype == "round":
        prof = round_profile(k=float(_cfg_get(preset, "k", "preset.")), n=n)
    elif ptype == "bump":
        prof = bump_profile(eps=float(_cfg_get(preset, "eps", "preset.")), n=n)
    elif ptype == "periodic_product":
        prof = periodic_product_profile(
            c=float(_cfg_get(preset, "c", "preset.")),
            a=float(_cfg_get(preset, "a", "preset.")),
            n=n, L=float(preset.get("L", 2.0 * math.pi)))
    elif ptype == "samples":
        prof = profile_from_samples(
            _cfg_get(preset, "r", "preset."),
            _cfg_get(preset, "phi", "preset."),
            n=n, topology=topology)
    else:
        raise ValueError(f"config path 'preset.type': unknown type {ptype!r}")

    if prof.topology is not topology:
        raise ValueError(
            f"config path 'topology': preset {ptype!r} implies "
            f"{prof.topology.value!r}, config says {topo_name!r}")

    grid_cfg = _cfg_get(cfg, "grid", "")
    N = _cfg_get(grid_cfg, "N", "grid.")
    if not isinstance(N, int) or N < MIN_GRID:
        raise ValueError(f"config path 'grid.N': expected integer >= {MIN_GRID}")
    return prof, grid_for(prof, N)


def profile_to_config(profile: WarpProfile, grid: RadialGrid) -> dict:
    """Inverse of profile_from_config for the analytic presets."""
    tag = profile.preset_tag
    kind = tag.split("(", 1)[0]
    params = {}
    if kind in ("round", "bump", "periodic_product"):
        inner = tag.split("(", 1)[1].rstrip(")")
        for part in inner.split(","):
            key, val = part.split("=")
            params[key.strip()] = float(val)
    else:
        raise ValueError(f"cannot serialize non-preset profile {tag!r}")
    preset = {"type": kind, **params}
    if kind == "periodic_product":
        preset["L"] = profile.L
    return {
        "n": profile.n,
        "topology": profile.topology.value,
        "preset": preset,
        "grid": {"N": grid.N},
    }
