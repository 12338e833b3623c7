"""Decompose a polynomial hypersurface into singular points and regular strata.

Singular points of the level set {p = level} are the points where the
gradient of p vanishes on the level set.  They are located by running
Newton's method on the critical-point system (grad p = 0) from a uniform
grid of seeds, then filtering to the level set and deduplicating.  Only the
hypersurface case (a single polynomial) is supported; systems of several
polynomials are rejected.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .poly import Polynomial

TOL_CRIT = 1e-8      # gradient norm below this counts as critical
TOL_ON = 1e-9        # |p - level| below this counts as on the level set
MERGE_RADIUS = 1e-4  # candidate roots closer than this are duplicates
SEED_GRID = 21       # Newton seeds per axis
NEWTON_MAX_ITER = 50
MAX_SEEDS = 2_000_000


class OffVarietyError(ValueError):
    """The queried point does not lie on the level set."""


class _SingularMarker:
    __slots__ = ()

    def __repr__(self):
        return "SINGULAR"


SINGULAR = _SingularMarker()


@dataclass(frozen=True)
class Region:
    """Axis-aligned box given by componentwise lower < upper bounds."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lower, dtype=float))
        hi = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if lo.shape != hi.shape or lo.ndim != 1:
            raise ValueError("lower and upper must be 1-D vectors of equal length")
        if not (np.isfinite(lo).all() and np.isfinite(hi).all()):
            raise ValueError("region bounds must be finite")
        if not (lo < hi).all():
            raise ValueError("region requires lower < upper componentwise")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def cube(cls, lo: float, hi: float, dim: int) -> "Region":
        return cls(np.full(dim, float(lo)), np.full(dim, float(hi)))

    @property
    def dim(self) -> int:
        return self.lower.shape[0]

    @property
    def widths(self) -> np.ndarray:
        return self.upper - self.lower

    def contains(self, x, pad: float = 0.0) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(((x >= self.lower - pad) & (x <= self.upper + pad)).all())

    def grid(self, points_per_axis: int) -> np.ndarray:
        """Uniform grid of seed points, shape (points_per_axis**dim, dim)."""
        if points_per_axis < 2:
            raise ValueError("need at least 2 grid points per axis")
        if points_per_axis ** self.dim > MAX_SEEDS:
            raise ValueError("seed grid too large; lower points_per_axis")
        axes = [np.linspace(self.lower[j], self.upper[j], points_per_axis)
                for j in range(self.dim)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return rng.uniform(self.lower, self.upper, size=(n, self.dim))


@dataclass(frozen=True)
class SimplexStrata:
    """Open-face counts of the standard n-simplex, keyed by face dimension."""

    n: int
    counts: dict[int, int]


@dataclass
class Stratification:
    """A hypersurface split into its 0-dimensional singular set and top stratum."""

    singular_points: list[np.ndarray]
    regular_dim: int
    variety: Polynomial
    level: float
    ball_radii: list[float] = field(default_factory=list)


def _reject_systems(p):
    if isinstance(p, (list, tuple, set)):
        raise NotImplementedError(
            "only single-polynomial hypersurfaces are supported; "
            "systems of polynomials (general varieties) are out of scope"
        )
    if not isinstance(p, Polynomial):
        raise TypeError(f"expected a Polynomial, got {type(p).__name__}")


def find_singular_points(
    p: Polynomial,
    level: float,
    region: Region,
    *,
    grid_points: int = SEED_GRID,
    tol_crit: float = TOL_CRIT,
    tol_on: float = TOL_ON,
    merge_radius: float = MERGE_RADIUS,
    max_iter: int = NEWTON_MAX_ITER,
) -> list[np.ndarray]:
    """All points in ``region`` where grad p = 0 and p = level.

    Newton iteration on grad p = 0 runs from every grid seed simultaneously;
    the minimal-norm step (pseudoinverse of the Hessian) keeps degenerate
    critical points reachable.  Output is deduplicated within
    ``merge_radius`` and sorted lexicographically by coordinates.
    """
    _reject_systems(p)
    if p.nvars != region.dim:
        raise ValueError(f"polynomial has {p.nvars} variables, region has dim {region.dim}")
    X = region.grid(grid_points)
    for _ in range(max_iter):
        finite = np.isfinite(X).all(axis=1)
        G = np.zeros_like(X)
        G[finite] = p.grad_many(X[finite])
        active = finite & np.isfinite(G).all(axis=1) & (np.linalg.norm(G, axis=1) > 1e-14)
        if not active.any():
            break
        H = p.hessian_many(X[active])
        step = -np.einsum("kij,kj->ki", np.linalg.pinv(H), G[active])
        X[active] = X[active] + step
    finite = np.isfinite(X).all(axis=1)
    X = X[finite]
    grad_ok = np.linalg.norm(p.grad_many(X), axis=1) < tol_crit
    on_level = np.abs(p.eval_many(X) - level) < tol_on
    pad = 1e-9 * float(np.max(region.widths))
    in_region = np.array([region.contains(x, pad=pad) for x in X])
    cands = X[grad_ok & on_level & in_region]
    if cands.shape[0] == 0:
        return []
    order = np.lexsort(cands.T[::-1])  # primary key: first coordinate
    out: list[np.ndarray] = []
    for x in cands[order]:
        if all(np.linalg.norm(x - y) > merge_radius for y in out):
            out.append(x.copy())
    return out


def tangent_dimension(
    p: Polynomial,
    level: float,
    x,
    *,
    tol_crit: float = TOL_CRIT,
    tol_on: float = TOL_ON,
):
    """nvars-1 at a regular hypersurface point; the SINGULAR marker otherwise."""
    _reject_systems(p)
    value = p.eval(x)
    if abs(value - level) >= tol_on:
        raise OffVarietyError(
            f"point {np.asarray(x)} is not on the level set: |p(x) - level| = {abs(value - level):.3e}"
        )
    if np.linalg.norm(p.grad(x)) >= tol_crit:
        return p.nvars - 1
    return SINGULAR


def _enclosing_ball_radius(
    p: Polynomial,
    level: float,
    s: np.ndarray,
    region: Region,
    *,
    rng_seed: int = 0,
    samples_per_radius: int = 256,
) -> float:
    """Largest tested radius r such that the squared distance to ``s``,
    restricted to the level set inside the ball of radius r (minus ``s``),
    shows no critical point among sampled on-variety points.

    A critical point of the distance would have (x - s) parallel to grad p;
    sampled points are screened by the angle between the two.
    """
    from .resolve import project_to_level  # local import: no cycle at module load

    rng = np.random.default_rng(rng_seed)
    r_max = 0.5 * float(np.min(region.widths))
    radii = [r_max * 0.75 ** k for k in range(13)]
    best = radii[-1]
    for r in radii:
        dirs = rng.standard_normal((samples_per_radius, p.nvars))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        probes = s + dirs * rng.uniform(0.05 * r, r, size=(samples_per_radius, 1))
        Y, ok = project_to_level(p, level, probes)
        Y = Y[ok]
        d = np.linalg.norm(Y - s, axis=1)
        # the lower cutoff scales with r so slow projections that stall a hair
        # away from s itself are not mistaken for distinct variety points
        keep = (d > max(1e-6, 1e-3 * r)) & (d <= r)
        Y = Y[keep]
        if Y.shape[0] == 0:
            best = r
            break
        G = p.grad_many(Y)
        gn = np.linalg.norm(G, axis=1)
        radial = Y - s
        rn = np.linalg.norm(radial, axis=1)
        usable = gn > 1e-13
        cosang = np.abs((G[usable] * radial[usable]).sum(axis=1) / (gn[usable] * rn[usable]))
        critical = (~usable).any() or (cosang > 1.0 - 1e-6).any()
        if not critical:
            best = r
            break
    return best


def stratify(
    p: Polynomial,
    level: float,
    region: Region,
    *,
    grid_points: int = SEED_GRID,
    tol_crit: float = TOL_CRIT,
    tol_on: float = TOL_ON,
    merge_radius: float = MERGE_RADIUS,
) -> Stratification:
    """Stratification of {p = level}: singular points plus the top stratum.

    Per singular point, ``ball_radii`` records a numerically estimated radius
    within which the distance-to-the-point function has no critical value on
    the punctured variety; a warning is issued when two singular points sit
    closer than four times the largest such radius.
    """
    _reject_systems(p)
    sing = find_singular_points(
        p, level, region,
        grid_points=grid_points, tol_crit=tol_crit, tol_on=tol_on,
        merge_radius=merge_radius,
    )
    radii = [_enclosing_ball_radius(p, level, s, region) for s in sing]
    if len(sing) >= 2 and radii:
        r4 = 4.0 * max(radii)
        for i in range(len(sing)):
            for j in range(i + 1, len(sing)):
                gap = float(np.linalg.norm(sing[i] - sing[j]))
                if gap < r4:
                    warnings.warn(
                        f"singular points {i} and {j} are {gap:.3g} apart, closer than "
                        f"4*max(ball radius) = {r4:.3g}; shrink the ball estimates",
                        RuntimeWarning,
                        stacklevel=2,
                    )
    return Stratification(
        singular_points=sing,
        regular_dim=p.nvars - 1,
        variety=p,
        level=float(level),
        ball_radii=radii,
    )


def simplex_strata(n: int) -> SimplexStrata:
    """Open i-face counts of the standard n-simplex: C(n+1, i+1) for 0 <= i <= n."""
    if not isinstance(n, int) or not 0 <= n <= 20:
        raise ValueError(f"simplex dimension must be an integer in [0, 20], got {n!r}")
    return SimplexStrata(n=n, counts={i: math.comb(n + 1, i + 1) for i in range(n + 1)})
