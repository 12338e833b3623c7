"""Smooth deformations {p = c} of a singular variety {p = 0}.

A deformation at a regular value c is a smooth hypersurface approximating
the singular one away from its singular points.  The preferred deformation
level is chosen by connectivity: among the two candidate signs, the one
whose level set has fewer connected components wins (an empty level set
never wins).  Components are counted on an occupancy grid joined by
union-find over face adjacency, so the count is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .poly import Polynomial
from .stratify import TOL_CRIT, Region, find_singular_points

DEFAULT_GRID_N = 64
DEFAULT_SAMPLES = 10_000
PROJECTION_TOL = 1e-12
DIVERGENCE_BUDGET = 0.01  # fraction of samples allowed to miss the variety


class ResolutionError(RuntimeError):
    """Neither candidate deformation level yields a usable smooth variety."""


class ProjectionError(RuntimeError):
    """Too many sample projections failed to land on the variety."""


class NoSamplesError(RuntimeError):
    """No sampled variety points survive the exclusion filter."""


class OffLevelSetError(ValueError):
    """A queried field point does not lie on the level set."""


class _UndefinedMarker:
    __slots__ = ()

    def __repr__(self):
        return "UNDEFINED"


UNDEFINED = _UndefinedMarker()


@dataclass(frozen=True)
class Deformation:
    """The level set {base = level} over a bounding region."""

    base: Polynomial
    level: float
    region: Region

    def __post_init__(self):
        if self.base.nvars != self.region.dim:
            raise ValueError("polynomial nvars and region dimension differ")


@dataclass(frozen=True)
class ComponentReport:
    count: int
    grid_spacing: float
    occupied_cells: int


def default_region(nvars: int) -> Region:
    return Region.cube(-2.0, 2.0, nvars)


def deform(p: Polynomial, c: float, region: Region | None = None) -> Deformation:
    """The deformation {p = c}; validity at level c is checked by the callers' probes."""
    return Deformation(base=p, level=float(c), region=region or default_region(p.nvars))


def project_to_level(
    p: Polynomial,
    level: float,
    X,
    *,
    max_iter: int = 60,
    tol: float = PROJECTION_TOL,
) -> tuple[np.ndarray, np.ndarray]:
    """First-order Newton projection of the rows of X onto {p = level}.

    Each point moves along the gradient direction by (p(x)-level)/|grad p|^2.
    Returns (points, converged mask); non-converged rows hold their last
    iterate and are flagged False.
    """
    X = np.array(np.atleast_2d(np.asarray(X, dtype=float)))
    for _ in range(max_iter):
        finite = np.isfinite(X).all(axis=1)
        f = np.full(X.shape[0], np.inf)
        f[finite] = p.eval_many(X[finite]) - level
        moving = finite & (np.abs(f) > tol)
        if not moving.any():
            break
        G = p.grad_many(X[moving])
        gn2 = (G * G).sum(axis=1)
        safe = gn2 > 1e-30
        shift = np.zeros_like(G)
        shift[safe] = (f[moving][safe] / gn2[safe])[:, None] * G[safe]
        X[moving] = X[moving] - shift
    finite = np.isfinite(X).all(axis=1)
    ok = np.zeros(X.shape[0], dtype=bool)
    ok[finite] = np.abs(p.eval_many(X[finite]) - level) <= tol
    return X, ok


class _UnionFind:
    def __init__(self):
        self.parent: dict[int, int] = {}

    def find(self, a: int) -> int:
        parent = self.parent
        root = a
        while parent[root] != root:
            root = parent[root]
        while parent[a] != root:  # path compression
            parent[a], a = root, parent[a]
        return root

    def add(self, a: int):
        self.parent.setdefault(a, a)

    def union(self, a: int, b: int):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def count_components(d: Deformation, grid_n: int = DEFAULT_GRID_N) -> ComponentReport:
    """Connected components of {base = level} on an occupancy grid.

    A cell is occupied iff base - level changes sign over the cell's corners;
    occupied cells sharing a face are merged by union-find.
    """
    if grid_n < 16:
        raise ValueError(f"grid_n must be >= 16, got {grid_n}")
    p, region, dim = d.base, d.region, d.region.dim
    axes = [np.linspace(region.lower[j], region.upper[j], grid_n + 1) for j in range(dim)]
    mesh = np.meshgrid(*axes, indexing="ij")
    corners = np.stack([m.ravel() for m in mesh], axis=1)
    vals = (p.eval_many(corners) - d.level).reshape((grid_n + 1,) * dim)
    mins = vals
    maxs = vals
    for ax in range(dim):
        head = [slice(None)] * dim
        tail = [slice(None)] * dim
        head[ax] = slice(0, -1)
        tail[ax] = slice(1, None)
        mins = np.minimum(mins[tuple(head)], mins[tuple(tail)])
        maxs = np.maximum(maxs[tuple(head)], maxs[tuple(tail)])
    # weak inequalities: a corner exactly on the level set still marks the cell
    occupied = (mins <= 0.0) & (maxs >= 0.0)
    n_occ = int(occupied.sum())
    spacing = float(np.max(region.widths) / grid_n)
    if n_occ == 0:
        return ComponentReport(count=0, grid_spacing=spacing, occupied_cells=0)
    uf = _UnionFind()
    flat_ids = np.arange(grid_n ** dim).reshape((grid_n,) * dim)
    for idx in flat_ids[occupied].ravel():
        uf.add(int(idx))
    for ax in range(dim):
        head = [slice(None)] * dim
        tail = [slice(None)] * dim
        head[ax] = slice(0, -1)
        tail[ax] = slice(1, None)
        both = occupied[tuple(head)] & occupied[tuple(tail)]
        ia = flat_ids[tuple(head)][both].ravel()
        ib = flat_ids[tuple(tail)][both].ravel()
        for a, b in zip(ia, ib):
            uf.union(int(a), int(b))
    roots = {uf.find(int(i)) for i in flat_ids[occupied].ravel()}
    return ComponentReport(count=len(roots), grid_spacing=spacing, occupied_cells=n_occ)


def smoothness_check(d: Deformation, samples: int = DEFAULT_SAMPLES, seed: int = 0) -> bool:
    """True iff no probe on {base = level} has a vanishing gradient.

    Probes are seeded uniform samples Newton-projected onto the level set,
    plus any critical points of base located on it (uniform sampling alone
    cannot witness a measure-zero singular point).  Projection failures are
    tolerated up to 1% of the sample budget.
    """
    if samples < 100:
        raise ValueError(f"samples must be >= 100, got {samples}")
    sing = find_singular_points(d.base, d.level, d.region)
    if sing:
        return False
    rng = np.random.default_rng(seed)
    X = d.region.sample(samples, rng)
    Y, ok = project_to_level(d.base, d.level, X)
    n_diverged = int((~ok).sum())
    if n_diverged > DIVERGENCE_BUDGET * samples:
        raise ProjectionError(
            f"{n_diverged}/{samples} projections failed to reach level {d.level}"
        )
    G = d.base.grad_many(Y[ok])
    return bool((np.linalg.norm(G, axis=1) >= TOL_CRIT).all())


def choose_resolution(
    p: Polynomial,
    eps: float,
    region: Region | None = None,
    grid_n: int = DEFAULT_GRID_N,
) -> Deformation:
    """Pick the deformation level in {+eps, -eps} with fewer components.

    Empty level sets (count 0) never win; ties break toward +eps.  The chosen
    deformation must pass the smoothness check.
    """
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    region = region or default_region(p.nvars)
    candidates = [deform(p, +eps, region), deform(p, -eps, region)]
    reports = [count_components(c, grid_n) for c in candidates]
    viable = [(r.count, i) for i, r in enumerate(reports) if r.count > 0]
    if not viable:
        raise ResolutionError(
            f"both levels +/-{eps} give empty varieties on the region"
        )
    viable.sort()  # fewest components; index 0 (+eps) wins ties
    for _, i in viable:
        if smoothness_check(candidates[i]):
            return candidates[i]
    raise ResolutionError(
        f"no smooth deformation at levels +/-{eps}: "
        f"component counts {[r.count for r in reports]}"
    )


def proximity_check(
    d: Deformation,
    exclusion_radius: float,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
) -> float:
    """Max distance from the deformation to the base variety, away from singularities.

    Points are sampled on {base = level}, those within ``exclusion_radius``
    of any singular point of {base = 0} are dropped, and each survivor is
    Newton-projected onto the base variety; the maximum projection distance
    is returned.
    """
    if exclusion_radius <= 0:
        raise ValueError(f"exclusion_radius must be positive, got {exclusion_radius}")
    rng = np.random.default_rng(seed)
    X = d.region.sample(samples, rng)
    Y, ok = project_to_level(d.base, d.level, X)
    Y = Y[ok]
    Y = Y[[d.region.contains(y, pad=1e-9) for y in Y]]
    sing = find_singular_points(d.base, 0.0, d.region)
    if sing:
        dists = np.min(
            np.stack([np.linalg.norm(Y - s, axis=1) for s in sing], axis=1), axis=1
        )
        Y = Y[dists > exclusion_radius]
    if Y.shape[0] == 0:
        raise NoSamplesError(
            f"no variety samples outside exclusion radius {exclusion_radius}"
        )
    Z, okz = project_to_level(d.base, 0.0, Y)
    if not okz.any():
        raise ProjectionError("no sample could be projected onto the base variety")
    return float(np.max(np.linalg.norm(Y[okz] - Z[okz], axis=1)))


def projected_gradient_field(
    p: Polynomial,
    level: float,
    loss_grad_ambient,
    points,
    *,
    tol_crit: float = TOL_CRIT,
    on_tol: float = 1e-9,
) -> list:
    """Tangential part of an ambient gradient field along {p = level}.

    At each point the ambient gradient g is projected orthogonally to the
    level set's normal: g - (g.n)n with n = grad p / |grad p|.  Where the
    gradient of p vanishes there is no tangent space and the UNDEFINED
    marker is returned for that point.
    """
    if p.nvars not in (2, 3):
        raise ValueError("field projection supports curves (2 vars) and surfaces (3 vars)")
    out = []
    for x in points:
        x = np.asarray(x, dtype=float)
        value = p.eval(x)
        if abs(value - level) > on_tol:
            raise OffLevelSetError(
                f"point {x} is off the level set: |p(x) - level| = {abs(value - level):.3e}"
            )
        n = p.grad(x)
        nn = np.linalg.norm(n)
        if nn < tol_crit:
            out.append(UNDEFINED)
            continue
        g = np.asarray(loss_grad_ambient(x), dtype=float)
        nhat = n / nn
        out.append(g - (g @ nhat) * nhat)
    return out
