"""Execute experiment specs and write their artifact files.

Every run directory gets a ``metadata.cfg`` echoing the fully resolved spec
(defaults and seeds included) so the run can be reproduced bit-identically,
plus per-initialization trajectory CSVs, per-surface aggregate loss curves,
a stall report, and the target means.  The cusp model instead emits a quiver
CSV of tangentially projected gradients along the curve and its deformations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import tables
from .config import ExperimentSpec, InitDistribution, format_config
from .model import Chart, ChartPoint, GaussianLocationModel
from .optim import StallReport, Termination, Trajectory, detect_stall, run
from .poly import cusp_curve, double_cone
from .resolve import UNDEFINED, default_region, projected_gradient_field
from .stratify import find_singular_points

ARTIFACT_VERSION = "stratopt 0.1.0"
STALL_WINDOW = 100
STALL_PLATEAU_TOL = 1e-5


@dataclass
class ExperimentResult:
    out_dir: Path
    metadata_path: Path
    trajectory_paths: dict[tuple[str, int], Path] = field(default_factory=dict)
    aggregate_paths: dict[str, Path] = field(default_factory=dict)
    stall_path: Path | None = None
    targets_path: Path | None = None
    quiver_path: Path | None = None
    n_failures: int = 0


def _surfaces(spec: ExperimentSpec) -> list[tuple[str, Chart]]:
    if spec.model == "cone":
        return [("cone", Chart.cone())]
    if spec.model == "hyperboloid":
        return [("hyperboloid", Chart.hyperboloid(spec.eps))]
    if spec.model == "both":
        return [("cone", Chart.cone()), ("hyperboloid", Chart.hyperboloid(spec.eps))]
    raise ValueError(f"no chart surfaces for model {spec.model!r}")


def _initial_points(spec: ExperimentSpec) -> list[ChartPoint]:
    if isinstance(spec.init, InitDistribution):
        rng = np.random.default_rng(spec.init.seed)
        xis = rng.uniform(*spec.init.xi_range, size=spec.init.count)
        thetas = rng.uniform(*spec.init.theta_range, size=spec.init.count)
        return [ChartPoint(float(a), float(b)) for a, b in zip(xis, thetas)]
    return list(spec.init)


def _target_mean(spec: ExperimentSpec, surface_chart: Chart) -> np.ndarray:
    chart = surface_chart if spec.target_surface == "model" else Chart.cone()
    return chart.embed(spec.target)


def write_trajectory_csv(path, traj: Trajectory) -> Path:
    rows = []
    for r in traj.records:
        rows.append([
            r.step,
            tables.fmt(r.point.xi), tables.fmt(r.point.theta),
            tables.fmt(r.ambient[0]), tables.fmt(r.ambient[1]), tables.fmt(r.ambient[2]),
            tables.fmt(r.loss), tables.fmt(r.grad_norm),
        ])
    return tables.write_csv(path, tables.TRAJ_FIELDS, rows)


def _aggregate_rows(trajs: list[Trajectory]) -> list[list[str]]:
    """Per-step mean and median loss; finished runs carry their last loss forward."""
    steps_per = [np.array([r.step for r in t.records]) for t in trajs]
    losses_per = [t.losses() for t in trajs]
    union = np.unique(np.concatenate(steps_per))
    carried = np.empty((len(trajs), union.size))
    for i, (steps, losses) in enumerate(zip(steps_per, losses_per)):
        idx = np.searchsorted(steps, union, side="right") - 1
        carried[i] = losses[np.clip(idx, 0, len(losses) - 1)]
    means = carried.mean(axis=0)
    medians = np.median(carried, axis=0)
    return [
        [int(s), tables.fmt(m), tables.fmt(md)]
        for s, m, md in zip(union, means, medians)
    ]


def _stall_row(surface: str, index: int, traj: Trajectory, report: StallReport) -> list[str]:
    return [
        surface,
        str(index),
        "true" if report.stalled else "false",
        str(report.window_start),
        tables.fmt(report.mean_rel_decrease),
        tables.fmt(report.nearest_singularity_distance),
        tables.fmt(traj.final.loss),
        traj.terminated_by.value,
        traj.failure or "",
    ]


def _cusp_level_points(level: float, n_per_branch: int = 12) -> list[np.ndarray]:
    """Deterministic sample of {x1^2 + x2^3 = level} inside the default region."""
    ts = np.linspace(-1.55, float(np.cbrt(level)), n_per_branch)
    points = []
    for t in ts:
        rad = level - t ** 3
        if rad < -1e-12:
            continue
        x1 = math.sqrt(max(rad, 0.0))
        points.append(np.array([x1, t]))
        if x1 > 1e-12:
            points.append(np.array([-x1, t]))
    return points


def _run_cusp_field(spec: ExperimentSpec, out: Path, result: ExperimentResult):
    p = cusp_curve()
    xbar = np.array([spec.target.xi, spec.target.theta])  # ambient 2-D target
    grad_field = lambda x: x - xbar
    rows = []
    for level in (0.0, 0.25 * spec.eps, spec.eps):
        points = _cusp_level_points(level)
        projections = projected_gradient_field(p, level, grad_field, points)
        for x, g in zip(points, projections):
            if g is UNDEFINED:
                rows.append([tables.fmt(level), tables.fmt(x[0]), tables.fmt(x[1]),
                             "", "", "undefined"])
            else:
                rows.append([tables.fmt(level), tables.fmt(x[0]), tables.fmt(x[1]),
                             tables.fmt(g[0]), tables.fmt(g[1]), "ok"])
    result.quiver_path = tables.write_csv(out / "quiver.csv", tables.QUIVER_FIELDS, rows)


def run_experiment(spec: ExperimentSpec, out_dir=None) -> ExperimentResult:
    """Run a spec and write its artifact files; never raises on a failed trajectory."""
    out = Path(out_dir or spec.output_dir or Path("out") / spec.name)
    out.mkdir(parents=True, exist_ok=True)
    metadata_path = out / "metadata.cfg"
    metadata_path.write_text(
        format_config(spec, header_comment=f"{ARTIFACT_VERSION} experiment echo"),
        encoding="utf-8",
    )
    result = ExperimentResult(out_dir=out, metadata_path=metadata_path)

    if spec.model == "cusp":
        _run_cusp_field(spec, out, result)
        return result

    cfg = spec.optimizer_config()
    inits = _initial_points(spec)
    apexes = find_singular_points(double_cone(), 0.0, default_region(3))
    stall_rows = []
    target_rows = []
    for surface, chart in _surfaces(spec):
        xbar = _target_mean(spec, chart)
        target_rows.append([surface] + [tables.fmt(v) for v in xbar])
        model = GaussianLocationModel(chart, xbar)
        trajs = []
        for i, q0 in enumerate(inits):
            traj = run(model, q0, cfg)
            trajs.append(traj)
            path = write_trajectory_csv(out / f"traj_{surface}_{i:03d}.csv", traj)
            result.trajectory_paths[(surface, i)] = path
            if traj.terminated_by is Termination.FAILED:
                result.n_failures += 1
            if len(traj.records) >= STALL_WINDOW:
                report = detect_stall(
                    traj, window=STALL_WINDOW, plateau_tol=STALL_PLATEAU_TOL,
                    singularities=apexes, loss_tol=cfg.loss_tol,
                )
            else:  # too short to stall: report distance from the endpoint
                dist = min(
                    (float(np.linalg.norm(traj.final.ambient - s)) for s in apexes),
                    default=math.inf,
                )
                report = StallReport(False, -1, math.nan, dist)
            stall_rows.append(_stall_row(surface, i, traj, report))
        result.aggregate_paths[surface] = tables.write_csv(
            out / f"aggregate_{surface}.csv", tables.AGG_FIELDS, _aggregate_rows(trajs)
        )
    result.stall_path = tables.write_csv(out / "stalls.csv", tables.STALL_FIELDS, stall_rows)
    result.targets_path = tables.write_csv(out / "targets.csv", tables.TARGET_FIELDS, target_rows)
    return result
