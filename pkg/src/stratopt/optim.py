"""Gradient descent and natural gradient descent in chart coordinates.

Both methods iterate q <- q - lr * d with d the gradient (GD) or the
damped-information-preconditioned gradient (NGD); the update vector is
norm-capped so the degenerate information matrix near the cone apex cannot
launch unbounded angular steps.  Runs record (step, chart point, ambient
point, loss, gradient norm) rows and a termination reason; stochastic mode
redraws a batch mean each step from a seeded generator while the recorded
loss and gradient stay population quantities.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from .model import ChartPoint, GaussianLocationModel, _mean_of_draws


class Method(enum.Enum):
    GD = "gd"
    NGD = "ngd"


class Mode(enum.Enum):
    POPULATION = "population"
    STOCHASTIC = "stochastic"


class Termination(enum.Enum):
    GRAD_TOL = "grad_tol"
    LOSS_TOL = "loss_tol"
    MAX_STEPS = "max_steps"
    FAILED = "failed"


class SingularFIMError(RuntimeError):
    """Undamped information matrix is singular to machine precision."""


class NonFiniteGradientError(RuntimeError):
    pass


@dataclass(frozen=True)
class OptimizerConfig:
    method: Method = Method.GD
    step_size: float = 0.01
    max_steps: int = 100_000
    grad_tol: float = 1e-10
    loss_tol: float = 1e-10
    damping: float = 1e-8        # NGD only
    step_cap: float = 1.0
    mode: Mode = Mode.POPULATION
    batch: int = 16              # stochastic only
    sample_seed: int = 0         # stochastic only
    record_every: int = 1

    def __post_init__(self):
        object.__setattr__(self, "method", Method(self.method))
        object.__setattr__(self, "mode", Mode(self.mode))
        if not self.step_size > 0:
            raise ValueError("step_size must be positive")
        if not self.step_cap > 0:
            raise ValueError("step_cap must be positive")
        if self.damping < 0:
            raise ValueError("damping must be >= 0")
        if self.max_steps < 0:
            raise ValueError("max_steps must be >= 0")
        if self.record_every < 1:
            raise ValueError("record_every must be >= 1")
        if self.mode is Mode.STOCHASTIC and self.batch < 1:
            raise ValueError("stochastic mode needs batch >= 1")


@dataclass(frozen=True)
class TrajectoryRecord:
    step: int
    point: ChartPoint
    ambient: np.ndarray
    loss: float
    grad_norm: float


@dataclass
class Trajectory:
    records: list[TrajectoryRecord]
    terminated_by: Termination
    failure: str | None = None

    @property
    def final(self) -> TrajectoryRecord:
        return self.records[-1]

    def losses(self) -> np.ndarray:
        return np.array([r.loss for r in self.records])

    def steps_to_loss(self, threshold: float) -> int | None:
        """First recorded step index with loss below ``threshold``; None if never."""
        for r in self.records:
            if r.loss < threshold:
                return r.step
        return None


@dataclass(frozen=True)
class StallReport:
    stalled: bool
    window_start: int
    mean_rel_decrease: float
    nearest_singularity_distance: float


def _capped(update: np.ndarray, cap: float) -> np.ndarray:
    n = float(np.linalg.norm(update))
    if n > cap:
        return update * (cap / n)
    return update


def _check_finite(g: np.ndarray):
    if not np.isfinite(g).all():
        raise NonFiniteGradientError(f"non-finite gradient {g}")


def gd_step(m: GaussianLocationModel, q: ChartPoint, cfg: OptimizerConfig) -> ChartPoint:
    """One capped gradient step q - lr * grad."""
    if cfg.method is not Method.GD:
        raise ValueError("gd_step requires cfg.method == Method.GD")
    g = m.loss_grad(q)
    _check_finite(g)
    step = _capped(cfg.step_size * g, cfg.step_cap)
    return ChartPoint(float(q.xi - step[0]), float(q.theta - step[1]))


def ngd_step(m: GaussianLocationModel, q: ChartPoint, cfg: OptimizerConfig) -> ChartPoint:
    """One capped natural gradient step q - lr * (F + damping I)^-1 grad.

    With zero damping a machine-singular information matrix raises
    SingularFIMError instead of producing a garbage direction.
    """
    if cfg.method is not Method.NGD:
        raise ValueError("ngd_step requires cfg.method == Method.NGD")
    g = m.loss_grad(q)
    _check_finite(g)
    F = m.fim(q)
    A = F + cfg.damping * np.eye(2)
    det = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
    scale = max(abs(A).max() ** 2, 1.0)
    if abs(det) <= np.finfo(float).eps * scale:
        raise SingularFIMError(
            f"information matrix is singular at (xi={q.xi:.6g}, theta={q.theta:.6g}) "
            f"with damping={cfg.damping}"
        )
    d = np.array([
        (A[1, 1] * g[0] - A[0, 1] * g[1]) / det,
        (A[0, 0] * g[1] - A[1, 0] * g[0]) / det,
    ])
    _check_finite(d)
    step = _capped(cfg.step_size * d, cfg.step_cap)
    return ChartPoint(float(q.xi - step[0]), float(q.theta - step[1]))


def run(m: GaussianLocationModel, q0: ChartPoint, cfg: OptimizerConfig) -> Trajectory:
    """Iterate the configured step until a tolerance or the step budget hits.

    Records are thinned to every ``record_every``-th step; the initial and
    final states are always recorded.  Step errors terminate the run with a
    FAILED marker and the partial trajectory is returned.
    """
    stepper = gd_step if cfg.method is Method.GD else ngd_step
    rng = np.random.default_rng(cfg.sample_seed) if cfg.mode is Mode.STOCHASTIC else None

    def make_record(t: int, q: ChartPoint) -> TrajectoryRecord:
        g = m.loss_grad(q)
        return TrajectoryRecord(
            step=t,
            point=q,
            ambient=m.chart.embed(q),
            loss=m.loss(q),
            grad_norm=float(np.linalg.norm(g)),
        )

    q = q0
    rec = make_record(0, q)
    records = [rec]
    if rec.grad_norm < cfg.grad_tol:
        return Trajectory(records, Termination.GRAD_TOL)
    if rec.loss < cfg.loss_tol:
        return Trajectory(records, Termination.LOSS_TOL)
    if cfg.max_steps == 0:
        return Trajectory(records, Termination.MAX_STEPS)

    for t in range(1, cfg.max_steps + 1):
        if rng is not None:
            step_model = replace(
                m, target_mean=_mean_of_draws(rng, m.target_mean, cfg.batch)
            )
        else:
            step_model = m
        try:
            q = stepper(step_model, q, cfg)
        except (SingularFIMError, NonFiniteGradientError) as exc:
            return Trajectory(records, Termination.FAILED, failure=str(exc))
        rec = make_record(t, q)
        terminated = None
        if rec.grad_norm < cfg.grad_tol:
            terminated = Termination.GRAD_TOL
        elif rec.loss < cfg.loss_tol:
            terminated = Termination.LOSS_TOL
        elif t == cfg.max_steps:
            terminated = Termination.MAX_STEPS
        if terminated or t % cfg.record_every == 0:
            records.append(rec)
        if terminated:
            return Trajectory(records, terminated)
    raise AssertionError("unreachable")  # loop always terminates via MAX_STEPS


def detect_stall(
    traj: Trajectory,
    window: int = 100,
    plateau_tol: float = 1e-5,
    singularities=(),
    loss_tol: float = 1e-10,
) -> StallReport:
    """Flag a window of records whose loss has stopped decreasing.

    A trajectory stalls when some window of ``window`` consecutive records
    has mean relative loss decrease below ``plateau_tol`` while the loss is
    still above ``loss_tol``.  The report carries the ambient distance from
    the (first) stalled window's last point to the nearest singularity; when
    nothing stalls it describes the flattest window seen and the distance
    from the final point.
    """
    if window < 2:
        raise ValueError("window must be >= 2")
    records = traj.records
    if len(records) < window:
        raise ValueError(f"trajectory has {len(records)} records, shorter than window {window}")
    losses = np.array([r.loss for r in records])
    rel = (losses[:-1] - losses[1:]) / np.maximum(np.abs(losses[:-1]), 1e-300)
    csum = np.concatenate([[0.0], np.cumsum(rel)])
    n_windows = len(records) - window + 1
    means = (csum[window - 1:window - 1 + n_windows] - csum[:n_windows]) / (window - 1)
    end_losses = losses[window - 1:]

    def distance_from(idx: int) -> float:
        if not len(singularities):
            return math.inf
        x = records[idx].ambient
        return float(min(np.linalg.norm(x - np.asarray(s, dtype=float)) for s in singularities))

    stalled_mask = (means < plateau_tol) & (end_losses > loss_tol)
    if stalled_mask.any():
        j = int(np.argmax(stalled_mask))
        return StallReport(
            stalled=True,
            window_start=records[j].step,
            mean_rel_decrease=float(means[j]),
            nearest_singularity_distance=distance_from(j + window - 1),
        )
    return StallReport(
        stalled=False,
        window_start=-1,
        mean_rel_decrease=float(means.min()),
        nearest_singularity_distance=distance_from(len(records) - 1),
    )
