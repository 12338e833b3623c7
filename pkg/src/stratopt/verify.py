"""Independent numerical oracles: finite differences and Monte-Carlo information.

These deliberately avoid the analytic gradient and information code paths:
the finite-difference probe sees only a black-box loss, and the Monte-Carlo
estimator rebuilds the score from the chart embedding and Jacobian plus raw
Gaussian draws.  Tests use them to cross-check the closed forms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ChartPoint, GaussianLocationModel


@dataclass(frozen=True)
class FDSpec:
    step: float = 1e-6
    scheme: str = "central"

    def __post_init__(self):
        if not 1e-9 <= self.step <= 1e-3:
            raise ValueError(f"finite-difference step {self.step} outside [1e-9, 1e-3]")
        if self.scheme != "central":
            raise ValueError(f"unsupported scheme {self.scheme!r}")


def finite_diff_grad(f, q: ChartPoint, spec: FDSpec = FDSpec()) -> np.ndarray:
    """Central-difference gradient of a scalar function of a chart point."""
    h = spec.step
    out = np.empty(2)
    probes = [
        (ChartPoint(q.xi + h, q.theta), ChartPoint(q.xi - h, q.theta)),
        (ChartPoint(q.xi, q.theta + h), ChartPoint(q.xi, q.theta - h)),
    ]
    for i, (hi, lo) in enumerate(probes):
        fp, fm = f(hi), f(lo)
        if not (np.isfinite(fp) and np.isfinite(fm)):
            raise ValueError(f"non-finite evaluation near ({q.xi}, {q.theta})")
        out[i] = (fp - fm) / (2.0 * h)
    return out


def monte_carlo_fim(m: GaussianLocationModel, q: ChartPoint, n: int, seed: int) -> np.ndarray:
    """Empirical covariance of the score over n draws x ~ N(embed(q), I_3).

    The score of an identity-covariance location family is J^T (x - mu), so
    the estimator touches only the embedding and the Jacobian; it never calls
    the model's own gradient or information methods.
    """
    if n < 10_000:
        raise ValueError(f"need n >= 10000 draws for a usable estimate, got {n}")
    rng = np.random.default_rng(seed)
    mu = m.chart.embed(q)
    J = m.chart.jacobian(q)
    deviations = rng.standard_normal((n, 3))
    scores = deviations @ J  # row i: J^T (x_i - mu)
    return (scores.T @ scores) / n
