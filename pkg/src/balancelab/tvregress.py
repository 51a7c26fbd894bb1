"""Time-varying nonparametric regression between return series.

Nadaraya-Watson estimates with a product kernel (time x covariate), locally
weighted slopes, and the conversions linking slopes, linear correlation, and
Kendall's tau for Gaussian pairs.  These back the predictability argument:
a stock's return is forecast from a correlated stock either directly or
through an intermediary, and the sign structure of the triad decides whether
the two forecasts agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dependence import KernelSpec, epanechnikov, kernel_weights
from .errors import NumericalError

__all__ = [
    "RegressionFit",
    "nw_estimate",
    "tv_slope",
    "tv_sigma",
    "slope_to_rho",
    "tau_to_rho_gaussian",
    "chained_estimate",
    "tv_regression",
]


@dataclass
class RegressionFit:
    """Fitted values and optional slope/variance tracks of one regression."""

    dates: list
    fitted: np.ndarray
    slope: np.ndarray | None = None
    residual_variance: tuple[np.ndarray, np.ndarray] | None = None

    def __post_init__(self):
        self.fitted = np.asarray(self.fitted, dtype=float)
        if not np.isfinite(self.fitted).all():
            raise ValueError("fitted values must be finite")
        if len(self.fitted) != len(self.dates):
            raise ValueError("fitted length must match dates")


def silverman_bandwidth(y: np.ndarray) -> float:
    """Rule-of-thumb covariate bandwidth 1.06 * std(y) * S^(-1/5)."""
    y = np.asarray(y, dtype=float)
    sd = float(y.std())
    if sd == 0:
        sd = 1.0
    return 1.06 * sd * y.size ** (-0.2)


def nw_estimate(Yi, Yj, spec: KernelSpec, t: int, y: float,
                covariate_bandwidth: float | None = None) -> float:
    """Nadaraya-Watson estimate of E[Y_i | Y_j = y] at time ``t``.

    Observations are weighted by the product of the time kernel centred on
    ``t`` and an Epanechnikov covariate kernel centred on ``y`` (bandwidth
    defaulting to the Silverman rule on Y_j).  Both kernels have compact
    support, so a query point ``y`` far from every observed Y_j leaves an
    empty neighbourhood and raises :class:`NumericalError`.
    """
    yi = np.asarray(Yi, dtype=float)
    yj = np.asarray(Yj, dtype=float)
    if yi.shape != yj.shape or yi.ndim != 1:
        raise ValueError("series must be 1-d and of equal length")
    wt = kernel_weights(spec, t, yi.size)
    b = covariate_bandwidth if covariate_bandwidth is not None else \
        silverman_bandwidth(yj)
    if b <= 0:
        raise ValueError("covariate bandwidth must be positive")
    wy = epanechnikov((y - yj) / b)
    w = wt * wy
    denom = w.sum()
    if denom <= 0:
        raise NumericalError(
            f"empty effective neighbourhood at y={y!r}; increase the time or "
            "covariate bandwidth"
        )
    return float((w * yi).sum() / denom)


def tv_slope(Yi, Yj, spec: KernelSpec, t: int) -> float:
    """Locally weighted no-intercept slope of Y_i on Y_j at time ``t``:

        beta(t) = sum_s w_s Y_i(s) Y_j(s) / sum_s w_s Y_j(s)^2
    """
    yi = np.asarray(Yi, dtype=float)
    yj = np.asarray(Yj, dtype=float)
    if yi.shape != yj.shape or yi.ndim != 1:
        raise ValueError("series must be 1-d and of equal length")
    w = kernel_weights(spec, t, yi.size)
    denom = float(w @ (yj * yj))
    if denom <= 0:
        raise NumericalError("regressor is identically zero on the window")
    return float(w @ (yi * yj) / denom)


def tv_sigma(Y, spec: KernelSpec, t: int) -> float:
    """Local volatility: kernel-weighted standard deviation around the
    kernel-weighted mean at time ``t``."""
    y = np.asarray(Y, dtype=float)
    w = kernel_weights(spec, t, y.size)
    w = w / w.sum()
    m = float(w @ y)
    var = float(w @ (y - m) ** 2)
    return math.sqrt(max(var, 0.0))


def slope_to_rho(beta: float, sigma_i: float, sigma_j: float) -> float:
    """Linear correlation implied by a regression slope:
    rho = beta * sigma_j / sigma_i."""
    if sigma_i <= 0 or sigma_j <= 0:
        raise ValueError("volatilities must be positive")
    return beta * sigma_j / sigma_i


def tau_to_rho_gaussian(tau: float) -> float:
    """Gaussian-copula conversion rho = sin(pi * tau / 2).

    Odd, strictly increasing, and maps [-1, 1] onto [-1, 1]; inverse of the
    classical tau(rho) = 2/pi * arcsin(rho) relation for bivariate normals.
    """
    if not -1 <= tau <= 1:
        raise ValueError("tau must lie in [-1, 1]")
    return math.sin(math.pi * tau / 2.0)


def chained_estimate(Y1, Y2, Y3, spec: KernelSpec, t: int) -> tuple[float, float]:
    """Direct vs intermediated forecast of Y_1 from Y_2 at time ``t``.

    Returns ``(direct, chained)`` where ``direct`` regresses Y_1 on Y_2 and
    evaluates at Y_2(t), while ``chained`` first predicts Y_3 from Y_2(t)
    and then regresses Y_1 on Y_3 at that predicted value.  On a balanced
    triad the two forecasts agree in sign; an unbalanced triad drives them
    apart.
    """
    y2t = float(np.asarray(Y2, dtype=float)[t])
    direct = nw_estimate(Y1, Y2, spec, t, y2t)
    inner = nw_estimate(Y3, Y2, spec, t, y2t)
    chained = nw_estimate(Y1, Y3, spec, t, inner)
    return direct, chained


def tv_regression(Yi, Yj, spec: KernelSpec, dates=None,
                  with_slope: bool = True) -> RegressionFit:
    """Fit m_i(Y_j(t)) at every t and package the result.

    The residual variance tracks smooth the squared regression residuals of
    Y_i and the squared local-mean residuals of Y_j with the same time
    kernel.
    """
    yi = np.asarray(Yi, dtype=float)
    yj = np.asarray(Yj, dtype=float)
    S = yi.size
    if dates is None:
        dates = list(range(S))
    b = silverman_bandwidth(yj)
    fitted = np.array([nw_estimate(yi, yj, spec, t, float(yj[t]), b)
                       for t in range(S)])
    slope = np.array([tv_slope(yi, yj, spec, t) for t in range(S)]) \
        if with_slope else None
    resid_i = (yi - fitted) ** 2
    var_i = np.empty(S)
    var_j = np.empty(S)
    for t in range(S):
        w = kernel_weights(spec, t, S)
        w = w / w.sum()
        var_i[t] = float(w @ resid_i)
        mj = float(w @ yj)
        var_j[t] = float(w @ (yj - mj) ** 2)
    return RegressionFit(dates=list(dates), fitted=fitted, slope=slope,
                         residual_variance=(var_i, var_j))
