"""
Time-varying Kendall correlation and bandwidth selection
========================================================

A kernel-weighted Kendall tau turns two return series into a dependence
*curve*: at each date, concordant and discordant pairs are counted with
Epanechnikov weights centered there, so the estimate follows slow changes in
the relationship.  Here the true dependence flips sign halfway through the
sample, and we watch the estimator track it at two bandwidths before letting
cross-validation pick between them.
"""

from datetime import date, timedelta

import numpy as np
from scipy import stats

from balancelab import KernelSpec, select_bandwidth, tv_kendall
from balancelab.market_data import ReturnPanel

rng = np.random.default_rng(7)
S = 600
half = S // 2


def draw(rho, n):
    C = np.array([[1.0, rho], [rho, 1.0]])
    return rng.multivariate_normal([0, 0], C, size=n)


X = np.vstack([draw(0.6, half), draw(-0.6, S - half)])
ya, yb = X[:, 0], X[:, 1]

# population tau for a bivariate normal: tau = (2/pi) * arcsin(rho)
tau_true = 2 / np.pi * np.arcsin(0.6)
print(f"population tau: +/-{tau_true:.3f} (flips at t={half})")

narrow, wide = KernelSpec(bandwidth_h=0.1), KernelSpec(bandwidth_h=0.4)
print("\n   t   tau(h=0.1)  tau(h=0.4)")
for t in [100, 250, 290, 310, 350, 500]:
    a = tv_kendall(ya, yb, narrow, t)
    b = tv_kendall(ya, yb, wide, t)
    print(f"{t:4d}   {a:+9.3f}   {b:+9.3f}")
# the narrow bandwidth swings through the flip in ~60 days; the wide one
# averages both regimes and lands uselessly near zero at the center

# with uniform weights over the whole sample the estimator reduces to the
# classical tau-a, so scipy agrees to machine precision
w = np.full(S, 1.0 / S)
ours = tv_kendall(ya, yb, narrow, 0, weights=w)
ref = stats.kendalltau(ya, yb).statistic
print(f"\nuniform-weight check vs scipy: {ours:+.12f} vs {ref:+.12f}")

# leave-block-out cross-validation scores each candidate against the
# classical tau computed inside held-out blocks; flipping dependence
# punishes over-smoothing, so the small bandwidth should win
days = [date(2015, 1, 2) + timedelta(days=i) for i in range(S)]
panel = ReturnPanel(tickers=["A", "B"], dates=days, returns=X,
                    imputed_mask=np.zeros_like(X, dtype=bool))
best = select_bandwidth(panel, candidates=[0.15, 0.45])
print(f"cross-validated bandwidth for flipping data: {best}")
