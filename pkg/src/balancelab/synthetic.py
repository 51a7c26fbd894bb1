"""Synthetic market generators for fixtures, demos, and end-to-end tests.

Two generators: dated network sequences that switch from balanced to
frustrated at a known snapshot (for exercising transition detection with a
known ground truth), and a small long-format price/sector/EPU fixture with
a dependence regime change (for exercising the full pipeline).
"""

from __future__ import annotations

import io
import csv
from datetime import date as Date, timedelta

import numpy as np

from ._util import atomic_write_text
from .market_data import EpuSeries, month_key
from .wssn import SignedAdjacency

__all__ = [
    "weekly_fridays",
    "constant_epu_for",
    "make_switching_market",
    "write_price_fixture",
]


def weekly_fridays(start: Date, count: int) -> list[Date]:
    """The first ``count`` Fridays on or after ``start``, one per week."""
    d = start
    while d.weekday() != 4:
        d += timedelta(days=1)
    return [d + timedelta(weeks=k) for k in range(count)]


def constant_epu_for(dates, value: float = 100.0) -> EpuSeries:
    """EPU series covering every month touched by ``dates`` at a constant
    level, so beta_rel is 1 throughout."""
    months = sorted({month_key(d) for d in dates})
    epu = np.full(len(months), float(value))
    return EpuSeries(months=months, epu=epu, beta_rel=epu / epu.max())


def _positive_er(n: int, m: int, rng) -> np.ndarray:
    """All-positive random graph with m edges, weights in [0.4, 0.9]."""
    iu, ju = np.triu_indices(n, k=1)
    pick = rng.choice(iu.size, size=m, replace=False)
    w = rng.uniform(0.4, 0.9, size=m)
    A = np.zeros((n, n))
    A[iu[pick], ju[pick]] = w
    A[ju[pick], iu[pick]] = w
    return A


def make_switching_market(n_nodes: int = 30, n_snapshots: int = 300,
                          switch_at: int = 150, s: int = 6,
                          m_edges: int = 120, seed: int = 0,
                          start: Date = Date(2010, 1, 1)):
    """Weekly network snapshots that turn frustrated at ``switch_at``.

    Every snapshot is an independent all-positive random graph (balanced, so
    K = 1).  From snapshot ``switch_at`` onward an all-negative clique on
    the first ``s`` nodes is embedded on top, which frustrates the graph and
    drops K by an amount growing with ``s``.

    Returns ``(nets, epu)`` ready for ``balance_series``.
    """
    if not 0 < switch_at < n_snapshots:
        raise ValueError("switch_at must fall inside the snapshot range")
    if not 2 <= s < n_nodes:
        raise ValueError("need 2 <= s < n_nodes")
    dates = weekly_fridays(start, n_snapshots)
    nets = []
    for k, d in enumerate(dates):
        rng = np.random.default_rng([seed, k])
        A = _positive_er(n_nodes, m_edges, rng)
        if k >= switch_at:
            A[:s, :s] = -1.0
            np.fill_diagonal(A, 0.0)
        nets.append(SignedAdjacency(date=d, tickers=[f"v{i:03d}"
                                                     for i in range(n_nodes)],
                                    A=A))
    return nets, constant_epu_for(dates)


def _business_days(start: Date, count: int) -> list[Date]:
    out = []
    d = start
    while len(out) < count:
        if d.weekday() < 5:
            out.append(d)
        d += timedelta(days=1)
    return out


def write_price_fixture(out_dir, n_days: int = 520, seed: int = 0):
    """Write a small deterministic price/sector/EPU fixture.

    Ten good tickers: a financial block (FIN0-4), an industrial core
    (IND0-2), and two loners (IND3, IND4).  In the first half the blocks are
    mildly positively coupled and the loners form a positive pair, so every
    thresholded network is balanced.  At the halfway point the cross-block
    coupling turns negative and the loners rewire into a frustrated
    four-cycle (IND3-FIN0 and IND4-FIN1 positive, IND3-IND4 negative), so
    the balance series drops.  An eleventh ticker is 40% missing and gets
    dropped by cleaning; a few scattered holes in a good ticker exercise
    imputation.

    Returns the paths ``(prices_csv, sectors_csv, epu_csv)``.
    """
    import os

    os.makedirs(out_dir, exist_ok=True)
    rng = np.random.default_rng([seed, 1])
    n_good = 10
    half = n_days // 2
    tickers = [f"FIN{i}" for i in range(5)] + [f"IND{i}" for i in range(5)]

    # Correlation geometry is tight here: a frustrated triple of edges all
    # past the tau threshold needs magnitudes near 0.5, and a valid
    # correlation matrix barely admits that.  This layout has smallest
    # eigenvalue ~0.03 post-switch; anything stronger goes indefinite.
    rho_in, rho_pair = 0.6, 0.5
    rho_cross_pre, rho_cross_post = 0.2, -0.5

    def corr(switched):
        C = np.eye(n_good)
        for blk in (range(5), range(5, 8)):
            for i in blk:
                for j in blk:
                    if i != j:
                        C[i, j] = rho_in
        rc = rho_cross_post if switched else rho_cross_pre
        for i in range(5):
            for j in range(5, 8):
                C[i, j] = C[j, i] = rc
        if switched:
            C[0, 8] = C[8, 0] = rho_pair
            C[1, 9] = C[9, 1] = rho_pair
            C[8, 9] = C[9, 8] = -rho_pair
        else:
            C[8, 9] = C[9, 8] = rho_pair
        return C

    def draw(C, size):
        L = np.linalg.cholesky(C)
        z = rng.standard_normal((size, n_good))
        return z @ L.T

    rets = np.vstack([
        draw(corr(False), half),
        draw(corr(True), n_days - half),
    ]) * 0.012
    prices = 100.0 * np.exp(np.cumsum(rets, axis=0))
    dates = _business_days(Date(2015, 1, 2), n_days)

    # the ticker cleaning must drop: 40% of its days missing
    bad = 60.0 * np.exp(np.cumsum(rng.standard_normal(n_days) * 0.01))
    bad_missing = rng.random(n_days) < 0.40
    # scattered holes in one good ticker (imputation path)
    holes = rng.choice(np.arange(5, n_days - 5), size=6, replace=False)

    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["date", "ticker", "close"])
    for i, d in enumerate(dates):
        for j, t in enumerate(tickers):
            if t == "IND4" and i in holes:
                wr.writerow([d.isoformat(), t, ""])
            else:
                wr.writerow([d.isoformat(), t, f"{prices[i, j]:.6f}"])
        wr.writerow([d.isoformat(), "GAPPY",
                     "" if bad_missing[i] else f"{bad[i]:.6f}"])
    prices_csv = os.path.join(out_dir, "prices.csv")
    atomic_write_text(prices_csv, buf.getvalue())

    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["ticker", "sector"])
    for t in tickers:
        wr.writerow([t, "F" if t.startswith("FIN") else "NF"])
    wr.writerow(["GAPPY", "NF"])
    sectors_csv = os.path.join(out_dir, "sectors.csv")
    atomic_write_text(sectors_csv, buf.getvalue())

    months = sorted({month_key(d) for d in dates})
    epu_rng = np.random.default_rng([seed, 2])
    vals = 100.0 * np.exp(epu_rng.normal(0.0, 0.25, size=len(months)))
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["month", "epu"])
    for m, v in zip(months, vals):
        wr.writerow([m, f"{v:.4f}"])
    epu_csv = os.path.join(out_dir, "epu.csv")
    atomic_write_text(epu_csv, buf.getvalue())

    return prices_csv, sectors_csv, epu_csv
