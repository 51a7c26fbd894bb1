"""Structural balance of signed networks via matrix exponentials.

The equilibrium constant of a signed graph G with adjacency A is

    K = tr(exp(beta * A)) / tr(exp(beta * |A|)),

where |A| is the entrywise absolute value (the unsigned version G' of the
graph).  K lies in (0, 1] and equals 1 exactly when G is balanced, because a
balanced graph is isospectral with its unsigned version (switching all edges
across any node bipartition conjugates A by a diagonal +-1 matrix).  The
same quantity equals the ratio (W+ - |W-|) / (W+ + |W-|) of kernel-weighted
balanced and unbalanced walk counts, which provides an eigenvalue-free
cross-check through truncated power-trace series.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from datetime import date as Date

import numpy as np
from scipy.special import logsumexp

from ._util import atomic_write_text, fmt_float, thread_map
from .errors import DataError, NumericalError
from .market_data import EpuSeries
from .wssn import SignedAdjacency

logger = logging.getLogger(__name__)

__all__ = [
    "BalanceResult",
    "BalanceSeries",
    "balance_k",
    "fnc_balance",
    "walk_identity_check",
    "is_balanced",
    "balance_series",
    "write_balance_csv",
    "read_balance_csv",
]


@dataclass
class BalanceResult:
    """Balance constant of one network snapshot.

    ``trace_signed`` and ``trace_unsigned`` are tr(exp(beta*A)) and
    tr(exp(beta*|A|)); their ratio is K.  Edge counts ride along so a dated
    series can be serialized without revisiting the networks.
    """

    date: Date | None
    K: float
    beta_rel: float
    trace_signed: float
    trace_unsigned: float
    is_balanced: bool
    m_pos: int = 0
    m_neg: int = 0

    def __post_init__(self):
        if not 0 < self.K <= 1 + 1e-12:
            raise ValueError(f"K={self.K} outside (0, 1]")


@dataclass
class BalanceSeries:
    """Strictly date-ordered sequence of balance results."""

    results: list[BalanceResult]

    def __post_init__(self):
        ds = [r.date for r in self.results]
        if any(a >= b for a, b in zip(ds, ds[1:])):
            raise ValueError("balance series dates must be strictly increasing")

    def __len__(self):
        return len(self.results)

    @property
    def dates(self) -> list:
        return [r.date for r in self.results]

    @property
    def k_values(self) -> np.ndarray:
        return np.array([r.K for r in self.results])


def _eig_sorted(M: np.ndarray) -> np.ndarray:
    try:
        lam = np.linalg.eigvalsh(M)
    except np.linalg.LinAlgError as e:
        raise NumericalError(f"eigensolver failure: {e}") from e
    return lam  # eigvalsh returns ascending order


def balance_k(net: SignedAdjacency, beta_rel: float,
              tol_balance: float | None = None) -> BalanceResult:
    """Equilibrium constant K of a signed network at inverse temperature
    ``beta_rel``.

    Both traces are evaluated from the eigenvalues of the symmetric matrices
    A and |A| through log-sum-exp, so large networks cannot overflow the
    ratio.  The balance flag comes from spectral comparison of A with |A|
    (see :func:`is_balanced`) using ``tol_balance`` (default 1e-9 * n).

    Examples
    --------
    >>> import numpy as np
    >>> tri = SignedAdjacency(date=None, tickers=list("abc"),
    ...                       A=-(np.ones((3, 3)) - np.eye(3)))
    >>> round(balance_k(tri, 1.0).K, 5)
    0.68579
    """
    if not 0 < beta_rel <= 1:
        raise ValueError("beta_rel must lie in (0, 1]")
    n = net.n
    tol = tol_balance if tol_balance is not None else 1e-9 * n
    lam = _eig_sorted(net.A)
    mu = _eig_sorted(np.abs(net.A))
    ls = logsumexp(beta_rel * lam)
    lu = logsumexp(beta_rel * mu)
    K = float(np.exp(ls - lu))
    balanced = bool(np.max(np.abs(lam - mu)) <= tol)
    K = min(K, 1.0)
    return BalanceResult(
        date=net.date,
        K=K,
        beta_rel=beta_rel,
        trace_signed=float(np.exp(ls)),
        trace_unsigned=float(np.exp(lu)),
        is_balanced=balanced,
        m_pos=net.m_pos,
        m_neg=net.m_neg,
    )


def fnc_balance(s: int, beta_rel: float) -> float:
    """Closed-form balance constant of a fully negative clique of s nodes:

        K = (exp(-beta(s-1)) + (s-1) exp(beta))
            / (exp(beta(s-1)) + (s-1) exp(-beta))

    The spectrum of the all-(-1) clique is {-(s-1), 1 x (s-1)} while its
    unsigned version has {s-1, -1 x (s-1)}, which gives the formula directly.
    K decays to zero as s grows: a large mutually anticorrelated clique is
    maximally frustrated.

    Examples
    --------
    >>> fnc_balance(2, 0.7)
    1.0
    >>> round(fnc_balance(3, 1.0), 5)
    0.68579
    """
    if not (isinstance(s, (int, np.integer)) and s >= 2):
        raise ValueError("s must be an integer >= 2")
    if not 0 < beta_rel <= 1:
        raise ValueError("beta_rel must lie in (0, 1]")
    b = float(beta_rel)
    log_num = logsumexp([-b * (s - 1), b + math.log(s - 1)])
    log_den = logsumexp([b * (s - 1), -b + math.log(s - 1)])
    return float(np.exp(log_num - log_den))


def _spectral_norm_bound(A: np.ndarray) -> float:
    """Gershgorin bound max_i sum_j |A_ij| >= spectral norm for symmetric A."""
    if A.size == 0:
        return 0.0
    return float(np.abs(A).sum(axis=1).max(initial=0.0))


def walk_identity_check(net: SignedAdjacency, beta_rel: float,
                        truncation: int) -> tuple[float, float]:
    """Balance constant two ways: spectral vs truncated walk series.

    The walk route accumulates the power-trace series
    sum_k beta^k tr(A^k)/k! for A and |A| without any eigendecomposition;
    their ratio is K expressed through weighted walk counts.  Matrix powers
    are taken on A scaled by a Gershgorin norm bound, so no intermediate
    quantity can overflow.  The series tail bound
    (beta * ||A||)^truncation / truncation! must be below 1e-12, otherwise a
    :class:`NumericalError` reports that the truncation is insufficient.

    Returns
    -------
    (K_spectral, K_walks) : tuple of float
    """
    if not 0 < beta_rel <= 1:
        raise ValueError("beta_rel must lie in (0, 1]")
    if truncation < 1:
        raise ValueError("truncation must be >= 1")
    A = net.A
    n = net.n
    rho = _spectral_norm_bound(A)
    x = beta_rel * rho
    if x > 0:
        log_tail = truncation * math.log(x) - math.lgamma(truncation + 1)
        if log_tail >= math.log(1e-12):
            raise NumericalError(
                f"truncation {truncation} insufficient: tail bound "
                f"(beta*||A||)^k/k! = {math.exp(log_tail):.3g} >= 1e-12"
            )
    if rho == 0:
        k_spectral = balance_k(net, beta_rel).K
        return k_spectral, 1.0

    Bs = A / rho
    Bu = np.abs(A) / rho
    Ms = np.eye(n)
    Mu = np.eye(n)
    coeff = 1.0
    trace_s = float(n)
    trace_u = float(n)
    for k in range(1, truncation + 1):
        coeff *= x / k
        Ms = Ms @ Bs
        Mu = Mu @ Bu
        trace_s += coeff * float(np.trace(Ms))
        trace_u += coeff * float(np.trace(Mu))
    k_walks = trace_s / trace_u
    k_spectral = balance_k(net, beta_rel).K
    return k_spectral, float(k_walks)


def is_balanced(net: SignedAdjacency, tol_spectral: float | None = None) -> bool:
    """Spectral balance test: A and |A| isospectral within tolerance.

    A signed graph is balanced exactly when its adjacency and the entrywise
    absolute value have identical spectra.  Default tolerance 1e-9 * n on
    the max absolute difference of sorted eigenvalues.
    """
    tol = tol_spectral if tol_spectral is not None else 1e-9 * net.n
    lam = _eig_sorted(net.A)
    mu = _eig_sorted(np.abs(net.A))
    return bool(np.max(np.abs(lam - mu), initial=0.0) <= tol)


def balance_series(nets, epu: EpuSeries) -> BalanceSeries:
    """Balance constant of each dated network, with the beta_rel of its
    calendar month.

    Every network date must fall in a month present in the EPU series;
    otherwise a :class:`DataError` names the missing month.  Snapshots are
    processed in parallel (capped by BALANCELAB_THREADS) and returned in
    date order regardless of scheduling.
    """
    nets = sorted(nets, key=lambda net: net.date)

    def one(net):
        if net.date is None:
            raise DataError("balance_series requires dated networks")
        beta = epu.beta_for_date(net.date)
        return balance_k(net, beta)

    return BalanceSeries(results=thread_map(one, nets))


def write_balance_csv(series: BalanceSeries, path) -> None:
    """Serialize as ``date,K,beta_rel,m_pos,m_neg`` rows."""
    lines = ["date,K,beta_rel,m_pos,m_neg"]
    for r in series.results:
        lines.append(",".join([
            r.date.isoformat(), fmt_float(r.K), fmt_float(r.beta_rel),
            str(r.m_pos), str(r.m_neg),
        ]))
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_balance_csv(path) -> BalanceSeries:
    """Read a balance CSV back; traces are not stored and read back as NaN."""
    import csv as _csv
    from datetime import datetime as _dt

    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(_csv.reader(fh))
    if not rows or rows[0] != ["date", "K", "beta_rel", "m_pos", "m_neg"]:
        raise DataError(f"{path}: expected header date,K,beta_rel,m_pos,m_neg")
    out = []
    for d, k, b, mp, mn in rows[1:]:
        out.append(BalanceResult(
            date=_dt.strptime(d, "%Y-%m-%d").date(),
            K=float(k), beta_rel=float(b),
            trace_signed=float("nan"), trace_unsigned=float("nan"),
            is_balanced=abs(float(k) - 1.0) <= 1e-9,
            m_pos=int(mp), m_neg=int(mn),
        ))
    return BalanceSeries(results=out)
