"""Weighted signed stock networks: thresholding, degrees, sector splits.

An edge between two stocks exists when the absolute time-varying tau clears
the threshold epsilon (inclusive); its weight is the tau value itself, so
the adjacency is symmetric with entries in [-1, 1] and zero diagonal.
Isolated nodes stay in the node set: they add zero rows to the spectrum and
contribute equally to both traces of the balance constant.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from datetime import date as Date, datetime

import numpy as np

from ._util import atomic_write_text, fmt_float
from .dependence import TauSnapshot
from .errors import DataError

__all__ = [
    "SignedAdjacency",
    "TriadCase",
    "build_wssn",
    "signed_degrees",
    "sector_subnet",
    "classify_triad",
    "as_tau_snapshot",
    "write_edgelist_csv",
    "read_edgelist_csv",
    "write_dense_csv",
    "read_dense_csv",
]


@dataclass
class SignedAdjacency:
    """Symmetric signed weighted adjacency of one network snapshot.

    ``epsilon`` records the construction threshold when the network came out
    of :func:`build_wssn`; generated model networks leave it None.  Edge
    counts are derived from the matrix on demand.
    """

    date: Date | None
    tickers: list[str]
    A: np.ndarray
    epsilon: float | None = None

    def __post_init__(self):
        self.A = np.asarray(self.A, dtype=float)
        n = len(self.tickers)
        if self.A.shape != (n, n):
            raise ValueError("adjacency shape must match ticker count")
        if not np.array_equal(self.A, self.A.T):
            raise ValueError("adjacency must be symmetric")
        if np.diag(self.A).any():
            raise ValueError("adjacency diagonal must be zero")
        if np.abs(self.A).max(initial=0.0) > 1:
            raise ValueError("weights must lie in [-1, 1]")
        if self.epsilon is not None:
            nz = np.abs(self.A[self.A != 0])
            if nz.size and nz.min() < self.epsilon:
                raise ValueError("nonzero weight below construction epsilon")

    @property
    def n(self) -> int:
        return len(self.tickers)

    @property
    def m_pos(self) -> int:
        return int((np.triu(self.A, k=1) > 0).sum())

    @property
    def m_neg(self) -> int:
        return int((np.triu(self.A, k=1) < 0).sum())

    @property
    def m(self) -> int:
        return self.m_pos + self.m_neg


@dataclass(frozen=True)
class TriadCase:
    """Sign-pattern class of a stock triangle and its predictability index.

    ``case_id`` counts from all-positive (i) through all-negative (iv);
    ``ktilde`` is the product of the three tau values, positive exactly on
    the balanced cases i and ii.
    """

    case_id: str
    balanced: bool
    ktilde: float


def build_wssn(snapshot: TauSnapshot, epsilon: float = 0.3) -> SignedAdjacency:
    """Threshold a tau matrix into a signed network.

    A_ij = tau_ij when |tau_ij| >= epsilon, else 0; the comparison is
    inclusive, so a tau of exactly -epsilon becomes an edge.  The diagonal
    is forced to zero.

    Examples
    --------
    >>> import numpy as np
    >>> snap = TauSnapshot(date=None, tickers=["a", "b"],
    ...                    tau=np.array([[1.0, -0.3], [-0.3, 1.0]]))
    >>> build_wssn(snap, 0.3).A[0, 1]
    -0.3
    """
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    tau = snapshot.tau
    A = np.where(np.abs(tau) >= epsilon, tau, 0.0)
    np.fill_diagonal(A, 0.0)
    A = (A + A.T) / 2.0 if not np.array_equal(A, A.T) else A
    return SignedAdjacency(date=snapshot.date, tickers=list(snapshot.tickers),
                           A=A, epsilon=epsilon)


def signed_degrees(net: SignedAdjacency) -> tuple[np.ndarray, np.ndarray]:
    """Positive and negative degree of every node, aligned with tickers."""
    pos = (net.A > 0).sum(axis=1).astype(int)
    neg = (net.A < 0).sum(axis=1).astype(int)
    return pos, neg


def sector_subnet(net: SignedAdjacency, mode: str,
                  sector_tags: dict[str, str]) -> SignedAdjacency:
    """Restrict the edge set by endpoint sectors, keeping all nodes.

    ``FF`` keeps edges with both endpoints financial, ``NFNF`` both
    non-financial, ``cross`` exactly the mixed edges.  The three modes
    partition the original edge set.
    """
    if mode not in ("FF", "NFNF", "cross"):
        raise ValueError(f"unknown sector mode {mode!r}")
    try:
        fin = np.array([sector_tags[t] == "financial" for t in net.tickers])
    except KeyError as e:
        raise DataError(f"missing sector tag for ticker {e.args[0]!r}") from e
    if mode == "FF":
        mask = fin[:, None] & fin[None, :]
    elif mode == "NFNF":
        mask = ~fin[:, None] & ~fin[None, :]
    else:
        mask = fin[:, None] ^ fin[None, :]
    return SignedAdjacency(date=net.date, tickers=list(net.tickers),
                           A=np.where(mask, net.A, 0.0), epsilon=net.epsilon)


def classify_triad(t12: float, t13: float, t23: float) -> TriadCase:
    """Classify a triangle of tau values by its sign pattern.

    Cases: (+,+,+) -> i, one positive -> ii, one negative -> iii,
    (-,-,-) -> iv.  The triad is balanced exactly when the product of the
    three values (its predictability index ktilde) is positive, i.e. in
    cases i and ii.
    """
    taus = (t12, t13, t23)
    if any(v == 0 for v in taus):
        raise ValueError("zero tau: not a triangle of the thresholded graph")
    negatives = sum(v < 0 for v in taus)
    case_id = {0: "i", 2: "ii", 1: "iii", 3: "iv"}[negatives]
    ktilde = t12 * t13 * t23
    return TriadCase(case_id=case_id, balanced=ktilde > 0, ktilde=ktilde)


def as_tau_snapshot(net: SignedAdjacency) -> TauSnapshot:
    """Reinterpret a signed adjacency as a tau matrix (unit diagonal)."""
    tau = net.A.copy()
    np.fill_diagonal(tau, 1.0)
    return TauSnapshot(date=net.date, tickers=list(net.tickers), tau=tau)


def _date_str(d) -> str:
    return "" if d is None else d.isoformat()


def _parse_net_date(s: str):
    s = s.strip()
    if not s:
        return None
    return datetime.strptime(s, "%Y-%m-%d").date()


def write_edgelist_csv(net: SignedAdjacency, path) -> None:
    """Write the upper-triangle edge list as ``date,ticker_i,ticker_j,weight``.

    Weights are written in shortest round-trip decimal form, so reading the
    file back reproduces them bit for bit.  Isolated nodes do not appear;
    pass the ticker universe to :func:`read_edgelist_csv` to restore them.
    """
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["date", "ticker_i", "ticker_j", "weight"])
    d = _date_str(net.date)
    n = net.n
    for i in range(n):
        for j in range(i + 1, n):
            w = net.A[i, j]
            if w != 0:
                wr.writerow([d, net.tickers[i], net.tickers[j], fmt_float(w)])
    atomic_write_text(path, buf.getvalue())


def read_edgelist_csv(path, tickers: list[str] | None = None,
                      epsilon: float | None = None) -> SignedAdjacency:
    """Read an edge-list CSV back into a :class:`SignedAdjacency`.

    When ``tickers`` is omitted the node set is the sorted set of tickers
    appearing on edges (isolated nodes cannot be recovered from the file).
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["date", "ticker_i", "ticker_j", "weight"]:
        raise DataError(f"{path}: expected header date,ticker_i,ticker_j,weight")
    body = rows[1:]
    date = None
    if body:
        dates = {r[0] for r in body}
        if len(dates) > 1:
            raise DataError(f"{path}: multiple dates in one network file")
        date = _parse_net_date(body[0][0])
    if tickers is None:
        tickers = sorted({r[1] for r in body} | {r[2] for r in body})
    index = {t: k for k, t in enumerate(tickers)}
    A = np.zeros((len(tickers), len(tickers)))
    for _, ti, tj, w in body:
        try:
            i, j = index[ti], index[tj]
        except KeyError as e:
            raise DataError(f"{path}: ticker {e.args[0]!r} not in universe") from e
        A[i, j] = A[j, i] = float(w)
    return SignedAdjacency(date=date, tickers=list(tickers), A=A,
                           epsilon=epsilon)


def write_dense_csv(net: SignedAdjacency, path) -> None:
    """Write the full adjacency matrix with a ticker header row/column."""
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["date", _date_str(net.date)])
    wr.writerow(["ticker"] + list(net.tickers))
    for i, t in enumerate(net.tickers):
        wr.writerow([t] + [fmt_float(v) for v in net.A[i]])
    atomic_write_text(path, buf.getvalue())


def read_dense_csv(path, epsilon: float | None = None) -> SignedAdjacency:
    """Read a dense adjacency CSV written by :func:`write_dense_csv`."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 2 or rows[0][0] != "date" or rows[1][0] != "ticker":
        raise DataError(f"{path}: not a dense adjacency file")
    date = _parse_net_date(rows[0][1]) if len(rows[0]) > 1 else None
    tickers = rows[1][1:]
    A = np.array([[float(v) for v in r[1:]] for r in rows[2:]])
    return SignedAdjacency(date=date, tickers=tickers, A=A, epsilon=epsilon)
