"""Price and EPU ingestion: aligned panels, cleaning, log returns.

Input formats (all CSV):

* prices: ``date,ticker,close`` with ISO dates; an empty close field marks a
  missing observation,
* sectors: ``ticker,sector`` with sector ``F`` (financial) or ``NF``,
* EPU: ``month,epu`` with months as ``YYYY-MM`` and positive index values.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from datetime import date as Date, datetime

import numpy as np
import pandas as pd

from .errors import DataError

logger = logging.getLogger(__name__)

FINANCIAL = "financial"
NON_FINANCIAL = "non_financial"
_SECTOR_CODES = {"F": FINANCIAL, "NF": NON_FINANCIAL}
_SECTOR_NAMES = {v: k for k, v in _SECTOR_CODES.items()}


def _parse_date(s: str) -> Date:
    try:
        return datetime.strptime(str(s).strip(), "%Y-%m-%d").date()
    except ValueError as e:
        raise DataError(f"bad date {s!r}: expected YYYY-MM-DD") from e


def month_key(d: Date) -> str:
    """Calendar month of a date as a ``YYYY-MM`` string."""
    return f"{d.year:04d}-{d.month:02d}"


@dataclass
class PricePanel:
    """Calendar-aligned panel of adjusted closing prices.

    ``prices`` is a dates x tickers float matrix with NaN where a price is
    absent; ``missing_mask`` is True exactly there.  ``imputed_mask`` marks
    cells whose value was filled in by :func:`clean_panel` (all False on a
    freshly loaded panel).  Every ticker carries a sector tag, either
    ``"financial"`` or ``"non_financial"``.
    """

    tickers: list[str]
    dates: list[Date]
    prices: np.ndarray
    missing_mask: np.ndarray
    sector_tags: dict[str, str]
    imputed_mask: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        self.prices = np.asarray(self.prices, dtype=float)
        self.missing_mask = np.asarray(self.missing_mask, dtype=bool)
        if self.imputed_mask is None:
            self.imputed_mask = np.zeros_like(self.missing_mask)
        self.imputed_mask = np.asarray(self.imputed_mask, dtype=bool)
        nd, nt = self.prices.shape
        if nd != len(self.dates) or nt != len(self.tickers):
            raise ValueError("prices shape does not match dates x tickers")
        if any(a >= b for a, b in zip(self.dates, self.dates[1:])):
            raise ValueError("dates must be strictly increasing")
        if not np.array_equal(self.missing_mask, np.isnan(self.prices)):
            raise ValueError("missing_mask must flag exactly the absent prices")
        present = self.prices[~self.missing_mask]
        if present.size and not (present > 0).all():
            raise ValueError("every present price must be positive")
        for t in self.tickers:
            tag = self.sector_tags.get(t)
            if tag not in (FINANCIAL, NON_FINANCIAL):
                raise ValueError(f"ticker {t!r} lacks a valid sector tag")

    @property
    def n_dates(self) -> int:
        return len(self.dates)

    @property
    def n_tickers(self) -> int:
        return len(self.tickers)


@dataclass
class ReturnPanel:
    """Log returns derived from a PricePanel; one row fewer than the source.

    ``imputed_mask`` is True for returns computed from at least one imputed
    price, so downstream estimators can exclude or down-weight them.
    """

    tickers: list[str]
    dates: list[Date]
    returns: np.ndarray
    imputed_mask: np.ndarray

    def __post_init__(self):
        self.returns = np.asarray(self.returns, dtype=float)
        self.imputed_mask = np.asarray(self.imputed_mask, dtype=bool)
        if not np.isfinite(self.returns).all():
            raise ValueError("returns must be finite")
        if self.returns.shape != (len(self.dates), len(self.tickers)):
            raise ValueError("returns shape does not match dates x tickers")

    def series(self, ticker: str) -> np.ndarray:
        """Return series of one ticker as a 1-d array."""
        return self.returns[:, self.tickers.index(ticker)]


@dataclass
class EpuSeries:
    """Monthly economic policy uncertainty index with relative inverse
    temperatures ``beta_rel = epu / max(epu)`` over the loaded window."""

    months: list[str]
    epu: np.ndarray
    beta_rel: np.ndarray

    def __post_init__(self):
        self.epu = np.asarray(self.epu, dtype=float)
        self.beta_rel = np.asarray(self.beta_rel, dtype=float)
        if not (self.epu > 0).all():
            raise ValueError("EPU values must be positive")
        if not ((self.beta_rel > 0) & (self.beta_rel <= 1)).all():
            raise ValueError("beta_rel must lie in (0, 1]")
        if self.beta_rel.max() != 1.0:
            raise ValueError("max beta_rel must be exactly 1")

    def beta_for_date(self, d: Date) -> float:
        """beta_rel of the calendar month containing ``d``."""
        key = month_key(d)
        try:
            return float(self.beta_rel[self.months.index(key)])
        except ValueError as e:
            raise DataError(f"no EPU entry for month {key}") from e


def load_sectors(path) -> dict[str, str]:
    """Read a ``ticker,sector`` CSV into a ticker -> sector-tag mapping."""
    df = pd.read_csv(path, dtype=str)
    if list(df.columns) != ["ticker", "sector"]:
        raise DataError(f"sector file {path}: expected header ticker,sector")
    tags = {}
    for _, row in df.iterrows():
        code = str(row["sector"]).strip()
        if code not in _SECTOR_CODES:
            raise DataError(f"unknown sector code {code!r} (want F or NF)")
        tags[str(row["ticker"]).strip()] = _SECTOR_CODES[code]
    return tags


def load_prices(path, calendar_policy: str = "union", sectors=None) -> PricePanel:
    """Load a long-format price CSV into an aligned :class:`PricePanel`.

    Parameters
    ----------
    path : file path
        CSV with header ``date,ticker,close``; empty close = missing.
    calendar_policy : {"union", "intersection"}
        ``union`` keeps every date observed for any ticker (gaps flagged in
        ``missing_mask``); ``intersection`` keeps only dates on which every
        ticker has a valid price.
    sectors : mapping, file path, or None
        Ticker -> sector tags, or a path to a ``ticker,sector`` CSV.  Tickers
        without a tag default to non-financial.

    Nonpositive or unparseable close values are rejected row-wise with a
    logged diagnostic and treated as missing.
    """
    if calendar_policy not in ("union", "intersection"):
        raise ValueError(f"unknown calendar_policy {calendar_policy!r}")
    df = pd.read_csv(path, dtype=str, keep_default_na=False)
    if list(df.columns) != ["date", "ticker", "close"]:
        raise DataError(f"price file {path}: expected header date,ticker,close")

    dates_seen = {}
    values: dict[tuple[Date, str], float] = {}
    for row in df.itertuples(index=False):
        d = _parse_date(row.date)
        ticker = str(row.ticker).strip()
        key = (d, ticker)
        if key in values:
            raise DataError(f"duplicate row for {ticker} on {d.isoformat()}")
        raw = str(row.close).strip()
        if raw == "":
            values[key] = np.nan
        else:
            try:
                price = float(raw)
            except ValueError:
                logger.warning("rejecting %s @ %s: unparseable close %r",
                               ticker, d.isoformat(), raw)
                price = np.nan
            else:
                if price <= 0:
                    logger.warning("rejecting %s @ %s: nonpositive close %s",
                                   ticker, d.isoformat(), raw)
                    price = np.nan
            values[key] = price
        dates_seen.setdefault(d, set()).add(ticker)

    if not values:
        raise DataError(f"price file {path} contains no data rows")
    tickers = sorted({t for _, t in values})
    all_dates = sorted(dates_seen)
    prices = np.full((len(all_dates), len(tickers)), np.nan)
    for (d, t), v in values.items():
        prices[all_dates.index(d), tickers.index(t)] = v

    if calendar_policy == "intersection":
        keep = ~np.isnan(prices).any(axis=1)
        all_dates = [d for d, k in zip(all_dates, keep) if k]
        prices = prices[keep]
        if not all_dates:
            raise DataError("no date has a valid price for every ticker")

    if sectors is None:
        tags = {}
    elif isinstance(sectors, dict):
        tags = dict(sectors)
    else:
        tags = load_sectors(sectors)
    for t in tickers:
        tags.setdefault(t, NON_FINANCIAL)

    return PricePanel(
        tickers=tickers,
        dates=all_dates,
        prices=prices,
        missing_mask=np.isnan(prices),
        sector_tags={t: tags[t] for t in tickers},
    )


def _longest_run(mask: np.ndarray) -> int:
    """Length of the longest run of True values in a boolean vector."""
    best = run = 0
    for v in mask:
        run = run + 1 if v else 0
        best = max(best, run)
    return best


def clean_panel(panel: PricePanel, max_consecutive_days: int = 756,
                max_missing_frac: float = 0.30) -> PricePanel:
    """Drop unusable tickers and impute the remaining gaps.

    A ticker is dropped when its longest missing run exceeds
    ``max_consecutive_days`` (default 756 = three 252-day market years) or its
    overall missing fraction exceeds ``max_missing_frac``.  Surviving gaps are
    forward-filled from the last observed price (leading gaps back-filled),
    and every filled cell is recorded in ``imputed_mask``.
    """
    if max_consecutive_days < 1:
        raise ValueError("max_consecutive_days must be >= 1")
    if not 0 < max_missing_frac < 1:
        raise ValueError("max_missing_frac must lie in (0, 1)")

    keep = []
    for j, t in enumerate(panel.tickers):
        col = panel.missing_mask[:, j]
        run = _longest_run(col)
        frac = col.mean()
        if run > max_consecutive_days:
            logger.info("dropping %s: missing run %d > %d", t, run,
                        max_consecutive_days)
        elif frac > max_missing_frac:
            logger.info("dropping %s: missing fraction %.3f > %.3f", t, frac,
                        max_missing_frac)
        else:
            keep.append(j)
    if not keep:
        raise DataError("cleaning dropped every ticker; panel is empty")

    tickers = [panel.tickers[j] for j in keep]
    prices = panel.prices[:, keep].copy()
    imputed = panel.missing_mask[:, keep].copy()
    filled = (
        pd.DataFrame(prices).ffill(axis=0).bfill(axis=0).to_numpy()
    )
    return PricePanel(
        tickers=tickers,
        dates=list(panel.dates),
        prices=filled,
        missing_mask=np.isnan(filled),
        sector_tags={t: panel.sector_tags[t] for t in tickers},
        imputed_mask=imputed,
    )


def log_returns(panel: PricePanel) -> ReturnPanel:
    """Log returns ``ln(P(t+1)/P(t))`` of a fully imputed panel.

    A return is flagged imputed when either endpoint price was imputed.
    Raises :class:`DataError` naming the first offender if any price is
    still missing.
    """
    if panel.missing_mask.any():
        i, j = np.argwhere(panel.missing_mask)[0]
        raise DataError(
            f"unresolved missing price for {panel.tickers[j]} on "
            f"{panel.dates[i].isoformat()}; run clean_panel first"
        )
    if panel.n_dates < 2:
        raise DataError("need at least two dates to compute returns")
    rets = np.log(panel.prices[1:] / panel.prices[:-1])
    imput = panel.imputed_mask[1:] | panel.imputed_mask[:-1]
    return ReturnPanel(
        tickers=list(panel.tickers),
        dates=list(panel.dates[1:]),
        returns=rets,
        imputed_mask=imput,
    )


def load_epu(path) -> EpuSeries:
    """Read a monthly ``month,epu`` CSV and attach relative inverse
    temperatures ``beta_rel = epu / max(epu)``."""
    df = pd.read_csv(path, dtype={"month": str, "epu": float})
    if list(df.columns) != ["month", "epu"]:
        raise DataError(f"EPU file {path}: expected header month,epu")
    months = [str(m).strip() for m in df["month"]]
    for m in months:
        try:
            datetime.strptime(m, "%Y-%m")
        except ValueError as e:
            raise DataError(f"bad month {m!r}: expected YYYY-MM") from e
    if any(a >= b for a, b in zip(months, months[1:])):
        raise DataError("EPU months must be strictly increasing")
    epu = df["epu"].to_numpy(dtype=float)
    if not np.isfinite(epu).all() or (epu <= 0).any():
        raise DataError("EPU values must be positive numbers")
    return EpuSeries(months=months, epu=epu, beta_rel=epu / epu.max())
