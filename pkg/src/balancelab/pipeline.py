"""Staged analysis pipeline over file artifacts.

Each stage reads the previous stage's CSV artifacts from the output
directory and writes its own atomically, so a rerun of any single stage
reproduces its outputs exactly from the cached upstream files.  All floats
are serialized in shortest round-trip form and JSON keys are sorted, which
makes artifacts byte-identical across runs with the same config and seeds.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import os
from dataclasses import dataclass, field, asdict
from datetime import date as Date, datetime

import numpy as np

from ._util import atomic_write_text, fmt_float
from .balance import balance_series, write_balance_csv, read_balance_csv
from .dependence import KernelSpec, TauSnapshot, tau_matrix
from .ensembles import fit_clique_size, write_fit_json
from .errors import ConfigError, DataError, NumericalError
from .market_data import (PricePanel, ReturnPanel, clean_panel, load_epu,
                          load_prices, load_sectors, log_returns)
from .transition import detect_but, write_dcs_csv, write_report_json
from .wssn import (SignedAdjacency, build_wssn, read_edgelist_csv,
                   sector_subnet, signed_degrees, write_edgelist_csv)

logger = logging.getLogger(__name__)

__all__ = ["PipelineConfig", "run_pipeline"]

_CADENCES = ("weekly_friday", "monthly", "every_k_days")


@dataclass
class PipelineConfig:
    """Everything a pipeline run needs; JSON-loadable, flag-overridable."""

    prices: str = ""
    sectors: str = ""
    epu: str = ""
    out: str = "out"
    epsilon: float = 0.3
    bandwidth: float = 0.1
    cadence: str = "weekly_friday"
    k_days: int = 5
    calendar_policy: str = "union"
    max_consecutive_days: int = 756
    max_missing_frac: float = 0.30
    min_segment: int = 26
    gain_threshold: float = 0.5
    detrend: str = "mean"
    fit_csg: bool = False
    s_min: int = 2
    s_max: int = 25
    trials: int = 8
    seed: int = 0

    @classmethod
    def from_json(cls, path, overrides: dict | None = None) -> "PipelineConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read config {path}: {e}") from e
        return cls.build(raw, overrides)

    @classmethod
    def build(cls, raw: dict | None = None,
              overrides: dict | None = None) -> "PipelineConfig":
        merged = {}
        for src in (raw or {}), (overrides or {}):
            for k, v in src.items():
                if v is None:
                    continue
                if k not in cls.__dataclass_fields__:
                    raise ConfigError(f"unknown config key {k!r}")
                merged[k] = v
        cfg = cls(**merged)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if not 0 < self.epsilon < 1:
            raise ConfigError(f"epsilon={self.epsilon} outside (0, 1)")
        if not self.bandwidth > 0:
            raise ConfigError("bandwidth must be positive")
        if self.cadence not in _CADENCES:
            raise ConfigError(f"unknown cadence {self.cadence!r}")
        if self.cadence == "every_k_days" and self.k_days < 1:
            raise ConfigError("k_days must be >= 1")
        if self.calendar_policy not in ("union", "intersection"):
            raise ConfigError(f"unknown calendar_policy {self.calendar_policy!r}")
        if self.gain_threshold <= 0:
            raise ConfigError("gain_threshold must be positive")
        if self.min_segment < 2:
            raise ConfigError("min_segment must be >= 2")
        if self.detrend not in ("mean", "linear"):
            raise ConfigError(f"unknown detrend mode {self.detrend!r}")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if not 0 < self.max_missing_frac < 1:
            raise ConfigError("max_missing_frac must lie in (0, 1)")

    def require_inputs(self) -> None:
        for name in ("prices", "sectors", "epu"):
            p = getattr(self, name)
            if not p:
                raise ConfigError(f"missing required input path: {name}")
            if not os.path.exists(p):
                raise ConfigError(f"{name} file not found: {p}")

    # artifact locations -------------------------------------------------
    def path(self, *parts) -> str:
        return os.path.join(self.out, *parts)


def _stage(name):
    """Decorator tagging stage failures with the stage name."""
    def wrap(fn):
        def run(cfg, *a, **kw):
            logger.info("stage %s", name)
            try:
                return fn(cfg, *a, **kw)
            except (ConfigError, DataError, NumericalError, ValueError) as e:
                raise type(e)(f"stage {name}: {e}") from e
        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run
    return wrap


# --------------------------------------------------------------------------
# interchange helpers for cleaned panels and return panels

def _write_long_prices(panel: PricePanel, path) -> None:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["date", "ticker", "close"])
    for i, d in enumerate(panel.dates):
        for j, t in enumerate(panel.tickers):
            wr.writerow([d.isoformat(), t, fmt_float(panel.prices[i, j])])
    atomic_write_text(path, buf.getvalue())


def _write_imputed(panel: PricePanel, path) -> None:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["date", "ticker"])
    for i, j in np.argwhere(panel.imputed_mask):
        wr.writerow([panel.dates[i].isoformat(), panel.tickers[j]])
    atomic_write_text(path, buf.getvalue())


def _read_clean_panel(cfg: PipelineConfig) -> PricePanel:
    panel = load_prices(cfg.path("prices_clean.csv"), "union",
                        sectors=cfg.path("sectors_clean.csv"))
    imputed = np.zeros_like(panel.missing_mask)
    with open(cfg.path("imputed.csv"), newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    for d, t in rows[1:]:
        i = panel.dates.index(datetime.strptime(d, "%Y-%m-%d").date())
        imputed[i, panel.tickers.index(t)] = True
    panel.imputed_mask = imputed
    return panel


def _write_returns(panel: ReturnPanel, path) -> None:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["date", "ticker", "log_return", "imputed"])
    for i, d in enumerate(panel.dates):
        for j, t in enumerate(panel.tickers):
            wr.writerow([d.isoformat(), t, fmt_float(panel.returns[i, j]),
                         int(panel.imputed_mask[i, j])])
    atomic_write_text(path, buf.getvalue())


def read_returns_csv(path) -> ReturnPanel:
    """Read a ``date,ticker,log_return,imputed`` CSV into a ReturnPanel."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["date", "ticker", "log_return", "imputed"]:
        raise DataError(f"{path}: expected header date,ticker,log_return,imputed")
    dates = sorted({r[0] for r in rows[1:]})
    tickers = sorted({r[1] for r in rows[1:]})
    di = {d: i for i, d in enumerate(dates)}
    tj = {t: j for j, t in enumerate(tickers)}
    rets = np.full((len(dates), len(tickers)), np.nan)
    imput = np.zeros(rets.shape, dtype=bool)
    for d, t, r, im in rows[1:]:
        rets[di[d], tj[t]] = float(r)
        imput[di[d], tj[t]] = bool(int(im))
    if np.isnan(rets).any():
        raise DataError(f"{path}: incomplete return panel")
    return ReturnPanel(
        tickers=tickers,
        dates=[datetime.strptime(d, "%Y-%m-%d").date() for d in dates],
        returns=rets,
        imputed_mask=imput,
    )


def snapshot_dates(dates: list[Date], cadence: str, k_days: int = 5) -> list[Date]:
    """Snapshot calendar: Fridays, month-ends, or every k-th trading day."""
    if cadence == "weekly_friday":
        return [d for d in dates if d.weekday() == 4]
    if cadence == "monthly":
        out = []
        for a, b in zip(dates, dates[1:] + [None]):
            if b is None or (a.year, a.month) != (b.year, b.month):
                out.append(a)
        return out
    if cadence == "every_k_days":
        return list(dates[::k_days])
    raise ConfigError(f"unknown cadence {cadence!r}")


# --------------------------------------------------------------------------
# stages

@_stage("ingest")
def stage_ingest(cfg: PipelineConfig) -> None:
    """Load, align, and clean the raw price panel; copy sector tags."""
    cfg.require_inputs()
    os.makedirs(cfg.out, exist_ok=True)
    tags = load_sectors(cfg.sectors)
    panel = load_prices(cfg.prices, cfg.calendar_policy, sectors=tags)
    panel = clean_panel(panel, cfg.max_consecutive_days, cfg.max_missing_frac)
    _write_long_prices(panel, cfg.path("prices_clean.csv"))
    _write_imputed(panel, cfg.path("imputed.csv"))
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["ticker", "sector"])
    for t in panel.tickers:
        wr.writerow([t, "F" if panel.sector_tags[t] == "financial" else "NF"])
    atomic_write_text(cfg.path("sectors_clean.csv"), buf.getvalue())


@_stage("returns")
def stage_returns(cfg: PipelineConfig) -> None:
    """Log returns of the cleaned panel."""
    panel = _read_clean_panel(cfg)
    _write_returns(log_returns(panel), cfg.path("returns.csv"))


@_stage("tau")
def stage_tau(cfg: PipelineConfig, date: str | None = None,
              dense: bool = False) -> list[str]:
    """Tau snapshots at the configured cadence (or one explicit date)."""
    panel = read_returns_csv(cfg.path("returns.csv"))
    spec = KernelSpec(bandwidth_h=cfg.bandwidth)
    if date is not None:
        targets = [datetime.strptime(date, "%Y-%m-%d").date()]
        if targets[0] not in panel.dates:
            raise DataError(f"{date} is not a return date of the panel")
    else:
        targets = snapshot_dates(panel.dates, cfg.cadence, cfg.k_days)
    os.makedirs(cfg.path("snapshots"), exist_ok=True)
    written = []
    for d in targets:
        snap = tau_matrix(panel, spec, panel.dates.index(d))
        path = cfg.path("snapshots", f"tau_{d.isoformat()}.csv")
        if dense:
            _write_dense_tau_csv(snap, path)
        else:
            _write_tau_csv(snap, path)
        written.append(path)
    return written


def _write_dense_tau_csv(snap: TauSnapshot, path) -> None:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["ticker"] + list(snap.tickers))
    for i, t in enumerate(snap.tickers):
        wr.writerow([t] + [fmt_float(v) for v in snap.tau[i]])
    atomic_write_text(path, buf.getvalue())


def _write_tau_csv(snap: TauSnapshot, path) -> None:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["ticker_i", "ticker_j", "tau"])
    n = len(snap.tickers)
    for i in range(n):
        for j in range(i + 1, n):
            wr.writerow([snap.tickers[i], snap.tickers[j],
                         fmt_float(snap.tau[i, j])])
    atomic_write_text(path, buf.getvalue())


def read_tau_csv(path, date=None) -> TauSnapshot:
    """Read an upper-triangle ``ticker_i,ticker_j,tau`` snapshot CSV."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["ticker_i", "ticker_j", "tau"]:
        raise DataError(f"{path}: expected header ticker_i,ticker_j,tau")
    tickers = sorted({r[0] for r in rows[1:]} | {r[1] for r in rows[1:]})
    idx = {t: k for k, t in enumerate(tickers)}
    tau = np.eye(len(tickers))
    for ti, tj, v in rows[1:]:
        tau[idx[ti], idx[tj]] = tau[idx[tj], idx[ti]] = float(v)
    return TauSnapshot(date=date, tickers=tickers, tau=tau)


@_stage("build-net")
def stage_networks(cfg: PipelineConfig) -> list[str]:
    """Threshold every tau snapshot into a signed network edge list."""
    snap_dir = cfg.path("snapshots")
    if not os.path.isdir(snap_dir):
        raise DataError("no snapshots directory; run the tau stage first")
    os.makedirs(cfg.path("networks"), exist_ok=True)
    written = []
    for name in sorted(os.listdir(snap_dir)):
        if not name.startswith("tau_"):
            continue
        d = datetime.strptime(name[4:14], "%Y-%m-%d").date()
        snap = read_tau_csv(os.path.join(snap_dir, name), date=d)
        net = build_wssn(snap, cfg.epsilon)
        path = cfg.path("networks", f"net_{d.isoformat()}.csv")
        write_edgelist_csv(net, path)
        written.append(path)
    return written


def _load_networks(cfg: PipelineConfig) -> list[SignedAdjacency]:
    net_dir = cfg.path("networks")
    if not os.path.isdir(net_dir):
        raise DataError("no networks directory; run the build-net stage first")
    panel_tickers = None
    clean = cfg.path("sectors_clean.csv")
    if os.path.exists(clean):
        panel_tickers = sorted(load_sectors(clean))
    nets = []
    for name in sorted(os.listdir(net_dir)):
        if not name.startswith("net_"):
            continue
        d = datetime.strptime(name[4:14], "%Y-%m-%d").date()
        net = read_edgelist_csv(os.path.join(net_dir, name),
                                tickers=panel_tickers, epsilon=cfg.epsilon)
        if net.date is None:
            net = SignedAdjacency(date=d, tickers=net.tickers, A=net.A,
                                  epsilon=net.epsilon)
        nets.append(net)
    if not nets:
        raise DataError("networks directory holds no network files")
    return nets


@_stage("balance")
def stage_balance(cfg: PipelineConfig) -> None:
    """Balance series of the full networks and the three sector splits."""
    if not cfg.epu or not os.path.exists(cfg.epu):
        raise ConfigError(f"epu file not found: {cfg.epu!r}")
    epu = load_epu(cfg.epu)
    nets = _load_networks(cfg)
    write_balance_csv(balance_series(nets, epu), cfg.path("balance.csv"))
    tags = load_sectors(cfg.path("sectors_clean.csv")) \
        if os.path.exists(cfg.path("sectors_clean.csv")) else None
    if tags is not None:
        for mode in ("FF", "NFNF", "cross"):
            subnets = [sector_subnet(net, mode, tags) for net in nets]
            write_balance_csv(balance_series(subnets, epu),
                              cfg.path(f"balance_{mode}.csv"))


@_stage("dcs")
def stage_dcs(cfg: PipelineConfig) -> None:
    """Detrended cumulative sum of the balance series."""
    series = read_balance_csv(cfg.path("balance.csv"))
    from .transition import dcs as _dcs
    write_dcs_csv(series.dates, _dcs(series, detrend=cfg.detrend),
                  path=cfg.path("dcs.csv"))


@_stage("detect-but")
def stage_detect(cfg: PipelineConfig) -> None:
    """Slope-break detection on the balance series."""
    series = read_balance_csv(cfg.path("balance.csv"))
    report = detect_but(series, min_segment=cfg.min_segment,
                        gain_threshold=cfg.gain_threshold,
                        detrend=cfg.detrend)
    write_report_json(report, cfg.path("transition.json"))


@_stage("degrees")
def stage_degrees(cfg: PipelineConfig) -> None:
    """Per-snapshot signed degrees of every ticker."""
    nets = _load_networks(cfg)
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["date", "ticker", "pos_degree", "neg_degree"])
    for net in nets:
        pos, neg = signed_degrees(net)
        for t, p, q in zip(net.tickers, pos, neg):
            wr.writerow([net.date.isoformat(), t, int(p), int(q)])
    atomic_write_text(cfg.path("degrees.csv"), buf.getvalue())


@_stage("fit-csg")
def stage_fit(cfg: PipelineConfig) -> None:
    """Quasi-CSG clique-size fit of the last (post-transition) network."""
    nets = _load_networks(cfg)
    target = nets[-1]
    report = fit_clique_size(target, range(cfg.s_min, cfg.s_max + 1),
                             trials=cfg.trials, seed=cfg.seed)
    write_fit_json(report, cfg.path("fit.json"))


@_stage("plots")
def stage_plots(cfg: PipelineConfig) -> None:
    """K(t), DCS(t), and cumulative signed-degree SVG figures."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    plt.rcParams["svg.hashsalt"] = "balancelab"

    os.makedirs(cfg.path("plots"), exist_ok=True)
    series = read_balance_csv(cfg.path("balance.csv"))
    dates = series.dates

    def save(fig, name):
        fig.savefig(cfg.path("plots", name), format="svg",
                    metadata={"Date": None})
        plt.close(fig)

    fig, ax = plt.subplots(figsize=(8, 3.2))
    ax.plot(dates, series.k_values, lw=1.2)
    ax.set_ylabel("K")
    ax.set_title("balance constant")
    fig.autofmt_xdate()
    save(fig, "k_t.svg")

    with open(cfg.path("dcs.csv"), newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))[1:]
    dvals = [float(r[1]) for r in rows]
    fig, ax = plt.subplots(figsize=(8, 3.2))
    ax.plot(dates[:len(dvals)], dvals, lw=1.2, color="tab:red")
    ax.set_ylabel("DCS")
    ax.set_title("detrended cumulative sum")
    fig.autofmt_xdate()
    save(fig, "dcs.svg")

    mp = np.cumsum([r.m_pos for r in series.results])
    mn = np.cumsum([r.m_neg for r in series.results])
    fig, ax = plt.subplots(figsize=(8, 3.2))
    ax.plot(dates, mp, label="cumulative positive edges")
    ax.plot(dates, mn, label="cumulative negative edges")
    ax.legend()
    fig.autofmt_xdate()
    save(fig, "degrees.svg")


@_stage("report")
def stage_report(cfg: PipelineConfig) -> None:
    """Summary JSON tying the artifacts together."""
    series = read_balance_csv(cfg.path("balance.csv"))
    with open(cfg.path("transition.json"), encoding="utf-8") as fh:
        transition = json.load(fh)
    artifacts = sorted(
        os.path.relpath(os.path.join(root, f), cfg.out)
        for root, _, files in os.walk(cfg.out)
        for f in files
        if f != "report.json" and not f.endswith("~")
    )
    k = series.k_values
    # filesystem locations are environment, not analysis parameters; leaving
    # them out keeps the report byte-identical wherever the run lives
    params = {key: val for key, val in asdict(cfg).items()
              if key not in ("prices", "sectors", "epu", "out")}
    payload = {
        "config": params,
        "n_snapshots": len(series),
        "k_first": float(k[0]),
        "k_last": float(k[-1]),
        "k_min": float(k.min()),
        "k_mean": float(k.mean()),
        "transition": transition,
        "artifacts": artifacts,
    }
    atomic_write_text(cfg.path("report.json"),
                      json.dumps(payload, sort_keys=True, indent=2) + "\n")


def run_pipeline(cfg: PipelineConfig) -> int:
    """Run every stage in order; returns 0 on success.

    Stage failures raise with the stage name attached; artifacts written by
    earlier stages stay valid because all writes are atomic.
    """
    cfg.validate()
    stage_ingest(cfg)
    stage_returns(cfg)
    stage_tau(cfg)
    stage_networks(cfg)
    stage_balance(cfg)
    stage_dcs(cfg)
    stage_detect(cfg)
    stage_degrees(cfg)
    if cfg.fit_csg:
        stage_fit(cfg)
    stage_plots(cfg)
    stage_report(cfg)
    logger.info("pipeline complete: %s", cfg.out)
    return 0
