"""Command line interface: one subcommand per pipeline stage.

Configuration comes from an optional JSON document (``--config``) with
individual flags overriding file values.  Exit codes: 0 success, 2
configuration error, 3 data error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from . import pipeline as pl
from .ensembles import CliqueModelSpec, fit_clique_size, gen_quasi_csg, \
    write_fit_json
from .errors import ConfigError, DataError, NumericalError
from .wssn import read_edgelist_csv, write_edgelist_csv

logger = logging.getLogger(__name__)

_CONFIG_FLAGS = (
    ("--prices", str, "prices CSV (date,ticker,close)"),
    ("--sectors", str, "sector CSV (ticker,sector)"),
    ("--epu", str, "EPU CSV (month,epu)"),
    ("--out", str, "output directory"),
    ("--epsilon", float, "edge threshold in (0,1)"),
    ("--bandwidth", float, "kernel bandwidth as sample fraction"),
    ("--cadence", str, "weekly_friday | monthly | every_k_days"),
    ("--k-days", int, "spacing for every_k_days cadence"),
    ("--min-segment", int, "minimum segment length for break detection"),
    ("--gain-threshold", float, "SSE gain needed to declare a transition"),
    ("--detrend", str, "DCS detrend mode: mean | linear"),
    ("--s-min", int, "smallest clique size for fit-csg"),
    ("--s-max", int, "largest clique size for fit-csg"),
    ("--trials", int, "ensemble draws per clique size"),
    ("--seed", int, "master RNG seed"),
)


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file; flags override it")
    for flag, typ, help_ in _CONFIG_FLAGS:
        p.add_argument(flag, type=typ, help=help_)


def _config_from(args: argparse.Namespace) -> pl.PipelineConfig:
    overrides = {
        k: getattr(args, k)
        for k in pl.PipelineConfig.__dataclass_fields__
        if hasattr(args, k) and getattr(args, k) is not None
    }
    if args.config:
        return pl.PipelineConfig.from_json(args.config, overrides)
    return pl.PipelineConfig.build({}, overrides)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="balancelab",
        description="signed stock-network balance analysis pipeline",
    )
    ap.add_argument("-v", "--verbose", action="store_true",
                    help="log stage progress")
    sub = ap.add_subparsers(dest="command", required=True)

    for name, help_ in [
        ("ingest", "load, align, and clean the price panel"),
        ("returns", "compute log returns of the cleaned panel"),
        ("build-net", "threshold tau snapshots into signed networks"),
        ("balance", "balance series of the networks (full + sector splits)"),
        ("dcs", "detrended cumulative sum of the balance series"),
        ("detect-but", "slope-break detection on the balance series"),
        ("degrees", "per-snapshot signed degrees"),
        ("fit-csg", "fit the planted clique size of the last network"),
        ("report", "run the full pipeline and write the summary report"),
    ]:
        p = sub.add_parser(name, help=help_)
        _add_config_flags(p)

    p = sub.add_parser("tau", help="tau snapshots at the cadence dates")
    _add_config_flags(p)
    p.add_argument("--date", help="compute a single snapshot (YYYY-MM-DD)")
    p.add_argument("--dense", action="store_true",
                   help="write dense matrices instead of pair lists")

    p = sub.add_parser("simulate", help="draw one quasi-CSG network")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m-neg", type=int, required=True)
    p.add_argument("--m-pos", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-file", default="quasi_csg.csv",
                   help="edge-list CSV destination")

    p = sub.add_parser("fit-csg-file",
                       help="fit the clique size of an edge-list CSV")
    p.add_argument("--target", required=True, help="edge-list CSV to fit")
    p.add_argument("--s-min", type=int, default=2)
    p.add_argument("--s-max", type=int, default=25)
    p.add_argument("--trials", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-file", default="fit.json")
    return ap


def _dispatch(args: argparse.Namespace) -> int:
    cmd = args.command
    if cmd == "simulate":
        try:
            spec = CliqueModelSpec(n=args.n, m_neg=args.m_neg,
                                   m_pos=args.m_pos, s=args.s, seed=args.seed)
        except ValueError as e:
            raise ConfigError(str(e)) from e
        net = gen_quasi_csg(spec)
        write_edgelist_csv(net, args.out_file)
        logger.info("wrote %s (%d edges)", args.out_file, net.m)
        return 0
    if cmd == "fit-csg-file":
        target = read_edgelist_csv(args.target)
        report = fit_clique_size(target, range(args.s_min, args.s_max + 1),
                                 trials=args.trials, seed=args.seed)
        write_fit_json(report, args.out_file)
        logger.info("s_opt=%d -> %s", report.s_opt, args.out_file)
        return 0

    cfg = _config_from(args)
    if cmd == "ingest":
        pl.stage_ingest(cfg)
    elif cmd == "returns":
        pl.stage_returns(cfg)
    elif cmd == "tau":
        pl.stage_tau(cfg, date=args.date, dense=args.dense)
    elif cmd == "build-net":
        pl.stage_networks(cfg)
    elif cmd == "balance":
        pl.stage_balance(cfg)
    elif cmd == "dcs":
        pl.stage_dcs(cfg)
    elif cmd == "detect-but":
        pl.stage_detect(cfg)
    elif cmd == "degrees":
        pl.stage_degrees(cfg)
    elif cmd == "fit-csg":
        pl.stage_fit(cfg)
    elif cmd == "report":
        return pl.run_pipeline(cfg)
    else:  # pragma: no cover - argparse enforces the choices
        raise ConfigError(f"unknown command {cmd!r}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return _dispatch(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except DataError as e:
        print(f"data error: {e}", file=sys.stderr)
        return 3
    except (NumericalError, np.linalg.LinAlgError) as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return 4
    except ValueError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
