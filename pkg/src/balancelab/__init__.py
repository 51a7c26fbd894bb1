"""balancelab: structural balance analysis of signed stock networks.

From daily prices to a verdict: build log-return panels, estimate
kernel-smoothed time-varying Kendall correlations, threshold them into
weighted signed networks, score each network's structural balance through
spectral matrix exponentials, detect balance-unbalance transitions in the
resulting time series, and attribute unbalance to a planted negative-clique
topology by spectral ensemble fitting.
"""

from .balance import (BalanceResult, BalanceSeries, balance_k, balance_series,
                      fnc_balance, is_balanced, walk_identity_check)
from .dependence import (KernelSpec, TauSnapshot, classical_kendall,
                         empirical_copula, kernel_weights, select_bandwidth,
                         tau_matrix, tv_kendall)
from .ensembles import (CliqueModelSpec, FitReport, fit_clique_size,
                        gen_quasi_csg, gen_signed_er, spectral_rmse)
from .errors import BalancelabError, ConfigError, DataError, NumericalError
from .market_data import (EpuSeries, PricePanel, ReturnPanel, clean_panel,
                          load_epu, load_prices, load_sectors, log_returns)
from .pipeline import PipelineConfig, run_pipeline
from .transition import TransitionReport, dcs, detect_but
from .tvregress import (RegressionFit, chained_estimate, nw_estimate,
                        slope_to_rho, tau_to_rho_gaussian, tv_regression,
                        tv_sigma, tv_slope)
from .wssn import (SignedAdjacency, TriadCase, build_wssn, classify_triad,
                   sector_subnet, signed_degrees)

__version__ = "0.1.0"

__all__ = [
    "BalanceResult", "BalanceSeries", "balance_k", "balance_series",
    "fnc_balance", "is_balanced", "walk_identity_check",
    "KernelSpec", "TauSnapshot", "classical_kendall", "empirical_copula",
    "kernel_weights", "select_bandwidth", "tau_matrix", "tv_kendall",
    "CliqueModelSpec", "FitReport", "fit_clique_size", "gen_quasi_csg",
    "gen_signed_er", "spectral_rmse",
    "BalancelabError", "ConfigError", "DataError", "NumericalError",
    "EpuSeries", "PricePanel", "ReturnPanel", "clean_panel", "load_epu",
    "load_prices", "load_sectors", "log_returns",
    "PipelineConfig", "run_pipeline",
    "TransitionReport", "dcs", "detect_but",
    "RegressionFit", "chained_estimate", "nw_estimate", "slope_to_rho",
    "tau_to_rho_gaussian", "tv_regression", "tv_sigma", "tv_slope",
    "SignedAdjacency", "TriadCase", "build_wssn", "classify_triad",
    "sector_subnet", "signed_degrees",
]
