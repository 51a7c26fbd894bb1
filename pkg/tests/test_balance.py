"""Balance constant: spectral form, closed forms, walk identity, series."""

import math
import os
import subprocess
import sys
from datetime import date as Date

import numpy as np
import pytest

from balancelab.balance import (BalanceResult, BalanceSeries, balance_k,
                                balance_series, fnc_balance, is_balanced,
                                read_balance_csv, walk_identity_check,
                                write_balance_csv)
from balancelab.errors import DataError, NumericalError
from balancelab.market_data import EpuSeries
from balancelab.wssn import SignedAdjacency


def net_of(A):
    return SignedAdjacency(date=None,
                           tickers=[f"v{i}" for i in range(A.shape[0])], A=A)


def fnc_net(s):
    return net_of(-(np.ones((s, s)) - np.eye(s)))


def random_signed(n, rng, p=0.5):
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(iu.size) < p
    w = rng.uniform(0.2, 1.0, iu.size) * rng.choice([-1.0, 1.0], iu.size)
    A = np.zeros((n, n))
    A[iu[keep], ju[keep]] = w[keep]
    return A + A.T


# values pinned with 50-digit arithmetic
FNC_3_1 = 0.68578779369094365
FNC_10_HALF = 0.15553243600851789
FNC_50_1 = 6.9833040054305820e-20


def test_fnc_closed_form_pinned_values():
    assert fnc_balance(3, 1.0) == pytest.approx(FNC_3_1, rel=1e-14)
    assert fnc_balance(10, 0.5) == pytest.approx(FNC_10_HALF, rel=1e-14)
    assert fnc_balance(50, 1.0) == pytest.approx(FNC_50_1, rel=1e-12)
    with pytest.raises(ValueError):
        fnc_balance(1, 1.0)
    with pytest.raises(ValueError):
        fnc_balance(5, 0.0)


def test_fnc_decays_in_s_and_beta():
    ks = [fnc_balance(s, 1.0) for s in range(2, 30)]
    assert all(a > b for a, b in zip(ks, ks[1:]))
    kb = [fnc_balance(8, b) for b in (0.1, 0.3, 0.6, 1.0)]
    assert all(a > b for a, b in zip(kb, kb[1:]))


def test_balance_k_on_known_graphs():
    res = balance_k(fnc_net(3), 1.0)
    assert res.K == pytest.approx(FNC_3_1, abs=1e-12)
    assert not res.is_balanced
    assert res.m_neg == 3 and res.m_pos == 0
    assert res.trace_signed / res.trace_unsigned == pytest.approx(res.K)
    # all-positive graphs sit at K = 1 and report balanced
    rng = np.random.default_rng(51)
    A = np.abs(random_signed(12, rng))
    res = balance_k(net_of(A), 0.7)
    assert res.K == 1.0
    assert res.is_balanced


def test_balance_k_switching_invariance():
    # flipping the sign pattern across one bipartition preserves K exactly
    rng = np.random.default_rng(52)
    A = random_signed(10, rng)
    sigma = rng.choice([-1.0, 1.0], 10)
    K1 = balance_k(net_of(A), 1.0).K
    K2 = balance_k(net_of(A * np.outer(sigma, sigma)), 1.0).K
    assert K2 == pytest.approx(K1, abs=1e-14)


def test_balance_k_decreasing_in_beta_for_frustrated_graph():
    net = fnc_net(6)
    ks = [balance_k(net, b).K for b in (0.05, 0.2, 0.5, 0.8, 1.0)]
    assert all(a > b for a, b in zip(ks, ks[1:]))
    with pytest.raises(ValueError):
        balance_k(net, 0.0)
    with pytest.raises(ValueError):
        balance_k(net, 1.5)


def test_is_balanced_matches_structure():
    rng = np.random.default_rng(53)
    assert is_balanced(net_of(np.abs(random_signed(9, rng))))
    assert not is_balanced(fnc_net(4))
    # two hostile factions are balanced even with many negative edges
    A = np.ones((6, 6)) - np.eye(6)
    A[:3, 3:] = -1
    A[3:, :3] = -1
    assert is_balanced(net_of(A))


def test_walk_identity_agrees_and_guards_truncation():
    rng = np.random.default_rng(54)
    net = net_of(random_signed(15, rng))
    k_spec, k_walk = walk_identity_check(net, 1.0, truncation=60)
    assert k_walk == pytest.approx(k_spec, abs=1e-9)
    # truncating far too early trips the tail bound
    with pytest.raises(NumericalError, match="truncation"):
        walk_identity_check(net, 1.0, truncation=3)
    # empty graph: both traces are n, ratio 1, no scaling division by zero
    k_spec, k_walk = walk_identity_check(net_of(np.zeros((5, 5))), 1.0, 10)
    assert (k_spec, k_walk) == (1.0, 1.0)


def months_for(dates, values):
    epu = np.asarray(values, dtype=float)
    return EpuSeries(months=list(dates), epu=epu, beta_rel=epu / epu.max())


def test_balance_series_joins_epu_by_month():
    rng = np.random.default_rng(55)
    nets = []
    for k, d in enumerate([Date(2020, 1, 10), Date(2020, 1, 17),
                           Date(2020, 2, 7)]):
        A = random_signed(8, rng)
        nets.append(SignedAdjacency(date=d, tickers=[f"v{i}" for i in
                                                     range(8)], A=A))
    epu = months_for(["2020-01", "2020-02"], [50.0, 100.0])
    series = balance_series(nets, epu)
    assert [r.beta_rel for r in series.results] == [0.5, 0.5, 1.0]
    assert series.dates == [n.date for n in nets]
    # a network dated outside the EPU coverage names the month
    stray = SignedAdjacency(date=Date(2021, 6, 4),
                            tickers=[f"v{i}" for i in range(8)],
                            A=random_signed(8, rng))
    with pytest.raises(DataError, match="2021-06"):
        balance_series(nets + [stray], epu)


def test_balance_series_thread_count_does_not_change_results(tmp_path):
    script = tmp_path / "run.py"
    out = tmp_path / "k.txt"
    script.write_text(
        "import numpy as np\n"
        "from datetime import date, timedelta\n"
        "from balancelab.wssn import SignedAdjacency\n"
        "from balancelab.balance import balance_series\n"
        "from balancelab.market_data import EpuSeries\n"
        "rng = np.random.default_rng(56)\n"
        "nets = []\n"
        "for k in range(40):\n"
        "    iu, ju = np.triu_indices(12, k=1)\n"
        "    keep = rng.random(iu.size) < 0.5\n"
        "    w = rng.uniform(0.2, 1, iu.size) * rng.choice([-1., 1.],"
        " iu.size)\n"
        "    A = np.zeros((12, 12))\n"
        "    A[iu[keep], ju[keep]] = w[keep]\n"
        "    A = A + A.T\n"
        "    d = date(2020, 1, 3) + timedelta(weeks=k)\n"
        "    nets.append(SignedAdjacency(date=d, tickers=[f'v{i}' for i in"
        " range(12)], A=A))\n"
        "months = sorted({f'{d.year}-{d.month:02d}' for d in"
        " [n.date for n in nets]})\n"
        "epu = EpuSeries(months=months, epu=np.full(len(months), 5.0),"
        " beta_rel=np.ones(len(months)))\n"
        "ks = balance_series(nets, epu).k_values\n"
        "print('\\n'.join(repr(v) for v in ks))\n")
    outputs = []
    for threads in ("1", "8"):
        env = dict(os.environ, BALANCELAB_THREADS=threads)
        r = subprocess.run([sys.executable, str(script)], env=env,
                           capture_output=True, text=True)
        assert r.returncode == 0, r.stderr
        outputs.append(r.stdout)
    assert outputs[0] == outputs[1]


def test_balance_csv_round_trip(tmp_path):
    results = [
        BalanceResult(date=Date(2020, 1, 3), K=0.875, beta_rel=0.5,
                      trace_signed=10.0, trace_unsigned=11.0,
                      is_balanced=False, m_pos=7, m_neg=2),
        BalanceResult(date=Date(2020, 1, 10), K=1.0, beta_rel=1.0,
                      trace_signed=12.0, trace_unsigned=12.0,
                      is_balanced=True, m_pos=9, m_neg=0),
    ]
    series = BalanceSeries(results=results)
    path = tmp_path / "balance.csv"
    write_balance_csv(series, path)
    assert path.read_text().splitlines()[0] == "date,K,beta_rel,m_pos,m_neg"
    back = read_balance_csv(path)
    assert back.dates == series.dates
    assert list(back.k_values) == [0.875, 1.0]
    assert [r.m_neg for r in back.results] == [2, 0]
    assert [r.is_balanced for r in back.results] == [False, True]
    with pytest.raises(DataError):
        (tmp_path / "bad.csv").write_text("x,y\n")
        read_balance_csv(tmp_path / "bad.csv")


def test_balance_series_rejects_disorder():
    r = BalanceResult(date=Date(2020, 1, 10), K=1.0, beta_rel=1.0,
                      trace_signed=1.0, trace_unsigned=1.0, is_balanced=True)
    r2 = BalanceResult(date=Date(2020, 1, 3), K=1.0, beta_rel=1.0,
                       trace_signed=1.0, trace_unsigned=1.0, is_balanced=True)
    with pytest.raises(ValueError, match="strictly increasing"):
        BalanceSeries(results=[r, r2])
