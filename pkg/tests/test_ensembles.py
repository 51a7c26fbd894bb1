"""Quasi-CSG and signed random ensembles, spectral fitting."""

import json
import math

import numpy as np
import pytest

from balancelab.balance import balance_k
from balancelab.ensembles import (CliqueModelSpec, FitReport,
                                  anchored_negatives, fit_clique_size,
                                  gen_quasi_csg, gen_signed_er,
                                  spectral_rmse, write_fit_json)
from balancelab.wssn import SignedAdjacency


def test_anchored_negatives_counts_clique_incident_pairs():
    for n in (5, 9, 20):
        for s in range(2, n):
            # brute force: pairs with at least one endpoint in the clique
            count = sum(1 for i in range(n) for j in range(i + 1, n)
                        if i < s or j < s)
            assert anchored_negatives(n, s) == count == s * (2 * n - s - 1) // 2


def test_clique_spec_feasibility_bounds():
    CliqueModelSpec(n=10, m_neg=anchored_negatives(10, 3), m_pos=0, s=3)
    with pytest.raises(ValueError, match="anchored minimum"):
        CliqueModelSpec(n=10, m_neg=10, m_pos=0, s=3)
    with pytest.raises(ValueError, match="non-clique nodes"):
        # extras exceed the 21 pairs among the 7 non-clique nodes
        CliqueModelSpec(n=10, m_neg=anchored_negatives(10, 3) + 22,
                        m_pos=0, s=3)
    with pytest.raises(ValueError, match="remaining"):
        CliqueModelSpec(n=10, m_neg=anchored_negatives(10, 3) + 10,
                        m_pos=12, s=3)
    with pytest.raises(ValueError, match="2 <= s < n"):
        CliqueModelSpec(n=10, m_neg=30, m_pos=0, s=1)


def test_gen_quasi_csg_structure_and_counts():
    spec = CliqueModelSpec(n=50, m_neg=500, m_pos=100, s=6, seed=7)
    net = gen_quasi_csg(spec)
    assert net.n == 50
    assert (net.m_neg, net.m_pos, net.m) == (500, 100, 600)
    # clique block is fully negative, all weights are unit magnitude
    block = net.A[:6, :6]
    assert np.array_equal(block, -(np.ones((6, 6)) - np.eye(6)))
    nz = net.A[net.A != 0]
    assert set(np.unique(nz)) == {-1.0, 1.0}
    assert net.tickers[0] == "v000"
    # clique rows carry negatives to every other node
    assert (net.A[:6] < 0).sum() == 6 * 49


def test_gen_quasi_csg_is_reproducible_and_seed_sensitive():
    spec = CliqueModelSpec(n=30, m_neg=anchored_negatives(30, 4) + 20,
                           m_pos=30, s=4, seed=[1, 2])
    a = gen_quasi_csg(spec)
    b = gen_quasi_csg(spec)
    assert np.array_equal(a.A, b.A)
    other = CliqueModelSpec(n=30, m_neg=anchored_negatives(30, 4) + 20,
                            m_pos=30, s=4, seed=[1, 3])
    assert not np.array_equal(gen_quasi_csg(other).A, a.A)


def test_gen_signed_er_counts_and_disjoint_signs():
    net = gen_signed_er(40, m_neg=100, m_pos=150, seed=9)
    assert (net.m_neg, net.m_pos) == (100, 150)
    nz = net.A[net.A != 0]
    assert set(np.unique(nz)) == {-1.0, 1.0}
    assert np.array_equal(net.A, net.A.T)
    with pytest.raises(ValueError):
        gen_signed_er(5, m_neg=8, m_pos=8)  # only 10 pairs exist


def test_spectral_rmse_zero_for_relabeling_and_pinned_triangle():
    net = gen_signed_er(20, 40, 40, seed=10)
    perm = np.random.default_rng(11).permutation(20)
    relabeled = SignedAdjacency(date=None,
                                tickers=[f"p{i}" for i in range(20)],
                                A=net.A[np.ix_(perm, perm)])
    assert spectral_rmse(net, relabeled) == pytest.approx(0.0, abs=1e-12)
    # positive triangle (spectrum 2, -1, -1) against the empty graph
    tri = SignedAdjacency(date=None, tickers=list("abc"),
                          A=np.ones((3, 3)) - np.eye(3))
    empty = SignedAdjacency(date=None, tickers=list("xyz"), A=np.zeros((3, 3)))
    assert spectral_rmse(tri, empty) == pytest.approx(math.sqrt(2.0),
                                                      abs=1e-12)
    with pytest.raises(ValueError, match="node count"):
        spectral_rmse(tri, net)


def test_fit_report_validates_argmin():
    FitReport(s_opt=3, rmse_by_s={2: 1.0, 3: 0.5}, rmse_random=2.0, trials=4)
    with pytest.raises(ValueError, match="argmin"):
        FitReport(s_opt=2, rmse_by_s={2: 1.0, 3: 0.5}, rmse_random=2.0,
                  trials=4)


def test_fit_clique_size_recovers_planted_size():
    s_star = 5
    target = gen_quasi_csg(CliqueModelSpec(
        n=30, m_neg=anchored_negatives(30, s_star) + 40, m_pos=60,
        s=s_star, seed=12))
    rep = fit_clique_size(target, range(2, 10), trials=6, seed=13)
    assert abs(rep.s_opt - s_star) <= 1
    assert rep.rmse_by_s[rep.s_opt] < rep.rmse_random
    # identical call, identical report (parallel map must not reorder)
    rep2 = fit_clique_size(target, range(2, 10), trials=6, seed=13)
    assert rep2.rmse_by_s == rep.rmse_by_s
    assert rep2.rmse_random == rep.rmse_random


def test_fit_clique_size_infeasible_range():
    target = gen_signed_er(30, m_neg=20, m_pos=20, seed=14)
    # 20 negatives cannot anchor any clique of size >= 2 on 30 nodes
    with pytest.raises(ValueError, match="no feasible clique size"):
        fit_clique_size(target, range(2, 10), trials=2)
    with pytest.raises(ValueError, match="trials"):
        fit_clique_size(target, range(2, 10), trials=0)


def test_balance_decreases_with_planted_clique_size():
    """Growing the all-negative core (extra edges held fixed) drives K down."""
    n, extras, m_pos = 100, 300, 100
    for seed in range(3):
        ks = []
        for s in (3, 8, 15, 20):
            net = gen_quasi_csg(CliqueModelSpec(
                n=n, m_neg=anchored_negatives(n, s) + extras, m_pos=m_pos,
                s=s, seed=[71, seed, s]))
            ks.append(balance_k(net, 1.0).K)
        assert all(a > b for a, b in zip(ks, ks[1:])), (seed, ks)


def test_write_fit_json(tmp_path):
    rep = FitReport(s_opt=4, rmse_by_s={3: 1.5, 4: 0.75}, rmse_random=2.25,
                    trials=8)
    path = tmp_path / "fit.json"
    write_fit_json(rep, path)
    payload = json.loads(path.read_text())
    assert payload["s_opt"] == 4
    assert payload["rmse_by_s"] == {"3": 1.5, "4": 0.75}
    assert payload["rmse_random"] == 2.25
    assert payload["trials"] == 8
    # keys come out sorted for byte-stable files
    assert list(payload) == sorted(payload)
