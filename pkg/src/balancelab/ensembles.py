"""Signed random-graph ensembles and spectral model fitting.

The quasi-complete-split-graph (quasi-CSG) model plants an all-negative
clique of s nodes that is also negatively tied to every other node -- the
maximally frustrated core -- then scatters the remaining negative edges and
all positive edges uniformly among the non-clique pairs.  Fitting compares
the sorted spectrum of a target network against ensemble draws by RMSE and
reads off the clique size with the smallest mean error; a signed
Erdos-Renyi ensemble with the same edge counts is the structureless
baseline.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass

import numpy as np

from ._util import atomic_write_text, thread_map
from .wssn import SignedAdjacency

logger = logging.getLogger(__name__)

__all__ = [
    "CliqueModelSpec",
    "FitReport",
    "anchored_negatives",
    "gen_quasi_csg",
    "gen_signed_er",
    "spectral_rmse",
    "fit_clique_size",
    "write_fit_json",
]


def anchored_negatives(n: int, s: int) -> int:
    """Negative edges forced by the planted clique: s(s-1)/2 inside it plus
    s(n-s) to the rest, i.e. s(2n-s-1)/2."""
    return s * (2 * n - s - 1) // 2


@dataclass(frozen=True)
class CliqueModelSpec:
    """Parameters of one quasi-CSG draw.

    Feasibility is validated on construction: the anchored negatives must
    fit inside ``m_neg``, and the leftover negative and positive edges must
    fit among the non-clique pairs.
    """

    n: int
    m_neg: int
    m_pos: int
    s: int
    seed: object = 0

    def __post_init__(self):
        if not 2 <= self.s < self.n:
            raise ValueError(f"need 2 <= s < n, got s={self.s}, n={self.n}")
        anchored = anchored_negatives(self.n, self.s)
        if self.m_neg < anchored:
            raise ValueError(
                f"m_neg={self.m_neg} < clique-anchored minimum "
                f"s(2n-s-1)/2 = {anchored}"
            )
        rest_pairs = (self.n - self.s) * (self.n - self.s - 1) // 2
        extra = self.m_neg - anchored
        if extra > rest_pairs:
            raise ValueError(
                f"extra negatives {extra} exceed the {rest_pairs} pairs "
                "among non-clique nodes"
            )
        if self.m_pos > rest_pairs - extra:
            raise ValueError(
                f"m_pos={self.m_pos} exceeds the {rest_pairs - extra} "
                "remaining non-adjacent pairs"
            )
        if self.m_pos < 0:
            raise ValueError("m_pos must be nonnegative")


def _node_labels(n: int) -> list[str]:
    return [f"v{i:03d}" for i in range(n)]


def gen_quasi_csg(spec: CliqueModelSpec) -> SignedAdjacency:
    """Draw one quasi-CSG network with +-1 weights.

    Nodes 0..s-1 are pairwise negative and negative to every other node;
    ``m_neg - s(2n-s-1)/2`` further negative edges land uniformly at random
    on pairs of non-clique nodes, and ``m_pos`` positive edges on the still
    unoccupied non-clique pairs.  Same seed, same graph.
    """
    n, s = spec.n, spec.s
    rng = np.random.default_rng(spec.seed)
    A = np.zeros((n, n))
    A[:s, :] = -1.0
    A[:, :s] = -1.0
    np.fill_diagonal(A, 0.0)

    rest = np.arange(s, n)
    iu, ju = np.triu_indices(rest.size, k=1)
    pairs_i = rest[iu]
    pairs_j = rest[ju]
    extra = spec.m_neg - anchored_negatives(n, s)
    pick = rng.choice(pairs_i.size, size=extra, replace=False)
    A[pairs_i[pick], pairs_j[pick]] = -1.0
    A[pairs_j[pick], pairs_i[pick]] = -1.0

    free = np.ones(pairs_i.size, dtype=bool)
    free[pick] = False
    free_idx = np.flatnonzero(free)
    pick_pos = rng.choice(free_idx.size, size=spec.m_pos, replace=False)
    pi = pairs_i[free_idx[pick_pos]]
    pj = pairs_j[free_idx[pick_pos]]
    A[pi, pj] = 1.0
    A[pj, pi] = 1.0
    return SignedAdjacency(date=None, tickers=_node_labels(n), A=A)


def gen_signed_er(n: int, m_neg: int, m_pos: int, seed=0) -> SignedAdjacency:
    """Signed Erdos-Renyi draw: ``m_neg + m_pos`` distinct pairs chosen
    uniformly, a uniform subset of ``m_neg`` of them weighted -1, the rest
    +1."""
    total_pairs = n * (n - 1) // 2
    if m_neg < 0 or m_pos < 0 or m_neg + m_pos > total_pairs:
        raise ValueError(
            f"m_neg + m_pos = {m_neg + m_pos} exceeds the {total_pairs} "
            "available pairs"
        )
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, k=1)
    pick = rng.choice(total_pairs, size=m_neg + m_pos, replace=False)
    order = rng.permutation(m_neg + m_pos)
    signs = np.where(order < m_neg, -1.0, 1.0)
    A = np.zeros((n, n))
    A[iu[pick], ju[pick]] = signs
    A[ju[pick], iu[pick]] = signs
    return SignedAdjacency(date=None, tickers=_node_labels(n), A=A)


def spectral_rmse(target: SignedAdjacency, model: SignedAdjacency) -> float:
    """Root-mean-square distance of the two adjacency spectra, both sorted
    in descending order.

    A pseudometric on graphs: zero on isospectral pairs (hence on any graph
    against itself), symmetric, and the triangle inequality holds because it
    is the Euclidean metric on sorted-spectrum vectors up to a 1/sqrt(n)
    factor.
    """
    if target.n != model.n:
        raise ValueError(f"node counts differ: {target.n} vs {model.n}")
    lt = np.sort(np.linalg.eigvalsh(target.A))[::-1]
    lm = np.sort(np.linalg.eigvalsh(model.A))[::-1]
    return float(np.sqrt(np.mean((lt - lm) ** 2)))


@dataclass
class FitReport:
    """Result of a clique-size search: per-size mean RMSE, the baseline
    random-ensemble RMSE, and the winning size."""

    s_opt: int
    rmse_by_s: dict[int, float]
    rmse_random: float
    trials: int

    def __post_init__(self):
        best = min(sorted(self.rmse_by_s), key=lambda s: (self.rmse_by_s[s], s))
        if best != self.s_opt:
            raise ValueError("s_opt must be the argmin of rmse_by_s")


def fit_clique_size(target: SignedAdjacency, s_range, trials: int = 8,
                    seed=0) -> FitReport:
    """Search the planted clique size best matching a target spectrum.

    For every feasible s in ``s_range``, draws ``trials`` quasi-CSG networks
    with the target's node and signed edge counts and averages their
    spectral RMSE against the target; also averages ``trials`` signed
    Erdos-Renyi draws as the baseline.  Per-trial generators are seeded
    ``[seed, s, trial]`` (``[seed, 0, trial]`` for the baseline), so serial
    and parallel runs agree bit for bit.

    Raises ``ValueError`` when no s in the range is feasible for the
    target's edge counts.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    n = target.n
    m_neg = target.m_neg
    m_pos = target.m_pos
    feasible = []
    for s in s_range:
        try:
            CliqueModelSpec(n=n, m_neg=m_neg, m_pos=m_pos, s=int(s), seed=0)
        except ValueError:
            continue
        feasible.append(int(s))
    if not feasible:
        raise ValueError(
            f"no feasible clique size in range for n={n}, m_neg={m_neg}, "
            f"m_pos={m_pos}"
        )

    def mean_rmse(s: int) -> float:
        vals = [
            spectral_rmse(target, gen_quasi_csg(CliqueModelSpec(
                n=n, m_neg=m_neg, m_pos=m_pos, s=s, seed=[seed, s, k])))
            for k in range(trials)
        ]
        return float(np.mean(vals))

    means = thread_map(mean_rmse, feasible)
    rmse_by_s = dict(zip(feasible, means))
    rand_vals = [
        spectral_rmse(target, gen_signed_er(n, m_neg, m_pos,
                                            seed=[seed, 0, k]))
        for k in range(trials)
    ]
    s_opt = min(feasible, key=lambda s: (rmse_by_s[s], s))
    return FitReport(s_opt=s_opt, rmse_by_s=rmse_by_s,
                     rmse_random=float(np.mean(rand_vals)), trials=trials)


def write_fit_json(report: FitReport, path) -> None:
    """Serialize a FitReport as JSON with string keys for the RMSE map."""
    payload = {
        "s_opt": report.s_opt,
        "rmse_by_s": {str(s): float(v) for s, v in report.rmse_by_s.items()},
        "rmse_random": float(report.rmse_random),
        "trials": report.trials,
    }
    atomic_write_text(path, json.dumps(payload, sort_keys=True, indent=2) + "\n")
