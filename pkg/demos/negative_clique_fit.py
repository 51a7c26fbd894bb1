#!/usr/bin/env python3
# Recovering a planted negative-clique size from the spectrum alone.
#
# The quasi complete-split-graph ensemble plants an all-negative clique of
# size s inside a signed network with fixed node and edge counts.  Sorting
# eigenvalues and comparing root-mean-square distances lets us ask: which s
# explains an observed network best?

import numpy as np

from balancelab import (CliqueModelSpec, fit_clique_size, gen_quasi_csg,
                        gen_signed_er, spectral_rmse)

# the anchored construction wires every clique-incident pair negative, so
# s=13 at n=60 already commits 13*(120-14)/2 = 689 negative edges; m_neg
# must cover the largest s we want the search to consider
n, m_neg, m_pos = 60, 700, 150
s_true = 9

target = gen_quasi_csg(CliqueModelSpec(n=n, m_neg=m_neg, m_pos=m_pos,
                                       s=s_true, seed=42))
print(f"target: n={n}, {m_neg} negative / {m_pos} positive edges, "
      f"planted clique s={s_true}")

report = fit_clique_size(target, s_range=range(3, 14), trials=6, seed=1)

print("\n  s   mean spectral RMSE")
for s, v in sorted(report.rmse_by_s.items()):
    marker = "  <-- best" if s == report.s_opt else ""
    print(f" {s:2d}   {v:.4f}{marker}")
print(f"\nrandom signed baseline RMSE: {report.rmse_random:.4f}")
print(f"recovered clique size: {report.s_opt} (true {s_true})")

# the baseline matters: a structureless signed graph with the same edge
# counts sits much further from the target than any clique model
er = gen_signed_er(n, m_neg, m_pos, seed=7)
print(f"one-shot check, ER vs target: {spectral_rmse(target, er):.4f}")
