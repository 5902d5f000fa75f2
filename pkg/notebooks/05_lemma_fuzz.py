# %% [markdown]
# # Randomized checks of the triangular-matrix inequality

# %%
import numpy as np

from weakgreedy.bounds import LemmaInstance, lemma1_check
from weakgreedy.experiments import lemma_fuzz

reports, worst = lemma_fuzz(K_max=8, draws=1000, seed=0)
print(sum(r.passed for r in reports), "of", len(reports), "pass")
print(worst)

# %%
eq = lemma1_check(LemmaInstance(np.eye(5), np.eye(5)[:2]))
print(eq.lhs, eq.rhs, eq.near_equality())
