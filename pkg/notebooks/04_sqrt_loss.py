# %% [markdown]
# # Greedy versus widths on dyadic blocks in l_inf
#
# The greedy errors are exactly the block values while random block
# subspaces do better; the ratio grows with `N`.

# %%
from weakgreedy.experiments import lowerbound_experiment

res = lowerbound_experiment(alpha=1.0, levels=5, trials=8, seed=0)
print("sigmas exact:", res.sigmas_exact)
for row in res.table:
    print(row["n"], row["N"], f"{row['sigma_N']:.4g}", f"{row['dbar_median']:.4g}",
          f"{row['ratio_median']:.3f}", f"{row['ratio_median_over_sqrt_N']:.3f}")
print("increasing:", res.increasing)
