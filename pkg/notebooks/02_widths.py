# %% [markdown]
# # Width estimates
#
# Upper bounds come from the SVD subspace, the greedy spaces and known
# closed forms; the brute-force line search adds lower bounds for
# one-dimensional spaces in small dimension.

# %%
from weakgreedy import NormKind, WeakGreedyParams, realize, run_weak_greedy
from weakgreedy.sets import Diagonal, RandomBall
from weakgreedy.widths import assemble_widths, width_brute_force

F = realize(RandomBall(3, 8, 11), NormKind.hilbert())
tr = run_weak_greedy(F)
ws = assemble_widths(F, 3, ["svd", "greedy", "brute"], trace=tr, grid=64)
for row in ws.rows():
    print(row)

# %% [markdown]
# Two orthogonal coordinates of length 1 and 1/2: the best line is not a
# coordinate axis, and the sandwich brackets 1/sqrt(5).

# %%
lo, up = width_brute_force(realize(Diagonal((1.0, 0.5)), NormKind.hilbert()), 1, grid=256)
print(lo, 5 ** -0.5, up)

# %%
for kind in (NormKind.l1(), NormKind.lp(3), NormKind.linf()):
    G = realize(RandomBall(3, 8, 11), kind)
    t = run_weak_greedy(G, WeakGreedyParams())
    w = assemble_widths(G, 2, ["svd", "greedy", "brute"], trace=t, grid=48)
    print(kind.label(), [(n, round(w.lower(n), 4), round(w.upper(n), 4)) for n in range(3)])
