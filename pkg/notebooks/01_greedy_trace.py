# %% [markdown]
# # Weak greedy traces and the coefficient matrix
#
# Run the greedy on a diagonal set in two norms, look at the selected
# order, the sigma sequence and the lower-triangular matrix `A`.

# %%
import numpy as np

from weakgreedy import NormKind, WeakGreedyParams, audit_trace, realize, run_weak_greedy
from weakgreedy.sets import CompactSet, Diagonal

x = 1.0 / (np.arange(8) + 1.0)
for kind in (NormKind.hilbert(), NormKind.linf()):
    tr = run_weak_greedy(realize(Diagonal(tuple(x)), kind))
    print(kind.label(), tr.mode, tr.selected, np.round(tr.sigmas, 4))

# %% [markdown]
# With `gamma < 1` the adversarial policy picks the smallest admissible
# distance, which reorders the selection but keeps every audit green.

# %%
F = realize(Diagonal((1.0, 0.6, 0.5)), NormKind.hilbert())
tr = run_weak_greedy(F, WeakGreedyParams(gamma=0.5, policy="minimal_above_threshold"))
print(tr.selected, tr.sigmas)
print(np.abs(tr.A))
print("audit:", audit_trace(tr) or "clean")

# %% [markdown]
# In l_inf the norming functional of a residual need not vanish on the
# current space; the driver then switches to the LP dual.

# %%
G = CompactSet(np.array([[1.0, -1.0], [1.0, 1.0]]), NormKind.linf())
tr = run_weak_greedy(G)
print(tr.functional_source, [lam.coeffs for lam in tr.functionals])
print(tr.A)
