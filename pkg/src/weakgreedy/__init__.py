"""Weak greedy subspace selection in sequence spaces and width comparisons."""
from .approx import ApproxResult, SolverError, Subspace, distance, dist_hilbert, dist_l1, dist_linf, dist_lp
from .bounds import (BoundReport, LemmaInstance, RateParams, corollary_checks, lemma1_check,
                     reference_rates, theorem_banach_check, theorem_hilbert_check, theorem_sweep)
from .greedy import (GreedyError, GreedyTrace, WeakGreedyParams, audit_trace, extract_A_banach,
                     extract_A_hilbert, run_weak_greedy)
from .seqspace import Functional, NormKind, norm, norming_functional
from .sets import (CompactSet, Diagonal, DyadicBlocks, FromMatrix, ParametricSurrogate, RandomBall,
                   known_widths, realize)
from .widths import (WidthSequence, assemble_widths, width_brute_force, width_upper_random_subspace,
                     width_upper_svd)

__version__ = "0.1.0"
