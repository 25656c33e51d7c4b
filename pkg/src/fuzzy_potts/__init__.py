"""Monte Carlo laboratory for the critical fuzzy Potts model on Z^2.

Critical FK percolation with cluster weight q in [1, 4) is sampled with
Chayes-Machta dynamics, its clusters are colored red/blue independently
(the divide-and-color construction), and the resulting colorings are
probed for arm and almost-arm events whose decay exponents are compared
against closed-form predictions.
"""

from .geometry import (PLANE, HALFPLANE, STRONG, WEAK, Region, build_annulus,
                       build_box, build_half_annulus, build_half_box,
                       boundaries, dual_of, from_vertices, neighbors)
from .fk import (FREE, WIRED, BondConfig, ChainState, ClusterSet, cm_step,
                 exact_rc_distribution, iter_samples, label_clusters,
                 p_critical, sample)
from .coloring import (BLUE, IID, RED, WIRED_RED, Coloring, color_clusters,
                       color_swap, swap_word)
from .arms import (ALL_STRONG, MIXED, ArmDetection, PlanarityError,
                   crossing_word, detect_arm_event, detect_fk_arm_event,
                   detect_halfplane_arm_event, interface_count,
                   is_alternating, oracle_arm_event, reduce_word)
from .almost_arms import (WRT_HALFPLANE, WRT_Z2, almost_arm_event,
                          certify_almost_arm, cluster_hull,
                          disjoint_almost_arm_word, exists_almost_arm,
                          find_almost_arm)
from .loops import (Curve, Loop, LoopSet, curve_distance, dump_loops,
                    encode_bond_loops, encode_color_loops, interface_curve,
                    load_loops, loop_distance, loopset_distance,
                    nesting_levels)
from .exponents import (BranchError, ContinuumParams, ModelParams,
                        bulk_exponent, exponent_for, halfplane_even_exponent,
                        halfplane_odd_exponent, kappa_of, rho_params)
from .estimation import (EstimateRow, EstimateTable, FitResult, RunConfig,
                         compare_to_theory, fit_exponent, quasi_mult_report,
                         run_experiment, wilson_interval)

__version__ = "0.1.0"
