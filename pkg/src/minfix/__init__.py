"""minfix: fixed points of the weighted-minimum equation W =d inf_j T_j W_j.

Classify a weight vector into its solution regime, compute the characteristic
exponent and the multiplicative group of the weights, construct the complete
solution families (Dirac, bounded-support, Weibull, r-periodic Weibull, and
the negative/mixed-sign reductions), and verify candidates by exact operator
residuals and Monte-Carlo tests.
"""

from .weights import (ACase, Classification, FamilyTag, SignCase, Summary,
                      TailSpec, WeightSpec, classify, parse_inline_weights,
                      reduce_zero, split_signs, weights_from_json,
                      weights_to_json)
from .spectral import (CharExponent, GroupStructure, characteristic_exponent,
                       detect_group, eval_m)
from .solutions import (BoundedSupport, ConstantProfile, Dirac, FamilyDescription,
                        MirrorReciprocal, Mixture, Negated, RPeriodicWeibull,
                        StepProfile, SurvivalModel, Tabulated, UTransform,
                        Weibull, a3_membership, cdf_right, construct_family,
                        mirror_reciprocal, model_from_json, model_to_json,
                        negate, nu_of, power_transform, quantile, sample,
                        survival, validate_profile)
from .verify import (Grid, VerificationReport, alpha_negative, apply_max_operator,
                     apply_min_operator, atom_residuals, default_grid,
                     harmonicity_check, iterate_operator, mc_fixed_point_test,
                     minimax_mc_test, minimax_residual, mixed_case_check,
                     neg_min_operator, negative_grid, residual_report,
                     ut_operator)
from .branching import (BranchLevel, branching_invariance_test,
                        branching_min_sample, level_weights)
from .stats import (ACCEPTANCE_SEEDS, McReport, ks_critical, rng_stream,
                    two_sample_ks)

__version__ = "0.1.0"
