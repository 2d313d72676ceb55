"""Variation-diminishing analysis of discrete-time LTI systems.

Verdicts about order-k positivity of the past-to-future (Hankel) and
causal convolution (Toeplitz) operators of a finite-dimensional system,
built on compound-matrix machinery, minor criteria and brute-force
variation oracles, plus dominant totally-positive decompositions.
"""

from .errors import (BudgetExceededError, DegenerateSystemError, ParseError,
                     StructuralError, UnsupportedRepresentationError,
                     VardimError, WindowError)
from .signals import (Signal, first_nonzero_sign, forward_difference,
                      is_log_concave, is_log_convex, is_unimodal, variation)
from .lti import (PartialFractionSystem, RationalTransferFunction,
                  StateSpace, StructuredMatrixView, extended_controllability,
                  extended_observability, hankel_matrix, impulse_response,
                  partial_fractions, polynomial_roots, recombine,
                  rtf_to_state_space, to_state_space, toeplitz_matrix, zeros)
from .totpos import (BruteForceVerdict, IndexTuple, KPositivityVerdict,
                     MinorReport, compound_matrix, desnanot_jacobi_residual,
                     enumerate_tuples, is_k_positive, is_pd, is_psd,
                     matrix_rank, minor, ovd_matrix_bruteforce)
from .compound import (CompoundSystem, compound_impulse,
                       compound_realization, compound_system,
                       compound_transfer, reversal_sign, toeplitz_minor)
from .positivity import (CERTIFIED, HOLDS, REFUTED, UNSUPPORTED,
                         CoefficientCheck, Decomposition, PositivityReport,
                         RelaxationBundle, RepeatedPoleCheck, check_external,
                         check_hankel_k, check_hankel_total,
                         check_relaxation, check_toeplitz_k,
                         check_toeplitz_total, diff_system, hankel_decompose,
                         necessary_coefficients, render_report,
                         repeated_pole_check, toeplitz_decompose)
from .oracle import (HeavyBallScenario, NeuronalCondition, OperatorTruncation,
                     OvdReport, OvdViolation, ScenarioResult,
                     apply_hankel, apply_nonlinearity, apply_toeplitz,
                     demo_system, hankel_truncation, heavy_ball,
                     neuronal_condition, ovd_verify, run_scenario,
                     toeplitz_truncation)
from .sysfile import load_system, parse_system, serialize_system

__version__ = "0.1.0"
