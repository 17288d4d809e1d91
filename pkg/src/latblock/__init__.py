"""Exact-arithmetic toolkit for connection curves on SL(2,R) quotients:
closed-form exponentials, modified-time algebra, integer-lattice coset
reduction, quaternionic cocompact lattices, and a constructive refuter
that defeats candidate finite blocking sets with replayable certificates.
"""

from .certificate import BudgetExceeded, EvasionCertificate
from .evade import (BlockingCandidate, EvasionFamily, build_B, detB_closed,
                    embed_sln, entry_closed_forms, gen_family,
                    norm_square_obstruction, norm_square_solutions,
                    refute_blocking, replay_certificate)
from .lattice import (CosetRep, DependenceWitness, canonical_rep, coset_distance,
                      coset_reduce, dependence_projects_to_times, five_dependence,
                      is_in_gamma, same_coset, span_multiplier, subsequence_nonzero)
from .numeric import (ApproxReal, QuadExt, embed_real, quad_conj_norm, quad_mul,
                      rat_arith, rational_nullspace)
from .quat import (PellSolution, QuatAlgebra, Quaternion, curve_point_quat,
                   detB_quat, dphi1, exp_quat, gen_family_quat,
                   is_division_algebra, nred, pell_family, pell_fundamental,
                   phi_iso, power_t_quat, quat_mul, refute_blocking_quat,
                   replay_certificate_quat, TangentVec)
from .sl2 import (Curve, LogDirection, Mat2, ModifiedTime, TraceClass,
                  UnsupportedBranchError, a_of_lambda, connecting_curve,
                  curve_point, exp_sl2, log_sl2, modified_time, power_t,
                  time_from_lambda, trace_class)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
