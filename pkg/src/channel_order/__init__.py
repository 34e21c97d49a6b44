"""Deciding and certifying two orderings between noisy channels.

Classical channels are compared by linear programming (degradation gap and
witness priors); quantum channels by semidefinite programming (guessing
probabilities, statistical morphisms and their CPTP extensions).
"""

__version__ = "0.1.0"

from .classical import (ApproxReport, CounterexamplePrior, GapCertificate, JointPrior, StochasticChannel,
                        WitnessPrior, approx_bound_check, compose, cond_min_entropy, cond_shannon_entropy,
                        degradation_gap, extract_witness_prior, find_degrader, guessing_probability,
                        shannon_less_noisy_falsify, variational_distance)
from .errors import *  # noqa: F401,F403
from .linalg import (HermitianSpectrum, eig_hermitian, fidelity_sq, kron, partial_trace, psd_check,
                     trace_norm)
from .lp import LinearProgram, LpSolution, LpStatus, solve_lp
from .maps import (MapFlags, OperatorMap, apply_map, basis_deviation, choi_distance, classify_map,
                   compose_maps, tensor_identity, trace_dual)
from .morphisms import (CounterexampleEnsemble, IcPovmFrame, TeleportKit, build_ic_povm, construct_morphism,
                        dual_frame, extend_commuting, extend_teleport, match_povm, pguess_dominance_falsify,
                        teleport_kit, verify_statistical_morphism)
from .sdp import SdpSolution, SemidefiniteProgram, solve_sdp
from .states import CqState, DensityOperator, Povm, helstrom_binary, hmin_cond, pguess_cq
