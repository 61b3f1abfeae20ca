"""S3-symmetric distributions on {a + b + c = n} whose marginal is the
maximum-entropy distribution on [0, n] with mean n/3."""
from .analysis import (DeltaTable, EntropyResult, ProbabilityMarginal, delta_table, entropy,
                       gamma_for_prime, max_entropy_marginal, maxent_dominance_test, normalize_pi)
from .construction import (BetaVector, FlatteningCoefficients, MoveSpec, NegativeEntryError, PiVector,
                           build_beta, build_pi, construct, flattening_coefficients, flattening_trace,
                           move_vector, specialized_move)
from .precision import PowerTable, PrecisionContext, PrecisionError, RhoSolution, mean_residual, power_table, solve_rho
from .triangle import (MarginalVector, Orbit, SymmetricTriangleVector, basis_s, canonicalize, is_rho_marginal,
                       marginal, min_entry)
from .verify import VerificationReport, verify

__version__ = "0.1.0"
