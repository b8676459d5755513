"""Preimage geometry of ReLU layers: omnidirectionality, preimage classes and
singular-value bookkeeping for rectifier networks."""
from .errors import (ReluPreimageError, InvalidInput, DegenerateSpectrum, InvalidProblem, SolverStalled, NotAReluOutput, InconsistentOutput, BudgetExceeded, ProbeInfeasible, DegenerateRow, NothingRemoved, ModelFormatError, MalformedHeader, UnsupportedVersion, UnknownActivation, MalformedValue, NonFiniteValue, SizeMismatch, DimensionMismatch, TruncatedFile, TrailingData)
from .linalg import (SingularSpectrum, condition_number, nullspace_basis, rank,
                     rowspace_basis, spectrum, svd)
from .lp import LpProblem, LpSolution, LpStatus, solve
from .model_io import load_model, load_vectors, save_model, save_vectors
from .omni import (OmniMethod, OmniVerdict, is_omnidirectional, is_omnidirectional_cone,
                   is_omnidirectional_for_point, is_omnidirectional_hull,
                   is_omnidirectional_stiemke)
from .preimage import (AffineLayer, PreimageClass, PreimageKind, classify_preimage,
                       invariance_probe, preimage_bounded_oracle, reduce_system,
                       retrieval_under_relu, sign_pattern, singleton_exhaustive)
from .stability import (MlpModel, correlation_bound, correlation_sweep, is_admissible,
                        layerwise_report, linearize, spectrum_effect)

__version__ = "0.1.0"
