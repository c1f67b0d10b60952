"""Entanglement entropy of finite-range quadratic spin chains.

Two independent engines: an exact finite-block correlation-matrix engine
and the asymptotic theta-function engine on the associated hyperelliptic
curve, plus the block-Toeplitz determinant asymptotics that connect them.
"""

from .errors import (ConfigError, ConvergenceFailure, CriticalSymbol,
                     DegenerateModel, DomainError, GenusMismatch,
                     IllConditioned, NoDegeneratePairs, OnBranchCut,
                     PairingFailure, PathRoutingFailure, QuadratureFailure,
                     SpinChainError, TailTooLarge, TruncationOverflow,
                     ZeroMode, ZeroOnPath)
from .model import (ChainModel, ComplexPolynomial, build_p, build_q,
                    make_custom_model, make_model_from_roots, make_xx_model,
                    make_xy_model, model_from_dict)
from .symbol import SymbolData, build_symbol, find_roots
from .exact import (SpectrumResult, binary_entropy, build_correlation_matrix,
                    entropy_exact, finite_chain_correlation,
                    fourier_coefficients, spectrum, spectrum_for_block,
                    toeplitz_determinant_direct, toeplitz_determinant_spectral)
from .curve import CurveData, build_curve
from .theta import ThetaContext
from .asymptotics import (EntropyEstimate, beta_function,
                          critical_entropy_estimate, determinant_asymptotic,
                          endpoint_behavior, entropy_theta, log_theta_ratio,
                          theta_ratio, xy_series_entropy)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
