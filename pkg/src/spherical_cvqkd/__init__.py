"""Continuous-variable QKD with 8-dimensional spherical modulation.

Gaussian-state entropies and the Holevo bound, spherical modulation and its
Gaussian-equivalent channel, octonion reverse reconciliation with LDPC
coset decoding, finite-size estimation and key rates.
"""
from .channel import ChannelModel, distance_to_transmission, transmit
from .config import RunConfig
from .errors import (CVQKDError, DegenerateInputError, EstimationError, NumericError,
                     PhysicalityError, UsageError)
from .estimation import EstimationResult, confidence_bounds, estimate, z_quantile
from .gaussian import DetectorModel, TwoModeCov, g_entropy, holevo_bound, symplectic_eigenvalues
from .keyrate import KeyRateReport, RateParams, asymptotic_rate, finite_rate, optimize_modulation
from .ldpc import CodeSpec, ParityCheckMatrix, load_code, read_code_file, write_code_file
from .modulation import (correlation_summary, gaussian_equivalent_channel, sample_sphere_points,
                         z_correlation, z_tms)
from .octonion import Octonion, octonion_multiply, rotation_coefficients
from .privacy import privacy_amplification
from .protocol import simulate
from .reconciliation import biawgn_capacity, reconcile

__version__ = "0.1.0"
