"""Thresholds and negative-eigenvalue counts for x^{2l} + gamma V with Mellin-type kernels."""
from .errors import (BandError, BoundaryError, ConvergenceError, DomainError,
                     FactorizationError, FriedrichsError, GridError, NumericalError,
                     OscillationError, ParityError, PoleError, PoleProximityError,
                     ResonanceError, SpecError, ValidationError)
from .galerkin import (GalerkinReport, GridSpec, assemble_forms, assemble_gram,
                       assemble_h0, assemble_v, build_grid, default_ladder,
                       doubling_ladder, negative_inertia_count, refinement_verdict,
                       window_ladder)
from .mellin import (BesselPQ, KernelExpansion, Tabulated, beta_l, channel_kernel,
                     cosine_kernel, mellin_symbol_bessel, mellin_symbol_quadrature,
                     mellin_transform, residue_at_pole, sigma_cs, sigma_l, sine_kernel,
                     symbol_extrema, verify_convolution)
from .predict import (INFINITE, CountResult, Finite, count_bes, count_channel,
                      count_d1, count_fr, count_total, count_total_closed, nu, tau)
from .specfun import bessel_j, gamma_ratio_abs, gamma_real, log_gamma

__version__ = "0.1.0"
