"""Lattice points in the bodies |u1|^(mk) + (|u2|^k + |u3|^k)^m <= x^(mk)."""

from .analysis import (DiscrepancyRecord, ExponentVerdict, classify_exponent, discrepancy_record,
                       fit_exponent, proposition_check, sweep)
from .hardy import (DyadicScheme, HardyEvaluation, build_scheme, direct_exp_sum, hardy_partial_sum,
                    theorem2_check, transform_check)
from .lattice_count import (BodyParams, CountResult, ScalarPolicy, count_A, delta_k, i_k, lame_count,
                            r_count, s_sum, slice_identity_residual)
from .special_fn import (BesselParams, MainTermParams, SeriesConfig, body_volume, gen_bessel, lame_area,
                         main_term, psi_eta_series)
from .vaaler import VaalerApprox, build_vaaler, rho, sawtooth, vaaler_eval

__version__ = "0.1.0"
