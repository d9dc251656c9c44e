"""Contour-ordered Wick expansions, their causal (retarded) form, and oracles to check them."""
from .causal import (causal_normal_form, from_causal_fields, from_causal_sources,
                     phi_vac_closed_form, to_causal_fields, to_causal_sources,
                     verify_bilinear_identity, z_form_eval)
from .errors import KWError
from .expr import parse_expr, print_expr
from .fields import ChannelSpec, FieldOp, Mode, oscillator_spec
from .fock import moment_vev, tc_vev
from .functional import FunctionalPolynomial
from .grassmann import GrassmannPoly, gp_left_deriv, gp_mul
from .kernels import commutator_delta, kernel_eval
from .response import verify_response_identities
from .specfile import load_spec, parse_spec
from .spectral import Grid, default_grid, freq_part
from .wick import contraction_value, normal_form_polynomial, wick_expand

__version__ = "0.1.0"

__all__ = [
    "causal_normal_form",
    "from_causal_fields",
    "from_causal_sources",
    "phi_vac_closed_form",
    "to_causal_fields",
    "to_causal_sources",
    "verify_bilinear_identity",
    "z_form_eval",
    "KWError",
    "parse_expr",
    "print_expr",
    "ChannelSpec",
    "FieldOp",
    "Mode",
    "oscillator_spec",
    "moment_vev",
    "tc_vev",
    "FunctionalPolynomial",
    "GrassmannPoly",
    "gp_left_deriv",
    "gp_mul",
    "commutator_delta",
    "kernel_eval",
    "verify_response_identities",
    "load_spec",
    "parse_spec",
    "Grid",
    "default_grid",
    "freq_part",
    "contraction_value",
    "normal_form_polynomial",
    "wick_expand",
]
