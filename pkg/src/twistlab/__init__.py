"""twistlab: trace functions of composite moduli, Hecke coefficients and
twisted coefficient sums, with numerical checks of the identities behind
their bounds."""

from .errors import TwistlabError
from .residue import FactoredModulus, is_prime
from .trace import (
    TraceFunction,
    crt_product,
    fourier_transform,
    hyper_kloosterman,
    hyper_kloosterman_composite,
)
from .hecke import (
    GL2CoefficientTable,
    GL3CoefficientTable,
    delta_coefficients,
    eigenform_coefficients,
    sym_square_coefficients,
)
from .window import SmoothWindow
from .sums import ap_sum, rs_twisted_sum, twisted_sum

__version__ = "0.1.0"

__all__ = [
    "TwistlabError",
    "FactoredModulus",
    "is_prime",
    "TraceFunction",
    "crt_product",
    "fourier_transform",
    "hyper_kloosterman",
    "hyper_kloosterman_composite",
    "GL2CoefficientTable",
    "GL3CoefficientTable",
    "delta_coefficients",
    "eigenform_coefficients",
    "sym_square_coefficients",
    "SmoothWindow",
    "ap_sum",
    "rs_twisted_sum",
    "twisted_sum",
]
