"""Fixed-point expectations of elementary symmetric polynomials versus the
pair mean of square roots: evaluators, monotone-flow certificates and a
numerical verification harness."""

from .combinatorics import (
    binomial,
    derangements,
    factorial,
    rencontres,
    rencontres_fraction,
)
from .fixedpoint import (
    Gradient,
    MeasureEval,
    OnesPlusDiag,
    SizeError,
    L_enumerate,
    L_formula,
    L_permanent,
    R_value,
    f_n,
    f_value,
    gradient,
    hessian_entry,
    permanent,
)
from .flow import FlowReport, classify, descend
from .sympoly import elem_all, elem_without, normalized_all
from .verify import RunConfig, VerifyReport, emit_report

__version__ = "0.1.0"
