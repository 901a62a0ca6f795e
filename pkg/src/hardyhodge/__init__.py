"""Hardy-space splittings of sampled Clifford-valued fields on periodic grids."""

from .clifford import Multivector, Quaternion, blade_product, conjugate, mv_mul
from .errors import (
    DCViolation,
    DimensionMismatch,
    FieldFormatError,
    GridError,
    HardyHodgeError,
    KindMismatch,
    MalformedHeader,
    OracleSizeError,
    ProbeError,
    ShapeOverflow,
    SlabError,
    TruncatedPayload,
)
from .extension import (
    SlabSample,
    cauchy_integral,
    hardy_norm_profile,
    monogenicity_residual,
    newton_gradient,
    omega_n,
    poisson_extend,
)
from .fieldio import read_field, write_field
from .grid import GridSpec, SampledField, lp_norm
from .hodge import (
    HardyHodgeResult,
    decompose,
    decompose_homogeneous,
    decompose_paravector,
    decompose_quaternionic,
)
from .silent import PotentialProbe, potential_div_form, silent_experiment
from .spectral import hilbert, make_plan, plemelj, riesz
from .synth import synth_field

__version__ = "0.1.0"

__all__ = [
    "DCViolation",
    "DimensionMismatch",
    "FieldFormatError",
    "GridError",
    "GridSpec",
    "HardyHodgeError",
    "HardyHodgeResult",
    "KindMismatch",
    "MalformedHeader",
    "Multivector",
    "OracleSizeError",
    "PotentialProbe",
    "ProbeError",
    "Quaternion",
    "SampledField",
    "ShapeOverflow",
    "SlabError",
    "SlabSample",
    "TruncatedPayload",
    "blade_product",
    "cauchy_integral",
    "conjugate",
    "decompose",
    "decompose_homogeneous",
    "decompose_paravector",
    "decompose_quaternionic",
    "hardy_norm_profile",
    "hilbert",
    "lp_norm",
    "make_plan",
    "monogenicity_residual",
    "mv_mul",
    "newton_gradient",
    "omega_n",
    "plemelj",
    "poisson_extend",
    "potential_div_form",
    "read_field",
    "riesz",
    "silent_experiment",
    "synth_field",
    "write_field",
]
