"""Exterior and duality algebra of multivector and multiform fields on a
chart, with covariant, deformed and frame-split derivative operators
extended to extensor fields, and randomized verification of every
identity the operators satisfy."""

__version__ = "0.1.0"

from .algebra import (
    Multiform,
    Multivector,
    MultivectorOperator,
    VectorOperator,
    derivation_extend,
    duality_adjoint,
    duality_pair,
    grade_project,
    left_contract,
    outermorphism_extend,
    right_contract,
    wedge,
)
from .connection import DeformedStructure, ParallelismStructure, RelativeStructure
from .extensor import (
    ExtensorField,
    Signature,
    adjoint_ext,
    cov_deriv_extensor,
    deformed_cov_deriv_ext,
    extended_action,
    generalized_action,
    lcontract_ext,
    pairing_ext,
    rcontract_ext,
    split_identity,
    wedge_ext,
)
from .fields import (
    Chart,
    MultivectorField,
    OperatorFromScalars,
    PolyField,
    ScalarField,
    VectorField,
    directional,
    mv_constant,
    mv_from_scalars,
    mv_grade_project,
    mv_left_contract,
    mv_pair,
    mv_right_contract,
    mv_scale,
    mv_wedge,
)
from .randgen import SuiteConfig

__all__ = [
    "__version__",
    "Chart",
    "DeformedStructure",
    "ExtensorField",
    "Multiform",
    "Multivector",
    "MultivectorField",
    "MultivectorOperator",
    "OperatorFromScalars",
    "ParallelismStructure",
    "PolyField",
    "RelativeStructure",
    "ScalarField",
    "Signature",
    "SuiteConfig",
    "VectorField",
    "VectorOperator",
    "adjoint_ext",
    "cov_deriv_extensor",
    "deformed_cov_deriv_ext",
    "derivation_extend",
    "directional",
    "duality_adjoint",
    "duality_pair",
    "extended_action",
    "generalized_action",
    "grade_project",
    "lcontract_ext",
    "left_contract",
    "mv_constant",
    "mv_from_scalars",
    "mv_grade_project",
    "mv_left_contract",
    "mv_pair",
    "mv_right_contract",
    "mv_scale",
    "mv_wedge",
    "outermorphism_extend",
    "pairing_ext",
    "rcontract_ext",
    "right_contract",
    "split_identity",
    "wedge",
    "wedge_ext",
]
