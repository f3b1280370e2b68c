from .errors import (  # noqa: F401
    AlgebraMismatch,
    NoSolution,
    NonlinearUnknown,
    NotInvertible,
    OddBlockSingular,
    ParityViolation,
    SemiSuperError,
    SignatureMismatch,
)
from .grassmann import GrassmannElement, Parity  # noqa: F401
from .superpoly import SuperDomainSignature, SuperPolynomial  # noqa: F401
from .supermap import (  # noqa: F401
    BerezinianResult,
    OrientationClass,
    OrientationKind,
    SuperMap,
    berezinian,
    chain,
    compose,
    map_equal,
    orientation_class,
    super_jacobian,
)
from .linear import (  # noqa: F401
    MapEquation,
    SolutionSet,
    annihilator,
    find_inverse,
    is_chart,
    mult_operator_matrix,
    solve_linear,
    solve_map_ansatz,
)

__all__ = [
    "GrassmannElement",
    "Parity",
    "SuperDomainSignature",
    "SuperPolynomial",
    "SuperMap",
    "compose",
    "chain",
    "map_equal",
    "super_jacobian",
    "berezinian",
    "orientation_class",
    "BerezinianResult",
    "OrientationClass",
    "OrientationKind",
    "SolutionSet",
    "MapEquation",
    "mult_operator_matrix",
    "annihilator",
    "solve_linear",
    "solve_map_ansatz",
    "find_inverse",
    "is_chart",
    "SemiSuperError",
    "AlgebraMismatch",
    "NotInvertible",
    "ParityViolation",
    "SignatureMismatch",
    "OddBlockSingular",
    "NoSolution",
    "NonlinearUnknown",
]
