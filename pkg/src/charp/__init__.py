"""Exact computations with crystalline differential operators, connections and
p-curvature over F_p[x_1..x_m]."""

from .arith import ModPoly, PolyMatrix, PolyRing, binom_mod_p, is_prime, pd_coefficient
from .connections import (
    DOL,
    DR,
    HOD,
    ConnectionData,
    Stratification,
    bracket_closure,
    cocycle_check,
    curvature,
    flat_sections,
    gauge_transform,
    horizontal_fields,
    is_integrable,
    p_curvature,
    p_power_closure,
    taylor_stratification,
)
from .diffops import (
    ConjElement,
    Derivation,
    DiffOp,
    HodgeElement,
    conj_level_membership,
    op_apply,
    op_mul,
    p_curvature_derivation,
    pair,
    rees_specialize,
)
from .errors import (
    CharPError,
    ContextError,
    DimensionMismatch,
    FlatSectionError,
    InfeasibleError,
    LevelMismatch,
    NonClosedFormError,
    NonLinearPCurvature,
    NotIntegrableError,
    ParseError,
    PreconditionError,
)
from .frobenius import (
    CartierSplitting,
    OneForm,
    cartier_descend,
    cartier_operator,
    cartier_splitting,
    frobenius_pullback,
    theta_coalgebra_check,
    theta_map,
)
from .pd import GammaElement, PDElement, PDTensor, comultiply, pd_mul, pd_taylor, quotient_mod_I
from .rees import (
    GRIFFITHS,
    NEITHER,
    PRESERVES,
    ConjTriple,
    FilteredModule,
    ReesModule,
    associated_higgs,
    conj_deform,
    griffiths_check,
    mconj_member,
    rees_build,
    rees_fiber,
    theta_rees_compat,
)

__version__ = "0.1.0"
