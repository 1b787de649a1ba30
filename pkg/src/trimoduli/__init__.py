"""Invariants, normal forms and the form problem for three-qutrit states.

The package computes the fundamental polynomial invariants of trilinear
forms on C^3 x C^3 x C^3 via transvectants, normalizes states by iterated
local filtering, recovers all equivalent normal-form parameters by a
radical chain, and realizes the order-648 normal-form symmetry group in
exact cyclotomic arithmetic.
"""

__version__ = "0.1.0"

from .concomitants import (  # noqa: F401
    AronholdPair,
    ConcomitantBundle,
    InvariantSet,
    aronhold,
    build_concomitants,
    c_formulas,
    calibration_report,
    invariants,
    is_semistable,
    jacobian_check,
    projective_point,
    syzygy_residuals,
)
from .cyclotomic import EPS, Cyclo  # noqa: F401
from .form_problem import (  # noqa: F401
    FormProblemInput,
    OrbitClass,
    SolutionSet,
    classify,
    emit_configuration,
    enumerate_triples,
    filter_sign,
    solve,
    solve_cubic_radicals,
    solve_for_triple,
    solve_psi_system,
    solve_quartic_radicals,
)
from .poly_engine import (  # noqa: F401
    FactoredTriple,
    MultiPoly,
    VariableRef,
    group_catalog,
    omega_apply,
    trace_collapse,
    transvectant,
)
from .qutrit_state import (  # noqa: F401
    LocalTransform,
    ParameterTriple,
    State,
    apply_local,
    normal_form_state,
    orbit_dimension,
    random_state,
    read_state,
    reduced_density,
    slice_cubic,
    write_state,
)
from .reflection_group import (  # noqa: F401
    GroupElement,
    MatrixGroup,
    generate_closure,
    generators,
    group_h,
    group_k,
    orbit,
    stabilizer,
    stabilizer_type,
    verify_invariance,
)
from .slocc_normalize import IterationTrace, normalize_slocc, verify_vinberg  # noqa: F401
