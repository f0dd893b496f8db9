"""Exact membership testing and resource monotones for
prepare-and-measure contextuality.

Workflow: build a scenario and a behavior, enumerate the assignment
polytope once per scenario, then run membership or any quantifier
against that vertex set.
"""

from .errors import (
    BudgetExceededError,
    CompositionError,
    CtxlabError,
    InvalidInputError,
    RejectionBudgetError,
    StructuralError,
)
from .freeops import (
    FreeOperation,
    apply_freeop,
    compose_freeops,
    identity_freeop,
    lift_equivalences,
    sample_composable_pair,
    sample_random_freeop,
    validate_freeop,
)
from .instances import pom_behavior, pom_scenario, pom_success_quantum
from .linprog import (
    LinearProgram,
    LpOutcome,
    linear_program,
    solve,
    solve_exact,
    solve_float,
    verify_outcome,
)
from .membership import (
    MembershipResult,
    NCModel,
    check_membership,
    model_image,
    verify_model,
    verify_witness,
)
from .model import (
    Behavior,
    MeasEquivalence,
    PrepEquivalence,
    Scenario,
    ValidationReport,
    behavior,
    behaviors_equal,
    juxtapose,
    meas_equivalence,
    prep_equivalence,
    scenario,
    uniform_behavior,
    validate_behavior,
    validate_scenario,
)
from .oracle import (
    NCBehaviorHull,
    enumerate_nc_hull,
    oracle_contextual_fraction,
    oracle_membership,
    oracle_robustness,
)
from .polytope import AssignmentVertex, VertexSet, enumerate_vertices, vertex_count_bound
from .quantify import (
    QuantifierReport,
    contextual_fraction,
    kl_contextuality,
    l1_behavior_distance,
    l1_contextuality_distance,
    robustness,
    robustness_ref,
    uniform_l1_distance,
)
from .rational import Q, as_rational, format_rational, parse_rational, to_float
from .sampling import random_behavior, random_nc_behavior, random_scenario

__version__ = "0.1.0"
