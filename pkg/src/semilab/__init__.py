"""Desk-scale experiments with operator semigroups and the gap metric between subspaces."""

from .errors import (
    DegenerateBasisError,
    DomainError,
    MalformedVectorError,
    NumericalFailure,
    QuadratureFailure,
    SemilabError,
    SolverFailure,
    SpaceMismatchError,
    UnsupportedDimensionError,
    UnsupportedScenarioError,
)
from .space import (
    AmbientSpace,
    Subspace,
    Vector,
    angle,
    deficiency,
    deficiency_pair,
    distance_to_subspace,
    norm,
    normalize,
    unit_sphere_samples,
)
from .semigroup import (
    SemigroupScenario,
    TriangularSpec,
    apply,
    duhamel_extension,
    example4_semigroup,
    example5_semigroup,
    jordan_block_Q,
    jordan_semigroup,
    matrix_semigroup,
    multiplication_semigroup,
    semigroup_law_residual,
    shift_double_discrete,
    translation_limit_semigroup,
)
from .specialfn import adaptive_simpson, finite_diff, si

__version__ = "0.1.0"
