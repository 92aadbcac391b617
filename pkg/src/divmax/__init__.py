"""Maximizers of information divergence from discrete exponential families.

The package finds local and global maximizers of D(.||E) for a family E given
by an integer sufficient-statistics matrix and a positive reference measure.
The search runs over sign-vector orthants of the kernel of the matrix, and
every candidate is cross-checked through the projection identities that a
maximizer must satisfy.
"""

from .critical import (
    CandidateReport,
    FlatOrthantError,
    OrthantProblem,
    QuasiCriticalPoint,
    SearchOptions,
    build_candidate,
    build_orthant_problem,
    global_search,
    gradient_check,
    restricted_kernel_basis,
    solve_orthant,
    verify_quasi_critical,
)
from .divergence import (
    ConvergenceError,
    ProjectionResult,
    family_member,
    h_r,
    kl,
    pythagorean_check,
    ri_project,
)
from .model import (
    ExponentialFamilyModel,
    InvalidModelError,
    KernelBasis,
    StructuralError,
    dim_family,
    facial_support,
    kernel_basis,
    load_model,
    make_model,
    moment_map,
    symmetry_group,
)
from .objective import (
    DegenerateKernelPoint,
    KernelPoint,
    MixtureResult,
    dbar,
    dbar1,
    decompose,
    divergence_via_pair,
    lemma_identities,
    optimal_mixture,
)
from .oracles import (
    GoldenModel,
    bundled_models,
    codim1_oracle,
    grid_oracle,
    random_codim_model,
)
from .projection import (
    FacialRejectionError,
    ProjectionRoot,
    SigmaExtendedModel,
    build_sigma_model,
    canonical_alpha,
    monomial_param,
    solve_projection_points,
    verify_parallel_hyperplanes,
    verify_projection_property,
)
from .signvectors import (
    CapExceeded,
    Circuit,
    CircuitSet,
    SignVector,
    backend_name,
    canonicalize,
    circuits,
    compose,
    enumerate_sign_vectors,
    filter_support_bound,
    filter_var0,
    is_sign_vector,
)

__version__ = "1.0.0"

__all__ = [
    "CandidateReport",
    "CapExceeded",
    "Circuit",
    "CircuitSet",
    "ConvergenceError",
    "DegenerateKernelPoint",
    "ExponentialFamilyModel",
    "FacialRejectionError",
    "FlatOrthantError",
    "GoldenModel",
    "InvalidModelError",
    "KernelBasis",
    "KernelPoint",
    "MixtureResult",
    "OrthantProblem",
    "ProjectionResult",
    "ProjectionRoot",
    "QuasiCriticalPoint",
    "SearchOptions",
    "SigmaExtendedModel",
    "SignVector",
    "StructuralError",
    "backend_name",
    "build_candidate",
    "build_orthant_problem",
    "build_sigma_model",
    "bundled_models",
    "canonical_alpha",
    "canonicalize",
    "circuits",
    "codim1_oracle",
    "compose",
    "dbar",
    "dbar1",
    "decompose",
    "dim_family",
    "divergence_via_pair",
    "enumerate_sign_vectors",
    "facial_support",
    "family_member",
    "filter_support_bound",
    "filter_var0",
    "global_search",
    "gradient_check",
    "grid_oracle",
    "h_r",
    "is_sign_vector",
    "kernel_basis",
    "kl",
    "lemma_identities",
    "load_model",
    "make_model",
    "moment_map",
    "monomial_param",
    "optimal_mixture",
    "pythagorean_check",
    "random_codim_model",
    "restricted_kernel_basis",
    "ri_project",
    "solve_orthant",
    "solve_projection_points",
    "symmetry_group",
    "verify_parallel_hyperplanes",
    "verify_projection_property",
    "verify_quasi_critical",
]
