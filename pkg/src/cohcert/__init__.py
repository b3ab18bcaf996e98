"""cohcert: coherence-driven certification of compressed-sensing designs.

The package certifies an n x p design matrix with unit-norm columns along
the chain

    coherence  ->  weak restricted isometry  ->  weak null-space property
               ->  exact sparse recovery by basis pursuit,

with every closed-form bound paired against a self-contained linear-algebra
oracle (Jacobi eigensolver, secular-equation roots, kernel polytope vertex
enumeration, dense simplex).
"""

from .design import (
    DesignMatrix,
    SupportSet,
    coherence,
    from_raw,
    generate,
    gershgorin_bound,
    gershgorin_check,
    gram,
    read_matrix_csv,
    sample_support,
    support_set,
    write_matrix_csv,
)
from .linalg import (
    SecularFunction,
    SymEig,
    kernel_basis,
    op_norm,
    rank_one_update_eig,
    secular_eval,
    secular_from_update,
    secular_function,
    secular_roots,
    singular_values,
    sym_eig,
)
from .perturbation import (
    AppendSweepSummary,
    AppendVerification,
    PerturbationBounds,
    SpectralWindow,
    append_bounds_sweep,
    eps_max_append,
    eps_min_append,
    gamma_bound,
    mu_admissibility_thresholds,
    rho_max_quadratic,
    rho_min_quadratic,
    scalar_product_bound,
    standard_growth_bounds,
    successive_bounds,
    verify_append_bounds,
)
from .certify import (
    NspCertificate,
    NspCertifyResult,
    WeakNspConstants,
    WeakRipConditions,
    WeakRipReport,
    block_decompose,
    block_norm_inequality,
    coherence_scaling_constants,
    nsp_worst_ratio_exact,
    nsp_worst_ratio_sampled,
    rip_to_nsp_constant,
    weak_nsp_certify,
    weak_nsp_constants,
    weak_nsp_constants_from_params,
    weak_rip_conditions,
    weak_rip_estimate,
)
from .recovery import (
    LpProblem,
    LpSolution,
    RecoveryExperiment,
    RecoveryResult,
    basis_pursuit,
    lp_problem,
    lp_solve,
    recovery_experiment,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
