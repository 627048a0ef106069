"""torstab: exact GIT stability for torus representations, Kempf-Ness
minimization, one-parameter-subgroup stratification, system-of-Hodge-bundles
combinatorics, and a finite-dimensional graded Kuranishi solver."""

from .errors import (
    NotStableError,
    StratifyInternalError,
    TorstabError,
    ValidationError,
    ZeroVectorError,
)
from .graded_kuranishi import (
    GradedComplex,
    GreensOperator,
    SliceVector,
    greens_operator,
    kuranishi_forward,
    kuranishi_inverse_graded,
    obstruction,
    random_graded_complex,
)
from .kempf_ness import (
    ConjugationProblem,
    KNProblem,
    KNResult,
    kn_conjugation_eval,
    kn_eval,
    kn_minimize,
    moment_map_conjugation,
)
from .polytope import (
    PolytopeQ,
    RayInterval,
    hull_position,
    minimal_face,
    ray_intersect,
    solve_mixed_system,
)
from .qexact import Lattice, saturated_kernel, smith_normal_form
from .shb_model import (
    ConformalDegreeTable,
    PartitionP,
    SHBSpec,
    StableBlock,
    automorphism_torus,
    conformal_degree_table,
    cyclic_phi_weights,
    expected_dim_central_locus,
    partition_dim,
    partitions_with_order,
    positive_slice_lines,
    rr_h1_lower_bound,
    slice_vector,
)
from .stability import StabilityResult, classify, destabilizer_bruteforce
from .stratify import (
    StratifyOptions,
    StratifyResult,
    stage_kn_minimizers,
    stratify,
    verify_decomposition,
)
from .torus_rep import RepVector, Subtorus, Torus, WeightLine

__version__ = "0.1.0"
