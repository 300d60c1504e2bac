"""Trees with minimal atom-bond connectivity (ABC) index.

Exact ABC computation on labeled trees, greedy trees, B_k / Kragujevac
families, free-tree enumeration, the T..T6 rewrites with their closed-form
changes, numeric certification of the change functions, and search.
"""

from .errors import (
    ABCMinError,
    CapExceeded,
    DomainError,
    EmptySpec,
    InvalidTree,
    MultipleStars,
    NoComposition,
    NonIntegralTarget,
    NotBranchShaped,
    NotRealizable,
    PreconditionViolated,
)
from .generators import (
    KragujevacSpec,
    SplitKragujevacSpec,
    TreeStream,
    enumerate_free_trees,
    make_branch,
    make_kragujevac,
    make_split_kragujevac,
)
from .gfuncs import (
    REGISTRY,
    GFun,
    SignReport,
    certify_sign,
    eval_g,
    find_roots,
    limit_at_infinity,
    lower_envelope,
    monotonicity_check,
    table1,
    table2,
)
from .greedy import build_greedy, greedy_is_optimal
from .search import (
    SearchReport,
    audit_structure,
    cache_load,
    cache_store,
    conjecture_check,
    exhaustive_min,
    family_min,
)
from .transforms import (
    TransformRecord,
    TransformSpec,
    apply_T,
    apply_T1,
    apply_T2,
    apply_T3,
    apply_T4,
    apply_T5,
    apply_T6,
    audit_transform,
)
from .tree import (
    BranchKind,
    DegreeSequence,
    RootedTree,
    Tree,
    abc_delta,
    abc_index,
    canonical_code,
    classify_branches,
    internal_paths,
    pendent_paths,
)

__version__ = "0.1.0"
