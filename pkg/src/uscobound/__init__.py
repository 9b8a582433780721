"""Usco-bounded functions: sequential checks and continuous approximation."""

from .approx import (
    BlendGeometry,
    FunctionSequence,
    GluingScheme,
    PipelineConfig,
    approximate_pipeline,
    blend_geometry,
    bound_compliance,
    continuous_sequence,
    continuous_stage,
    diagonal_glue,
)
from .fixtures import FIXTURES, get_fixture, step_function
from .metric import (
    Box,
    BoxUnion,
    Euclidean,
    FinSupportSeq,
    SparseSeq,
    Subspace,
    distance,
    finite_support_subspace,
    set_distance,
)
from .setvalued import (
    Outcome,
    PreconditionError,
    ProbePlan,
    SetValuedMap,
    Verdict,
    Witness,
    check_sequence_usco_bounded,
    check_usco,
    check_usco_bounded,
    graph_closure_hull,
    transfer_bounded_perturbation,
)
from .simplefn import (
    BaireOneTarget,
    Piece,
    SimpleFunction,
    eval_simple,
    simple_from_baire_one,
    simple_from_continuous,
)

__version__ = "0.1.0"
