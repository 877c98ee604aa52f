"""Real structures on lattices of hyperkähler type and deformation paths
between real triples in the period space."""

from .config import Config
from .involution import (
    EigenSplit,
    Involution,
    eigenlattices,
    enumerate_involutions,
    is_real_homological_type,
    validate_involution,
)
from .lattice_core import (
    Lattice,
    Signature,
    SubspaceBasis,
    gram_of_span,
    integer_vectors_in_box,
    is_primitive_form,
    named_lattice,
    orthogonal_complement,
    positive_vector,
    signature,
    validate_lattice,
)
from .moves import MoveParams, lemma_vector, perturb, retarget_gamma, rotate
from .period_domain import (
    GenericityReport,
    RealTriple,
    is_generic,
    normalize_triple,
    same_cone_component,
    validate_triple,
)
from .planner import Trace, TraceStep, plan_path, verify_trace

__version__ = "0.1.0"
