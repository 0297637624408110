"""Bell inequalities with no quantum violation from unextendible product bases."""

__version__ = "0.1.0"

from .families import LocalPairChoice, gyni_upb, recursive_extend, shifts_upb
from .inequalities import (
    BellInequality,
    BellTerm,
    Scenario,
    gyni_inequality,
    inequality_from_set,
    relabel_canonical,
    vectors_from_inequality,
)
from .product_sets import (
    MeasurementPartition,
    ProductVectorSet,
    check_property_p,
    distinct_local_rays,
    gram_orthogonality_check,
)
from .bounds import (
    bell_operator,
    classical_bound,
    ns_bound,
    product_epsilon,
    quantum_spectral_bound,
    sample_normalized_witness,
    seesaw_quantum_bound,
    upb_witness,
    witness_value_check,
)
from .tightness import is_tight, local_vertices, polytope_dimension
from .unextendibility import (
    completability_search,
    numeric_extendibility,
    unextendible_general,
    unextendible_qubit,
)

__all__ = [
    "BellInequality",
    "BellTerm",
    "LocalPairChoice",
    "MeasurementPartition",
    "ProductVectorSet",
    "Scenario",
    "bell_operator",
    "check_property_p",
    "classical_bound",
    "completability_search",
    "distinct_local_rays",
    "gram_orthogonality_check",
    "gyni_inequality",
    "gyni_upb",
    "inequality_from_set",
    "is_tight",
    "local_vertices",
    "ns_bound",
    "numeric_extendibility",
    "polytope_dimension",
    "product_epsilon",
    "quantum_spectral_bound",
    "recursive_extend",
    "relabel_canonical",
    "sample_normalized_witness",
    "seesaw_quantum_bound",
    "shifts_upb",
    "unextendible_general",
    "unextendible_qubit",
    "upb_witness",
    "vectors_from_inequality",
    "witness_value_check",
]
