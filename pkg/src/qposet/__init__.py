"""Quantum posets: operator subspaces, quantum relations and orders."""

from .constructions import (
    INCOMPATIBLE,
    ClassicalPoset,
    Cone,
    LimitOrder,
    classical_embed,
    classical_embed_poset,
    classical_function,
    coproduct_posets,
    coproduct_rel,
    coproduct_sets,
    cotuple,
    limit_order,
    opposite,
    pairing,
    product_posets,
    projections,
    pullback_order,
    tensor_of_functions,
)
from .errors import (
    EquivalenceViolation,
    NotAFunction,
    NotAnOrder,
    ObjectMismatch,
    QposetError,
    SamplingError,
    SchemaError,
    ShapeError,
)
from .homobj import (
    FiniteFunctionCarrier,
    IndicatorPair,
    Observable,
    PowerPoset,
    classical_power_poset,
    downset_embedding_classical,
    is_upset,
    largest_hom_order,
    observable_to_function,
    ptilde,
    relation_to_indicator,
    spectral_leq,
)
from .oracles import RandomSpec, brute_force_pointwise_order, dequantize
from .order import (
    FunctionRel,
    QuantumPoset,
    as_function,
    classify_function,
    find_nontrivial_symmetry,
    hom_leq,
    is_equivalence,
    is_monotone,
    is_order,
    is_order_embedding,
    is_order_isomorphism,
    is_preorder,
)
from .qrel import (
    BOOL,
    ONE,
    BinaryRelation,
    QuantumSet,
    compose,
    dagger,
    dual_and_counit,
    identity,
    product_rel,
    product_set,
    rel_eq,
    rel_leq,
    trace,
)
from .settings import tolerances
from .subspace import OperatorSubspace, complement, contains, join, meet, span

__version__ = "0.1.0"
