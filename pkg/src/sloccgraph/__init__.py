"""Decide SLOCC equivalence between pure states and graph states, with certificates."""

from .conditions import (
    Condition, ConditionGroup, admissible_sizes, classify, condition_value, derive_condition, enumerate_support, scan,
)
from .errors import (
    CapacityError, DimensionError, FactorizationError, FormatError, GraphParseError, ReconstructionError,
    SingularOperatorError, SloccGraphError,
)
from .genstab import SeparableOperator, general_stabilizer_element, projector_stabilizer_element, verify_stabilizes
from .graphs import (
    Graph, complete_graph, cycle_graph, emit_graph6, empty_graph, local_complement, parse_graph, parse_graph6,
    path_graph, random_connected_graph, stabilizer_element, stabilizer_generator, star_graph,
)
from .pauli import PauliWord, pauli_dense, pauli_mul, pauli_site_label, pauli_support
from .state import (
    SloccOperator, StateVector, apply_slocc, bilinear_form, build_graph_state, random_slocc, slocc_inverse,
    zbasis_vector,
)
from .solver import (
    MomentTable, PolynomialSystem, SolveConfig, Verdict, Witness, assemble_system, check_witness, reconstruct_local,
    reject_fast, solve, verify_candidate, verify_certificate,
)

from .formats import load_slocc, load_state, slocc_to_record, state_to_record

__version__ = "0.1.0"
