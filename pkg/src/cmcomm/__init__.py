"""Higher commutators of congruences of finite algebras."""

from .algebra import (
    App,
    FiniteAlgebra,
    FunctionTable,
    OperationTable,
    Var,
    eval_term,
    load_algebra,
    parse_sexpr,
    power,
    quotient,
    save_algebra,
    subuniverse_closure,
    term_operations_closure,
    term_to_sexpr,
)
from .commutator import (
    CentralityReport,
    CommutatorEngine,
    centrality,
    commutator_by_lattice_scan,
    higher_commutator,
    per_coordinate_commutators,
    two_term_centrality,
    two_term_commutator,
)
from .congruences import CongruenceLattice, Partition, cg, congruence_lattice, is_modular_lattice
from .cubes import Cube, MatrixSet, generate_matrix_algebra, lines, one_coordinate_generators, squares
from .dayterms import (
    DayChain,
    find_day_chain,
    generator_set,
    rotate_along_tree,
    shift_pair_test,
    shift_rotation,
    verify_day_chain,
)
from .errors import (
    AlgebraError,
    ArityError,
    CapacityError,
    ContractError,
    CoordinateError,
    NotACongruenceError,
    ParseError,
    SignatureError,
    TreeError,
    UniverseError,
)
from .props import TheoremReport, run_checks

__version__ = "0.1.0"
