"""Domain types, problem DSL and hypothesis printing."""
from .terms import Struct, Var, atom_key, format_atom, format_term, term_key
from .model import (
    FIG1,
    LIBRARY,
    Lit,
    MetaRule,
    MetaSub,
    MilError,
    MilProblem,
    ResourceError,
    Rule,
    StrategyError,
    induced_program,
    instantiate,
    is_forward_chained,
    library,
    make_problem,
    skolem_names,
)
from .syntax import (
    ParseError,
    canonical_renaming,
    format_problem,
    metagol_names,
    parse_hypothesis,
    parse_problem,
    print_hypothesis,
    same_modulo_renaming,
)
