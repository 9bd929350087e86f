"""Meta-interpretive learning with native general, forward-chained and
state-abstraction search strategies."""
from .core import (  # noqa: F401
    LIBRARY,
    MetaRule,
    MetaSub,
    MilError,
    MilProblem,
    ParseError,
    make_problem,
    parse_hypothesis,
    parse_problem,
    print_hypothesis,
)

__version__ = "0.1.0"
