"""First-order syntax with epsilon terms (and the second-order extension nodes)."""

from .ast import (
    EPSILON_LIKE,
    TOP,
    AnyNode,
    Atom,
    Conjunction,
    Disjunction,
    EpsilonTerm,
    Exists,
    Forall,
    Formula,
    FunctionApp,
    Implication,
    LambdaAbstraction,
    Negation,
    Node,
    Position,
    PredicateApplication,
    PredicateExpr,
    PredicateVariable,
    SecondOrderEpsilon,
    SOExists,
    SOForall,
    Term,
    Variable,
    children,
    conjoin,
    constant,
    disjoin,
    free_names,
    is_closed,
    is_quantifier_free,
    rebuild,
    replace_at,
    size,
    subterm_at,
    walk,
)
from .ops import (
    alpha_eq,
    canonical,
    distinct,
    epsilon_like_subterms,
    epsilon_subterms,
    fresh_name,
    occurs,
    substitute,
    substitute_var,
    substitute_vars,
)
from .parse import (
    ArityError,
    FreeVariableWarning,
    ParseError,
    Program,
    parse,
    parse_formula,
    parse_program,
    parse_term,
)
from .printing import to_str

__all__ = [name for name in dir() if not name.startswith("_")]
