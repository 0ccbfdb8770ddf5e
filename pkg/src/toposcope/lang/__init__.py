"""Formula language: syntax, parser, sort checker and interpretation."""

from .parser import FormulaSyntaxError, parse, parse_term
from .semantics import (
    ContextObject,
    SemanticEnvironment,
    interpret_formula,
    interpret_term,
    substitution_arrow,
)
from .syntax import (
    And,
    App,
    Bottom,
    Eq,
    Exists,
    Forall,
    Implies,
    Not,
    Or,
    Rel,
    Span,
    Top,
    Var,
    depth,
    free_vars,
    print_formula,
    print_term,
    substitute,
)
from .typecheck import (
    ArityMismatch,
    Signature,
    SortMismatch,
    TypeCheckError,
    UnboundVariable,
    UnknownSymbol,
    typecheck,
    typecheck_term,
)
