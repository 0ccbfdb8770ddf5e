"""Categorical semantics of first-order logic in finite presheaf toposes.

Sites are finite categories, types are interpreted as presheaves, terms as
natural transformations and formulas as subobjects.  Internal truth can be
computed both through subobjects and through Kripke-Joyal forcing.
"""

from .errors import ToposError
from .forcing import Stage, forces, holds_globally
from .gallery import builtin, builtin_names
from .lang import SemanticEnvironment, interpret_formula, interpret_term, parse, print_formula, typecheck
from .logic import Subobject, char_map, exists_along, forall_along, omega, pullback_sub, sub_from_char
from .presheaf import (
    NatTrans,
    Presheaf,
    coproduct,
    find_isomorphism,
    global_elements,
    is_epi,
    is_inhabited_internally,
    is_mono,
    product,
    terminal,
    validate_nat,
    validate_presheaf,
)
from .site import FinCat, Sieve, builtin_site, pullback_sieve, sieves_on, validate_category

__version__ = "0.1.0"
