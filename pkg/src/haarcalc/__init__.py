"""Exact Haar-measure bookkeeping on vector-free locally compact abelian groups."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    BaseMismatchError,
    DomainError,
    GuardError,
    HaarcalcError,
    InvariantError,
    ParseError,
    UnsupportedError,
)
from .haar import (  # noqa: E402
    Diagram,
    Edge,
    HaarElement,
    check_axiom3,
    check_axiom4,
    check_axiom5,
    fundamental_cycles,
    glue,
    haq_membership,
    holonomy,
    pushforward,
    root_measure,
    split,
)
from .ktheory import KClass, k0_class, k1_class  # noqa: E402
from .lca import (  # noqa: E402
    Atom,
    CompactOpenChoice,
    GroupExpr,
    Kind,
    classify,
    generalized_index,
    normalize,
    quotient_by,
    structure_decompose,
)
from .morphisms import Morphism, compose, inverse, mod_of, validate_automorphism  # noqa: E402
from .parsing import parse_expr, parse_morphism  # noqa: E402
from .scalars import (  # noqa: E402
    Base,
    Combine,
    PositiveReal,
    PrimeExponentVector,
    TorsorElement,
    basechange,
    factorize,
    scalar_combine,
    signature_check,
    torsor_contract,
    torsor_tensor,
)
from .sequences import ExactSequence, SeqKind, defect, make_sequence  # noqa: E402
