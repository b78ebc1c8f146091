"""
UniNomial Denotation of Queries
"""

from .terms import (
    Term,
    TupleTerm,
    UTerm,
    VarRef,
    NamedVar,
    Fst,
    Snd,
    MkPair,
    Unit,
    Const,
    ProjApply,
    FnApply,
    ExprApply,
    AggApply,
    Zero,
    One,
    Plus,
    Times,
    Squash,
    Negate,
    Sigma,
    RelAtom,
    EqAtom,
    PredAtom,
    Lam,
    plus,
    times,
    map_term,
    shift,
    substitute,
    instantiate,
    apply_lam,
    free_indices,
)
from .denote import Denoter, denote_query, denote_pred, denote_expr, denote_proj
from .pretty import print_term
from .validate import term_schema, check_term
