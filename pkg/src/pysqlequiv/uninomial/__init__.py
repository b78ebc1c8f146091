"""
UniNomial Normal Forms and Lemmas
"""

from .normal_form import (
    NormAgg,
    SquashFactor,
    NegateFactor,
    Monomial,
    NormalForm,
    named_vars,
    rename,
    embed,
    schema_of,
)
from .normalize import Normalizer, normalize, normalize_nf
from .keys import ac_equal, nf_key, mono_key
from .closure import UnionFind, congruence_rewrite
from .lemmas import LEMMAS, apply_lemma, subterm, replace_at
