"""
Conjunctive Query Decision Procedure
"""

from .cq import CQ, CQVar, CQApply, Atom, Congruence, to_cq, format_term
from .homomorphism import (
    Homomorphism,
    find_homomorphism,
    find_isomorphism,
    decide_set_equiv,
    decide_bag_equiv,
    describe,
)
from .canonical import FrozenTable, canonical_database, frozen_head, contained_in
