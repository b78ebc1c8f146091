"""
Finite Bag Interpreter and Differential Oracle
"""

from .values import Value, int_value, default_domain, enumerate_tuples, format_tuple, tuple_key
from .bag import Bag
from .instance import Instance, parse_instance
from .evaluator import (
    Evaluator,
    eval_query,
    eval_agg,
    eval_uterm,
    eval_tuple_term,
    eval_normal_form,
)
from .oracle import (
    OracleConfig,
    CounterExample,
    OracleOutcome,
    InstanceSpace,
    instance_spaces,
    run_oracle,
    differential_test,
)
from .coherence import Discrepancy, check_coherence, widen
