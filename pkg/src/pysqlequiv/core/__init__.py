"""
pySqlEquiv Core Types
"""

from .schema import (
    BaseType,
    Schema,
    EmptySchema,
    Leaf,
    Node,
    SchemaMeta,
    EMPTY,
    INT,
    BOOL,
    STRING,
    abstract,
    substitute_schema,
)
from .ast import *
from .typecheck import (
    proj_typecheck,
    query_typecheck,
    pred_typecheck,
    expr_typecheck,
    agg_result_type,
)
from .rule import (
    Declarations,
    RewriteRule,
    CheckedRule,
    rule_wellformed,
    instantiate_schemas,
)
