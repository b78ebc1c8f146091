"""
pySqlEquiv Rule DSL
"""

from .lexer import Token, TokenType, Pragma, tokenize
from .parser import Parser, RuleFile, parse_query, parse_rule_file, semijoin
from .printer import (
    print_ast,
    print_proj,
    print_query,
    print_pred,
    print_expr,
    print_rule,
    print_rule_file,
)
