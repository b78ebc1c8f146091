"""
Rule DSL Parser

Recursive descent over the token list from `pysqlequiv.parser.lexer`, with
one token of lookahead (two for telling predicate meta-variables from
expressions).

Rule file grammar::

    file      := (decl | rule)*
    decl      := TYPE ident | SCHEMA ident | TABLE ident ':' schema
               | PROJ ident ':' schema '->' schema | PRED ident ':' schema
               | EXPR ident ':' schema '->' base
               | FUNCTION ident ':' '(' [base (',' base)*] ')' '->' base
    rule      := RULE ident [CONTEXT schema] premise* query EQUIV query END
    premise   := ASSUME KEY '(' proj ',' ident ')'
               | ASSUME FD '(' proj ',' proj ',' ident ')'

Queries::

    query     := semi ((UNION ALL | EXCEPT) semi)*
    semi      := base (SEMIJOIN base ON pred)*
    base      := DISTINCT base
               | SELECT [DISTINCT] items FROM from [WHERE pred] [GROUP BY projs]
               | FROM from [WHERE pred]
               | primary [WHERE pred]
    primary   := ident | '(' query ')'
"""

from __future__ import annotations
from dataclasses import dataclass, field
from ..error_handling import (
    ArgumentTypeError,
    DuplicateDeclarationError,
    ParseError,
    UnboundMetaError,
)
from ..core import ast
from ..core.schema import BOOL, EMPTY, INT, STRING, BaseType, Leaf, Node, Schema, SchemaMeta, abstract
from ..core.rule import CheckedRule, Declarations, RewriteRule, rule_wellformed
from ..rules.constraints import Constraint
from ..rules.groupby import desugar_groupby
from .lexer import Pragma, Token, TokenType, tokenize

EXPECTATIONS = ("proved", "refuted", "corroborated", "unknown")


@dataclass
class RuleFile:
    """
    Parsed rule file.

    Attributes
    ----------
    declarations : pysqlequiv.core.Declarations
        File-level meta-variable declarations.

    rules : tuple[pysqlequiv.core.RewriteRule]
        Rules in source order. Each rule's declarations are restricted to
        the names it uses.

    checked : tuple[pysqlequiv.core.CheckedRule]
        The rules after `rule_wellformed`.

    pragmas : dict[str, dict]
        Rule name to the pragmas preceding that rule.
    """

    declarations: Declarations
    rules: tuple = ()
    checked: tuple = ()
    pragmas: dict = field(default_factory=dict)

    def __str__(self) -> str:
        return f"RuleFile({len(self.rules)} rules)"


class Parser:
    """
    Recursive descent parser for queries, declarations and rules.

    Methods
    -------
    parse_file()
        Parse a whole rule file.

    parse_query_only()
        Parse a single query followed by end of input.
    """

    def __init__(self, text: str, declarations: Declarations | None = None) -> None:
        self._tokens, self._pragmas = tokenize(text)
        self._pos = 0
        decls = declarations or Declarations()
        self.types: dict[str, BaseType] = {name: abstract(name) for name in decls.types}
        self.schemas: set[str] = set(decls.schemas)
        self.tables: dict[str, Schema] = dict(decls.tables)
        self.projs: dict[str, ast.ProjMeta] = dict(decls.projs)
        self.preds: dict[str, ast.PredMeta] = dict(decls.preds)
        self.exprs: dict[str, ast.ExprMeta] = dict(decls.exprs)
        self.functions: dict[str, tuple] = dict(decls.functions)
        self.rule_names: set[str] = set()
        self._decl_order: list[str] = list(decls.types) + list(decls.schemas)

    # ==============================
    # Token helpers
    # ==============================

    def _peek(self, offset: int = 0) -> Token:
        return self._tokens[min(self._pos + offset, len(self._tokens) - 1)]

    def _advance(self) -> Token:
        token = self._peek()
        if token.type is not TokenType.EOF:
            self._pos += 1
        return token

    def _is(self, value: str, offset: int = 0) -> bool:
        token = self._peek(offset)
        return token.type in (TokenType.KEYWORD, TokenType.PUNCT) and token.value == value

    def _accept(self, value: str) -> bool:
        if self._is(value):
            self._advance()
            return True
        return False

    def _error(self, message: str, expected=()) -> ParseError:
        token = self._peek()
        return ParseError(f"{message}, found {token.describe()}", token.line, token.column, expected)

    def _expect(self, value: str) -> Token:
        if not self._is(value):
            raise self._error(f"expected '{value}'", [value])
        return self._advance()

    def _ident(self) -> Token:
        if self._peek().type is not TokenType.IDENT:
            raise self._error("expected an identifier", ["identifier"])
        return self._advance()

    # ==============================
    # Declarations
    # ==============================

    def _declare(self, token: Token) -> str:
        name = token.value
        taken = (
            name in self.types
            or name in self.schemas
            or name in self.tables
            or name in self.projs
            or name in self.preds
            or name in self.exprs
            or name in self.functions
        )
        if taken:
            raise DuplicateDeclarationError(name, token.line, token.column)
        self._decl_order.append(name)
        return name

    def parse_base_type(self) -> BaseType:
        """
        `int | bool | string | <declared type>`.
        """
        if self._accept("INT"):
            return INT
        if self._accept("BOOL"):
            return BOOL
        if self._accept("STRING"):
            return STRING
        token = self._peek()
        if token.type is TokenType.IDENT:
            if token.value not in self.types:
                raise UnboundMetaError(token.value, "type")
            self._advance()
            return self.types[token.value]
        raise self._error("expected a base type", ["INT", "BOOL", "STRING", "identifier"])

    def parse_schema(self) -> Schema:
        """
        `empty | leaf <base> | node(<schema>, <schema>) | <schema meta> | (<schema>)`.
        """
        if self._accept("EMPTY"):
            return EMPTY
        if self._accept("LEAF"):
            return Leaf(self.parse_base_type())
        if self._accept("NODE"):
            self._expect("(")
            left = self.parse_schema()
            self._expect(",")
            right = self.parse_schema()
            self._expect(")")
            return Node(left, right)
        if self._accept("("):
            schema = self.parse_schema()
            self._expect(")")
            return schema
        token = self._peek()
        if token.type is TokenType.IDENT:
            if token.value not in self.schemas:
                raise UnboundMetaError(token.value, "schema")
            self._advance()
            return SchemaMeta(token.value)
        raise self._error("expected a schema", ["EMPTY", "LEAF", "NODE", "identifier"])

    def _parse_declaration(self) -> None:
        keyword = self._advance().value
        token = self._ident()
        if keyword == "TYPE":
            name = self._declare(token)
            self.types[name] = abstract(name)
            return
        if keyword == "SCHEMA":
            self.schemas.add(self._declare(token))
            return
        self._expect(":")
        if keyword == "TABLE":
            schema = self.parse_schema()
            self.tables[self._declare(token)] = schema
        elif keyword == "PROJ":
            source = self.parse_schema()
            self._expect("->")
            target = self.parse_schema()
            name = self._declare(token)
            self.projs[name] = ast.ProjMeta(name, source, target)
        elif keyword == "PRED":
            over = self.parse_schema()
            name = self._declare(token)
            self.preds[name] = ast.PredMeta(name, over)
        elif keyword == "EXPR":
            over = self.parse_schema()
            self._expect("->")
            base = self.parse_base_type()
            name = self._declare(token)
            self.exprs[name] = ast.ExprMeta(name, over, base)
        else:
            self._expect("(")
            params = []
            if not self._is(")"):
                params.append(self.parse_base_type())
                while self._accept(","):
                    params.append(self.parse_base_type())
            self._expect(")")
            self._expect("->")
            result = self.parse_base_type()
            self.functions[self._declare(token)] = (tuple(params), result)

    def declarations(self) -> Declarations:
        """
        Everything declared so far.
        """
        return Declarations(
            types=tuple(n for n in self._decl_order if n in self.types),
            schemas=tuple(n for n in self._decl_order if n in self.schemas),
            tables=dict(self.tables),
            projs=dict(self.projs),
            preds=dict(self.preds),
            exprs=dict(self.exprs),
            functions=dict(self.functions),
        )

    # ==============================
    # Projections
    # ==============================

    def parse_proj(self) -> ast.Proj:
        """
        `atom ('.' atom)*`, nested to the right.
        """
        first = self._parse_proj_atom()
        if self._accept("."):
            return ast.Compose(first, self.parse_proj())
        return first

    def parse_proj_list(self) -> ast.Proj:
        """
        `proj (',' proj)*`, paired to the right.
        """
        first = self.parse_proj()
        if self._accept(","):
            return ast.Pair(first, self.parse_proj_list())
        return first

    def _parse_proj_atom(self) -> ast.Proj:
        if self._accept("*"):
            return ast.Star()
        if self._accept("LEFT"):
            return ast.Left()
        if self._accept("RIGHT"):
            return ast.Right()
        if self._accept("EMPTY"):
            return ast.EmptyProj()
        if self._accept("EVAL"):
            self._expect("(")
            expr = self.parse_expr()
            self._expect(")")
            return ast.Eval(expr)
        if self._accept("("):
            proj = self.parse_proj_list()
            self._expect(")")
            return proj
        token = self._peek()
        if token.type is TokenType.IDENT:
            self._advance()
            return self.projs.get(token.value, ast.ProjMeta(token.value))
        raise self._error(
            "expected a projection", ["*", "LEFT", "RIGHT", "EMPTY", "EVAL", "(", "identifier"]
        )

    # ==============================
    # Queries
    # ==============================

    def parse_query(self) -> ast.Query:
        """
        Set operations, left associative.
        """
        query = self._parse_semijoin()
        while True:
            if self._is("UNION"):
                self._advance()
                self._expect("ALL")
                query = ast.UnionAll(query, self._parse_semijoin())
            elif self._accept("EXCEPT"):
                query = ast.Except(query, self._parse_semijoin())
            else:
                return query

    def _parse_semijoin(self) -> ast.Query:
        query = self._parse_base_query()
        while self._accept("SEMIJOIN"):
            right = self._parse_base_query()
            self._expect("ON")
            theta = self.parse_pred()
            query = semijoin(query, right, theta)
        return query

    def _parse_base_query(self) -> ast.Query:
        if self._accept("DISTINCT"):
            return ast.Distinct(self._parse_base_query())
        if self._accept("SELECT"):
            return self._parse_select()
        if self._accept("FROM"):
            source = self._parse_from_list()
            if self._accept("WHERE"):
                source = ast.Where(source, self.parse_pred())
            return source
        query = self._parse_primary()
        if self._accept("WHERE"):
            query = ast.Where(query, self.parse_pred())
        return query

    def _parse_select(self) -> ast.Query:
        distinct = self._accept("DISTINCT")
        items = self._parse_select_items()
        self._expect("FROM")
        source = self._parse_from_list()
        if self._accept("WHERE"):
            source = ast.Where(source, self.parse_pred())
        if self._is("GROUP"):
            self._advance()
            self._expect("BY")
            keys = [self.parse_proj()]
            while self._accept(","):
                keys.append(self.parse_proj())
            query = desugar_groupby(ast.GroupBy(tuple(items), tuple(keys), source))
        else:
            aggs = [item for item in items if isinstance(item, ast.AggItem)]
            if aggs:
                raise self._error(f"aggregate {aggs[0].agg} in select list needs GROUP BY", ["GROUP"])
            query = ast.Select(_pair_items(items), source)
        return ast.Distinct(query) if distinct else query

    def _parse_select_items(self) -> list:
        items = [self._parse_select_item()]
        while self._accept(","):
            items.append(self._parse_select_item())
        return items

    def _parse_select_item(self):
        token = self._peek()
        if token.type is TokenType.KEYWORD and token.value in ast.AGGREGATES and self._is("(", 1):
            self._advance()
            self._advance()
            proj = self.parse_proj()
            self._expect(")")
            return ast.AggItem(token.value, proj)
        return self.parse_proj()

    def _parse_from_list(self) -> ast.Query:
        query = self._parse_primary()
        while self._accept(","):
            query = ast.Product(query, self._parse_primary())
        return query

    def _parse_primary(self) -> ast.Query:
        if self._accept("("):
            query = self.parse_query()
            self._expect(")")
            return query
        token = self._peek()
        if token.type is TokenType.IDENT:
            self._advance()
            if token.value in self.tables:
                return ast.TableMeta(token.value, self.tables[token.value])
            return ast.Table(token.value)
        raise self._error("expected a table or '('", ["(", "identifier"])

    # ==============================
    # Predicates
    # ==============================

    def parse_pred(self) -> ast.Pred:
        """
        `OR` of `AND` of `NOT` of atoms.
        """
        pred = self._parse_and()
        while self._accept("OR"):
            pred = ast.Or(pred, self._parse_and())
        return pred

    def _parse_and(self) -> ast.Pred:
        pred = self._parse_not()
        while self._accept("AND"):
            pred = ast.And(pred, self._parse_not())
        return pred

    def _parse_not(self) -> ast.Pred:
        if self._accept("NOT"):
            return ast.Not(self._parse_not())
        return self._parse_pred_atom()

    def _parse_pred_atom(self) -> ast.Pred:
        if self._accept("TRUE"):
            return ast.TruePred()
        if self._accept("FALSE"):
            return ast.FalsePred()
        if self._accept("EXISTS"):
            self._expect("(")
            query = self.parse_query()
            self._expect(")")
            return ast.Exists(query)
        if self._accept("CASTPRED"):
            self._expect("(")
            proj = self.parse_proj()
            self._expect(",")
            pred = self.parse_pred()
            self._expect(")")
            return ast.CastPred(proj, pred)
        if self._accept("("):
            pred = self.parse_pred()
            self._expect(")")
            return pred
        token = self._peek()
        if token.type is TokenType.IDENT and not (self._is("=", 1) or self._is("(", 1)):
            self._advance()
            return self.preds.get(token.value, ast.PredMeta(token.value))
        left = self.parse_expr()
        self._expect("=")
        return ast.Eq(left, self.parse_expr())

    # ==============================
    # Expressions
    # ==============================

    def parse_expr(self) -> ast.Expr:
        """
        `Var(p) | AGG(q) | CASTEXPR(p, e) | f(e, ...) | <expr meta>`.
        """
        token = self._peek()
        if self._accept("VAR"):
            self._expect("(")
            proj = self.parse_proj_list()
            self._expect(")")
            return ast.Var(proj)
        if token.type is TokenType.KEYWORD and token.value in ast.AGGREGATES:
            self._advance()
            self._expect("(")
            query = self.parse_query()
            self._expect(")")
            return ast.Agg(token.value, query)
        if self._accept("CASTEXPR"):
            self._expect("(")
            proj = self.parse_proj()
            self._expect(",")
            expr = self.parse_expr()
            self._expect(")")
            return ast.CastExpr(proj, expr)
        if token.type is TokenType.IDENT:
            self._advance()
            if self._accept("("):
                args = []
                if not self._is(")"):
                    args.append(self.parse_expr())
                    while self._accept(","):
                        args.append(self.parse_expr())
                self._expect(")")
                params, result = self.functions.get(token.value, (None, None))
                return ast.Apply(token.value, tuple(args), params, result)
            return self.exprs.get(token.value, ast.ExprMeta(token.value))
        raise self._error(
            "expected an expression", ["VAR", "CASTEXPR", "identifier"] + list(ast.AGGREGATES)
        )

    # ==============================
    # Rules and files
    # ==============================

    def _parse_premise(self) -> Constraint:
        self._expect("ASSUME")
        if self._accept("KEY"):
            self._expect("(")
            proj = self.parse_proj()
            self._expect(",")
            table = self._parse_table_name()
            self._expect(")")
            return Constraint("key", table, proj)
        if self._accept("FD"):
            self._expect("(")
            determinant = self.parse_proj()
            self._expect(",")
            dependent = self.parse_proj()
            self._expect(",")
            table = self._parse_table_name()
            self._expect(")")
            return Constraint("fd", table, determinant, dependent)
        raise self._error("expected a constraint", ["KEY", "FD"])

    def _parse_table_name(self) -> ast.Query:
        if self._peek().type is not TokenType.IDENT:
            raise self._error("expected a table name", ["identifier"])
        return self._parse_primary()

    def _parse_rule(self, pragmas: dict) -> RewriteRule:
        self._expect("RULE")
        token = self._ident()
        if token.value in self.rule_names:
            raise DuplicateDeclarationError(token.value, token.line, token.column)
        self.rule_names.add(token.value)
        context = self.parse_schema() if self._accept("CONTEXT") else EMPTY
        premises = []
        while self._is("ASSUME"):
            premises.append(self._parse_premise())
        lhs = self.parse_query()
        self._expect("EQUIV")
        rhs = self.parse_query()
        self._expect("END")
        rule = RewriteRule(
            name=token.value,
            lhs=lhs,
            rhs=rhs,
            declarations=restrict_declarations(self.declarations(), [lhs, rhs], premises, context),
            premises=tuple(premises),
            context=context,
            category=pragmas.get("category"),
            expect=pragmas.get("expect"),
            fuel=pragmas.get("fuel"),
            provenance=pragmas.get("provenance"),
        )
        return rule

    def _pragmas_before(self, line: int, after: int) -> dict:
        found = {}
        for pragma in self._pragmas:
            if after < pragma.line < line:
                found[pragma.name] = _pragma_value(pragma)
        return found

    def parse_file(self) -> RuleFile:
        """
        Parse declarations and rules up to end of input.
        """
        rules = []
        pragmas = {}
        previous_end = 0
        while self._peek().type is not TokenType.EOF:
            token = self._peek()
            if token.type is TokenType.KEYWORD and token.value in (
                "TYPE", "SCHEMA", "TABLE", "PROJ", "PRED", "EXPR", "FUNCTION"
            ):  # fmt: skip
                self._parse_declaration()
            elif self._is("RULE"):
                rule_pragmas = self._pragmas_before(token.line + 1, previous_end)
                rule = self._parse_rule(rule_pragmas)
                pragmas[rule.name] = rule_pragmas
                rules.append(rule)
                previous_end = self._tokens[self._pos - 1].line
            else:
                raise self._error(
                    "expected a declaration or a rule",
                    ["TYPE", "SCHEMA", "TABLE", "PROJ", "PRED", "EXPR", "FUNCTION", "RULE"],
                )
        return RuleFile(self.declarations(), tuple(rules), (), pragmas)

    def parse_query_only(self) -> ast.Query:
        """
        Parse one query and require end of input.
        """
        query = self.parse_query()
        if self._peek().type is not TokenType.EOF:
            raise self._error("unexpected input after query", ["UNION", "EXCEPT", "SEMIJOIN"])
        return query


def _pragma_value(pragma: Pragma):
    if not pragma.args:
        raise ParseError(f"pragma @{pragma.name} needs a value", pragma.line, 1)
    value = pragma.args[0]
    if pragma.name == "fuel":
        if not value.isdigit() or int(value) <= 0:
            raise ParseError(f"@fuel needs a positive integer, got '{value}'", pragma.line, 1)
        return int(value)
    if pragma.name == "expect":
        value = value.lower()
        if value not in EXPECTATIONS:
            raise ParseError(f"unknown expectation '{value}'", pragma.line, 1, EXPECTATIONS)
    return value


def _pair_items(items: list[ast.Proj]) -> ast.Proj:
    result = items[-1]
    for item in reversed(items[:-1]):
        result = ast.Pair(item, result)
    return result


def semijoin(left: ast.Query, right: ast.Query, theta: ast.Pred) -> ast.Query:
    """
    `left SEMIJOIN right ON theta`, with `theta` read over `node(left, right)`:

        SELECT * FROM left WHERE EXISTS (SELECT * FROM right WHERE CASTPRED((Left.Right, Right), theta))
    """
    cast = ast.Pair(ast.Compose(ast.Left(), ast.Right()), ast.Right())
    inner = ast.Select(ast.Star(), ast.Where(right, ast.CastPred(cast, theta)))
    return ast.Select(ast.Star(), ast.Where(left, ast.Exists(inner)))


def restrict_declarations(
    decls: Declarations, queries: list, premises: list, context: Schema = EMPTY
) -> Declarations:
    """
    Keep only the declarations a rule uses, plus the types and schema
    meta-variables those declarations mention.
    """
    used = {kind: set() for kind in ("table", "proj", "pred", "expr", "function", "schema")}
    for node in list(queries) + [p.table for p in premises] + [p.proj for p in premises] + [
        p.dependent for p in premises if p.dependent is not None
    ]:
        for kind, names in ast.meta_names(node).items():
            used[kind] |= names
    schemas = [context]
    schemas += [decls.tables[n] for n in used["table"] if n in decls.tables]
    for name in used["proj"]:
        if name in decls.projs:
            schemas += [decls.projs[name].source, decls.projs[name].target]
    schemas += [decls.preds[n].over for n in used["pred"] if n in decls.preds]
    schemas += [decls.exprs[n].over for n in used["expr"] if n in decls.exprs]
    bases = []
    for schema in schemas:
        bases += schema.leaves()
    bases += [decls.exprs[n].base for n in used["expr"] if n in decls.exprs]
    for name in used["function"]:
        if name in decls.functions:
            params, result = decls.functions[name]
            bases += list(params) + [result]
    schema_metas = set()
    for schema in schemas:
        schema_metas |= schema.metas()
    type_names = {b.name for b in bases if b.tag == "abstract"}
    return Declarations(
        types=tuple(n for n in decls.types if n in type_names),
        schemas=tuple(n for n in decls.schemas if n in schema_metas),
        tables={n: s for n, s in decls.tables.items() if n in used["table"]},
        projs={n: m for n, m in decls.projs.items() if n in used["proj"]},
        preds={n: m for n, m in decls.preds.items() if n in used["pred"]},
        exprs={n: m for n, m in decls.exprs.items() if n in used["expr"]},
        functions={n: f for n, f in decls.functions.items() if n in used["function"]},
    )


# ==============================
# Entry points
# ==============================


def _guard(text, action):
    if isinstance(text, (bytes, bytearray)):
        try:
            text = bytes(text).decode("utf-8")
        except UnicodeDecodeError as err:
            raise ParseError("input is not valid UTF-8", 1, err.start + 1) from None
    if not isinstance(text, str):
        raise ArgumentTypeError("text", text, (str, bytes))
    try:
        return action(text)
    except RecursionError:
        raise ParseError("input nested too deeply", 1, 1) from None


def parse_query(text: str, declarations: Declarations | None = None) -> ast.Query:
    """
    Parse a single query.

    Undeclared names become `Table` nodes and schema-less meta-variables;
    `rule_wellformed` or the typechecker reports them later.

    Parameters
    ----------
    text : str|bytes
        Query text.

    declarations : pysqlequiv.core.Declarations, optional
        Meta-variables to resolve names against.

    Returns
    -------
    pysqlequiv.core.ast.Query

    Raises
    ------
    ParseError
        With line, column and the set of expected tokens.
    """
    return _guard(text, lambda t: Parser(t, declarations).parse_query_only())


def parse_rule_file(text: str) -> RuleFile:
    """
    Parse a rule file and check every rule with `rule_wellformed`.

    Parameters
    ----------
    text : str|bytes
        File contents.

    Returns
    -------
    RuleFile

    Raises
    ------
    ParseError
        Syntax errors and duplicate declarations.

    UnboundMetaError, SchemaMismatchError, PathMismatchError
        A rule is not well formed; the message names the rule.
    """
    parsed = _guard(text, lambda t: Parser(t).parse_file())
    checked: list[CheckedRule] = [rule_wellformed(rule) for rule in parsed.rules]
    parsed.checked = tuple(checked)
    return parsed
