"""
Database Instances

An instance interprets every meta-variable of an instantiated rule:
relations as bags, projections as paths or finite tables, predicates as the
set of context tuples they hold on, expressions and functions as finite
tables. The text form reparses to an equal instance:

    instance
      domain int = {0, 1}
      schema s = leaf int
      table R = {(0, 1) * 2, (1, 0)}
      proj k = Left
      pred b = {((), 0)}
      function l = {() -> 1}
    end
"""

from __future__ import annotations
from dataclasses import dataclass, field
from ..error_handling import EvaluationError, ParseError, UnboundMetaError
from ..core import ast
from ..core.schema import BOOL, INT, STRING, BaseType, Schema, abstract
from ..parser.lexer import TokenType
from ..parser.parser import Parser, _guard
from ..parser.printer import print_proj
from .bag import Bag
from .values import Value, format_tuple, tuple_key


@dataclass
class Instance:
    """
    Interpretation of relations and meta-variables.

    Attributes
    ----------
    relations : dict[str, Bag]
        Relation name to contents.

    schemas : dict[str, Schema]
        Schema meta-variable bindings the instance was built for.

    projs : dict[str, Proj|dict]
        Projection meta-variable to a projection path, or to a table from
        source tuples to target tuples.

    preds : dict[str, frozenset]
        Predicate meta-variable to the context tuples it holds on.

    exprs : dict[str, dict]
        Expression meta-variable to a table from context tuples to values.

    functions : dict[str, dict]
        Function name to a table from argument tuples to values.

    domains : dict[BaseType, tuple]
        Finite carrier of each base type, used to enumerate sums.
    """

    relations: dict = field(default_factory=dict)
    schemas: dict = field(default_factory=dict)
    projs: dict = field(default_factory=dict)
    preds: dict = field(default_factory=dict)
    exprs: dict = field(default_factory=dict)
    functions: dict = field(default_factory=dict)
    domains: dict = field(default_factory=dict)

    # ==============================
    # Lookups
    # ==============================

    def relation(self, name: str) -> Bag:
        if name not in self.relations:
            raise UnboundMetaError(name, "table")
        return self.relations[name]

    def pred_holds(self, name: str, g) -> bool:
        if name not in self.preds:
            raise UnboundMetaError(name, "predicate")
        return g in self.preds[name]

    def proj_table(self, name: str):
        if name not in self.projs:
            raise UnboundMetaError(name, "projection")
        return self.projs[name]

    def expr_value(self, name: str, g) -> Value:
        if name not in self.exprs:
            raise UnboundMetaError(name, "expression")
        try:
            return self.exprs[name][g]
        except KeyError:
            raise EvaluationError(f"expression {name} is undefined on {format_tuple(g)}") from None

    def call(self, name: str, args: tuple) -> Value:
        if name not in self.functions:
            raise UnboundMetaError(name, "function")
        try:
            return self.functions[name][args]
        except KeyError:
            shown = ", ".join(format_tuple(a) for a in args)
            raise EvaluationError(f"function {name} is undefined on ({shown})") from None

    # ==============================
    # Text form
    # ==============================

    def to_dsl(self) -> str:
        """
        Text form, reparsed by `parse_instance`.
        """
        lines = ["instance"]
        for base in sorted(self.domains, key=str):
            values = ", ".join(str(v) for v in self.domains[base])
            lines.append(f"  domain {base} = {{{values}}}")
        for name, schema in sorted(self.schemas.items()):
            lines.append(f"  schema {name} = {schema}")
        for name, bag in sorted(self.relations.items()):
            lines.append(f"  table {name} = {bag}")
        for name, interp in sorted(self.projs.items()):
            if isinstance(interp, ast.Proj):
                lines.append(f"  proj {name} = {print_proj(interp, top=False)}")
            else:
                lines.append(f"  proj {name} = {_table_text(interp)}")
        for name, holds in sorted(self.preds.items()):
            items = ", ".join(format_tuple(t) for t in sorted(holds, key=tuple_key))
            lines.append(f"  pred {name} = {{{items}}}")
        for name, table in sorted(self.exprs.items()):
            lines.append(f"  expr {name} = {_table_text(table)}")
        for name, table in sorted(self.functions.items()):
            entries = []
            for args in sorted(table, key=lambda a: tuple(tuple_key(x) for x in a)):
                shown = ", ".join(format_tuple(a) for a in args)
                entries.append(f"({shown}) -> {format_tuple(table[args])}")
            lines.append(f"  function {name} = {{{', '.join(entries)}}}")
        lines.append("end")
        return "\n".join(lines)

    def __str__(self) -> str:
        return self.to_dsl()

    def __sqlequiv_json__(self) -> str:
        return self.to_dsl()


def _table_text(table: dict) -> str:
    entries = [f"{format_tuple(k)} -> {format_tuple(table[k])}" for k in sorted(table, key=tuple_key)]
    return "{" + ", ".join(entries) + "}"


class InstanceParser(Parser):
    """
    Parser of the `instance ... end` block. Unknown type names are taken as
    abstract base types.
    """

    def parse_base_type(self) -> BaseType:
        token = self._peek()
        if token.type is TokenType.IDENT and token.value not in self.types:
            self.types[token.value] = abstract(token.value)
        return super().parse_base_type()

    def parse_value(self) -> Value:
        token = self._peek()
        if token.type is TokenType.NUMBER:
            self._advance()
            return Value(INT, int(token.value))
        if token.type is TokenType.STRING:
            self._advance()
            return Value(STRING, token.value)
        if self._accept("TRUE"):
            return Value(BOOL, True)
        if self._accept("FALSE"):
            return Value(BOOL, False)
        if token.type is TokenType.IDENT or self._is("INT") or self._is("BOOL") or self._is("STRING"):
            base = self.parse_base_type()
            self._expect("#")
            label = self._advance()
            if label.type is TokenType.NUMBER:
                return Value(base, int(label.value))
            if label.type is TokenType.IDENT:
                return Value(base, label.value)
            raise ParseError(
                f"expected a value label, found {label.describe()}", label.line, label.column
            )
        raise self._error("expected a value", ["number", "string", "TRUE", "FALSE", "T#n"])

    def parse_tuple(self):
        if self._accept("("):
            if self._accept(")"):
                return ()
            left = self.parse_tuple()
            self._expect(",")
            right = self.parse_tuple()
            self._expect(")")
            return (left, right)
        return self.parse_value()

    def _braced(self, item) -> list:
        self._expect("{")
        items = []
        if not self._is("}"):
            items.append(item())
            while self._accept(","):
                items.append(item())
        self._expect("}")
        return items

    def _bag_entry(self):
        t = self.parse_tuple()
        count = 1
        if self._accept("*"):
            token = self._advance()
            if token.type is not TokenType.NUMBER or int(token.value) <= 0:
                raise ParseError("multiplicity must be a positive integer", token.line, token.column)
            count = int(token.value)
        return t, count

    def _mapping_entry(self):
        key = self.parse_tuple()
        self._expect("->")
        return key, self.parse_tuple()

    def _args_entry(self):
        self._expect("(")
        args = []
        if not self._is(")"):
            args.append(self.parse_value())
            while self._accept(","):
                args.append(self.parse_value())
        self._expect(")")
        self._expect("->")
        return tuple(args), self.parse_value()

    def parse_instance(self) -> Instance:
        inst = Instance()
        self._expect("INSTANCE")
        while not self._accept("END"):
            if self._accept("DOMAIN"):
                base = self.parse_base_type()
                self._expect("=")
                inst.domains[base] = tuple(self._braced(self.parse_value))
                continue
            keyword = self._peek().value
            if keyword not in ("SCHEMA", "TABLE", "PROJ", "PRED", "EXPR", "FUNCTION"):
                raise self._error(
                    "expected an instance item",
                    ["DOMAIN", "SCHEMA", "TABLE", "PROJ", "PRED", "EXPR", "FUNCTION", "END"],
                )
            self._advance()
            name = self._ident().value
            self._expect("=")
            if keyword == "SCHEMA":
                inst.schemas[name] = self.parse_schema()
            elif keyword == "TABLE":
                counts = {}
                for t, m in self._braced(self._bag_entry):
                    counts[t] = counts.get(t, 0) + m
                inst.relations[name] = Bag(counts)
            elif keyword == "PROJ":
                if self._is("{"):
                    inst.projs[name] = dict(self._braced(self._mapping_entry))
                else:
                    inst.projs[name] = self.parse_proj()
            elif keyword == "PRED":
                inst.preds[name] = frozenset(self._braced(self.parse_tuple))
            elif keyword == "EXPR":
                inst.exprs[name] = dict(self._braced(self._mapping_entry))
            else:
                inst.functions[name] = dict(self._braced(self._args_entry))
        if self._peek().type is not TokenType.EOF:
            raise self._error("unexpected input after instance")
        return inst


def parse_instance(text: str) -> Instance:
    """
    Parse the text form of an instance.

    Raises
    ------
    ParseError
        With line and column.
    """
    return _guard(text, lambda t: InstanceParser(t).parse_instance())
