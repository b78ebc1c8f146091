"""
Concrete Values and Tuples

A tuple of schema `empty` is `()`, of a leaf a `Value`, of a node a 2-tuple.
"""

from __future__ import annotations
from dataclasses import dataclass
from fractions import Fraction
import itertools
from typing import Iterator, Mapping
from ..error_handling import ArgumentTypeError, InfiniteDomainError, SchemaMismatchError
from ..core.schema import BOOL, INT, STRING, BaseType, EmptySchema, Leaf, Node, Schema


@dataclass(frozen=True, order=False)
class Value:
    """
    Scalar of a base type.

    Attributes
    ----------
    base : pysqlequiv.core.BaseType
        Type of the value.

    payload : int|bool|str|fractions.Fraction
        The value proper. Abstract values carry an int index. A `str`
        payload on a non-string base is a frozen constant of a canonical
        database.
    """

    base: BaseType
    payload: object

    def sort_key(self) -> tuple:
        """
        Total order within and across base types.
        """
        return (str(self.base), type(self.payload).__name__, self.payload)

    def __str__(self) -> str:
        if self.base == BOOL and isinstance(self.payload, bool):
            return "true" if self.payload else "false"
        if self.base == STRING:
            return f"'{self.payload}'"
        if self.base == INT and isinstance(self.payload, (int, Fraction)):
            return str(self.payload)
        return f"{self.base}#{self.payload}"


def int_value(n: int | Fraction) -> Value:
    if isinstance(n, Fraction) and n.denominator == 1:
        n = n.numerator
    return Value(INT, n)


def tuple_key(t) -> tuple:
    """
    Sort key of a tuple.
    """
    if isinstance(t, Value):
        return (1, t.sort_key())
    if t == ():
        return (0,)
    return (2, tuple_key(t[0]), tuple_key(t[1]))


def format_tuple(t) -> str:
    """
    `()`, `3`, `(3, 'a')`.
    """
    if isinstance(t, Value):
        return str(t)
    if t == ():
        return "()"
    return f"({format_tuple(t[0])}, {format_tuple(t[1])})"


def tuple_schema_ok(t, schema: Schema) -> bool:
    """
    Whether `t` has the shape of `schema`. Schema meta-variables accept anything.
    """
    if isinstance(schema, EmptySchema):
        return t == ()
    if isinstance(schema, Leaf):
        return isinstance(t, Value) and t.base == schema.base
    if isinstance(schema, Node):
        return (
            isinstance(t, tuple)
            and len(t) == 2
            and tuple_schema_ok(t[0], schema.left)
            and tuple_schema_ok(t[1], schema.right)
        )
    return True


def default_domain(base: BaseType, size: int) -> tuple[Value, ...]:
    """
    First `size` values of a base type: `0..size-1`, `false, true`,
    `'a'`, `'b'`, ... or `T#0`, `T#1`, ...
    """
    if not isinstance(base, BaseType):
        raise ArgumentTypeError("base", base, BaseType)
    if base == INT:
        return tuple(Value(INT, i) for i in range(size))
    if base == BOOL:
        return tuple(Value(BOOL, b) for b in (False, True)[:size])
    if base == STRING:
        return tuple(Value(STRING, chr(ord("a") + i)) for i in range(size))
    return tuple(Value(base, i) for i in range(size))


def enumerate_tuples(schema: Schema, domains: Mapping[BaseType, tuple]) -> Iterator:
    """
    Every tuple of `schema` over the finite `domains`.

    Raises
    ------
    InfiniteDomainError
        A leaf's base type has no finite domain.
    """
    if isinstance(schema, EmptySchema):
        yield ()
    elif isinstance(schema, Leaf):
        if schema.base not in domains:
            raise InfiniteDomainError(schema.base)
        yield from domains[schema.base]
    elif isinstance(schema, Node):
        lefts = list(enumerate_tuples(schema.left, domains))
        rights = list(enumerate_tuples(schema.right, domains))
        yield from itertools.product(lefts, rights)
    else:
        raise SchemaMismatchError("a concrete schema", schema, "tuple enumeration")
