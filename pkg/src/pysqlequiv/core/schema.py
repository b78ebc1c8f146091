"""
Schemas and Base Types

Schemas are unnamed binary trees of base types. The same tree type is used
for query output schemas and for context schemas.
"""

from __future__ import annotations
from dataclasses import dataclass
from ..error_handling import ArgumentTypeError

BASE_TAGS = ("int", "bool", "string", "abstract")


@dataclass(frozen=True)
class BaseType:
    """
    Scalar type of a schema leaf.

    Attributes
    ----------
    tag : str
        One of `"int"`, `"bool"`, `"string"`, `"abstract"`.

    name : str|None
        Name of an abstract (uninterpreted) carrier type, `None` otherwise.
    """

    tag: str
    name: str | None = None

    def __post_init__(self) -> None:
        if self.tag not in BASE_TAGS:
            raise ValueError(f"BaseType 'tag' must be one of {BASE_TAGS}, got '{self.tag}'")
        if (self.tag == "abstract") != (self.name is not None):
            raise ValueError("Only abstract base types carry a name")

    def __str__(self) -> str:
        return self.name if self.tag == "abstract" else self.tag


INT = BaseType("int")
BOOL = BaseType("bool")
STRING = BaseType("string")


def abstract(name: str) -> BaseType:
    """
    Build an abstract base type.
    """
    if not isinstance(name, str):
        raise ArgumentTypeError("name", name, str)
    return BaseType("abstract", name)


class Schema:
    """
    Base class of schema trees.
    """

    __slots__ = ()

    def leaves(self) -> list[BaseType]:
        """
        Base types of the leaves, left to right.
        """
        return []

    def depth(self) -> int:
        """
        Height of the tree; leaves and empty have depth 0.
        """
        return 0

    def metas(self) -> set[str]:
        """
        Names of schema meta-variables occurring in the tree.
        """
        return set()


@dataclass(frozen=True)
class EmptySchema(Schema):
    """
    Schema of the unit tuple.
    """

    def __str__(self) -> str:
        return "empty"


@dataclass(frozen=True)
class Leaf(Schema):
    """
    Single attribute of a base type.
    """

    base: BaseType

    def leaves(self) -> list[BaseType]:
        return [self.base]

    def __str__(self) -> str:
        return f"leaf {self.base}"


@dataclass(frozen=True)
class Node(Schema):
    """
    Pair of two schemas.
    """

    left: Schema
    right: Schema

    def leaves(self) -> list[BaseType]:
        return self.left.leaves() + self.right.leaves()

    def depth(self) -> int:
        return 1 + max(self.left.depth(), self.right.depth())

    def metas(self) -> set[str]:
        return self.left.metas() | self.right.metas()

    def __str__(self) -> str:
        return f"node({self.left}, {self.right})"


@dataclass(frozen=True)
class SchemaMeta(Schema):
    """
    Schema meta-variable, quantified over all schemas.
    """

    name: str

    def metas(self) -> set[str]:
        return {self.name}

    def __str__(self) -> str:
        return self.name


EMPTY = EmptySchema()


def substitute_schema(schema: Schema, bindings: dict[str, Schema]) -> Schema:
    """
    Replace schema meta-variables by the schemas bound in `bindings`.

    Unbound meta-variables are left in place.
    """
    if isinstance(schema, SchemaMeta):
        return bindings.get(schema.name, schema)
    if isinstance(schema, Node):
        return Node(
            substitute_schema(schema.left, bindings),
            substitute_schema(schema.right, bindings),
        )
    return schema
