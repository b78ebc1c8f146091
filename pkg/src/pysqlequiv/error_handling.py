"""
Custom pySqlEquiv Exceptions
"""


class ArgumentTypeError(TypeError):
    """
    Raised when an argument is not of the expected type.
    """

    def __init__(self, arg_name, arg, expected):
        if isinstance(expected, tuple):
            expected_str = ", ".join(t.__name__ for t in expected)
        else:
            expected_str = expected.__name__
        actual_str = type(arg).__name__
        super().__init__(
            f"Argument '{arg_name}' must be of type {expected_str}, got {actual_str}"
        )


class SqlEquivError(Exception):
    """
    Base class for every pySqlEquiv domain error.

    Attributes
    ----------
    rule : str|None
        Name of the rewrite rule being processed, if known.
    """

    def __init__(self, message: str, rule: str | None = None) -> None:
        self.rule = rule
        if rule:
            message = f"{message}\nRule: {rule}"
        super().__init__(message)

    def with_rule(self, rule: str | None):
        """
        Attach a rule name to an error raised before the rule was known.

        Returns
        -------
        SqlEquivError
            `self`, so callers can `raise err.with_rule(name)`.
        """
        if rule and self.rule is None:
            self.rule = rule
            self.args = (f"{self.args[0]}\nRule: {rule}",) + self.args[1:]
        return self


class PathMismatchError(SqlEquivError):
    """
    A projection path does not fit the schema it is applied to.
    """

    def __init__(self, proj, schema, reason: str = "", rule: str | None = None):
        """
        Constructor for path mismatch exception

        Parameters
        ----------
        proj : pysqlequiv.core.Proj
            Offending projection.

        schema : pysqlequiv.core.Schema
            Source schema the projection was checked against.

        reason : str, optional
            Extra detail.

        rule : str, optional
            Rule name.
        """
        self.proj = proj
        self.schema = schema
        super().__init__(
            "Projection Does Not Typecheck Against Schema\n"
            + f"Projection: {proj}\n"
            + f"Schema: {schema}"
            + (f"\nReason: {reason}" if reason else ""),
            rule,
        )


class SchemaMismatchError(SqlEquivError):
    """
    Two schemas (or base types) were required to be equal but are not.
    """

    def __init__(self, expected, actual, where: str = "", rule: str | None = None):
        self.expected = expected
        self.actual = actual
        super().__init__(
            "Schema Mismatch"
            + (f" in {where}" if where else "")
            + f"\nExpected: {expected}\nActual: {actual}",
            rule,
        )


class UnboundMetaError(SqlEquivError):
    """
    A meta-variable, table, or function is used without a declaration or binding.
    """

    def __init__(self, name: str, kind: str = "meta-variable", rule: str | None = None):
        self.name = name
        self.kind = kind
        super().__init__(f"Unbound {kind}: '{name}'", rule)


class ParseError(SqlEquivError):
    """
    Raised by the rule DSL parser with a source position.

    Attributes
    ----------
    line : int
        1 based line number.

    column : int
        1 based column number.

    expected : frozenset[str]
        Token kinds or keywords that would have been accepted.
    """

    def __init__(
        self,
        message: str,
        line: int,
        column: int,
        expected=(),
        rule: str | None = None,
    ):
        self.line = line
        self.column = column
        self.expected = frozenset(expected)
        self.reason = message
        text = f"Parse Error at line {line}, column {column}: {message}"
        if self.expected:
            text += "\nExpected one of: " + ", ".join(sorted(self.expected))
        super().__init__(text, rule)


class DuplicateDeclarationError(ParseError):
    """
    A declaration name or rule name appears twice in one rule file.
    """

    def __init__(self, name: str, line: int, column: int):
        self.name = name
        super().__init__(f"duplicate declaration of '{name}'", line, column)


class ShapeMismatchError(SqlEquivError):
    """
    A lemma was applied at a position whose term does not have the lemma's shape.
    """

    def __init__(self, lemma: str, position, term):
        self.lemma = lemma
        self.position = tuple(position)
        super().__init__(
            f"Lemma '{lemma}' does not apply\n"
            + f"Position: {self.position}\n"
            + f"Term: {term}"
        )


class SideConditionUnprovedError(SqlEquivError):
    """
    The side condition of a conditional lemma could not be discharged.
    """

    def __init__(self, lemma: str, condition: str):
        self.lemma = lemma
        super().__init__(
            f"Side condition of lemma '{lemma}' could not be proved\n"
            + f"Condition: {condition}"
        )


class FuelExhaustedError(SqlEquivError):
    """
    The rewrite budget of the normalizer ran out.
    """

    def __init__(self, fuel: int, rule: str | None = None):
        self.fuel = fuel
        super().__init__(f"Normalization fuel of {fuel} steps exhausted", rule)


class EmptyAggregateError(SqlEquivError):
    """
    MAX, MIN, or AVG evaluated on an empty bag.
    """

    def __init__(self, agg: str):
        self.agg = agg
        super().__init__(f"Aggregate {agg} is undefined on an empty bag")


class InfiniteDomainError(SqlEquivError):
    """
    A sum ranges over a base type with no enumerated domain.
    """

    def __init__(self, base):
        self.base = base
        super().__init__(
            f"Cannot enumerate values of type {base}: no finite domain is bound"
        )


class UnsupportedSugarError(SqlEquivError):
    """
    A GROUP BY form cannot be de-sugared into the core query language.
    """

    def __init__(self, reason: str, rule: str | None = None):
        super().__init__(f"Unsupported GROUP BY form: {reason}", rule)


class EvaluationError(SqlEquivError):
    """
    Concrete evaluation failed, e.g. a function table has no entry for an argument.
    """
