"""
Rule DSL Tokenizer

Keywords are case-insensitive. `--` starts a line comment; a comment of the
form `-- @name args` is a pragma and is returned separately.
"""

from __future__ import annotations
from dataclasses import dataclass
from enum import Enum
import re
from ..error_handling import ParseError

KEYWORDS = frozenset(
    {
        "SELECT", "DISTINCT", "FROM", "WHERE", "UNION", "ALL", "EXCEPT",
        "AND", "OR", "NOT", "TRUE", "FALSE", "EXISTS", "CASTPRED", "CASTEXPR",
        "EVAL", "VAR", "GROUP", "BY", "SEMIJOIN", "ON", "ASSUME", "KEY", "FD",
        "RULE", "EQUIV", "END", "CONTEXT", "LEFT", "RIGHT", "EMPTY",
        "SUM", "COUNT", "AVG", "MAX", "MIN",
        "TYPE", "SCHEMA", "TABLE", "PROJ", "PRED", "EXPR", "FUNCTION",
        "LEAF", "NODE", "INT", "BOOL", "STRING",
        "INSTANCE", "DOMAIN",
    }
)  # fmt: skip

PUNCTUATION = ("->", "(", ")", ",", ".", "*", "=", ":", "{", "}", "#")


class TokenType(Enum):
    """
    Token kinds.
    """

    IDENT = "identifier"
    KEYWORD = "keyword"
    NUMBER = "number"
    STRING = "string"
    PUNCT = "punctuation"
    EOF = "end of input"


@dataclass(frozen=True)
class Token:
    """
    Lexical token with its 1 based source position.
    """

    type: TokenType
    value: str
    line: int
    column: int

    def describe(self) -> str:
        """
        Human readable token for diagnostics.
        """
        if self.type is TokenType.EOF:
            return "end of input"
        return f"'{self.value}'"


@dataclass(frozen=True)
class Pragma:
    """
    `-- @name args` comment.
    """

    name: str
    args: tuple
    line: int


_TOKEN_RE = re.compile(
    r"""
    (?P<newline>\n)
    |(?P<space>[ \t\r\f\v]+)
    |(?P<comment>--[^\n]*)
    |(?P<ident>[A-Za-z_][A-Za-z_0-9]*)
    |(?P<number>-?[0-9]+)
    |(?P<string>'[^'\n]*')
    |(?P<punct>->|[(),.*=:{}\#])
    """,
    re.VERBOSE,
)

_PRAGMA_RE = re.compile(r"--\s*@([A-Za-z_]+)\s*(.*)$")


def tokenize(text: str) -> tuple[list[Token], list[Pragma]]:
    """
    Split DSL text into tokens.

    Parameters
    ----------
    text : str
        Source text.

    Returns
    -------
    tuple[list[Token], list[Pragma]]
        Tokens ending with one EOF token, and pragmas in source order.

    Raises
    ------
    ParseError
        On a character that starts no token.
    """
    tokens = []
    pragmas = []
    line = 1
    line_start = 0
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        column = pos - line_start + 1
        if match is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, column)
        kind = match.lastgroup
        value = match.group()
        if kind == "newline":
            line += 1
            line_start = match.end()
        elif kind == "comment":
            pragma = _PRAGMA_RE.match(value)
            if pragma:
                pragmas.append(Pragma(pragma.group(1).lower(), tuple(pragma.group(2).split()), line))
        elif kind == "ident":
            if value.upper() in KEYWORDS:
                tokens.append(Token(TokenType.KEYWORD, value.upper(), line, column))
            else:
                tokens.append(Token(TokenType.IDENT, value, line, column))
        elif kind == "number":
            tokens.append(Token(TokenType.NUMBER, value, line, column))
        elif kind == "string":
            tokens.append(Token(TokenType.STRING, value[1:-1], line, column))
        elif kind == "punct":
            tokens.append(Token(TokenType.PUNCT, value, line, column))
        pos = match.end()
    tokens.append(Token(TokenType.EOF, "", line, pos - line_start + 1))
    return tokens, pragmas
