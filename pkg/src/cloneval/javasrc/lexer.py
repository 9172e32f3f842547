"""Hand-written Java lexer.

Total and lossless: every byte of the input belongs to exactly one token,
and concatenating all lexemes reproduces the input byte-for-byte.  Comments
and whitespace are ordinary tokens so that downstream normalization can
delete them without touching anything else.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterator, List

from ..errors import InvalidCharacter, UnterminatedComment, UnterminatedString


class TokenKind(enum.Enum):
    IDENTIFIER = "identifier"
    KEYWORD = "keyword"
    OPERATOR = "operator"
    SEPARATOR = "separator"
    INTEGER_LITERAL = "integer_literal"
    FLOAT_LITERAL = "float_literal"
    CHAR_LITERAL = "char_literal"
    STRING_LITERAL = "string_literal"
    BOOLEAN_LITERAL = "boolean_literal"
    NULL_LITERAL = "null_literal"
    LINE_COMMENT = "line_comment"
    BLOCK_COMMENT = "block_comment"
    WHITESPACE = "whitespace"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    lexeme: str
    line: int  # 1-based
    col: int  # 1-based

    @property
    def is_significant(self) -> bool:
        return self.kind not in (
            TokenKind.WHITESPACE,
            TokenKind.LINE_COMMENT,
            TokenKind.BLOCK_COMMENT,
        )


# Java Language Specification keyword list.
KEYWORDS = frozenset(
    """abstract assert boolean break byte case catch char class const continue
    default do double else enum extends final finally float for goto if
    implements import instanceof int interface long native new package private
    protected public return short static strictfp super switch synchronized
    this throw throws transient try void volatile while""".split()
)

# Longest-match-first operator table.
_OPERATORS = [
    ">>>=",
    ">>>",
    ">>=",
    "<<=",
    "<<",
    ">=",
    "<=",
    "==",
    "!=",
    "&&",
    "||",
    "++",
    "--",
    "+=",
    "-=",
    "*=",
    "/=",
    "&=",
    "|=",
    "^=",
    "%=",
    "->",
    "::",
    "+",
    "-",
    "*",
    "/",
    "%",
    "&",
    "|",
    "^",
    "!",
    "~",
    "=",
    "<",
    ">",
    "?",
    ":",
]
# ">>" is deliberately absent: emitting ">" ">" keeps nested generics like
# List<List<String>> parseable without angle-bracket context tracking; shift
# expressions still lex (as two ">" operators) and remain lossless.

_SEPARATOR_CHARS = "(){}[];,@"
_WS = " \t\r\n\f"


def _is_ident_start(ch: str) -> bool:
    return ch == "_" or ch == "$" or ch.isalpha()


def _is_ident_part(ch: str) -> bool:
    return _is_ident_start(ch) or ch.isdigit()


def lex(source: str) -> List[Token]:
    """Tokenize Java source. Raises a LexError subclass on bad input."""
    tokens: List[Token] = []
    i = 0
    n = len(source)
    line = 1
    col = 1

    def emit(kind: TokenKind, start: int, end: int) -> None:
        nonlocal line, col
        lexeme = source[start:end]
        tokens.append(Token(kind, lexeme, line, col))
        nl = lexeme.count("\n")
        if nl:
            line += nl
            col = len(lexeme) - lexeme.rfind("\n")
        else:
            col += len(lexeme)

    while i < n:
        ch = source[i]

        if ch in _WS:
            j = i
            while j < n and source[j] in _WS:
                j += 1
            emit(TokenKind.WHITESPACE, i, j)
            i = j
            continue

        if ch == "/" and i + 1 < n and source[i + 1] == "/":
            j = source.find("\n", i)
            if j == -1:
                j = n
            emit(TokenKind.LINE_COMMENT, i, j)
            i = j
            continue

        if ch == "/" and i + 1 < n and source[i + 1] == "*":
            j = source.find("*/", i + 2)
            if j == -1:
                raise UnterminatedComment("unterminated block comment", line, col)
            emit(TokenKind.BLOCK_COMMENT, i, j + 2)
            i = j + 2
            continue

        if ch == '"':
            i = _lex_string(source, i, line, col, emit)
            continue

        if ch == "'":
            j = i + 1
            while j < n:
                if source[j] == "\\":
                    j += 2
                    continue
                if source[j] == "'" or source[j] == "\n":
                    break
                j += 1
            if j >= n or source[j] != "'":
                raise UnterminatedString("unterminated character literal", line, col)
            emit(TokenKind.CHAR_LITERAL, i, j + 1)
            i = j + 1
            continue

        if ch.isdigit() or (ch == "." and i + 1 < n and source[i + 1].isdigit()):
            i = _lex_number(source, i, emit)
            continue

        if _is_ident_start(ch):
            j = i
            while j < n and _is_ident_part(source[j]):
                j += 1
            word = source[i:j]
            if word in ("true", "false"):
                kind = TokenKind.BOOLEAN_LITERAL
            elif word == "null":
                kind = TokenKind.NULL_LITERAL
            elif word in KEYWORDS:
                kind = TokenKind.KEYWORD
            else:
                kind = TokenKind.IDENTIFIER
            emit(kind, i, j)
            i = j
            continue

        if ch == ".":
            if source[i : i + 3] == "...":
                emit(TokenKind.SEPARATOR, i, i + 3)
                i += 3
            else:
                emit(TokenKind.SEPARATOR, i, i + 1)
                i += 1
            continue

        if ch in _SEPARATOR_CHARS:
            emit(TokenKind.SEPARATOR, i, i + 1)
            i += 1
            continue

        for op in _OPERATORS:
            if source.startswith(op, i):
                emit(TokenKind.OPERATOR, i, i + len(op))
                i += len(op)
                break
        else:
            raise InvalidCharacter(f"invalid character {ch!r}", line, col)

    return tokens


def _lex_string(source, i, line, col, emit) -> int:
    n = len(source)
    if source[i : i + 3] == '"""':
        j = source.find('"""', i + 3)
        if j == -1:
            raise UnterminatedString("unterminated text block", line, col)
        emit(TokenKind.STRING_LITERAL, i, j + 3)
        return j + 3
    j = i + 1
    while j < n:
        c = source[j]
        if c == "\\":
            j += 2
            continue
        if c == '"':
            emit(TokenKind.STRING_LITERAL, i, j + 1)
            return j + 1
        if c == "\n":
            break
        j += 1
    raise UnterminatedString("unterminated string literal", line, col)


def _lex_number(source, i, emit) -> int:
    n = len(source)
    j = i
    is_float = False
    if source[j] == "0" and j + 1 < n and source[j + 1] in "xX":
        j += 2
        while j < n and (source[j] in "0123456789abcdefABCDEF_." or source[j] in "pP"):
            if source[j] in ".pP":
                is_float = True
            if source[j] in "pP" and j + 1 < n and source[j + 1] in "+-":
                j += 1
            j += 1
    elif source[j] == "0" and j + 1 < n and source[j + 1] in "bB":
        j += 2
        while j < n and source[j] in "01_":
            j += 1
    else:
        while j < n and (source[j].isdigit() or source[j] == "_"):
            j += 1
        # A dot after decimal digits starts the fraction part ("1.5", "1.",
        # ".5" arrives here with i pointing at the dot). Dotted access on a
        # numeric literal is not valid Java, so no ambiguity with member access.
        if j < n and source[j] == "." and not source.startswith("...", j):
            is_float = True
            j += 1
            while j < n and (source[j].isdigit() or source[j] == "_"):
                j += 1
        if source[i] == ".":
            is_float = True
        if j < n and source[j] in "eE":
            k = j + 1
            if k < n and source[k] in "+-":
                k += 1
            if k < n and source[k].isdigit():
                is_float = True
                j = k
                while j < n and (source[j].isdigit() or source[j] == "_"):
                    j += 1
    if j < n and source[j] in "fFdD":
        is_float = True
        j += 1
    elif j < n and source[j] in "lL":
        j += 1
    kind = TokenKind.FLOAT_LITERAL if is_float else TokenKind.INTEGER_LITERAL
    emit(kind, i, j)
    return j


LITERAL_KINDS = frozenset(
    {
        TokenKind.INTEGER_LITERAL,
        TokenKind.FLOAT_LITERAL,
        TokenKind.CHAR_LITERAL,
        TokenKind.STRING_LITERAL,
        TokenKind.BOOLEAN_LITERAL,
        TokenKind.NULL_LITERAL,
    }
)


def strip_comments(source: str) -> str:
    """Remove line and block comments, preserving every other byte."""
    return "".join(
        t.lexeme
        for t in lex(source)
        if t.kind not in (TokenKind.LINE_COMMENT, TokenKind.BLOCK_COMMENT)
    )


def normalize_layout(source: str) -> str:
    """Delete every whitespace character (space, tab, CR, LF, FF).

    Character-level on purpose: string literals are not protected, matching
    the hash-normalization step used before Type I comparison.
    """
    return source.translate({ord(c): None for c in _WS})
