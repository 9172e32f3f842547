from .lexer import Token, TokenKind, lex, strip_comments, normalize_layout
from .methods import (
    SourceFile,
    MethodRecord,
    extract_methods,
    locate_method,
    language_token_count,
)
from .summary import MethodSummary, CallSite, ActionEvent, parse_method

__all__ = [
    "Token",
    "TokenKind",
    "lex",
    "strip_comments",
    "normalize_layout",
    "SourceFile",
    "MethodRecord",
    "extract_methods",
    "locate_method",
    "language_token_count",
    "MethodSummary",
    "CallSite",
    "ActionEvent",
    "parse_method",
]
