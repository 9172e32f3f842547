"""Method extraction and line-span lookup over lexed Java files."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

from ..errors import NoMatchingMethod, ParseError
from .lexer import KEYWORDS, Token, TokenKind, lex

_MODIFIERS = frozenset(
    """public private protected static final abstract synchronized native
    strictfp default transient volatile""".split()
)

_TYPE_KEYWORDS = frozenset(
    "boolean byte short int long float double char void".split()
)

# Keywords that can precede "(" in statement position; never method names.
_CONTROL = frozenset("if while for switch catch synchronized do return new".split())


@dataclass(frozen=True)
class SourceFile:
    corpus_root: str
    folder_name: str
    file_name: str
    content: str

    @property
    def key(self):
        return (self.folder_name, self.file_name)


@dataclass(frozen=True)
class MethodRecord:
    file: SourceFile
    start_line: int
    end_line: int
    source: str
    language_token_count: int


def language_token_count(source: str) -> int:
    """Non-comment, non-whitespace token count."""
    return sum(1 for t in lex(source) if t.is_significant)


def _line_slice(content: str, start_line: int, end_line: int) -> str:
    lines = content.splitlines(keepends=True)
    return "".join(lines[start_line - 1 : end_line])


def extract_methods(file: SourceFile) -> List[MethodRecord]:
    """Every method and constructor declaration, in source order.

    Works on the significant-token stream with a brace-context stack, so
    nested and anonymous-class methods come out as distinct records.  Not a
    full parser: annotations, generics and lambdas are consumed but only the
    brace structure matters here.
    """
    tokens = lex(file.content)
    sig = [t for t in tokens if t.is_significant]

    # Context per open brace: "class" (members allowed inside) or "code".
    # The virtual outermost context behaves like a class body so that bare
    # method snippets without a wrapping class still extract.
    stack: List[str] = ["class"]
    records: List[MethodRecord] = []
    open_methods: List[tuple] = []  # (sig_start_index, depth at open)

    for idx, tok in enumerate(sig):
        if tok.kind == TokenKind.SEPARATOR and tok.lexeme == "{":
            ctx = _classify_open_brace(sig, idx, stack[-1])
            if ctx == "method":
                start_idx = _signature_start(sig, idx)
                open_methods.append((start_idx, len(stack)))
            stack.append("code" if ctx == "method" else ctx)
        elif tok.kind == TokenKind.SEPARATOR and tok.lexeme == "}":
            if len(stack) <= 1:
                raise ParseError(
                    f"unbalanced braces in {file.folder_name}/{file.file_name}"
                )
            stack.pop()
            if open_methods and open_methods[-1][1] == len(stack):
                start_idx, _ = open_methods.pop()
                start_line = sig[start_idx].line
                end_line = tok.line
                source = _line_slice(file.content, start_line, end_line)
                records.append(
                    MethodRecord(
                        file=file,
                        start_line=start_line,
                        end_line=end_line,
                        source=source,
                        language_token_count=language_token_count(source),
                    )
                )
    if len(stack) != 1:
        raise ParseError(f"unbalanced braces in {file.folder_name}/{file.file_name}")
    records.sort(key=lambda r: (r.start_line, r.end_line))
    return records


def _classify_open_brace(sig: List[Token], idx: int, ctx: str) -> str:
    """Decide what the '{' at sig[idx] opens: method, class or plain code."""
    # Walk back over a throws clause / annotations to the ')' of a parameter
    # list, then to the matching '(' and the name before it.
    j = idx - 1
    if j < 0:
        return "code"
    prev = sig[j]

    # class-like bodies: class/interface/enum/record header or new Foo(...) {
    k = j
    while k >= 0:
        t = sig[k]
        if t.kind == TokenKind.SEPARATOR and t.lexeme in (";", "{", "}", ")"):
            break
        if t.kind == TokenKind.KEYWORD and t.lexeme in ("class", "interface", "enum"):
            return "class"
        if t.kind == TokenKind.IDENTIFIER and t.lexeme == "record" and ctx != "code":
            return "class"
        k -= 1

    if ctx == "code":
        # Inside a body: only an anonymous class 'new Foo(...) {' opens a
        # member context; everything else (blocks, lambdas, initializers)
        # is plain code.
        if prev.kind == TokenKind.SEPARATOR and prev.lexeme == ")":
            open_idx = _match_back(sig, j)
            if open_idx is not None and _is_new_creation(sig, open_idx):
                return "class"
        return "code"

    # In a class body: '{' is a method body iff it closes a signature
    # 'name ( params ) [throws ...]' and not an anonymous-class field init.
    j = _skip_throws_back(sig, j)
    if j < 0 or not (sig[j].kind == TokenKind.SEPARATOR and sig[j].lexeme == ")"):
        return "code"  # static/instance initializer or array initializer
    open_idx = _match_back(sig, j)
    if open_idx is None or open_idx == 0:
        return "code"
    name = sig[open_idx - 1]
    if name.kind != TokenKind.IDENTIFIER:
        return "code"
    if _is_new_creation(sig, open_idx):
        return "class"  # anonymous class in a field initializer
    if name.lexeme in _CONTROL:
        return "code"
    return "method"


def _match_back(sig: List[Token], close_idx: int) -> Optional[int]:
    depth = 0
    for k in range(close_idx, -1, -1):
        t = sig[k]
        if t.kind == TokenKind.SEPARATOR:
            if t.lexeme == ")":
                depth += 1
            elif t.lexeme == "(":
                depth -= 1
                if depth == 0:
                    return k
    return None


def _skip_throws_back(sig: List[Token], j: int) -> int:
    """From just before '{', walk back over an optional 'throws A, B.C'."""
    k = j
    saw_throws = False
    while k >= 0:
        t = sig[k]
        if t.kind == TokenKind.KEYWORD and t.lexeme == "throws":
            saw_throws = True
            return k - 1
        if t.kind == TokenKind.IDENTIFIER or (
            t.kind == TokenKind.SEPARATOR and t.lexeme in (",", ".")
        ):
            k -= 1
            continue
        break
    return j if not saw_throws else k


def _is_new_creation(sig: List[Token], open_paren_idx: int) -> bool:
    """True if the '(' at open_paren_idx belongs to 'new Qualified.Name('."""
    k = open_paren_idx - 1
    while k >= 0:
        t = sig[k]
        if t.kind == TokenKind.IDENTIFIER or (
            t.kind == TokenKind.SEPARATOR and t.lexeme == "."
        ):
            k -= 1
            continue
        if t.kind == TokenKind.OPERATOR and t.lexeme in ("<", ">"):
            k -= 1  # generic arguments in 'new ArrayList<Foo>('
            continue
        return t.kind == TokenKind.KEYWORD and t.lexeme == "new"
    return False


def _signature_start(sig: List[Token], brace_idx: int) -> int:
    """Index of the first token of the declaration whose body opens here."""
    j = brace_idx - 1
    # back over throws clause to ')'
    while j >= 0 and not (
        sig[j].kind == TokenKind.SEPARATOR and sig[j].lexeme == ")"
    ):
        j -= 1
    open_idx = _match_back(sig, j)
    k = (open_idx or 0) - 1  # the method name
    k -= 1
    # back over return type, generics, annotations, modifiers
    while k >= 0:
        t = sig[k]
        if t.kind == TokenKind.KEYWORD and (
            t.lexeme in _MODIFIERS or t.lexeme in _TYPE_KEYWORDS
        ):
            k -= 1
        elif t.kind == TokenKind.IDENTIFIER:
            k -= 1
        elif t.kind == TokenKind.SEPARATOR and t.lexeme in (".", "[", "]", "@", ","):
            k -= 1
        elif t.kind == TokenKind.OPERATOR and t.lexeme in ("<", ">", "?"):
            k -= 1
        elif t.kind == TokenKind.KEYWORD and t.lexeme in ("extends", "super"):
            k -= 1
        else:
            break
    return k + 1


def locate_method(
    methods: List[MethodRecord],
    start_line: int,
    end_line: int,
    min_overlap: float = 0.7,
) -> MethodRecord:
    """Best line-overlap match for a requested span.

    Accepts a method when shared-lines / union-lines >= min_overlap;
    ties break by larger overlap ratio, then earlier start_line.
    """
    best = None
    best_key = None
    for m in methods:
        shared = min(m.end_line, end_line) - max(m.start_line, start_line) + 1
        if shared <= 0:
            continue
        union = max(m.end_line, end_line) - min(m.start_line, start_line) + 1
        ratio = shared / union
        if ratio < min_overlap:
            continue
        key = (-ratio, m.start_line)
        if best_key is None or key < best_key:
            best, best_key = m, key
    if best is None:
        raise NoMatchingMethod(
            f"no method matching lines {start_line}-{end_line} "
            f"at overlap >= {min_overlap}"
        )
    return best
