"""Statement/expression summarizer for a single Java method.

This is a method-body analyzer, not a compiler front end: it recovers the
statement tree, expression operator/operand classification, call sites,
field and array accesses, declared/referenced variables and type
references.  Generics, lambdas and annotations are consumed without
crashing; constructs outside the grammar are summarized conservatively as
expressions rather than rejected.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from ..errors import ParseError
from .lexer import LITERAL_KINDS, Token, TokenKind, lex
from .methods import MethodRecord

_PRIMITIVES = frozenset(
    "boolean byte short int long float double char void".split()
)
_MODIFIERS = frozenset("final public private protected static volatile transient".split())

# Keywords that participate in Halstead operator counts when they appear
# as statements; expression-level operators are the operator tokens plus
# 'new' and 'instanceof'.
_STMT_OPERATOR_KEYWORDS = frozenset(
    """if else for while do switch case default return throw break continue
    try catch finally synchronized assert""".split()
)

_UNARY_ONLY = frozenset(("++", "--", "!", "~"))


@dataclass
class CallSite:
    name: str
    arg_count: int
    receiver: str  # "local" (bare, this., super.) or "external"


@dataclass
class ActionEvent:
    kind: str  # "call" | "field" | "array" | "array_binary"
    name: str  # callee/field simple name, or the array sentinel


@dataclass
class Statement:
    kind: str
    children: List["Statement"] = field(default_factory=list)


@dataclass
class Expression:
    operators: List[str] = field(default_factory=list)
    operands: List[str] = field(default_factory=list)


@dataclass
class MethodSummary:
    statements: List[Statement] = field(default_factory=list)
    expressions: List[Expression] = field(default_factory=list)
    call_sites: List[CallSite] = field(default_factory=list)
    field_accesses: List[str] = field(default_factory=list)
    array_accesses: List[str] = field(default_factory=list)  # sentinel kinds
    action_events: List[ActionEvent] = field(default_factory=list)
    declared_variables: List[str] = field(default_factory=list)
    referenced_variables: List[str] = field(default_factory=list)
    referenced_classes: List[str] = field(default_factory=list)
    thrown_exception_types: List[str] = field(default_factory=list)
    referenced_exception_types: List[str] = field(default_factory=list)
    casts: List[str] = field(default_factory=list)
    parameters: List[str] = field(default_factory=list)
    keyword_operators: List[str] = field(default_factory=list)
    literal_counts: Counter = field(default_factory=Counter)
    ternary_count: int = 0
    case_count: int = 0
    catch_count: int = 0

    # derived statement-tree figures, filled at the end of parsing
    statement_count: int = 0
    max_nesting: int = 0
    loop_count: int = 0


def parse_method(record: MethodRecord) -> MethodSummary:
    toks = [t for t in lex(record.source) if t.is_significant]
    return _Parser(toks).run()


def parse_method_source(source: str) -> MethodSummary:
    """Summarize a bare method source string (convenience for tests)."""
    toks = [t for t in lex(source) if t.is_significant]
    return _Parser(toks).run()


class _Parser:
    def __init__(self, toks: List[Token]):
        self.toks = toks
        self.s = MethodSummary()
        self._declared = set()

    # -- small helpers ----------------------------------------------------

    def _lex_at(self, i: int) -> str:
        return self.toks[i].lexeme if 0 <= i < len(self.toks) else ""

    def _kind_at(self, i: int) -> Optional[TokenKind]:
        return self.toks[i].kind if 0 <= i < len(self.toks) else None

    def _match_forward(self, i: int) -> int:
        """Index of the token closing the bracket opened at i."""
        openers = {"(": ")", "[": "]", "{": "}"}
        close = openers[self.toks[i].lexeme]
        opener = self.toks[i].lexeme
        depth = 0
        for k in range(i, len(self.toks)):
            lx = self.toks[k].lexeme
            if self.toks[k].kind == TokenKind.SEPARATOR:
                if lx == opener:
                    depth += 1
                elif lx == close:
                    depth -= 1
                    if depth == 0:
                        return k
        raise ParseError(f"unbalanced {opener!r}")

    # -- entry ------------------------------------------------------------

    def run(self) -> MethodSummary:
        body_open = self._find_body_open()
        self._parse_signature(body_open)
        body_close = self._match_forward(body_open)
        self.s.statements = self._parse_statements(body_open + 1, body_close)
        self._finalize()
        return self.s

    def _find_body_open(self) -> int:
        depth = 0
        for i, t in enumerate(self.toks):
            if t.kind == TokenKind.SEPARATOR:
                if t.lexeme == "(":
                    depth += 1
                elif t.lexeme == ")":
                    depth -= 1
                elif t.lexeme == "{" and depth == 0:
                    return i
        raise ParseError("no method body found")

    # -- signature --------------------------------------------------------

    def _parse_signature(self, body_open: int) -> None:
        # parameter list: last '(' ... ')' pair before the body that is
        # preceded by an identifier (the method name)
        paren = None
        for i in range(body_open - 1, -1, -1):
            if self._lex_at(i) == ")" and self._kind_at(i) == TokenKind.SEPARATOR:
                j = self._match_back(i)
                if j > 0 and self._kind_at(j - 1) == TokenKind.IDENTIFIER:
                    paren = (j, i)
                break
        if paren is None:
            raise ParseError("no parameter list in signature")
        lo, hi = paren
        for part in self._split_top_commas(lo + 1, hi):
            plo, phi = part
            name = self._last_identifier(plo, phi)
            if name:
                self.s.parameters.append(name)
                self._declared.add(name)
            self._collect_type_names(plo, phi)
        # throws clause between ')' and '{'
        k = hi + 1
        if self._lex_at(k) == "throws":
            names = self._simple_type_names(k + 1, body_open)
            self.s.thrown_exception_types.extend(names)
            self.s.referenced_exception_types.extend(names)
            for n in names:
                self._class_ref(n)

    def _match_back(self, close_idx: int) -> int:
        depth = 0
        for k in range(close_idx, -1, -1):
            if self.toks[k].kind == TokenKind.SEPARATOR:
                if self.toks[k].lexeme == ")":
                    depth += 1
                elif self.toks[k].lexeme == "(":
                    depth -= 1
                    if depth == 0:
                        return k
        raise ParseError("unbalanced ')'")

    def _split_top_commas(self, lo: int, hi: int) -> List[Tuple[int, int]]:
        parts = []
        depth = 0
        angle = 0
        start = lo
        for k in range(lo, hi):
            t = self.toks[k]
            if t.kind == TokenKind.SEPARATOR:
                if t.lexeme in "([{":
                    depth += 1
                elif t.lexeme in ")]}":
                    depth -= 1
                elif t.lexeme == "," and depth == 0 and angle == 0:
                    parts.append((start, k))
                    start = k + 1
            elif t.kind == TokenKind.OPERATOR:
                if t.lexeme == "<":
                    angle += 1
                elif t.lexeme == ">" and angle > 0:
                    angle -= 1
        if start < hi:
            parts.append((start, hi))
        return parts

    def _last_identifier(self, lo: int, hi: int) -> Optional[str]:
        for k in range(hi - 1, lo - 1, -1):
            if self._kind_at(k) == TokenKind.IDENTIFIER:
                return self._lex_at(k)
        return None

    def _simple_type_names(self, lo: int, hi: int) -> List[str]:
        """Simple names of a comma-separated list of (qualified) types."""
        names = []
        for plo, phi in self._split_top_commas(lo, hi):
            name = self._last_identifier(plo, phi)
            if name:
                names.append(name)
        return names

    def _collect_type_names(self, lo: int, hi: int) -> None:
        """Class names appearing in a type position (decl/param)."""
        for k in range(lo, hi):
            t = self.toks[k]
            if t.kind == TokenKind.IDENTIFIER and self._lex_at(k + 1) != "(":
                # skip the variable name itself: it is the last identifier
                if k != self._last_index_of_last_identifier(lo, hi):
                    self._class_ref(t.lexeme)

    def _last_index_of_last_identifier(self, lo: int, hi: int) -> int:
        for k in range(hi - 1, lo - 1, -1):
            if self._kind_at(k) == TokenKind.IDENTIFIER:
                return k
        return -1

    def _class_ref(self, name: str) -> None:
        self.s.referenced_classes.append(name)

    # -- statements -------------------------------------------------------

    def _parse_statements(self, lo: int, hi: int) -> List[Statement]:
        stmts = []
        i = lo
        while i < hi:
            stmt, i = self._parse_statement(i, hi)
            if stmt is not None:
                stmts.append(stmt)
        return stmts

    def _parse_statement(self, i: int, hi: int) -> Tuple[Optional[Statement], int]:
        lx = self._lex_at(i)
        kind = self._kind_at(i)

        if lx == ";":
            return None, i + 1

        if lx == "{":
            close = self._match_forward(i)
            return Statement("block", self._parse_statements(i + 1, close)), close + 1

        if kind == TokenKind.KEYWORD:
            if lx == "if":
                return self._parse_if(i, hi)
            if lx == "while":
                return self._parse_while(i, hi)
            if lx == "do":
                return self._parse_do(i, hi)
            if lx == "for":
                return self._parse_for(i, hi)
            if lx == "switch":
                return self._parse_switch(i, hi)
            if lx == "try":
                return self._parse_try(i, hi)
            if lx == "synchronized" and self._lex_at(i + 1) == "(":
                self._stmt_op("synchronized")
                close = self._match_forward(i + 1)
                self._scan_expr(i + 2, close)
                inner, ni = self._parse_statement(close + 1, hi)
                return Statement("sync", [inner] if inner else []), ni
            if lx in ("return", "throw", "assert"):
                self._stmt_op(lx)
                end = self._stmt_end(i + 1, hi)
                if lx == "throw" and self._lex_at(i + 1) == "new":
                    name = self._last_identifier_before_paren(i + 2, end)
                    if name:
                        self.s.thrown_exception_types.append(name)
                if end > i + 1:
                    self._scan_expr(i + 1, end)
                kind_name = {"return": "return", "throw": "throw", "assert": "expr-stmt"}[lx]
                return Statement(kind_name), end + 1
            if lx in ("break", "continue"):
                self._stmt_op(lx)
                end = self._stmt_end(i + 1, hi)
                return Statement(lx), end + 1
            # declarations starting with a primitive or 'final'
            if lx in _PRIMITIVES or lx in _MODIFIERS:
                return self._parse_decl_or_expr(i, hi)
            # class/interface declared inside a method body: consume whole
            if lx in ("class", "interface", "enum"):
                k = i
                while k < hi and self._lex_at(k) != "{":
                    k += 1
                close = self._match_forward(k)
                return Statement("expr-stmt"), close + 1

        # label: identifier ':'
        if kind == TokenKind.IDENTIFIER and self._lex_at(i + 1) == ":":
            return self._parse_statement(i + 2, hi)

        if lx == "@":  # stray annotation on a local declaration
            j = i + 2
            if self._lex_at(j) == "(":
                j = self._match_forward(j) + 1
            return self._parse_statement(j, hi)

        return self._parse_decl_or_expr(i, hi)

    def _last_identifier_before_paren(self, lo: int, hi: int) -> Optional[str]:
        for k in range(lo, hi):
            if self._lex_at(k) == "(":
                return self._last_identifier(lo, k)
        return self._last_identifier(lo, hi)

    def _stmt_op(self, word: str) -> None:
        # statement keywords join the Halstead operator tally
        self.s.keyword_operators.append(word)

    def _stmt_end(self, i: int, hi: int) -> int:
        """Index of the ';' terminating a simple statement starting at i."""
        depth = 0
        k = i
        while k < hi:
            t = self.toks[k]
            if t.kind == TokenKind.SEPARATOR:
                if t.lexeme in "([{":
                    depth += 1
                elif t.lexeme in ")]}":
                    depth -= 1
                elif t.lexeme == ";" and depth == 0:
                    return k
            k += 1
        return hi

    def _parse_if(self, i: int, hi: int):
        self._stmt_op("if")
        close = self._match_forward(i + 1)
        self._scan_expr(i + 2, close)
        then_stmt, ni = self._parse_statement(close + 1, hi)
        children = [then_stmt] if then_stmt else []
        if self._lex_at(ni) == "else":
            self._stmt_op("else")
            else_stmt, ni = self._parse_statement(ni + 1, hi)
            if else_stmt:
                children.append(else_stmt)
        return Statement("if", children), ni

    def _parse_while(self, i: int, hi: int):
        self._stmt_op("while")
        close = self._match_forward(i + 1)
        self._scan_expr(i + 2, close)
        body, ni = self._parse_statement(close + 1, hi)
        return Statement("while", [body] if body else []), ni

    def _parse_do(self, i: int, hi: int):
        self._stmt_op("do")
        body, ni = self._parse_statement(i + 1, hi)
        # 'while ( expr ) ;'
        if self._lex_at(ni) == "while":
            self._stmt_op("while")
            close = self._match_forward(ni + 1)
            self._scan_expr(ni + 2, close)
            ni = close + 1
            if self._lex_at(ni) == ";":
                ni += 1
        return Statement("do", [body] if body else []), ni

    def _parse_for(self, i: int, hi: int):
        self._stmt_op("for")
        close = self._match_forward(i + 1)
        inner = self.toks[i + 2 : close]
        colon = self._find_top(":", i + 2, close)
        if colon is not None:
            # enhanced for: 'for (Type name : expr)'
            name = self._last_identifier(i + 2, colon)
            if name:
                self._declared.add(name)
                self.s.declared_variables.append(name)
            self._collect_type_names(i + 2, colon)
            self._scan_expr(colon + 1, close)
        else:
            semi1 = self._find_top(";", i + 2, close)
            semi2 = self._find_top(";", (semi1 or i + 2) + 1, close) if semi1 is not None else None
            if semi1 is None:
                self._scan_expr(i + 2, close)
            else:
                self._parse_decl_clause(i + 2, semi1)
                if semi2 is not None:
                    if semi2 > semi1 + 1:
                        self._scan_expr(semi1 + 1, semi2)
                    if close > semi2 + 1:
                        self._scan_expr(semi2 + 1, close)
        body, ni = self._parse_statement(close + 1, hi)
        return Statement("for", [body] if body else []), ni

    def _find_top(self, lexeme: str, lo: int, hi: int) -> Optional[int]:
        depth = 0
        angle_guard = 0
        for k in range(lo, hi):
            t = self.toks[k]
            if t.kind == TokenKind.SEPARATOR:
                if t.lexeme in "([{":
                    depth += 1
                elif t.lexeme in ")]}":
                    depth -= 1
                elif t.lexeme == lexeme and depth == 0:
                    return k
            elif t.kind == TokenKind.OPERATOR and t.lexeme == lexeme and depth == 0:
                if lexeme == ":" and self._lex_at(k - 1) == "?":
                    continue
                return k
        return None

    def _parse_switch(self, i: int, hi: int):
        self._stmt_op("switch")
        close = self._match_forward(i + 1)
        self._scan_expr(i + 2, close)
        body_open = close + 1
        body_close = self._match_forward(body_open)
        children = []
        k = body_open + 1
        while k < body_close:
            lx = self._lex_at(k)
            if lx == "case":
                self._stmt_op("case")
                self.s.case_count += 1
                colon = self._find_top(":", k + 1, body_close)
                arrow = self._find_top("->", k + 1, body_close)
                end = min(x for x in (colon, arrow) if x is not None) if (colon is not None or arrow is not None) else k + 1
                self._scan_expr(k + 1, end)
                k = end + 1
            elif lx == "default":
                self._stmt_op("default")
                k += 2  # skip ':' or '->'
            else:
                stmt, k = self._parse_statement(k, body_close)
                if stmt is not None:
                    children.append(stmt)
        return Statement("switch", children), body_close + 1

    def _parse_try(self, i: int, hi: int):
        self._stmt_op("try")
        k = i + 1
        if self._lex_at(k) == "(":
            close = self._match_forward(k)
            for rlo, rhi in self._split_on([";"], k + 1, close):
                if rhi > rlo:
                    self._parse_decl_clause(rlo, rhi)
            k = close + 1
        children = []
        if self._lex_at(k) == "{":
            close = self._match_forward(k)
            children.append(Statement("block", self._parse_statements(k + 1, close)))
            k = close + 1
        while self._lex_at(k) == "catch":
            self._stmt_op("catch")
            self.s.catch_count += 1
            pclose = self._match_forward(k + 1)
            names = []
            for part in self._split_on(["|"], k + 2, pclose):
                plo, phi = part
                # last identifier is the exception variable; the rest a type
                var = self._last_identifier(plo, phi)
                type_name = self._last_identifier(plo, phi - 1) if phi - plo > 1 else None
                if var and phi - plo == 1:
                    type_name, var = var, None
                if var:
                    self._declared.add(var)
                    self.s.declared_variables.append(var)
                if type_name:
                    names.append(type_name)
            for n in names:
                self.s.referenced_exception_types.append(n)
                self._class_ref(n)
            bclose = self._match_forward(pclose + 1)
            children.append(
                Statement("catch", self._parse_statements(pclose + 2, bclose))
            )
            k = bclose + 1
        if self._lex_at(k) == "finally":
            self._stmt_op("finally")
            bclose = self._match_forward(k + 1)
            children.append(
                Statement("finally", self._parse_statements(k + 2, bclose))
            )
            k = bclose + 1
        return Statement("try", children), k

    def _split_on(self, lexemes, lo, hi):
        parts = []
        depth = 0
        start = lo
        for k in range(lo, hi):
            t = self.toks[k]
            if t.kind == TokenKind.SEPARATOR and t.lexeme in "([{":
                depth += 1
            elif t.kind == TokenKind.SEPARATOR and t.lexeme in ")]}":
                depth -= 1
            elif t.lexeme in lexemes and depth == 0:
                parts.append((start, k))
                start = k + 1
        parts.append((start, hi))
        return parts

    # -- declarations vs expression statements ----------------------------

    def _parse_decl_or_expr(self, i: int, hi: int):
        end = self._stmt_end(i, hi)
        if self._looks_like_decl(i, end):
            self._parse_decl_clause(i, end)
            return Statement("decl"), end + 1
        if end > i:
            self._scan_expr(i, end)
        return Statement("expr-stmt"), end + 1

    def _looks_like_decl(self, lo: int, hi: int) -> bool:
        k = lo
        while self._lex_at(k) in ("final",):
            k += 1
        t = self._kind_at(k)
        if t == TokenKind.KEYWORD and self._lex_at(k) in _PRIMITIVES:
            k += 1
        elif t == TokenKind.IDENTIFIER:
            k += 1
            while self._lex_at(k) == "." and self._kind_at(k + 1) == TokenKind.IDENTIFIER:
                k += 2
            if self._lex_at(k) == "<":
                k = self._skip_angles(k, hi)
        else:
            return False
        while self._lex_at(k) == "[" and self._lex_at(k + 1) == "]":
            k += 2
        if self._kind_at(k) != TokenKind.IDENTIFIER:
            return False
        nxt = self._lex_at(k + 1)
        return nxt in ("=", ";", ",", "[", ":") or k + 1 == hi

    def _skip_angles(self, k: int, hi: int) -> int:
        depth = 0
        while k < hi:
            lx = self._lex_at(k)
            if lx == "<":
                depth += 1
            elif lx == ">":
                depth -= 1
                if depth == 0:
                    return k + 1
            elif lx in (";", ")"):
                return k
            k += 1
        return k

    def _parse_decl_clause(self, lo: int, hi: int) -> None:
        """'Type a = e1, b = e2' (also try-resources and for-init)."""
        if not self._looks_like_decl(lo, hi):
            if hi > lo:
                self._scan_expr(lo, hi)
            return
        # find where the type ends: reuse the walk from _looks_like_decl
        k = lo
        while self._lex_at(k) in ("final",):
            k += 1
        if self._kind_at(k) == TokenKind.KEYWORD:
            k += 1
        else:
            k += 1
            while self._lex_at(k) == "." and self._kind_at(k + 1) == TokenKind.IDENTIFIER:
                k += 2
            if self._lex_at(k) == "<":
                k = self._skip_angles(k, hi)
        while self._lex_at(k) == "[" and self._lex_at(k + 1) == "]":
            k += 2
        self._collect_type_names(lo, k + 1)
        for plo, phi in self._split_top_commas(k, hi):
            if self._kind_at(plo) != TokenKind.IDENTIFIER:
                continue
            name = self._lex_at(plo)
            self._declared.add(name)
            self.s.declared_variables.append(name)
            eq = self._find_top("=", plo, phi)
            if eq is not None and phi > eq + 1:
                self._scan_expr(eq + 1, phi)

    # -- expressions ------------------------------------------------------

    def _scan_expr(self, lo: int, hi: int) -> None:
        """Linear scan of an expression region, collecting everything."""
        if hi <= lo:
            return
        expr = Expression()
        self.s.expressions.append(expr)
        self._scan_region(lo, hi, expr)

    def _scan_region(self, lo: int, hi: int, expr: Expression) -> None:
        k = lo
        while k < hi:
            t = self.toks[k]
            lx = t.lexeme

            if t.kind == TokenKind.KEYWORD and lx == "new":
                expr.operators.append("new")
                k = self._scan_new(k, hi, expr)
                continue

            if t.kind == TokenKind.KEYWORD and lx == "instanceof":
                expr.operators.append("instanceof")
                # right side is a type
                j = k + 1
                name = None
                while j < hi and (
                    self._kind_at(j) == TokenKind.IDENTIFIER or self._lex_at(j) == "."
                ):
                    if self._kind_at(j) == TokenKind.IDENTIFIER:
                        name = self._lex_at(j)
                    j += 1
                if name:
                    self._class_ref(name)
                k = j
                continue

            if t.kind == TokenKind.OPERATOR:
                expr.operators.append(lx)
                if lx == "?":
                    self.s.ternary_count += 1
                k += 1
                continue

            if t.kind in LITERAL_KINDS:
                expr.operands.append(lx)
                self.s.literal_counts[t.kind] += 1
                k += 1
                continue

            if t.kind == TokenKind.KEYWORD and lx in ("this", "super"):
                expr.operands.append(lx)
                k += 1
                continue

            if t.kind == TokenKind.IDENTIFIER:
                expr.operands.append(lx)
                if lx in self._declared:
                    self.s.referenced_variables.append(lx)
                if self._lex_at(k + 1) == "(":
                    self._record_call(k, expr)
                elif self._lex_at(k - 1) == "." and not self._in_type_chain(k):
                    self._record_field(k)
                k += 1
                continue

            if lx == "(" and t.kind == TokenKind.SEPARATOR:
                cast = self._try_cast(k, hi)
                if cast is not None:
                    type_name, after = cast
                    self.s.casts.append(type_name)
                    self._class_ref(type_name)
                    expr.operators.append("(cast)")
                    k = after
                    continue
                k += 1
                continue

            if lx == "[" and t.kind == TokenKind.SEPARATOR:
                if self._is_array_access(k):
                    close = self._match_forward(k)
                    sentinel = (
                        "ArrayAccessBinary"
                        if self._index_has_binary_op(k + 1, close)
                        else "ArrayAccess"
                    )
                    self.s.array_accesses.append(sentinel)
                    self.s.action_events.append(ActionEvent("array", sentinel))
                k += 1
                continue

            k += 1

    def _scan_new(self, k: int, hi: int, expr: Expression) -> int:
        """Consume 'new Qualified.Name<...>' and handle ctor/array forms."""
        j = k + 1
        name = None
        while j < hi:
            if self._kind_at(j) == TokenKind.IDENTIFIER:
                name = self._lex_at(j)
                j += 1
            elif self._lex_at(j) == ".":
                j += 1
            elif self._lex_at(j) == "<":
                j = self._skip_angles(j, hi)
            elif self._kind_at(j) == TokenKind.KEYWORD and self._lex_at(j) in _PRIMITIVES:
                name = self._lex_at(j)
                j += 1
            else:
                break
        if name and name not in _PRIMITIVES:
            self._class_ref(name)
        if self._lex_at(j) == "[":
            # array creation: scan dimension expressions, but the brackets
            # are not array *accesses*
            while self._lex_at(j) == "[":
                close = self._match_forward(j)
                if close > j + 1:
                    self._scan_region(j + 1, close, expr)
                j = close + 1
            return j
        return j  # constructor arg list is scanned by the main loop

    def _record_call(self, k: int, expr: Expression) -> None:
        name = self._lex_at(k)
        close = self._match_forward(k + 1)
        args = self._split_top_commas(k + 2, close)
        arg_count = len([p for p in args if p[1] > p[0]])
        prev = self._lex_at(k - 1)
        if prev == ".":
            qualifier = self._lex_at(k - 2)
            qk = self._kind_at(k - 2)
            receiver = (
                "local"
                if qk == TokenKind.KEYWORD and qualifier in ("this", "super")
                else "external"
            )
        else:
            receiver = "local"
        self.s.call_sites.append(CallSite(name, arg_count, receiver))
        self.s.action_events.append(ActionEvent("call", name))

    def _record_field(self, k: int) -> None:
        name = self._lex_at(k)
        self.s.field_accesses.append(name)
        self.s.action_events.append(ActionEvent("field", name))

    def _in_type_chain(self, k: int) -> bool:
        """True when toks[k] is part of a qualified type after 'new'."""
        j = k - 1
        while j >= 0:
            t = self.toks[j]
            if t.kind == TokenKind.IDENTIFIER or t.lexeme == ".":
                j -= 1
                continue
            return t.kind == TokenKind.KEYWORD and t.lexeme == "new"
        return False

    def _try_cast(self, k: int, hi: int) -> Optional[Tuple[str, int]]:
        """Detect '(Type) operand' at k; returns (type name, index after ')')."""
        close = self._match_forward(k)
        if close >= hi:
            return None
        inner = range(k + 1, close)
        name = None
        j = k + 1
        while j < close:
            t = self.toks[j]
            if t.kind == TokenKind.IDENTIFIER:
                name = t.lexeme
                j += 1
            elif t.kind == TokenKind.KEYWORD and t.lexeme in _PRIMITIVES:
                name = t.lexeme
                j += 1
            elif t.lexeme == ".":
                j += 1
            elif t.lexeme == "[" and self._lex_at(j + 1) == "]":
                j += 2
            elif t.lexeme == "<":
                j = self._skip_angles(j, close)
            else:
                return None
        if name is None:
            return None
        nxt = self.toks[close + 1] if close + 1 < len(self.toks) else None
        if nxt is None:
            return None
        castable_follow = (
            nxt.kind in (TokenKind.IDENTIFIER,)
            or nxt.kind in LITERAL_KINDS
            or nxt.lexeme in ("(", "!", "~")
            or (nxt.kind == TokenKind.KEYWORD and nxt.lexeme in ("this", "super", "new"))
        )
        if not castable_follow:
            return None
        # require either a primitive/array type or an uppercase-ish name to
        # avoid treating '(x) + y' parenthesized expressions as casts
        if name not in _PRIMITIVES and not name[:1].isupper():
            return None
        return name, close + 1

    def _is_array_access(self, k: int) -> bool:
        if self._lex_at(k + 1) == "]":
            return False  # type brackets
        prevk = self._kind_at(k - 1)
        prev = self._lex_at(k - 1)
        if not (
            prevk == TokenKind.IDENTIFIER
            or prev in (")", "]")
            or (prevk == TokenKind.KEYWORD and prev in ("this",))
        ):
            return False
        if prevk == TokenKind.IDENTIFIER and self._in_type_chain(k - 1):
            return False
        return True

    def _index_has_binary_op(self, lo: int, hi: int) -> bool:
        for k in range(lo, hi):
            t = self.toks[k]
            if t.kind == TokenKind.OPERATOR and t.lexeme not in _UNARY_ONLY:
                prev = self.toks[k - 1]
                if prev.kind in (TokenKind.IDENTIFIER,) or prev.kind in LITERAL_KINDS or prev.lexeme in (")", "]"):
                    return True
        return False

    # -- finalize ----------------------------------------------------------

    def _finalize(self) -> None:
        s = self.s

        def walk(stmts: List[Statement], depth: int):
            for st in stmts:
                if st.kind in ("block", "catch", "finally"):
                    # braces are structure, not statements; children keep depth
                    walk(st.children, depth)
                    continue
                s.statement_count += 1
                s.max_nesting = max(s.max_nesting, depth)
                if st.kind in ("for", "while", "do"):
                    s.loop_count += 1
                walk(st.children, depth + 1)

        walk(s.statements, 0)
