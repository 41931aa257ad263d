"""Recursive-descent parser producing cmod syntax trees.

Concrete syntax notes:

* ``D => G`` is the implication statement; ``/n => G`` and ``Name => G``
  are module implications; ``p = new int[E] => G`` is the allocation
  scope. The three are separated by lookahead on the tokens before the
  arrow.
* An arrow's body extends as far as possible (through ``;``) and is
  closed by the matching parenthesis, so compound bodies are written in
  parentheses.
* ``and`` conjoins clauses inside a declaration; clause formals are
  universally closed by the parser, leftmost formal outermost.
* ``macro /n = { D } and /m = { D } in G`` scopes macro definitions to a
  statement; without ``in`` the definitions are top level.
* ``module N. D end`` names a module at top level.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import ast
from .errors import ParseError
from .lexer import Token, tokenize

_STATEMENT_START_KEYWORDS = {"true", "if", "switch", "print", "macro"}
_CMP_OPS = ("==", "!=", "<", "<=", ">", ">=")


@dataclass(frozen=True)
class SourceProgram:
    module_defs: tuple[tuple[str, ast.Declaration], ...]
    macro_defs: tuple[ast.MacroDef, ...]
    main: ast.Statement

    def seeds(self) -> list[ast.MacroDef]:
        """Macro-environment seeds: modules first, then macros, in source
        order; later entries shadow earlier ones."""
        out = [ast.MacroDef(name, decl) for name, decl in self.module_defs]
        out.extend(self.macro_defs)
        return out


def parse_source(source: str) -> SourceProgram:
    return parse_program(tokenize(source))


def parse_program(tokens: list[Token]) -> SourceProgram:
    return _Parser(tokens).parse_program()


def parse_repl_input(source: str) -> tuple[list[ast.MacroDef], ast.Statement | None]:
    """Parse one REPL entry: any number of module/macro definitions,
    optionally followed by a statement."""
    return _Parser(tokenize(source)).parse_repl_input()


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0
        self._handles: list[str] = []

    # -- token helpers ------------------------------------------------

    def _peek(self, offset: int = 0) -> Token:
        i = min(self.pos + offset, len(self.tokens) - 1)
        return self.tokens[i]

    def _advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def _check(self, lexeme: str, offset: int = 0) -> bool:
        tok = self._peek(offset)
        return tok.kind in ("punct", "keyword") and tok.lexeme == lexeme

    def _accept(self, lexeme: str) -> bool:
        if self._check(lexeme):
            self._advance()
            return True
        return False

    def _error(self, expected: str, tok: Token | None = None) -> ParseError:
        tok = tok or self._peek()
        return ParseError(tok.line, tok.column, expected, str(tok), at_eof=tok.kind == "eof")

    def _expect(self, lexeme: str) -> Token:
        if not self._check(lexeme):
            raise self._error(f"'{lexeme}'")
        return self._advance()

    def _expect_ident(self, what: str = "identifier") -> Token:
        tok = self._peek()
        if tok.kind != "ident":
            raise self._error(what)
        return self._advance()

    # -- program structure --------------------------------------------

    def parse_program(self) -> SourceProgram:
        module_defs, macro_defs, main = self._parse_items(need_main=True)
        assert main is not None
        if self._peek().kind != "eof":
            raise self._error("end of input after the main statement")
        return SourceProgram(tuple(module_defs), tuple(macro_defs), main)

    def parse_repl_input(self) -> tuple[list[ast.MacroDef], ast.Statement | None]:
        module_defs, macro_defs, main = self._parse_items(need_main=False)
        if self._peek().kind != "eof":
            raise self._error("end of input")
        seeds = [ast.MacroDef(name, decl) for name, decl in module_defs]
        seeds.extend(macro_defs)
        return seeds, main

    def _parse_items(self, need_main: bool):
        module_defs: list[tuple[str, ast.Declaration]] = []
        macro_defs: list[ast.MacroDef] = []
        main: ast.Statement | None = None
        while True:
            if self._check("module"):
                name_tok, decl = self._parse_module_def()
                if any(name == name_tok.lexeme for name, _ in module_defs):
                    raise self._error(f"a module name other than '{name_tok.lexeme}' (already defined)", name_tok)
                module_defs.append((name_tok.lexeme, decl))
                continue
            if self._check("macro"):
                self._advance()
                defs = self._parse_macro_defs()
                if self._accept("in"):
                    main = ast.MacroScope(defs, self.parse_statement())
                    break
                macro_defs.extend(defs)
                continue
            break
        if main is None and (need_main or self._peek().kind != "eof"):
            main = self.parse_statement()
        return module_defs, macro_defs, main

    def _parse_module_def(self) -> tuple[Token, ast.Declaration]:
        self._expect("module")
        name_tok = self._expect_ident("module name")
        self._expect(".")
        decl = self.parse_declaration()
        self._expect("end")
        return name_tok, decl

    def _parse_macro_defs(self) -> tuple[ast.MacroDef, ...]:
        defs = []
        while True:
            self._expect("/")
            name = self._expect_ident("macro name").lexeme
            self._expect("=")
            self._expect("{")
            body = self.parse_declaration()
            self._expect("}")
            defs.append(ast.MacroDef(name, body))
            if self._check("and") and self._check("/", offset=1):
                self._advance()
                continue
            break
        return tuple(defs)

    # -- statements ----------------------------------------------------

    def parse_statement(self) -> ast.Statement:
        first = self._parse_arrow()
        if self._check(";"):
            self._advance()
            if self._starts_statement():
                return ast.Seq(first, self.parse_statement())
        return first

    def _starts_statement(self) -> bool:
        tok = self._peek()
        if tok.kind == "ident":
            return True
        if tok.kind == "keyword":
            return tok.lexeme in _STATEMENT_START_KEYWORDS
        return tok.kind == "punct" and tok.lexeme in ("(", "/")

    def _parse_arrow(self) -> ast.Statement:
        tok = self._peek()

        if self._check("("):
            return self._parse_paren_statement()

        if self._check("/"):
            self._advance()
            name = self._expect_ident("module name").lexeme
            self._expect("=>")
            return ast.ModuleImplication(name, self.parse_statement())

        if self._check("forall") or self._check("ren"):
            decl = self.parse_declaration()
            self._expect("=>")
            return ast.Implication(decl, self.parse_statement())

        if tok.kind == "ident":
            return self._parse_ident_statement()

        if self._check("true"):
            self._advance()
            return ast.TrueStmt()
        if self._check("if"):
            return self._parse_if()
        if self._check("switch"):
            return self._parse_switch()
        if self._check("print"):
            self._advance()
            self._expect("(")
            expr = self.parse_expression()
            self._expect(")")
            return ast.Print(expr)
        if self._check("macro"):
            self._advance()
            defs = self._parse_macro_defs()
            self._expect("in")
            return ast.MacroScope(defs, self.parse_statement())

        raise self._error("statement")

    def _parse_ident_statement(self) -> ast.Statement:
        name_tok = self._advance()
        name = name_tok.lexeme

        if self._check("=>"):
            self._advance()
            return ast.ModuleImplication(name, self.parse_statement())

        if self._check("="):
            self._advance()
            if self._check("new"):
                return self._parse_alloc(name_tok)
            if name in self._handles:
                raise self._error(
                    f"no assignment to '{name}' (region handles are read-only in their scope)", name_tok
                )
            return ast.Assign(name, self.parse_expression())

        if self._check("["):
            self._advance()
            index = self.parse_expression()
            self._expect("]")
            self._expect("=")
            return ast.StoreIndex(ast.Var(name), index, self.parse_expression())

        if self._check("("):
            self._advance()
            args: list[ast.Expression] = []
            if not self._check(")"):
                args.append(self.parse_expression())
                while self._accept(","):
                    args.append(self.parse_expression())
            self._expect(")")
            if self._check("="):
                # Clause head in statement position: start of an implication.
                self._advance()
                decl = self._finish_clause(name_tok, tuple(args))
                while self._accept("and"):
                    decl = ast.And(decl, self._parse_decl_unit())
                self._expect("=>")
                return ast.Implication(decl, self.parse_statement())
            return ast.Call(name, tuple(args))

        raise self._error("'=>', '=', '[' or '(' after identifier", name_tok)

    def _parse_alloc(self, name_tok: Token) -> ast.AllocScope:
        name = name_tok.lexeme
        if name in self._handles:
            raise self._error(
                f"no rebinding of '{name}' (region handles are read-only in their scope)", name_tok
            )
        self._expect("new")
        self._expect("int")
        self._expect("[")
        length = self.parse_expression()
        self._expect("]")
        self._expect("=>")
        self._handles.append(name)
        try:
            body = self.parse_statement()
        finally:
            self._handles.pop()
        return ast.AllocScope(name, "int", length, body)

    def _parse_paren_statement(self) -> ast.Statement:
        mark = self.pos
        saved_handles = list(self._handles)
        self._advance()  # (
        try:
            decl = self.parse_declaration()
            if self._check(")") and self._check("=>", offset=1):
                self._advance()
                self._advance()
                return self._implication(decl, self.parse_statement())
            if self._check("=>"):
                self._advance()
                body = self.parse_statement()
                self._expect(")")
                return self._implication(decl, body)
            raise self._error("'=>' after declaration")
        except ParseError:
            self.pos = mark
            self._handles = saved_handles
        self._advance()  # (
        inner = self.parse_statement()
        self._expect(")")
        return inner

    @staticmethod
    def _implication(decl: ast.Declaration, body: ast.Statement) -> ast.Statement:
        # A bare macro reference before the arrow is the module
        # implication form, whether or not it is parenthesized.
        if isinstance(decl, ast.MacroRef):
            return ast.ModuleImplication(decl.name, body)
        return ast.Implication(decl, body)

    def _parse_if(self) -> ast.If:
        self._expect("if")
        self._expect("(")
        cond = self.parse_expression()
        self._expect(")")
        then = self._parse_arrow()
        orelse: ast.Statement = ast.TrueStmt()
        if self._accept("else"):
            orelse = self._parse_arrow()
        return ast.If(cond, then, orelse)

    def _parse_switch(self) -> ast.Switch:
        self._expect("switch")
        self._expect("(")
        scrutinee = self.parse_expression()
        self._expect(")")
        self._expect("{")
        cases: list[tuple[ast.Value, ast.Statement]] = []
        seen: set[ast.Value] = set()
        while self._check("case"):
            self._advance()
            label_tok = self._peek()
            label = self._parse_case_label()
            if label in seen:
                raise self._error("a distinct case label", label_tok)
            seen.add(label)
            self._expect(":")
            body = self.parse_statement()
            self._expect("break")
            self._expect(";")
            cases.append((label, body))
        default: ast.Statement = ast.TrueStmt()
        if self._accept("default"):
            self._expect(":")
            default = self.parse_statement()
            self._expect("break")
            self._expect(";")
        self._expect("}")
        return ast.Switch(scrutinee, tuple(cases), default)

    def _parse_case_label(self) -> ast.Value:
        tok = self._peek()
        if tok.kind == "ident":
            self._advance()
            return ast.Atom(tok.lexeme)
        if tok.kind == "int":
            self._advance()
            return ast.Int(int(tok.lexeme))
        if self._check("-") and self._peek(1).kind == "int":
            self._advance()
            return ast.Int(-int(self._advance().lexeme))
        raise self._error("case label (atom or integer)")

    # -- declarations ---------------------------------------------------

    def parse_declaration(self) -> ast.Declaration:
        decl = self._parse_decl_unit()
        while self._accept("and"):
            decl = ast.And(decl, self._parse_decl_unit())
        return decl

    def _parse_decl_unit(self) -> ast.Declaration:
        if self._accept("forall"):
            var = self._expect_ident("bound variable name").lexeme
            return ast.Forall(var, self._parse_decl_unit())
        if self._accept("ren"):
            self._expect("(")
            old = self._expect_ident("procedure name").lexeme
            self._expect(",")
            new = self._expect_ident("procedure name").lexeme
            self._expect(")")
            return ast.Rename(old, new, self._parse_decl_unit())
        if self._accept("/"):
            return ast.MacroRef(self._expect_ident("macro name").lexeme)
        if self._accept("("):
            decl = self.parse_declaration()
            self._expect(")")
            return decl
        tok = self._peek()
        if tok.kind == "ident":
            name_tok = self._advance()
            self._expect("(")
            params: list[ast.Expression] = []
            if not self._check(")"):
                params.append(ast.Var(self._expect_ident("formal parameter").lexeme))
                while self._accept(","):
                    params.append(ast.Var(self._expect_ident("formal parameter").lexeme))
            self._expect(")")
            self._expect("=")
            return self._finish_clause(name_tok, tuple(params))
        raise self._error("declaration")

    def _finish_clause(self, name_tok: Token, params: tuple[ast.Expression, ...]) -> ast.Declaration:
        names = []
        for p in params:
            if not isinstance(p, ast.Var):
                raise self._error("formal parameters to be variable names", name_tok)
            names.append(p.name)
        if len(set(names)) != len(names):
            raise self._error("distinct formal parameter names", name_tok)
        body = self.parse_statement()
        decl: ast.Declaration = ast.Clause(name_tok.lexeme, params, body)
        for name in reversed(names):
            decl = ast.Forall(name, decl)
        return decl

    # -- expressions ----------------------------------------------------

    def parse_expression(self) -> ast.Expression:
        return self._parse_or()

    def _parse_or(self) -> ast.Expression:
        left = self._parse_and_expr()
        while self._check("||"):
            self._advance()
            left = ast.BinOp("||", left, self._parse_and_expr())
        return left

    def _parse_and_expr(self) -> ast.Expression:
        left = self._parse_cmp()
        while self._check("&&"):
            self._advance()
            left = ast.BinOp("&&", left, self._parse_cmp())
        return left

    def _parse_cmp(self) -> ast.Expression:
        left = self._parse_add()
        for op in _CMP_OPS:
            if self._check(op):
                self._advance()
                return ast.BinOp(op, left, self._parse_add())
        return left

    def _parse_add(self) -> ast.Expression:
        left = self._parse_mul()
        while self._check("+") or self._check("-"):
            op = self._advance().lexeme
            left = ast.BinOp(op, left, self._parse_mul())
        return left

    def _parse_mul(self) -> ast.Expression:
        left = self._parse_unary()
        while self._check("*") or self._check("/"):
            op = self._advance().lexeme
            left = ast.BinOp(op, left, self._parse_unary())
        return left

    def _parse_unary(self) -> ast.Expression:
        if self._check("!") or self._check("-"):
            op = self._advance().lexeme
            return ast.UnaryOp(op, self._parse_unary())
        return self._parse_postfix()

    def _parse_postfix(self) -> ast.Expression:
        expr = self._parse_primary()
        while self._check("["):
            self._advance()
            index = self.parse_expression()
            self._expect("]")
            expr = ast.Index(expr, index)
        return expr

    def _parse_primary(self) -> ast.Expression:
        tok = self._peek()
        if tok.kind == "int":
            self._advance()
            return ast.IntLit(int(tok.lexeme))
        if tok.kind == "string":
            self._advance()
            return ast.StrLit(tok.lexeme)
        if self._check("true"):
            self._advance()
            return ast.BoolLit(True)
        if self._check("false"):
            self._advance()
            return ast.BoolLit(False)
        if tok.kind == "ident":
            self._advance()
            return ast.Var(tok.lexeme)
        if self._accept("("):
            expr = self.parse_expression()
            self._expect(")")
            return expr
        raise self._error("expression")
