"""Canonical text form of cmod trees.

``pretty_print`` emits a program that re-parses to a structurally equal
tree; the compact single-line forms are used for trace and diagnostic
rendering.
"""

from __future__ import annotations

from . import ast
from .parser import SourceProgram

_PREC = {
    "||": 1,
    "&&": 2,
    "==": 3,
    "!=": 3,
    "<": 3,
    "<=": 3,
    ">": 3,
    ">=": 3,
    "+": 4,
    "-": 4,
    "*": 5,
    "/": 5,
}

_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\t": "\\t"}


def pretty_print(program: SourceProgram) -> str:
    parts: list[str] = []
    for name, decl in program.module_defs:
        parts.append(f"module {name}.\n{format_declaration(decl)}\nend")
    for macro in program.macro_defs:
        parts.append(f"macro /{macro.name} = {{\n  {format_declaration(macro.body, indent=2)}\n}}")
    parts.append(format_statement(program.main))
    return "\n\n".join(parts)


def format_expression(expr: ast.Expression, min_prec: int = 0) -> str:
    if isinstance(expr, ast.IntLit):
        return str(expr.value)
    if isinstance(expr, ast.BoolLit):
        return "true" if expr.value else "false"
    if isinstance(expr, ast.StrLit):
        return '"' + "".join(_ESCAPES.get(c, c) for c in expr.value) + '"'
    if isinstance(expr, ast.AtomLit):
        return expr.name
    if isinstance(expr, ast.Var):
        return expr.name
    if isinstance(expr, ast.Quoted):
        return ast.render_value(expr.value)
    if isinstance(expr, ast.Index):
        return f"{format_expression(expr.base, 7)}[{format_expression(expr.index)}]"
    if isinstance(expr, ast.UnaryOp):
        text = f"{expr.op}{format_expression(expr.operand, 6)}"
        return f"({text})" if min_prec > 6 else text
    if isinstance(expr, ast.BinOp):
        prec = _PREC[expr.op]
        # comparisons are non-associative: parenthesize nested ones on
        # either side
        left_prec = prec + 1 if prec == 3 else prec
        left = format_expression(expr.left, left_prec)
        right = format_expression(expr.right, prec + 1)
        text = f"{left} {expr.op} {right}"
        return f"({text})" if prec < min_prec else text
    raise TypeError(f"not an expression: {expr!r}")


def format_statement(stmt: ast.Statement, indent: int = 0, compact: bool = False) -> str:
    nl = " " if compact else "\n" + " " * indent
    nl2 = " " if compact else "\n" + " " * (indent + 2)

    if isinstance(stmt, ast.TrueStmt):
        return "true"
    if isinstance(stmt, ast.Call):
        args = ", ".join(format_expression(a) for a in stmt.args)
        return f"{stmt.name}({args})"
    if isinstance(stmt, ast.Assign):
        return f"{stmt.name} = {format_expression(stmt.expr)}"
    if isinstance(stmt, ast.StoreIndex):
        base = format_expression(stmt.base, 7)
        return f"{base}[{format_expression(stmt.index)}] = {format_expression(stmt.value)}"
    if isinstance(stmt, ast.Print):
        return f"print({format_expression(stmt.expr)})"
    if isinstance(stmt, ast.Seq):
        first = format_statement(stmt.first, indent, compact)
        if isinstance(stmt.first, ast.Seq):
            first = f"({first})"
        return f"{first};{nl}{format_statement(stmt.second, indent, compact)}"
    if isinstance(stmt, ast.Implication):
        decl = format_declaration(stmt.decl, indent + 1, compact)
        body = format_statement(stmt.body, indent + 2, compact)
        return f"({decl} =>{nl2}{body})"
    if isinstance(stmt, ast.ModuleImplication):
        return f"(/{stmt.name} =>{nl2}{format_statement(stmt.body, indent + 2, compact)})"
    if isinstance(stmt, ast.MacroScope):
        defs = " and ".join(
            f"/{d.name} = {{{nl2}{format_declaration(d.body, indent + 2, compact)}{nl}}}"
            for d in stmt.defs
        )
        return f"(macro {defs} in{nl2}{format_statement(stmt.body, indent + 2, compact)})"
    if isinstance(stmt, ast.AllocScope):
        head = f"{stmt.handle} = new {stmt.elem_type}[{format_expression(stmt.length)}]"
        return f"({head} =>{nl2}{format_statement(stmt.body, indent + 2, compact)})"
    if isinstance(stmt, ast.If):
        cond = format_expression(stmt.cond)
        then = format_statement(stmt.then, indent + 2, compact)
        orelse = format_statement(stmt.orelse, indent + 2, compact)
        return f"if ({cond}) ({then}) else ({orelse})"
    if isinstance(stmt, ast.Switch):
        lines = [f"switch ({format_expression(stmt.scrutinee)}) {{"]
        for label, body in stmt.cases:
            body_text = format_statement(body, indent + 4, compact)
            lines.append(f"  case {ast.render_value(label)}: {body_text}; break;")
        lines.append(f"  default: {format_statement(stmt.default, indent + 4, compact)}; break;")
        lines.append("}")
        return nl.join(lines)
    raise TypeError(f"not a statement: {stmt!r}")


def format_declaration(decl: ast.Declaration, indent: int = 0, compact: bool = False) -> str:
    nl = " " if compact else "\n" + " " * indent

    if isinstance(decl, ast.Forall):
        chain: list[str] = []
        inner: ast.Declaration = decl
        while isinstance(inner, ast.Forall):
            chain.append(inner.var)
            inner = inner.decl
        if isinstance(inner, ast.Clause):
            formals = [p.name for p in inner.params if isinstance(p, ast.Var)]
            if len(formals) == len(inner.params) and chain[len(chain) - len(formals):] == formals:
                explicit = chain[: len(chain) - len(formals)]
                prefix = "".join(f"forall {v} " for v in explicit)
                return prefix + format_declaration(inner, indent, compact)
        prefix = "".join(f"forall {v} " for v in chain)
        return prefix + _format_decl_unit(inner, indent, compact)
    if isinstance(decl, ast.Clause):
        params = ", ".join(format_expression(p) for p in decl.params)
        body = format_statement(decl.body, indent + 2, compact)
        return f"{decl.name}({params}) = ({body})"
    if isinstance(decl, ast.And):
        left = format_declaration(decl.left, indent, compact)
        right = _format_decl_unit(decl.right, indent, compact)
        return f"{left}{nl}and {right}"
    if isinstance(decl, ast.Rename):
        return f"ren({decl.old}, {decl.new}) {_format_decl_unit(decl.decl, indent, compact)}"
    if isinstance(decl, ast.MacroRef):
        return f"/{decl.name}"
    raise TypeError(f"not a declaration: {decl!r}")


def _format_decl_unit(decl: ast.Declaration, indent: int, compact: bool) -> str:
    text = format_declaration(decl, indent, compact)
    if isinstance(decl, ast.And):
        return f"({text})"
    return text
