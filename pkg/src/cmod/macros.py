"""The macro environment: named declarations with most-recent lookup,
plus the renaming/conjunction algebra over declaration trees.

Environments are immutable snapshots; update operations return new
values, so scoped definition groups are reverted by restoring or popping.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from . import ast
from .errors import MacroNotDefined


@dataclass(frozen=True)
class MacroEnv:
    # defs run most-recent-first; marks record how many defs each scoped
    # definition group added, so popping a frame removes exactly its own.
    defs: tuple[ast.MacroDef, ...] = ()
    marks: tuple[int, ...] = ()

    @classmethod
    def seeded(cls, seeds: Iterable[ast.MacroDef]) -> "MacroEnv":
        """An environment of permanent top-level definitions; later seeds
        shadow earlier ones and there is no frame to pop."""
        return cls(tuple(reversed(list(seeds))), ())

    def define(self, new_defs: Iterable[ast.MacroDef]) -> "MacroEnv":
        group = tuple(reversed(list(new_defs)))
        return MacroEnv(group + self.defs, (len(group),) + self.marks)

    def pop_frame(self) -> "MacroEnv":
        if not self.marks:
            raise RuntimeError("no macro frame to pop")
        count = self.marks[0]
        return MacroEnv(self.defs[count:] if count else self.defs, self.marks[1:])

    def find(self, name: str) -> ast.Declaration | None:
        for macro in self.defs:
            if macro.name == name:
                return macro.body
        return None

    def lookup(self, name: str) -> ast.Declaration:
        body = self.find(name)
        if body is None:
            raise MacroNotDefined(name)
        return body

    def names(self) -> list[str]:
        return [macro.name for macro in self.defs]

    def __len__(self) -> int:
        return len(self.defs)


def conj_expand(env: MacroEnv, decl: ast.Declaration) -> ast.Declaration:
    """decl with every macro reference replaced by its looked-up body,
    recursively.

    A name already being expanded is left in place as a residual
    reference (cycle cut). Statement bodies are not walked; references
    inside them resolve against the environment at run time.
    """
    return _expand(env, decl, frozenset())


def _expand(env: MacroEnv, decl: ast.Declaration, path: frozenset[str]) -> ast.Declaration:
    if isinstance(decl, ast.MacroRef):
        if decl.name in path:
            return decl
        return _expand(env, env.lookup(decl.name), path | {decl.name})
    if isinstance(decl, ast.And):
        return ast.And(_expand(env, decl.left, path), _expand(env, decl.right, path))
    if isinstance(decl, ast.Forall):
        return ast.Forall(decl.var, _expand(env, decl.decl, path))
    if isinstance(decl, ast.Rename):
        return ast.Rename(decl.old, decl.new, _expand(env, decl.decl, path))
    return decl


def rename(decl: ast.Declaration, old: str, new: str) -> ast.Declaration:
    """decl with procedure name old replaced by new, in clause heads and
    call sites within bodies. Variable names and macro names are
    untouched. Renaming into a name bound by an enclosing ren operand is
    not resolved (names are treated as plain occurrences).
    """
    if old == new:
        return decl
    return _rename_decl(decl, old, new)


def _rename_decl(decl: ast.Declaration, old: str, new: str) -> ast.Declaration:
    if isinstance(decl, ast.Clause):
        name = new if decl.name == old else decl.name
        return ast.Clause(name, decl.params, _rename_stmt(decl.body, old, new))
    if isinstance(decl, ast.And):
        return ast.And(_rename_decl(decl.left, old, new), _rename_decl(decl.right, old, new))
    if isinstance(decl, ast.Forall):
        return ast.Forall(decl.var, _rename_decl(decl.decl, old, new))
    if isinstance(decl, ast.Rename):
        a = new if decl.old == old else decl.old
        b = new if decl.new == old else decl.new
        return ast.Rename(a, b, _rename_decl(decl.decl, old, new))
    return decl


def _rename_stmt(stmt: ast.Statement, old: str, new: str) -> ast.Statement:
    if isinstance(stmt, ast.Call):
        name = new if stmt.name == old else stmt.name
        return ast.Call(name, stmt.args)
    if isinstance(stmt, ast.Seq):
        return ast.Seq(_rename_stmt(stmt.first, old, new), _rename_stmt(stmt.second, old, new))
    if isinstance(stmt, ast.Implication):
        return ast.Implication(_rename_decl(stmt.decl, old, new), _rename_stmt(stmt.body, old, new))
    if isinstance(stmt, ast.ModuleImplication):
        return ast.ModuleImplication(stmt.name, _rename_stmt(stmt.body, old, new))
    if isinstance(stmt, ast.MacroScope):
        defs = tuple(ast.MacroDef(d.name, _rename_decl(d.body, old, new)) for d in stmt.defs)
        return ast.MacroScope(defs, _rename_stmt(stmt.body, old, new))
    if isinstance(stmt, ast.AllocScope):
        return ast.AllocScope(stmt.handle, stmt.elem_type, stmt.length, _rename_stmt(stmt.body, old, new))
    if isinstance(stmt, ast.If):
        return ast.If(stmt.cond, _rename_stmt(stmt.then, old, new), _rename_stmt(stmt.orelse, old, new))
    if isinstance(stmt, ast.Switch):
        cases = tuple((label, _rename_stmt(body, old, new)) for label, body in stmt.cases)
        return ast.Switch(stmt.scrutinee, cases, _rename_stmt(stmt.default, old, new))
    return stmt
