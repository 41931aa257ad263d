"""Abstract syntax and runtime values for the cmod language.

Statements are the executable trees, declarations are procedure-clause
trees (module bodies), and macro definitions bind names to declarations.
Every node is a frozen dataclass holding tuples, so trees are immutable
and freely shareable after construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

# ---------------------------------------------------------------------------
# Runtime values
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Int:
    value: int


@dataclass(frozen=True)
class Bool:
    value: bool


@dataclass(frozen=True)
class Str:
    value: str


@dataclass(frozen=True)
class Atom:
    """A self-evaluating symbolic constant, e.g. ``tom``."""

    name: str


@dataclass(frozen=True)
class Unit:
    pass


@dataclass(frozen=True)
class Handle:
    """Reference to a region; the generation pair detects dangling use."""

    region_id: int
    generation: int


UNIT = Unit()

Value = Union[Int, Bool, Str, Atom, Unit, Handle]


def render_value(value: Value) -> str:
    if isinstance(value, Int):
        return str(value.value)
    if isinstance(value, Bool):
        return "true" if value.value else "false"
    if isinstance(value, Str):
        return value.value
    if isinstance(value, Atom):
        return value.name
    if isinstance(value, Handle):
        return f"<region {value.region_id}:{value.generation}>"
    return "unit"


# ---------------------------------------------------------------------------
# Expressions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IntLit:
    value: int


@dataclass(frozen=True)
class BoolLit:
    value: bool


@dataclass(frozen=True)
class StrLit:
    value: str


@dataclass(frozen=True)
class AtomLit:
    name: str


@dataclass(frozen=True)
class Var:
    """An identifier; whether it is a bound variable or an atom is decided
    by the store at evaluation time."""

    name: str


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expression"
    right: "Expression"


@dataclass(frozen=True)
class UnaryOp:
    op: str
    operand: "Expression"


@dataclass(frozen=True)
class Index:
    """Element read through a region handle: ``base[index]``."""

    base: "Expression"
    index: "Expression"


@dataclass(frozen=True)
class Quoted:
    """An already-computed value embedded in syntax by instantiation."""

    value: Value


Expression = Union[IntLit, BoolLit, StrLit, AtomLit, Var, BinOp, UnaryOp, Index, Quoted]


def literal_of(value: Value) -> Expression:
    """The expression form of a runtime value, used by instantiation."""
    if isinstance(value, Int):
        return IntLit(value.value)
    if isinstance(value, Bool):
        return BoolLit(value.value)
    if isinstance(value, Str):
        return StrLit(value.value)
    if isinstance(value, Atom):
        return AtomLit(value.name)
    return Quoted(value)


def literal_value(expr: Expression) -> Value | None:
    """The value of a literal expression, or None if expr is not a literal."""
    if isinstance(expr, IntLit):
        return Int(expr.value)
    if isinstance(expr, BoolLit):
        return Bool(expr.value)
    if isinstance(expr, StrLit):
        return Str(expr.value)
    if isinstance(expr, AtomLit):
        return Atom(expr.name)
    if isinstance(expr, Quoted):
        return expr.value
    return None


# ---------------------------------------------------------------------------
# Statements (G-trees) and declarations (D-trees)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TrueStmt:
    pass


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple[Expression, ...]


@dataclass(frozen=True)
class Assign:
    name: str
    expr: Expression


@dataclass(frozen=True)
class StoreIndex:
    """Element write through a region handle: ``base[index] = value``.

    The base is an expression so that instantiated clause parameters can
    be written through, exactly as they can be read through.
    """

    base: Expression
    index: Expression
    value: Expression


@dataclass(frozen=True)
class Seq:
    first: "Statement"
    second: "Statement"


@dataclass(frozen=True)
class Implication:
    """``D => G``: run body with decl pushed as the most recent module."""

    decl: "Declaration"
    body: "Statement"


@dataclass(frozen=True)
class ModuleImplication:
    """``/n => G``: like Implication, with the module looked up by name."""

    name: str
    body: "Statement"


@dataclass(frozen=True)
class MacroScope:
    """``macro /n = { D } ... in G``: define macros for the body only."""

    defs: tuple["MacroDef", ...]
    body: "Statement"


@dataclass(frozen=True)
class AllocScope:
    """``p = new int[E] => G``: region alive exactly for the body."""

    handle: str
    elem_type: str
    length: Expression
    body: "Statement"


@dataclass(frozen=True)
class If:
    cond: Expression
    then: "Statement"
    orelse: "Statement"


@dataclass(frozen=True)
class Switch:
    scrutinee: Expression
    cases: tuple[tuple[Value, "Statement"], ...]
    default: "Statement"


@dataclass(frozen=True)
class Print:
    expr: Expression


Statement = Union[
    TrueStmt,
    Call,
    Assign,
    StoreIndex,
    Seq,
    Implication,
    ModuleImplication,
    MacroScope,
    AllocScope,
    If,
    Switch,
    Print,
]


@dataclass(frozen=True)
class Clause:
    """One procedure declaration ``name(params) = body``.

    Parser output has distinct variable names as params; instantiation
    replaces them with literals, so a fully instantiated head is matchable
    against evaluated call arguments.
    """

    name: str
    params: tuple[Expression, ...]
    body: Statement


@dataclass(frozen=True)
class And:
    left: "Declaration"
    right: "Declaration"


@dataclass(frozen=True)
class Forall:
    var: str
    decl: "Declaration"


@dataclass(frozen=True)
class MacroRef:
    name: str


@dataclass(frozen=True)
class Rename:
    """``ren(old, new) D``: D with procedure name old replaced by new."""

    old: str
    new: str
    decl: "Declaration"


Declaration = Union[Clause, And, Forall, MacroRef, Rename]


@dataclass(frozen=True)
class MacroDef:
    name: str
    body: Declaration


# ---------------------------------------------------------------------------
# Desugaring
# ---------------------------------------------------------------------------


def desugar(stmt: Statement) -> Statement:
    """Rewrite every Switch into a chain of If nodes.

    Each case becomes an equality test of the scrutinee against the case
    label, ending in the default branch; all other nodes are preserved
    structurally (including inside declarations). Idempotent.
    """
    if isinstance(stmt, Switch):
        result = desugar(stmt.default)
        for label, body in reversed(stmt.cases):
            test = BinOp("==", stmt.scrutinee, literal_of(label))
            result = If(test, desugar(body), result)
        return result
    if isinstance(stmt, Seq):
        return Seq(desugar(stmt.first), desugar(stmt.second))
    if isinstance(stmt, Implication):
        return Implication(desugar_decl(stmt.decl), desugar(stmt.body))
    if isinstance(stmt, ModuleImplication):
        return ModuleImplication(stmt.name, desugar(stmt.body))
    if isinstance(stmt, MacroScope):
        defs = tuple(MacroDef(d.name, desugar_decl(d.body)) for d in stmt.defs)
        return MacroScope(defs, desugar(stmt.body))
    if isinstance(stmt, AllocScope):
        return AllocScope(stmt.handle, stmt.elem_type, stmt.length, desugar(stmt.body))
    if isinstance(stmt, If):
        return If(stmt.cond, desugar(stmt.then), desugar(stmt.orelse))
    return stmt


def desugar_decl(decl: Declaration) -> Declaration:
    if isinstance(decl, Clause):
        return Clause(decl.name, decl.params, desugar(decl.body))
    if isinstance(decl, And):
        return And(desugar_decl(decl.left), desugar_decl(decl.right))
    if isinstance(decl, Forall):
        return Forall(decl.var, desugar_decl(decl.decl))
    if isinstance(decl, Rename):
        return Rename(decl.old, decl.new, desugar_decl(decl.decl))
    return decl


# ---------------------------------------------------------------------------
# Declared-name collection
# ---------------------------------------------------------------------------


def free_procedure_names(decl: Declaration, env=None) -> frozenset[str]:
    """The set of procedure names declared by clause heads in decl.

    Looks through And/Forall/Rename, and through macro references when an
    environment is supplied (chains of references are followed, cycles
    cut); without one a macro reference contributes the empty set.
    Renames accumulate outermost first and replay on every name, exactly
    mirroring how backchaining applies them while resolving references,
    so the names reported here are the names backchaining can match.
    """
    return _declared_names(decl, env, frozenset(), ())


def _chase(name: str, pending: tuple[tuple[str, str], ...]) -> str:
    for old, new in pending:
        if name == old:
            name = new
    return name


def _declared_names(
    decl: Declaration, env, path: frozenset[str], pending: tuple[tuple[str, str], ...]
) -> frozenset[str]:
    if isinstance(decl, Clause):
        return frozenset((_chase(decl.name, pending),))
    if isinstance(decl, And):
        return _declared_names(decl.left, env, path, pending) | _declared_names(
            decl.right, env, path, pending
        )
    if isinstance(decl, Forall):
        return _declared_names(decl.decl, env, path, pending)
    if isinstance(decl, Rename):
        # enclosing renames have already passed over this node's fields
        step = (_chase(decl.old, pending), _chase(decl.new, pending))
        return _declared_names(decl.decl, env, path, pending + (step,))
    if isinstance(decl, MacroRef):
        if env is None or decl.name in path:
            return frozenset()
        body = env.find(decl.name)
        if body is None:
            return frozenset()
        return _declared_names(body, env, path | {decl.name}, pending)
    raise TypeError(f"not a declaration: {decl!r}")
