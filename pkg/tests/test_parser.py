import pytest

from cmod import ast as A
from cmod.errors import ParseError
from cmod.parser import parse_repl_input, parse_source

EMP_MODULE = """
module Emp.
Age(emp) =
  switch (emp) {
    case tom: age = 31; break;
    case kim: age = 40; break;
    case sue: age = 22; break;
    default: age = 0; break;
  }
end

(Emp => Age(tom))
"""


def test_module_definition_shape():
    program = parse_source(EMP_MODULE)
    assert len(program.module_defs) == 1
    name, decl = program.module_defs[0]
    assert name == "Emp"
    assert isinstance(decl, A.Forall) and decl.var == "emp"
    clause = decl.decl
    assert isinstance(clause, A.Clause)
    assert clause.name == "Age" and clause.params == (A.Var("emp"),)
    assert isinstance(clause.body, A.Switch)
    labels = [label for label, _ in clause.body.cases]
    assert labels == [A.Atom("tom"), A.Atom("kim"), A.Atom("sue")]
    assert clause.body.cases[0][1] == A.Assign("age", A.IntLit(31))
    assert clause.body.default == A.Assign("age", A.IntLit(0))


def test_smallest_implication_has_no_forall():
    program = parse_source("(p() = true => true)")
    assert program.main == A.Implication(A.Clause("p", (), A.TrueStmt()), A.TrueStmt())


def test_module_implication_with_slash():
    program = parse_source("/Ev => Even(9)")
    assert program.main == A.ModuleImplication("Ev", A.Call("Even", (A.IntLit(9),)))


def test_module_implication_parenthesized_and_bare():
    assert parse_source("(/Ev => Even(9))").main == parse_source("/Ev => Even(9)").main
    assert parse_source("Emp => Age(tom)").main == A.ModuleImplication(
        "Emp", A.Call("Age", (A.Var("tom"),))
    )


def test_sequence_is_right_associated():
    program = parse_source("x = 1; y = 2; z = 3")
    assert program.main == A.Seq(
        A.Assign("x", A.IntLit(1)),
        A.Seq(A.Assign("y", A.IntLit(2)), A.Assign("z", A.IntLit(3))),
    )


def test_arrow_body_extends_through_semicolons():
    program = parse_source("p() = true => x = 1; y = 2")
    main = program.main
    assert isinstance(main, A.Implication)
    assert main.body == A.Seq(A.Assign("x", A.IntLit(1)), A.Assign("y", A.IntLit(2)))


def test_arrow_body_stops_at_closing_paren():
    program = parse_source("(p() = true => x = 1); y = 2")
    main = program.main
    assert isinstance(main, A.Seq)
    assert isinstance(main.first, A.Implication)
    assert main.first.body == A.Assign("x", A.IntLit(1))


def test_conjunction_folds_left():
    program = parse_source("(p() = true and q() = true and r() = true => p())")
    decl = program.main.decl
    assert isinstance(decl, A.And) and isinstance(decl.left, A.And)
    assert decl.right == A.Clause("r", (), A.TrueStmt())


def test_explicit_forall_wraps_the_closure():
    program = parse_source("(forall z p(x) = (true) => p(1))")
    decl = program.main.decl
    assert decl == A.Forall("z", A.Forall("x", A.Clause("p", (A.Var("x"),), A.TrueStmt())))


def test_rename_declaration():
    program = parse_source("(ren(f, g) f(x) = (true) => g(1))")
    decl = program.main.decl
    assert isinstance(decl, A.Rename)
    assert (decl.old, decl.new) == ("f", "g")
    assert isinstance(decl.decl, A.Forall)


def test_alloc_scope_parse():
    program = parse_source("(a = new int[10] => true)")
    assert program.main == A.AllocScope("a", "int", A.IntLit(10), A.TrueStmt())


def test_handle_is_read_only():
    with pytest.raises(ParseError) as info:
        parse_source("(a = new int[2] => a = 1)")
    assert "read-only" in str(info.value)


def test_handle_cannot_be_rebound_by_nested_alloc():
    with pytest.raises(ParseError):
        parse_source("(a = new int[2] => (a = new int[3] => true))")


def test_handle_element_write_is_allowed():
    program = parse_source("(a = new int[2] => a[0] = 1)")
    assert isinstance(program.main.body, A.StoreIndex)


def test_handle_scope_ends_with_the_body():
    program = parse_source("(a = new int[2] => true); a = 5")
    assert isinstance(program.main.second, A.Assign)


def test_macro_scope_statement():
    program = parse_source("macro /p = { f() = true } and /q = { g() = true } in f()")
    main = program.main
    assert isinstance(main, A.MacroScope)
    assert [d.name for d in main.defs] == ["p", "q"]
    assert main.body == A.Call("f", ())
    assert program.macro_defs == ()


def test_top_level_macro_definitions():
    program = parse_source("macro /p = { f() = true }\nmacro /q = { g() = true }\ntrue")
    assert [d.name for d in program.macro_defs] == ["p", "q"]
    assert program.main == A.TrueStmt()


def test_macro_reference_conjunction():
    program = parse_source("((/p and /q) => f())")
    assert program.main.decl == A.And(A.MacroRef("p"), A.MacroRef("q"))


def test_if_without_else_defaults_to_true():
    program = parse_source("if (x == 0) print(x)")
    assert program.main == A.If(
        A.BinOp("==", A.Var("x"), A.IntLit(0)), A.Print(A.Var("x")), A.TrueStmt()
    )


def test_negative_case_label():
    program = parse_source("switch (x) { case -1: true break; }")
    assert program.main.cases[0][0] == A.Int(-1)


def test_call_arguments_are_expressions():
    program = parse_source("Even(x - 1)")
    assert program.main == A.Call("Even", (A.BinOp("-", A.Var("x"), A.IntLit(1)),))


def test_expression_precedence():
    program = parse_source("v = 1 + 2 * 3 == 7 && !(x < 0)")
    expected = A.BinOp(
        "&&",
        A.BinOp("==", A.BinOp("+", A.IntLit(1), A.BinOp("*", A.IntLit(2), A.IntLit(3))), A.IntLit(7)),
        A.UnaryOp("!", A.BinOp("<", A.Var("x"), A.IntLit(0))),
    )
    assert program.main == A.Assign("v", expected)


@pytest.mark.parametrize(
    "source",
    [
        "p(x, x) = true => p(1, 1)",
        "switch (x) { case tom: true break; case tom: true break; }",
        "module M. f() = true end module M. g() = true end true",
        "x = ",
        "(p() = true",
        "true true",
        "module . f() = true end true",
        "",
        "module M. f() = true end",
    ],
)
def test_parse_errors(source):
    with pytest.raises(ParseError):
        parse_source(source)


def test_parse_error_positions_are_in_bounds():
    cases = ["x = ;", "(p() = true", "switch (x) { case 1: true }", "x ="]
    for source in cases:
        with pytest.raises(ParseError) as info:
            parse_source(source)
        lines = source.split("\n")
        assert 1 <= info.value.line <= len(lines)
        assert 1 <= info.value.column <= len(lines[info.value.line - 1]) + 1


def test_repl_input_forms():
    seeds, stmt = parse_repl_input("x = 1")
    assert seeds == [] and stmt == A.Assign("x", A.IntLit(1))

    seeds, stmt = parse_repl_input("module M. f() = true end")
    assert [d.name for d in seeds] == ["M"] and stmt is None

    seeds, stmt = parse_repl_input("macro /p = { f() = true }")
    assert [d.name for d in seeds] == ["p"] and stmt is None

    seeds, stmt = parse_repl_input("module M. f() = true end (/M => f())")
    assert [d.name for d in seeds] == ["M"]
    assert stmt == A.ModuleImplication("M", A.Call("f", ()))


def test_parsing_is_a_pure_function_of_the_token_list():
    from cmod.lexer import tokenize
    from cmod.parser import parse_program

    tokens = tokenize("x = 1; y = 2")
    snapshot = list(tokens)
    first = parse_program(tokens)
    assert tokens == snapshot
    assert parse_program(tokens) == first


def test_repl_incomplete_input_is_flagged():
    with pytest.raises(ParseError) as info:
        parse_repl_input("module M.")
    assert info.value.at_eof

    with pytest.raises(ParseError) as info:
        parse_repl_input("x = 1 +")
    assert info.value.at_eof

    with pytest.raises(ParseError) as info:
        parse_repl_input("x = ;")
    assert not info.value.at_eof
