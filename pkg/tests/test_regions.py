import random

import hypothesis.strategies as st
import pytest
from hypothesis import given

from cmod import ast as A
from cmod.engine import Failure, Success, execute, run_source
from cmod.errors import (
    REGION_FAULT,
    TYPE_MISMATCH,
    UNBOUND_VARIABLE,
    EngineFailure,
)
from cmod.machine import Machine
from cmod.regions import RegionStack, Store, alloc_scope, region_read, region_write


def test_store_assign_and_read():
    store = Store()
    store.assign("age", A.Int(31))
    assert store.read("age") == A.Int(31)
    store.assign("age", A.Int(40))
    assert store == {"age": A.Int(40)}


def test_store_disjoint_assign():
    store = Store({"y": A.Int(1)})
    store.assign("x", A.Int(2))
    assert store == {"y": A.Int(1), "x": A.Int(2)}


def test_store_unbound_read():
    with pytest.raises(EngineFailure) as info:
        Store().read("x")
    assert info.value.reason == UNBOUND_VARIABLE


@given(
    st.dictionaries(st.sampled_from(["a", "b", "c"]), st.integers(-9, 9).map(A.Int), max_size=3),
    st.sampled_from(["a", "b", "c", "d"]),
    st.integers(-99, 99).map(A.Int),
)
def test_store_read_after_assign(bindings, name, value):
    store = Store(bindings)
    store.assign(name, value)
    assert store.read(name) == value


def test_fresh_region_is_zero_initialized():
    machine = Machine.initial()
    handle = machine.regions.allocate("int", 3)
    assert region_read(machine, handle, 0) == A.Int(0)
    assert region_read(machine, handle, 2) == A.Int(0)


def test_read_at_length_is_a_bounds_fault():
    machine = Machine.initial()
    handle = machine.regions.allocate("int", 2)
    with pytest.raises(EngineFailure) as info:
        region_read(machine, handle, 2)
    assert info.value.reason == REGION_FAULT and "bounds" in info.value.detail


def test_write_negative_index_is_a_bounds_fault():
    machine = Machine.initial()
    handle = machine.regions.allocate("int", 2)
    with pytest.raises(EngineFailure) as info:
        region_write(machine, handle, -1, A.Int(5))
    assert info.value.reason == REGION_FAULT and "bounds" in info.value.detail


def test_write_then_read_same_index():
    machine = Machine.initial()
    handle = machine.regions.allocate("int", 4)
    region_write(machine, handle, 3, A.Int(9))
    assert region_read(machine, handle, 3) == A.Int(9)


def test_element_type_is_enforced():
    machine = Machine.initial()
    handle = machine.regions.allocate("int", 1)
    with pytest.raises(EngineFailure) as info:
        region_write(machine, handle, 0, A.Bool(True))
    assert info.value.reason == TYPE_MISMATCH


def test_nested_scopes_see_both_regions(corpus_files):
    path = [p for p in corpus_files if p.name == "regions_nested.cmod"][0]
    outcome, machine = run_source(path.read_text(encoding="utf-8"))
    assert isinstance(outcome, Success)
    assert machine.output_text() == "33\n12\n"
    assert machine.regions.live_count() == 0
    assert machine.store["sum"] == A.Int(33)


def test_empty_region_allocates():
    outcome, machine = run_source("(p = new int[0] => true)")
    assert isinstance(outcome, Success)
    assert machine.regions.regions[0].cells == []


def test_escaped_handle_faults_after_scope_exit():
    outcome, machine = run_source("(p = new int[4] => q = p); x = q[0]")
    assert isinstance(outcome, Failure)
    assert outcome.reason == REGION_FAULT and "dangling" in outcome.detail
    assert machine.store["q"] == A.Handle(0, 0)  # the dead handle value survives


def test_handle_binding_removed_at_scope_exit():
    outcome, machine = run_source("(p = new int[4] => q = p); x = p")
    assert isinstance(outcome, Success)
    # p itself was unbound again, so it evaluated as an atom
    assert machine.store["x"] == A.Atom("p")
    assert "p" not in machine.store


def test_scope_pops_even_when_the_body_fails():
    machine = Machine.initial()
    body = A.Call("nope", ())
    outcome = alloc_scope(machine, "p", "int", A.IntLit(2), body)
    assert isinstance(outcome, Failure)
    assert outcome.reason == "no-matching-clause"
    assert machine.regions.live_count() == 0
    assert "p" not in machine.store


def test_negative_length_is_a_region_fault():
    outcome, _ = run_source("(p = new int[0 - 1] => true)")
    assert isinstance(outcome, Failure) and outcome.reason == REGION_FAULT


def test_non_integer_length_is_a_region_fault():
    outcome, _ = run_source("(p = new int[true] => true)")
    assert isinstance(outcome, Failure) and outcome.reason == REGION_FAULT


def test_free_out_of_order_is_a_hard_error():
    stack = RegionStack()
    first = stack.allocate("int", 1)
    stack.allocate("int", 1)
    with pytest.raises(RuntimeError):
        stack.free(first)


def test_lifo_event_log():
    outcome, machine = run_source(
        "(a = new int[1] => ((b = new int[2] => true); (c = new int[3] => true)))"
    )
    assert isinstance(outcome, Success)
    open_stack = []
    for kind, region_id in machine.regions.events:
        if kind == "alloc":
            open_stack.append(region_id)
        else:
            assert open_stack.pop() == region_id
    assert open_stack == []


def test_assign_never_touches_regions_and_writes_never_touch_the_store():
    machine = Machine.initial()
    handle = machine.regions.allocate("int", 2)
    machine.store.assign("x", A.Int(1))
    cells_before = list(machine.regions.regions[0].cells)
    machine.store.assign("x", A.Int(2))
    assert machine.regions.regions[0].cells == cells_before
    store_before = dict(machine.store)
    region_write(machine, handle, 0, A.Int(7))
    assert dict(machine.store) == store_before


def test_interleaved_writes_against_flat_map_oracle():
    rng = random.Random(7)
    machine = Machine.initial()
    handles = [machine.regions.allocate("int", 5), machine.regions.allocate("int", 5)]
    model: dict[tuple[int, int], A.Int] = {}
    for _ in range(200):
        which = rng.randrange(2)
        index = rng.randrange(5)
        if rng.random() < 0.5:
            value = A.Int(rng.randint(-50, 50))
            region_write(machine, handles[which], index, value)
            model[(which, index)] = value
        else:
            expected = model.get((which, index), A.Int(0))
            assert region_read(machine, handles[which], index) == expected


def test_scope_exit_restores_region_count_at_every_level():
    source = "(a = new int[1] => ((b = new int[2] => b[0] = 1); a[0] = 2))"
    outcome, machine = run_source(source)
    assert isinstance(outcome, Success)
    assert machine.regions.live_count() == 0
    assert [r.live for r in machine.regions.regions] == [False, False]
    assert [r.generation for r in machine.regions.regions] == [1, 1]


def test_handles_pass_through_procedure_parameters():
    # a handle given as an argument can be written and read through
    source = (
        "(fill(h, v) = (h[0] = v; seen = h[0])"
        " => (buf = new int[2] => fill(buf, 9)))"
    )
    outcome, machine = run_source(source)
    assert isinstance(outcome, Success)
    assert machine.store["seen"] == A.Int(9)
    assert machine.regions.live_count() == 0


def test_execute_store_index_through_non_handle_is_a_type_error():
    machine = Machine.initial()
    machine.store.assign("x", A.Int(3))
    outcome = execute(machine, A.StoreIndex(A.Var("x"), A.IntLit(0), A.IntLit(1)))
    assert isinstance(outcome, Failure) and outcome.reason == TYPE_MISMATCH
