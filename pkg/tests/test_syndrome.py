import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wirecodes.fixtures import NAMED, five_qubit, repetition, shor, single_check
from wirecodes.layout import layout_2d
from wirecodes.pauli import PauliOperator, commutes, parse_pauli
from wirecodes.syndrome import (
    IncompleteRecordError,
    ScheduleError,
    Tableau,
    build_schedule,
    codeword_generators,
    expected_syndrome,
    prepare_state,
    reconstruct_syndrome,
    simulate_extraction,
)
from wirecodes.wire import build_wire_code


def single_errors(n):
    for q in range(n):
        for letter in "XYZ":
            yield PauliOperator.single(n, q, letter)


# -- tableau -------------------------------------------------------------------

def test_tableau_starts_in_zero_state():
    tab = Tableau(3)
    assert tab.measure(parse_pauli("ZII")) == (0, False)
    assert tab.expectation(parse_pauli("IZZ")) == 1
    assert tab.expectation(parse_pauli("XII")) == 0
    assert tab.check_invariants()


def test_tableau_bell_pair():
    tab = Tableau(2, np.random.default_rng(1))
    bit, random = tab.measure(parse_pauli("XX"))
    assert random
    assert tab.expectation(parse_pauli("XX")) == (-1 if bit else 1)
    assert tab.expectation(parse_pauli("ZZ")) == 1
    # YY = -(XX)(ZZ)
    assert tab.expectation(parse_pauli("YY")) == (1 if bit else -1)
    assert tab.measure(parse_pauli("XX")) == (bit, False)


def test_apply_pauli_flips_anticommuting_signs():
    tab = Tableau(2)
    tab.apply_pauli(parse_pauli("XI"))
    assert tab.expectation(parse_pauli("ZI")) == -1
    assert tab.expectation(parse_pauli("IZ")) == 1


@settings(max_examples=30)
@given(st.integers(0, 10**6))
def test_tableau_invariants_under_random_measurements(seed):
    rng = np.random.default_rng(seed)
    n = 4
    tab = Tableau(n, rng)
    for _ in range(12):
        p = parse_pauli("".join(rng.choice(list("IXYZ"), size=n)))
        if p.is_identity():
            continue
        bit, _ = tab.measure(p)
        assert tab.expectation(p) == (-1 if bit else 1)
        assert tab.check_invariants()


def test_prepare_state_is_plus_one_eigenstate():
    wire = build_wire_code(five_qubit())
    gens = codeword_generators(wire)
    tab = prepare_state(gens, wire.n, np.random.default_rng(3))
    assert all(tab.expectation(g) == 1 for g in gens)
    for s in five_qubit().checks:
        assert tab.expectation(s.extend(wire.n)) == 1
    with pytest.raises(ValueError):
        prepare_state(gens[:-1], wire.n, np.random.default_rng(0))


# -- schedule ------------------------------------------------------------------

def test_schedule_round_counts():
    assert build_schedule(build_wire_code(repetition())).n_rounds == 2
    assert build_schedule(build_wire_code(single_check("ZZZZ"))).n_rounds == 1
    assert build_schedule(build_wire_code(five_qubit())).n_rounds >= 2


@pytest.mark.parametrize("name", sorted(NAMED))
def test_schedule_structure(name):
    wire = build_wire_code(NAMED[name]())
    sched = build_schedule(wire)
    measured = set()
    for rd in sched.rounds:
        assert 1 <= rd.depth <= 3
        for layer in rd.phase1:
            qubits = [u for g in layer for u in wire.terms[g]]
            assert len(qubits) == len(set(qubits))
        touched = {u for g in rd.gauges for u in wire.terms[g] if wire.register[u] != "data"}
        assert set(rd.phase2) == touched
        # checks in one round share no wire qubit
        supports = [{u for g in sched.gauges_of[s] for u in wire.terms[g]} for s in rd.checks]
        for i in range(len(supports)):
            for j in range(i + 1, len(supports)):
                assert not supports[i] & supports[j]
        measured |= set(rd.gauges) | {wire.single_of[u] for u in rd.phase2}
    # every gauge generator is measured in some round
    assert measured == set(range(len(wire.terms)))
    # anc gauges belong to exactly one check, hence exactly one round
    for s in range(wire.input.m):
        for g in wire.anc_of[s]:
            assert sum(g in rd.gauges for rd in sched.rounds) == 1


# -- simulation ----------------------------------------------------------------

@pytest.mark.parametrize("name", ["repetition", "five", "shor", "422", "toric2"])
def test_exhaustive_single_qubit_errors(name):
    code = NAMED[name]()
    wire = build_wire_code(code)
    sched = build_schedule(wire)
    for i, e in enumerate(single_errors(code.n)):
        rep = simulate_extraction(wire, sched, e, seed=i, passes=2)
        oracle = [0 if commutes(e, c) else 1 for c in code.checks]
        assert rep.syndromes == [oracle, oracle], str(e)


def test_named_examples():
    wire = build_wire_code(repetition())
    rep = simulate_extraction(wire, build_schedule(wire), parse_pauli("XII"))
    assert rep.syndrome == [1, 0]
    wire = build_wire_code(five_qubit())
    sched = build_schedule(wire)
    assert simulate_extraction(wire, sched, None, seed=9).syndrome == [0, 0, 0, 0]
    x3 = PauliOperator.single(5, 3, "X")
    # X on qubit 3 flips exactly the checks with Z there
    assert simulate_extraction(wire, sched, x3).syndrome == [0, 1, 1, 0]


def test_laid_out_wire_code_extracts_syndromes():
    code = shor()
    wire = layout_2d(code).wire
    sched = build_schedule(wire)
    for i, e in enumerate([parse_pauli("XIIIIIIII"), parse_pauli("IIIIZIIII"), parse_pauli("IIIIIIIIY")]):
        assert simulate_extraction(wire, sched, e, seed=i).syndrome == expected_syndrome(code, e)


@settings(max_examples=15)
@given(st.integers(0, 4**5 - 1), st.integers(0, 10**6))
def test_multi_qubit_errors_and_seeds(word, seed):
    letters = "".join("IXYZ"[(word >> (2 * q)) & 3] for q in range(5))
    e = parse_pauli(letters)
    code = five_qubit()
    wire = build_wire_code(code)
    rep = simulate_extraction(wire, build_schedule(wire), e, seed=seed, passes=3)
    assert rep.syndromes == [expected_syndrome(code, e)] * 3


def test_reconstruction_is_xor_of_designated_outcomes():
    wire = build_wire_code(five_qubit())
    sched = build_schedule(wire)
    rep = simulate_extraction(wire, sched, parse_pauli("IIXII"), seed=2)
    zero = [{k: {key: 0 for key in v} for k, v in rd.items()} for rd in rep.record]
    assert all(reconstruct_syndrome(zero, sched, s) == 0 for s in range(4))
    for s in range(4):
        kind, rd, key = sched.outcome_keys(s)[0]
        assert kind == "phase1" and key in wire.anc_of[s]
        flipped = [{k: dict(v) for k, v in r.items()} for r in rep.record]
        flipped[rd][kind][key] ^= 1
        assert reconstruct_syndrome(flipped, sched, s) == 1 - rep.syndrome[s]


def test_incomplete_record():
    wire = build_wire_code(five_qubit())
    sched = build_schedule(wire)
    rep = simulate_extraction(wire, sched, None)
    last = max(range(4), key=lambda s: sched.round_of[s])
    with pytest.raises(IncompleteRecordError):
        reconstruct_syndrome(rep.record[:-1], sched, last)


def test_error_outside_data_register_rejected():
    wire = build_wire_code(five_qubit())
    sched = build_schedule(wire)
    with pytest.raises(ScheduleError):
        simulate_extraction(wire, sched, PauliOperator.single(wire.n, wire.n - 1, "Z"))


def test_schedule_missing_gauges_rejected():
    wire = build_wire_code(five_qubit())
    sched = build_schedule(wire)
    sched.rounds[0].phase1 = []
    with pytest.raises(ScheduleError):
        simulate_extraction(wire, sched, None)


def test_report_json_is_deterministic():
    wire = build_wire_code(repetition())
    sched = build_schedule(wire)
    a = simulate_extraction(wire, sched, parse_pauli("IXI"), seed=4).to_json(sort_keys=True)
    b = simulate_extraction(wire, sched, parse_pauli("IXI"), seed=4).to_json(sort_keys=True)
    assert a == b
    doc = json.loads(a)
    assert doc["format"] == "syndrome/1" and doc["seed"] == 4 and doc["syndromes"] == [[1, 1]]
