import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from wirecodes.codes import SubsystemCode, compute_k
from wirecodes.fixtures import (
    NAMED,
    five_qubit,
    overcomplete_repetition,
    random_stabilizer_code,
    repetition,
    shor,
    single_check,
)
from wirecodes.pauli import commutes, parse_pauli, product
from wirecodes.wire import (
    RecoveryError,
    WireCode,
    build_wire_code,
    chain_terms,
    n_wire_bound,
    recovery_ok,
    stabilizer_recovery,
    stretch_edge,
    tanner_edges,
    weight_reduce_check,
)

FIXTURES = sorted(NAMED)


def expected_n_wire(code):
    """Data + one copy per use of a (qubit, Pauli) used twice or more + w-3 ancillas per check."""
    n = code.n
    for q in range(code.n):
        for letter in "XYZ":
            uses = sum(1 for c in code.checks if c.letter(q) == letter)
            if uses >= 2:
                n += uses
    n += sum(max(0, c.weight - 3) for c in code.checks)
    return n


def random_code(seed, n_max=8):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, n_max + 1))
    return random_stabilizer_code(n, int(rng.integers(1, n + 1)), rng, redundant=int(rng.integers(0, 2)))


@pytest.mark.parametrize("name", FIXTURES)
def test_fixture_wire_codes(name):
    code = NAMED[name]()
    wire = build_wire_code(code)
    assert wire.n == expected_n_wire(code) <= n_wire_bound(code)
    assert wire.max_weight() <= 3 and wire.max_degree() <= 3
    assert compute_k(wire.base) == compute_k(code)
    assert recovery_ok(wire)


def test_five_qubit_wire_size():
    assert build_wire_code(five_qubit()).n == 21


@settings(max_examples=40)
@given(st.integers(0, 10**7))
def test_random_codes_keep_k_and_weight(seed):
    code = random_code(seed)
    wire = build_wire_code(code)
    assert wire.n == expected_n_wire(code)
    assert wire.max_weight() <= 3 and wire.max_degree() <= 3
    assert compute_k(wire.base) == compute_k(code)
    assert recovery_ok(wire)


@settings(max_examples=30)
@given(st.integers(0, 10**7), st.integers(1, 5), st.data())
def test_stretching_keeps_k_and_recovery(seed, length, data):
    code = random_code(seed, 6)
    wire = build_wire_code(code)
    edges = tanner_edges(wire)
    assume(edges)  # codes made only of weight-one checks have nothing to stretch
    edge = data.draw(st.sampled_from(edges))
    out = stretch_edge(wire, edge, length)
    assert out.n == wire.n + length - 1
    assert wire.n == expected_n_wire(code)  # original untouched
    assert compute_k(out.base) == compute_k(code)
    assert out.max_weight() <= 3 and out.max_degree() <= 3
    assert recovery_ok(out)


def test_stretch_rejects_bad_edges():
    wire = build_wire_code(repetition())
    g = wire.multi_gauges()[0]
    u = next(iter(wire.terms[g]))
    with pytest.raises(ValueError):
        stretch_edge(wire, (u, g), 0)
    outsider = next(v for v in range(wire.n) if v not in wire.terms[g])
    with pytest.raises(KeyError):
        stretch_edge(wire, (outsider, g), 2)
    single = wire.single_of[wire.n - 1]
    with pytest.raises(ValueError):
        stretch_edge(wire, (wire.n - 1, single), 2)


def test_chain_terms_multiply_to_check():
    letters = [(0, "X"), (1, "Z"), (2, "Y"), (3, "X"), (4, "Z"), (5, "Z")]
    gauges = chain_terms(letters, [6, 7, 8])
    assert len(gauges) == 4 and all(len(g) == 3 for g in gauges)
    from wirecodes.pauli import PauliOperator

    prod = product([PauliOperator.from_sparse(9, g) for g in gauges], 9)
    assert str(prod) == "XZYXZZIII"


@pytest.mark.parametrize("text", ["ZZ", "XYZ", "XXXX", "XZZXIY", "YYYYYYYY"])
def test_weight_reduce_single_check(text):
    check = parse_pauli(text)
    ancillas, gauges = weight_reduce_check(check)
    w = check.weight
    assert len(ancillas) == max(0, w - 3)
    multi = [g for g in gauges if g.weight >= 2]
    assert len(multi) == (1 if w <= 3 else w - 2)
    assert all(g.weight <= 3 for g in multi)
    assert product(multi, check.n + len(ancillas)) == check.extend(check.n + len(ancillas))
    sub = SubsystemCode(check.n + len(ancillas), gauges, ["data"] * check.n + ["anc"] * len(ancillas))
    assert compute_k(sub) == check.n - 1


def test_weight_reduce_rejects_weight_one():
    with pytest.raises(ValueError):
        weight_reduce_check(parse_pauli("IZI"))
    with pytest.raises(ValueError):
        weight_reduce_check(parse_pauli("ZZZZ"), order=[0, 1, 2])


@pytest.mark.parametrize("name", FIXTURES)
def test_dressed_stabilizers_commute_with_gauges(name):
    wire = build_wire_code(NAMED[name]())
    gauges = wire.gauges
    for s in range(wire.input.m):
        dressed = wire.dressed_stabilizer(s)
        assert all(commutes(dressed, g) for g in gauges)
        assert all(wire.register[u] != "data" for u in wire.dressing(s))


def test_recovery_detects_tampering():
    wire = build_wire_code(five_qubit())
    g = wire.anc_of[0][0]
    u = next(iter(wire.terms[g]))
    wire.terms[g][u] = "X" if wire.terms[g][u] != "X" else "Z"
    with pytest.raises(RecoveryError):
        stabilizer_recovery(wire, 0)
    assert not recovery_ok(wire)


def test_unreduced_wire_keeps_checks_whole():
    code = shor()
    wire = build_wire_code(code, reduce=False)
    assert wire.n == code.n
    assert [wire.gauge(wire.anc_of[s][0]) for s in range(code.m)] == code.checks
    assert compute_k(wire.base) == 1 and recovery_ok(wire)


def test_single_check_and_overcomplete():
    wire = build_wire_code(single_check("ZZ"))
    assert wire.n == 2 and compute_k(wire.base) == 1
    code = overcomplete_repetition()
    assert compute_k(build_wire_code(code).base) == compute_k(code)


@pytest.mark.parametrize("name", FIXTURES)
def test_json_roundtrip(name):
    wire = build_wire_code(NAMED[name]())
    wire = stretch_edge(wire, tanner_edges(wire)[0], 3)
    back = WireCode.from_json(wire.to_json())
    assert back.to_dict() == wire.to_dict()
    assert back.gauges == wire.gauges
    assert back.z_part(0) == wire.z_part(0)
    assert recovery_ok(back)


def test_build_rejects_subsystem_input():
    with pytest.raises(TypeError):
        build_wire_code(SubsystemCode(2, [parse_pauli("ZZ")], ["data"] * 2))
