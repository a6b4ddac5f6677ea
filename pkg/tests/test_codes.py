import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import brute_distance, oracle_rank, pauli_int
from wirecodes.codes import (
    CodeFormatError,
    NonCommutingChecksError,
    StabilizerCode,
    SubsystemCode,
    bare_logicals,
    code_distance,
    compute_k,
    compute_k_via_center,
    degree_profile,
    dressed_distance,
    is_relation,
    logical_pairs,
    parse_code_text,
    relations,
)
from wirecodes.fixtures import (
    four_two_two,
    five_qubit,
    overcomplete_repetition,
    random_stabilizer_code,
    repetition,
    rotated_surface,
    shor,
    toric,
)
from wirecodes.pauli import commutes, parse_pauli

# published parameters of the standard small codes
KNOWN = [
    (repetition, 3, 1, 1),
    (five_qubit, 5, 1, 3),
    (shor, 9, 1, 3),
    (four_two_two, 4, 2, 2),
    (toric, 8, 2, 2),
]


@pytest.mark.parametrize("make,n,k,d", KNOWN)
def test_known_parameters(make, n, k, d):
    code = make()
    assert code.n == n
    assert compute_k(code) == k == code.k
    assert code_distance(code) == d


def test_five_qubit_checks_are_cyclic_shifts():
    assert [str(c) for c in five_qubit().checks] == ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"]


def test_parse_code_text_comments_and_blanks():
    code = parse_code_text("# rep\nZZI  # first\n\nIZZ\n")
    assert code.n == 3 and code.m == 2


def test_parse_reports_line_numbers():
    with pytest.raises(CodeFormatError, match="line 3"):
        parse_code_text("ZZI\n\nZQI\n")
    with pytest.raises(CodeFormatError, match="line 2"):
        parse_code_text("ZZI\nZZ\n")
    with pytest.raises(CodeFormatError, match="lines 1 and 2"):
        parse_code_text("XI\nZI\n")
    with pytest.raises(CodeFormatError):
        parse_code_text("# nothing\n")


def test_noncommuting_pair_is_named():
    with pytest.raises(NonCommutingChecksError) as exc:
        StabilizerCode.from_strings(["ZZ", "XI"])
    assert exc.value.pair == (0, 1)


def test_degree_profile():
    prof = degree_profile(five_qubit())
    assert prof.total == [3, 3, 3, 4, 3]
    assert prof.of(0, "X") == 2 and prof.of(0, "Z") == 1


@settings(max_examples=25)
@given(st.integers(3, 8), st.integers(0, 10**6))
def test_k_matches_span_oracle(n, seed):
    rng = np.random.default_rng(seed)
    code = random_stabilizer_code(n, int(rng.integers(1, n + 1)), rng, redundant=1)
    span_rank = oracle_rank([pauli_int(c) for c in code.checks])
    assert compute_k(code) == n - span_rank


@settings(max_examples=25)
@given(st.integers(2, 6), st.integers(0, 10**6))
def test_k_of_subsystem_matches_center_formula(n, seed):
    rng = np.random.default_rng(seed)
    gens = [parse_pauli("".join(rng.choice(list("IXYZ"), size=n))) for _ in range(int(rng.integers(1, 2 * n)))]
    gens = [g for g in gens if not g.is_identity()] or [parse_pauli("Z" + "I" * (n - 1))]
    sub = SubsystemCode(n, gens, ["data"] * n)
    assert compute_k(sub) == compute_k_via_center(sub)


def test_bacon_shor_subsystem():
    # 2x2 Bacon-Shor: gauge XX on rows, ZZ on columns; one logical qubit
    gens = [parse_pauli(s) for s in ("XXII", "IIXX", "ZIZI", "IZIZ")]
    sub = SubsystemCode(4, gens, ["data"] * 4)
    assert compute_k(sub) == 1


@pytest.mark.parametrize("make", [five_qubit, shor, four_two_two, toric])
def test_logical_pairs(make):
    code = make()
    pairs = logical_pairs(code)
    assert len(pairs) == code.k
    flat = [p for pair in pairs for p in pair]
    for i, a in enumerate(flat):
        assert all(commutes(a, c) for c in code.checks)
        for j, b in enumerate(flat):
            partner = i // 2 == j // 2 and i != j
            assert commutes(a, b) != partner


@pytest.mark.parametrize("make", [repetition, five_qubit, four_two_two, shor])
def test_dressed_distance_matches_brute_force(make):
    code = make()
    d = code_distance(code)
    assert d == brute_distance(code.checks, bare_logicals(code), code.n, code.n)
    res = dressed_distance(code, d)
    assert res.found and res.witness.weight == d
    w = res.witness
    assert all(commutes(w, c) for c in code.checks)
    assert not all(commutes(w, lg) for lg in bare_logicals(code))


def test_distance_search_inconclusive():
    res = dressed_distance(five_qubit(), 2)
    assert not res.found and res.d == 3
    with pytest.raises(ValueError):
        dressed_distance(five_qubit(), 0)


def test_dressed_distance_of_subsystem_code():
    gens = [parse_pauli(s) for s in ("XXII", "IIXX", "ZIZI", "IZIZ")]
    sub = SubsystemCode(4, gens, ["data"] * 4)
    assert dressed_distance(sub, 4).d == 2


def test_surface_code_family():
    for d in (2, 3, 4):
        code = rotated_surface(d)
        assert code.n == d * d and code.k == 1
    assert code_distance(rotated_surface(3)) == 3


def test_relations():
    code = overcomplete_repetition()
    rels = relations(code)
    assert len(rels) == code.m - oracle_rank([pauli_int(c) for c in code.checks])
    assert all(is_relation(code, r) for r in rels)
    torus = toric()
    assert len(relations(torus)) == 2  # product of all stars, product of all plaquettes
    assert relations(five_qubit()) == []
