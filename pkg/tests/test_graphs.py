import itertools
from fractions import Fraction

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wirecodes.codes import compute_k
from wirecodes.fixtures import NAMED, five_qubit, repetition, shor
from wirecodes.graphs import (
    EmbeddingError,
    EmbeddingPlan,
    GeneralGraph,
    GraphFormatError,
    cheeger_exact,
    embed_on_graph,
    embed_with_plan,
    expansion_lower_bound,
    parse_edge_list,
    plan_embedding,
    route_congestion,
)
from wirecodes.layout import PlacedWireCode, check_locality
from wirecodes.wire import build_wire_code, recovery_ok


def brute_cheeger(g):
    """Direct definition over every subset of size at most n/2."""
    best = None
    for size in range(1, g.n // 2 + 1):
        for subset in itertools.combinations(range(g.n), size):
            inside = set(subset)
            cut = sum(1 for u, v in g.edges if (u in inside) != (v in inside))
            val = Fraction(cut, size)
            best = val if best is None else min(best, val)
    return best


def test_parse_edge_list():
    g = parse_edge_list("# square\n0 1\n1 2\n2 3 # last\n3 0\n\n1 0\n")
    assert g.n == 4 and g.n_edges == 4 and g.max_degree == 2
    assert g.distance(0, 0) == 0 and g.distance(0, 1) == 1 and g.distance(0, 2) == 2


@pytest.mark.parametrize(
    "text,line", [("0 1\n1\n", 2), ("0 x\n", 1), ("0 0\n", 1), ("0 -1\n", 1), ("# only\n", None)]
)
def test_parse_edge_list_errors(text, line):
    with pytest.raises(GraphFormatError) as exc:
        parse_edge_list(text)
    assert exc.value.line == line


def test_cheeger_known_values():
    assert cheeger_exact(GeneralGraph.complete(4)) == 2
    assert cheeger_exact(GeneralGraph.path(4)) == Fraction(1, 2)
    assert cheeger_exact(GeneralGraph.cycle(6)) == Fraction(2, 3)
    assert cheeger_exact(GeneralGraph(4, [(0, 1), (2, 3)])) == 0
    with pytest.raises(ValueError):
        cheeger_exact(GeneralGraph.cycle(30))


@settings(max_examples=30)
@given(st.integers(3, 9), st.floats(0.2, 0.9), st.integers(0, 10**6))
def test_cheeger_matches_definition_and_spectral_bound(n, p, seed):
    g = GeneralGraph.from_networkx(nx.gnp_random_graph(n, p, seed=seed))
    h = cheeger_exact(g)
    assert h == brute_cheeger(g)
    lam = expansion_lower_bound(g)
    assert lam <= float(h) + 1e-6
    if g.is_connected():
        lap = nx.laplacian_matrix(nx.Graph(g.edges)).toarray()
        assert lam == pytest.approx(np.sort(np.linalg.eigvalsh(lap))[1] / 2, abs=1e-5)
    else:
        assert lam == 0


def test_random_regular_graph():
    g = GeneralGraph.random_regular(64, 3, seed=1)
    assert g.n == 64 and g.n_edges == 96 and g.max_degree == 3
    assert g.is_connected() and expansion_lower_bound(g) > 0


def test_route_congestion_counts_usage():
    g = GeneralGraph.cycle(6)
    pairs = [(0, 3), (1, 4), (2, 5), (0, 0)]
    r = route_congestion(g, pairs, seed=0)
    assert r.paths[3] == [0]
    for (a, b), p in zip(pairs, r.paths):
        assert p[0] == a and p[-1] == b
        assert all(g.adjacent(u, v) for u, v in zip(p, p[1:]))
    assert r.usage == r.recount(g)
    assert r.congestion <= 2
    with pytest.raises(EmbeddingError):
        route_congestion(GeneralGraph(4, [(0, 1), (2, 3)]), [(0, 3)])


def _check(code, placed):
    rep = check_locality(placed)
    assert rep.ok, rep.violations[:3]
    assert compute_k(placed.wire.base) == compute_k(code)
    assert recovery_ok(placed.wire)


@pytest.mark.parametrize("name", sorted(NAMED))
@pytest.mark.parametrize("reduce", [True, False])
def test_embed_fixtures_on_expander(name, reduce):
    code = NAMED[name]()
    g = GeneralGraph.random_regular(64, 3, seed=2)
    placed = embed_on_graph(code, g, seed=0, reduce=reduce)
    _check(code, placed)
    if reduce:
        assert placed.wire.max_weight() <= 3 and placed.wire.max_degree() <= 3
    assert placed.meta["congestion"] == placed.plan.max_congestion


def test_embed_repetition_on_cycle():
    code = repetition()
    _check(code, embed_on_graph(code, GeneralGraph.cycle(6)))


def test_embed_with_stacking_on_an_edge():
    code = five_qubit()
    g = GeneralGraph.complete(2)
    with pytest.raises(EmbeddingError, match="9 vertices"):
        embed_on_graph(code, g)
    placed = embed_on_graph(code, g, allow_stacking=True)
    _check(code, placed)
    assert set(placed.placement) <= {0, 1}


def test_plan_invariants_and_roundtrip():
    code = shor()
    g = GeneralGraph.random_regular(40, 4, seed=0)
    plan = plan_embedding(code, g, seed=3)
    assert len(set(plan.eta_qubit + plan.eta_check)) == code.n + code.m
    for (q, s), path in plan.paths.items():
        assert path[0] == plan.eta_qubit[q] and path[-1] == plan.eta_check[s]
    back = EmbeddingPlan.from_json(plan.to_json())
    assert back.paths == plan.paths and back.c == plan.c
    placed = embed_with_plan(build_wire_code(code), back, g)
    _check(code, placed)


def test_embed_with_plan_rejects_mismatch():
    g = GeneralGraph.random_regular(20, 3, seed=0)
    plan = plan_embedding(repetition(), g)
    with pytest.raises(EmbeddingError):
        embed_with_plan(build_wire_code(five_qubit()), plan, g)


def test_embed_deterministic_and_roundtrip():
    g = GeneralGraph.random_regular(30, 3, seed=4)
    a = embed_on_graph(five_qubit(), g, seed=7)
    b = embed_on_graph(five_qubit(), g, seed=7)
    assert a.to_json(sort_keys=True) == b.to_json(sort_keys=True)
    back = PlacedWireCode.from_json(a.to_json())
    assert isinstance(back.target, GeneralGraph) and check_locality(back).ok


def test_disconnected_graph_rejected():
    g = GeneralGraph(12, [(i, i + 1) for i in range(5)] + [(i, i + 1) for i in range(6, 11)])
    with pytest.raises(EmbeddingError):
        embed_on_graph(repetition(), g)


@pytest.mark.parametrize("n", [5, 8, 13])
def test_cycle_spectrum(n):
    assert expansion_lower_bound(GeneralGraph.cycle(n)) == pytest.approx(1 - np.cos(2 * np.pi / n), abs=1e-6)


def test_route_congestion_single_pair_and_matching():
    g = GeneralGraph.cycle(9)
    r = route_congestion(g, [(0, 4)])
    assert len(r.paths[0]) == 5 and r.congestion == 1
    k = GeneralGraph.complete(10)
    r = route_congestion(k, [(2 * i, 2 * i + 1) for i in range(5)], seed=3)
    assert r.congestion == 1 and all(len(p) == 2 for p in r.paths)


def test_route_congestion_on_expander():
    g = GeneralGraph.random_regular(64, 3, seed=5)
    rng = np.random.default_rng(5)
    ends = rng.permutation(64)
    pairs = [(int(ends[2 * i]), int(ends[2 * i + 1])) for i in range(32)]
    r = route_congestion(g, pairs, seed=5)
    for (a, b), p in zip(pairs, r.paths):
        steps = [frozenset(e) for e in zip(p, p[1:])]
        assert p[0] == a and p[-1] == b and len(steps) == len(set(steps))
    assert r.usage == r.recount(g)
    assert r.congestion <= 15


def _manual_plan(code, eta_q, eta_s, paths):
    return EmbeddingPlan(list(eta_q), list(eta_s), dict(paths))


def test_unit_length_plan_is_plain_build():
    code = five_qubit()
    g = GeneralGraph.complete(2)
    pairs = [(q, s) for s, c in enumerate(code.checks) for q in c.support]
    plan = _manual_plan(code, [0] * code.n, [0] * code.m, {p: [0] for p in pairs})
    placed = embed_with_plan(build_wire_code(code), plan, g)
    assert placed.wire.gauges == build_wire_code(code).gauges


def test_length_seven_path_adds_six_qubits():
    from wirecodes.fixtures import single_check

    code = single_check("ZZ")
    g = GeneralGraph.path(8)
    plan = _manual_plan(code, [0, 6], [6], {(0, 0): list(range(7)), (1, 0): [6]})
    placed = embed_with_plan(build_wire_code(code), plan, g)
    assert placed.wire.n == build_wire_code(code).n + 6
    assert compute_k(placed.wire.base) == compute_k(code)
    assert check_locality(placed).ok


def test_embedding_meta_reports_density_screen():
    g = GeneralGraph.random_regular(64, 3, seed=2)
    meta = embed_on_graph(five_qubit(), g).meta
    assert meta["expansion_lower_bound"] > 0 and meta["congestion_target"] == 15
