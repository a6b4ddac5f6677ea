"""Numba vs pure-numpy timings for the hot kernels.

    python benchmarks/bench_kernels.py [--repeat 3]

The first numba call of each kernel includes JIT compilation; it is timed
separately and excluded from the steady-state numbers.
"""

import argparse
import time

import numpy as np

from wirecodes import _kernels
from wirecodes.codes import _single_qubit_masks, bare_logicals
from wirecodes.fixtures import rotated_surface
from wirecodes.layout import GridTarget
from wirecodes.pauli import center
from wirecodes.wire import build_wire_code


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def rref_case():
    rng = np.random.default_rng(0)
    bits = rng.integers(0, 2, size=(400, 800), dtype=np.uint8)
    words = _kernels.pack_rows(bits)
    return "rref 400x800", lambda: _kernels.rref(words, 800)


def distance_case():
    wire = build_wire_code(rotated_surface(3))
    base = wire.base
    stabs = center(base.gauge_generators, base.n)
    ms = _single_qubit_masks(stabs, base.n)
    ml = _single_qubit_masks(bare_logicals(base), base.n)
    # weight 2 on the surface wire code finds nothing, so the whole space is scanned
    return f"dressed search w=2, n={base.n}", lambda: _kernels.first_logical(ms, ml, 2)


def dijkstra_case():
    grid = GridTarget((40, 40, 40))
    indptr, indices, eids = grid.csr()
    ecost = np.ones(grid.n_edges)
    vcost = np.zeros(grid.n_vertices)
    vblock = np.zeros(grid.n_vertices, dtype=bool)
    eblock = np.zeros(grid.n_edges, dtype=bool)
    src, dst = 0, grid.n_vertices - 1
    return "dijkstra 40^3 grid", lambda: _kernels.dijkstra_path(
        indptr, indices, eids, src, dst, ecost, vcost, vblock, eblock
    )


def negotiate_case():
    side, h = 8, 16
    grid = GridTarget((side, side, h))
    indptr, indices, eids = grid.csr()
    rng = np.random.default_rng(1)
    perm = rng.permutation(side * side)
    srcs = [grid.index((i // side, i % side, 0)) for i in range(side * side)]
    dsts = [grid.index((p // side, p % side, h - 1)) for p in perm]
    block = np.zeros(grid.n_vertices, dtype=bool)
    for v in srcs + dsts:
        block[v] = True
    orders = np.array([np.arange(len(srcs))] + [rng.permutation(len(srcs)) for _ in range(99)])
    own_v = [[s, d] for s, d in zip(srcs, dsts)]
    own_e = [[] for _ in srcs]

    def run():
        return _kernels.negotiate_routes(
            indptr, indices, eids, srcs, dsts, block, np.zeros(grid.n_edges, dtype=bool),
            own_v, own_e, False, orders,
        )

    return "negotiated routing 8x8x16 permutation", run


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    cases = [rref_case(), distance_case(), dijkstra_case(), negotiate_case()]
    print(f"{'kernel':<40} {'numpy s':>10} {'numba s':>10} {'jit s':>8} {'speedup':>8}")
    for name, fn in cases:
        with _kernels.use_backend("numpy"):
            t_np = _time(fn, args.repeat)
        with _kernels.use_backend("numba"):
            t0 = time.perf_counter()
            fn()
            jit = time.perf_counter() - t0
            t_nb = _time(fn, args.repeat)
        print(f"{name:<40} {t_np:>10.4f} {t_nb:>10.4f} {jit:>8.2f} {t_np / t_nb:>8.1f}x")


if __name__ == "__main__":
    main()
