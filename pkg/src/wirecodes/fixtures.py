"""Small input codes used throughout the tests, benchmarks and CLI examples."""

import numpy as np

from .codes import StabilizerCode
from .pauli import PauliOperator

SHOR_CHECKS = [
    "XXXXXXIII",
    "IIIXXXXXX",
    "ZZIIIIIII",
    "IZZIIIIII",
    "IIIZZIIII",
    "IIIIZZIII",
    "IIIIIIZZI",
    "IIIIIIIZZ",
]


def repetition(n=3):
    checks = []
    for i in range(n - 1):
        s = ["I"] * n
        s[i] = s[i + 1] = "Z"
        checks.append("".join(s))
    return StabilizerCode.from_strings(checks)


def five_qubit():
    return StabilizerCode.from_strings(["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"])


def shor():
    return StabilizerCode.from_strings(SHOR_CHECKS)


def four_two_two():
    return StabilizerCode.from_strings(["XXXX", "ZZZZ"])


def overcomplete_repetition():
    return StabilizerCode.from_strings(["ZZI", "IZZ", "ZIZ"])


def single_check(text="ZZ"):
    return StabilizerCode.from_strings([text])


def toric(L=2):
    """Toric code on an L x L torus; qubits are edges, X stars then Z plaquettes."""
    n = 2 * L * L

    def h(i, j):
        return (i % L) * L + (j % L)

    def v(i, j):
        return L * L + (i % L) * L + (j % L)

    checks = []
    for i in range(L):
        for j in range(L):
            star = {h(i, j), h(i, j - 1), v(i, j), v(i - 1, j)}
            checks.append(PauliOperator.from_sparse(n, {q: "X" for q in star}))
    for i in range(L):
        for j in range(L):
            plaq = {h(i, j), h(i + 1, j), v(i, j), v(i, j + 1)}
            checks.append(PauliOperator.from_sparse(n, {q: "Z" for q in plaq}))
    return StabilizerCode(n, checks)


def rotated_surface(d):
    """Rotated surface code on a d x d patch (n = d^2, k = 1)."""
    n = d * d

    def q(r, c):
        return r * d + c

    checks = []
    for r in range(-1, d):
        for c in range(-1, d):
            cells = [(r + dr, c + dc) for dr in (0, 1) for dc in (0, 1)]
            qubits = [q(a, b) for a, b in cells if 0 <= a < d and 0 <= b < d]
            letter = "X" if (r + c) % 2 == 0 else "Z"
            if len(qubits) == 4:
                keep = True
            elif len(qubits) == 2:
                on_rows = r in (-1, d - 1)
                keep = on_rows if letter == "X" else not on_rows
            else:
                keep = False
            if keep:
                checks.append(PauliOperator.from_sparse(n, {x: letter for x in qubits}))
    return StabilizerCode(n, checks)


def random_stabilizer_code(n, n_checks, rng, depth=None, redundant=0):
    """Random commuting checks: Z_1..Z_r scrambled by a random phaseless Clifford."""
    if isinstance(rng, (int, np.integer)) or rng is None:
        rng = np.random.default_rng(rng)
    x = np.zeros((n_checks, n), dtype=np.uint8)
    z = np.zeros((n_checks, n), dtype=np.uint8)
    for i in range(n_checks):
        z[i, i] = 1
    for _ in range(depth or 4 * n):
        kind = rng.integers(3)
        a = int(rng.integers(n))
        if kind == 0:
            x[:, a], z[:, a] = z[:, a].copy(), x[:, a].copy()
        elif kind == 1:
            z[:, a] ^= x[:, a]
        else:
            b = int(rng.integers(n - 1))
            b += b >= a
            x[:, b] ^= x[:, a]
            z[:, a] ^= z[:, b]
    checks = []
    for i in range(n_checks):
        terms = {}
        for j in range(n):
            key = (int(x[i, j]), int(z[i, j]))
            if key != (0, 0):
                terms[j] = {(1, 0): "X", (0, 1): "Z", (1, 1): "Y"}[key]
        checks.append(PauliOperator.from_sparse(n, terms))
    for _ in range(redundant if n_checks >= 2 else 0):
        i, j = rng.choice(n_checks, size=2, replace=False)
        p = checks[i] * checks[j]
        if not p.is_identity():
            checks.append(p)
    return StabilizerCode(n, checks)


NAMED = {
    "repetition": repetition,
    "five": five_qubit,
    "shor": shor,
    "422": four_two_two,
    "toric2": toric,
}
