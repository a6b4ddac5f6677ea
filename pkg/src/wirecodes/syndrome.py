"""Two-phase gauge measurement schedule and a stabilizer-tableau check of it.

Each round measures the multi-qubit gauges that multiply to a set of
qubit-disjoint input checks (phase 1), then single-qubit X on every anc/copy
qubit those gauges touched (phase 2).  The syndrome bit of check ``s`` is the
value of its dressed stabilizer ``s (x) X_D``, which no gauge measurement
disturbs: the phase-1 outcomes of ``s``'s gauges times the current X values of
the dressing qubits ``D``.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .codes import logical_pairs
from .pauli import PauliOperator, commutes, from_row, gf2_rank, gf2_solve, to_matrix

REPORT_FORMAT = "syndrome/1"


class ScheduleError(ValueError):
    pass


class IncompleteRecordError(ScheduleError):
    pass


# ---------------------------------------------------------------------------
# schedule
# ---------------------------------------------------------------------------

@dataclass
class Round:
    color: int
    checks: list
    phase1: list  # layers of support-disjoint gauge indices
    phase2: list  # anc/copy qubits measured in X

    @property
    def gauges(self):
        return [g for layer in self.phase1 for g in layer]

    @property
    def depth(self):
        return len(self.phase1)


@dataclass
class Schedule:
    rounds: list
    round_of: dict  # input check -> round index
    gauges_of: dict  # input check -> gauges whose product is the check
    dressing_of: dict  # input check -> dressing qubits
    measured_rounds: dict = field(default_factory=dict)  # qubit -> rounds measuring X on it

    @property
    def n_rounds(self):
        return len(self.rounds)

    def outcome_keys(self, s, pass_index=0):
        """Record entries whose XOR is the syndrome bit of check ``s`` in a given pass."""
        r = self.round_of[s]
        R = self.n_rounds
        now = pass_index * R + r
        keys = [("phase1", now, g) for g in self.gauges_of[s]]
        for u in self.dressing_of[s]:
            latest = None
            for back in range(now, -1, -1):
                if back % R in self.measured_rounds.get(u, ()):
                    latest = back
                    break
            if latest is not None:
                keys.append(("phase2", latest, u))
        return keys

    def to_dict(self):
        return {
            "rounds": [
                {"color": rd.color, "checks": rd.checks, "phase1": rd.phase1, "phase2": rd.phase2}
                for rd in self.rounds
            ]
        }


def _touched(wire, gauges):
    return {u for g in gauges for u in wire.terms[g]}


def _layers(wire, gauges):
    """Greedy split into layers of support-disjoint gauges."""
    layers, used = [], []
    for g in gauges:
        support = set(wire.terms[g])
        for layer, qubits in zip(layers, used):
            if not (qubits & support):
                layer.append(g)
                qubits |= support
                break
        else:
            layers.append([g])
            used.append(set(support))
    return layers


def build_schedule(wire):
    """Colour input checks so same-coloured checks share no wire qubit; one round per colour."""
    m = wire.input.m
    gauges_of = {s: wire.z_part(s) for s in range(m)}
    touched = {s: _touched(wire, gauges_of[s]) for s in range(m)}
    colors = []  # list of (checks, qubits)
    for s in range(m):
        for checks, qubits in colors:
            if not (qubits & touched[s]):
                checks.append(s)
                qubits |= touched[s]
                break
        else:
            colors.append(([s], set(touched[s])))
    rounds, round_of = [], {}
    measured = {}
    for c, (checks, qubits) in enumerate(colors):
        gauges = [g for s in checks for g in gauges_of[s]]
        phase2 = sorted(u for u in qubits if wire.register[u] != "data")
        rounds.append(Round(c, list(checks), _layers(wire, gauges), phase2))
        for s in checks:
            round_of[s] = c
        for u in phase2:
            measured.setdefault(u, set()).add(c)
    dressing_of = {s: wire.dressing(s) for s in range(m)}
    return Schedule(rounds, round_of, gauges_of, dressing_of, measured)


# ---------------------------------------------------------------------------
# stabilizer tableau
# ---------------------------------------------------------------------------

# power of i from multiplying single-qubit Paulis, indexed by (2x + z) of each factor
_G = np.array(
    [
        [0, 0, 0, 0],  # I * anything
        [0, 0, 1, -1],  # Z * (I, Z, X, Y)
        [0, -1, 0, 1],  # X * (I, Z, X, Y)
        [0, 1, -1, 0],  # Y * (I, Z, X, Y)
    ],
    dtype=np.int64,
)


def _g(x1, z1, x2, z2):
    """Per-qubit exponent of i for the product of Paulis (x1, z1) and (x2, z2)."""
    return _G[2 * x1.astype(np.int64) + z1, 2 * x2.astype(np.int64) + z2]


class Tableau:
    """Stabilizer state on ``n`` qubits with destabilizers and sign bits (starts in |0...0>)."""

    def __init__(self, n, rng=None):
        self.n = n
        self.x = np.zeros((2 * n, n), dtype=np.uint8)
        self.z = np.zeros((2 * n, n), dtype=np.uint8)
        self.r = np.zeros(2 * n, dtype=np.uint8)
        idx = np.arange(n)
        self.x[idx, idx] = 1  # destabilizers X_i
        self.z[n + idx, idx] = 1  # stabilizers Z_i
        self.rng = rng if rng is not None else np.random.default_rng(0)

    @property
    def stabilizers(self):
        n = self.n
        return self.x[n:], self.z[n:], self.r[n:]

    def _anticommuting(self, px, pz, rows):
        return ((self.x[rows] @ pz + self.z[rows] @ px) % 2).astype(bool)

    def _rowsum_into(self, hx, hz, hr, i):
        total = 2 * int(hr) + 2 * int(self.r[i]) + int(_g(self.x[i], self.z[i], hx, hz).sum())
        return hx ^ self.x[i], hz ^ self.z[i], np.uint8((total % 4) // 2)

    def apply_pauli(self, p):
        """Conjugate by a Pauli: flips the sign of every row anticommuting with it."""
        px, pz = _xz(p, self.n)
        flip = self._anticommuting(px, pz, slice(None))
        self.r ^= flip.astype(np.uint8)

    def measure(self, p):
        """Measure Hermitian Pauli ``p``; returns ``(bit, random)`` with bit 1 meaning -1."""
        n = self.n
        px, pz = _xz(p, n)
        anti = self._anticommuting(px, pz, slice(None))
        hits = np.flatnonzero(anti[n:])
        if hits.size:
            p_row = n + int(hits[0])
            rows = np.flatnonzero(anti)
            rows = rows[rows != p_row]
            if rows.size:
                hx, hz = self.x[rows], self.z[rows]
                phase = _g(self.x[p_row][None, :], self.z[p_row][None, :], hx, hz).sum(axis=1)
                total = 2 * self.r[rows].astype(np.int64) + 2 * int(self.r[p_row]) + phase
                self.r[rows] = (total % 4) // 2
                self.x[rows] = hx ^ self.x[p_row]
                self.z[rows] = hz ^ self.z[p_row]
            self.x[p_row - n], self.z[p_row - n], self.r[p_row - n] = self.x[p_row], self.z[p_row], self.r[p_row]
            bit = int(self.rng.integers(2))
            self.x[p_row], self.z[p_row], self.r[p_row] = px, pz, bit
            return bit, True
        sx = np.zeros(n, dtype=np.uint8)
        sz = np.zeros(n, dtype=np.uint8)
        sr = np.uint8(0)
        for i in np.flatnonzero(anti[:n]):
            sx, sz, sr = self._rowsum_into(sx, sz, sr, n + int(i))
        assert np.array_equal(sx, px) and np.array_equal(sz, pz)
        return int(sr), False

    def expectation(self, p):
        """+1/-1 if ``p`` is (up to sign) in the stabilizer group, else 0; does not collapse."""
        n = self.n
        px, pz = _xz(p, n)
        anti = self._anticommuting(px, pz, slice(None))
        if anti[n:].any():
            return 0
        sx = np.zeros(n, dtype=np.uint8)
        sz = np.zeros(n, dtype=np.uint8)
        sr = np.uint8(0)
        for i in np.flatnonzero(anti[:n]):
            sx, sz, sr = self._rowsum_into(sx, sz, sr, n + int(i))
        return -1 if sr else 1

    def check_invariants(self):
        """Stabilizers commute pairwise and are independent."""
        n = self.n
        xs, zs = self.x[n:].astype(np.int64), self.z[n:].astype(np.int64)
        comm = (xs @ zs.T + zs @ xs.T) % 2
        rows = [from_row(np.concatenate([x, z]), n) for x, z in zip(self.x[n:], self.z[n:])]
        return not comm.any() and gf2_rank(rows, n) == n


def _xz(p, n):
    if p.n != n:
        p = p.extend(n)
    mat = to_matrix([p], n)[0]
    return mat[:n].astype(np.uint8), mat[n:].astype(np.uint8)


def prepare_state(generators, n, rng):
    """Tableau for the +1 eigenstate of ``n`` independent commuting Paulis."""
    if len(generators) != n or gf2_rank(generators, n) != n:
        raise ValueError(f"need {n} independent generators, got rank {gf2_rank(generators, n)}")
    tab = Tableau(n, rng)
    bits = [tab.measure(g)[0] for g in generators]
    if any(bits):
        # one Pauli anticommuting exactly with the -1 generators fixes every sign
        mat = to_matrix(generators, n)
        swapped = np.concatenate([mat[:, n:], mat[:, :n]], axis=1)
        sol = gf2_solve(swapped, np.array(bits, dtype=np.uint8))
        tab.apply_pauli(from_row(sol, n))
    return tab


def codeword_generators(wire):
    """Independent input checks, one logical Z per logical qubit, and X on every anc/copy qubit."""
    code = wire.input
    n, nd = wire.n, code.n
    chosen = []
    for c in code.checks:
        if gf2_rank(chosen + [c], nd) > len(chosen):
            chosen.append(c)
    chosen += [b for _, b in logical_pairs(code)]
    gens = [c.extend(n) for c in chosen]
    gens += [PauliOperator.single(n, u, "X") for u in range(nd, n)]
    return gens


# ---------------------------------------------------------------------------
# simulation
# ---------------------------------------------------------------------------

@dataclass
class SimulationReport:
    syndromes: list  # per pass: list of bits per input check
    record: list  # per executed round: {"phase1": {gauge: bit}, "phase2": {qubit: bit}}
    seed: int
    error: str

    @property
    def syndrome(self):
        return self.syndromes[0]

    def to_dict(self):
        return {
            "format": REPORT_FORMAT,
            "seed": self.seed,
            "error": self.error,
            "syndromes": self.syndromes,
            "rounds": [
                {
                    "phase1": [[g, b] for g, b in rd["phase1"].items()],
                    "phase2": [[u, b] for u, b in rd["phase2"].items()],
                }
                for rd in self.record
            ],
        }

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)


def reconstruct_syndrome(record, sched, s, pass_index=0):
    """XOR of the recorded outcomes designated for check ``s``."""
    bit = 0
    for kind, rd, key in sched.outcome_keys(s, pass_index):
        if rd >= len(record) or key not in record[rd][kind]:
            raise IncompleteRecordError(f"record lacks {kind} outcome {key} of round {rd}")
        bit ^= record[rd][kind][key]
    return bit


def _as_data_error(wire, error):
    nd = wire.n_data
    if error is None:
        return PauliOperator.identity(nd)
    if any(q >= nd for q in error.support):
        raise ScheduleError("error must act on the data register only")
    return PauliOperator(nd, error.x, error.z)


def simulate_extraction(wire, sched, error=None, seed=0, passes=1):
    """Run the schedule ``passes`` times after applying ``error`` to a fixed codeword."""
    covered = {g for rd in sched.rounds for g in rd.gauges}
    for s in range(wire.input.m):
        missing = [g for g in wire.anc_of[s] if g not in covered]
        if missing:
            raise ScheduleError(f"schedule never measures gauges {missing} of check {s}")
    error = _as_data_error(wire, error)
    n = wire.n
    rng = np.random.default_rng(seed)
    tab = prepare_state(codeword_generators(wire), n, rng)
    tab.apply_pauli(error.extend(n))
    gauges = wire.gauges
    record = []
    for _ in range(passes):
        for rd in sched.rounds:
            out = {"phase1": {}, "phase2": {}}
            for layer in rd.phase1:
                for g in layer:
                    out["phase1"][g] = tab.measure(gauges[g])[0]
            for u in rd.phase2:
                out["phase2"][u] = tab.measure(PauliOperator.single(n, u, "X"))[0]
            record.append(out)
    syndromes = [
        [reconstruct_syndrome(record, sched, s, p) for s in range(wire.input.m)] for p in range(passes)
    ]
    return SimulationReport(syndromes, record, seed, str(error))


def expected_syndrome(code, error):
    """Anticommutation pattern of ``error`` against the input checks."""
    return [0 if commutes(error, c) else 1 for c in code.checks]
