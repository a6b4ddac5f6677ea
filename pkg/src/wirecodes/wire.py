"""Weight and degree reduction of a stabilizer code into a wire code.

Construction summary (all qubit ids are integers, data qubits first):

* every data qubit ``q`` with at least two checks acting on it by the same
  Pauli ``P`` gets a P-branch: copy qubits ``r_1..r_d`` joined by
  ``P_q Z_{r_1}``, ``Z_{r_i} Z_{r_{i+1}}`` and a single-site ``X`` on each copy;
  the ``j``-th such check is moved onto ``Z_{r_j}``;
* every check of weight ``w >= 4`` (after the move) is split into a chain of
  ``w - 2`` three-body gauge checks through ``w - 3`` ancilla qubits, each
  ancilla carrying a single-site ``X``;
* any Tanner edge can afterwards be stretched into a ``ZZ`` wire of
  ancillas (``stretch_edge``).

The provenance maps (branches, ``anc_of``, ``port``) are what the recovery,
syndrome and verification code consume.
"""

import copy
import json
from dataclasses import dataclass, field

import numpy as np

from .codes import PAULI_TYPES, StabilizerCode, SubsystemCode, degree_profile
from .pauli import PauliOperator, gf2_solve, product

FORMAT = "wirecode/1"


class RecoveryError(AssertionError):
    pass


@dataclass
class Branch:
    pauli_type: str
    target_qubit: int
    copy_qubits: list
    # gauge indices from the data qubit outwards; links[:depth[j]] multiply to P_q Z_{copy j}
    links: list = field(default_factory=list)
    depth: list = field(default_factory=list)
    single_x: list = field(default_factory=list)

    @property
    def attach_check(self):
        return self.links[0]

    @property
    def chain_checks(self):
        return self.links[1:]


class WireCode:
    """A subsystem code together with its provenance back to the input code."""

    def __init__(self, input_code):
        self.input = input_code
        self.register = ["data"] * input_code.n
        self.terms = []  # per gauge: {qubit: letter}
        self.group = []  # per gauge: "single" | "copy" | "anc"
        self.owner = []  # per gauge: ("branch", q, P) | ("check", s) | ("qubit", u)
        self.branches = {}
        self.anc_of = {s: [] for s in range(input_code.m)}
        self.single_of = {}
        self.port = {}
        self.edge_lengths = {}

    # -- construction primitives ------------------------------------------------

    @property
    def n(self):
        return len(self.register)

    @property
    def n_data(self):
        return self.input.n

    def add_qubit(self, register, single_owner=None):
        u = len(self.register)
        self.register.append(register)
        g = self.add_gauge({u: "X"}, "single", single_owner or ("qubit", u))
        self.single_of[u] = g
        return u

    def add_gauge(self, terms, group, owner):
        self.terms.append(dict(terms))
        self.group.append(group)
        self.owner.append(owner)
        return len(self.terms) - 1

    def stretch(self, u, g, length):
        """In-place stretch of the Tanner edge (qubit ``u``, gauge ``g``); returns new qubit ids."""
        if length < 1:
            raise ValueError("edge length must be >= 1")
        if u not in self.terms[g]:
            raise KeyError(f"qubit {u} is not in the support of gauge {g}")
        if self.group[g] == "single":
            raise ValueError("single-site gauges have no edges to stretch")
        self.edge_lengths[(u, g)] = length
        if length == 1:
            return []
        group, owner = self.group[g], self.owner[g]
        register = "copy" if group == "copy" else "anc"
        new_qubits = [self.add_qubit(register, owner) for _ in range(length - 1)]
        letter = self.terms[g].pop(u)
        chain = [self.add_gauge({u: letter, new_qubits[0]: "Z"}, group, owner)]
        for a, b in zip(new_qubits, new_qubits[1:]):
            chain.append(self.add_gauge({a: "Z", b: "Z"}, group, owner))
        self.terms[g][new_qubits[-1]] = "Z"
        singles = [self.single_of[a] for a in new_qubits]
        if group == "anc":
            self.anc_of[owner[1]].extend(chain)
        else:
            branch = self.branches[(owner[1], owner[2])]
            pos = branch.links.index(g)
            branch.links[pos:pos] = chain
            branch.depth = [d + len(chain) if d > pos else d for d in branch.depth]
            branch.single_x.extend(singles)
        return new_qubits

    # -- views ------------------------------------------------------------------

    def gauge(self, i):
        return PauliOperator.from_sparse(self.n, self.terms[i])

    @property
    def gauges(self):
        n = self.n
        return [PauliOperator.from_sparse(n, t) for t in self.terms]

    @property
    def base(self):
        idx = {"single": [], "copy": [], "anc": []}
        for i, grp in enumerate(self.group):
            idx[grp].append(i)
        return SubsystemCode(
            self.n, self.gauges, list(self.register), idx["single"], idx["copy"], idx["anc"]
        )

    def multi_gauges(self):
        return [i for i, t in enumerate(self.terms) if len(t) >= 2]

    def max_weight(self):
        return max((len(self.terms[i]) for i in self.multi_gauges()), default=0)

    def degrees(self):
        deg = [0] * self.n
        for i in self.multi_gauges():
            for u in self.terms[i]:
                deg[u] += 1
        return deg

    def max_degree(self):
        return max(self.degrees(), default=0)

    def port_qubits(self, s):
        """Qubits through which check ``s`` touches each data qubit, in support order."""
        return [self.port[(s, q)] for q in self.input.checks[s].support]

    def copy_correction(self, s):
        """Gauge indices of the branch links that carry check ``s`` back to the data qubits."""
        out = []
        for q in self.input.checks[s].support:
            r = self.port[(s, q)]
            if r == q:
                continue
            letter = self.input.checks[s].letter(q)
            branch = self.branches[(q, letter)]
            j = branch.copy_qubits.index(r)
            out.extend(branch.links[: branch.depth[j]])
        return out

    def z_part(self, s):
        """Gauges whose product is ``s`` on the data register and identity elsewhere."""
        return list(self.anc_of[s]) + self.copy_correction(s)

    def image_of(self, s):
        n = self.n
        return product((PauliOperator.from_sparse(n, self.terms[i]) for i in self.z_part(s)), n)

    def dressing(self, s):
        """Copy/anc qubits ``D`` such that ``s (x) X_D`` commutes with every gauge."""
        n = self.n
        target = self.input.checks[s].extend(n)
        free = [u for u in range(n) if self.register[u] != "data"]
        col = {u: i for i, u in enumerate(free)}
        a = np.zeros((len(self.terms), len(free)), dtype=np.uint8)
        b = np.zeros(len(self.terms), dtype=np.uint8)
        for gi, t in enumerate(self.terms):
            anti = 0
            for u, letter in t.items():
                if u < self.n_data:
                    anti ^= _anticommute(target.letter(u), letter)
                elif letter in ("Z", "Y"):
                    a[gi, col[u]] = 1
            b[gi] = anti
        x = gf2_solve(a, b)
        if x is None:
            raise RecoveryError(f"check {s} has no X-type dressing into the stabilizer group")
        return [free[i] for i in np.flatnonzero(x)]

    def dressed_stabilizer(self, s):
        n = self.n
        dressed = self.input.checks[s].extend(n)
        for u in self.dressing(s):
            dressed = dressed * PauliOperator.single(n, u, "X")
        return dressed

    def copy(self):
        return copy.deepcopy(self)

    # -- serialization ----------------------------------------------------------

    def to_dict(self):
        return {
            "format": FORMAT,
            "input": {"n": self.input.n, "checks": [str(c) for c in self.input.checks]},
            "n": self.n,
            "registers": list(self.register),
            "gauges": [
                {"terms": [[u, p] for u, p in sorted(t.items())], "group": grp, "owner": list(own)}
                for t, grp, own in zip(self.terms, self.group, self.owner)
            ],
            "branches": [
                {
                    "type": b.pauli_type,
                    "target": b.target_qubit,
                    "copies": b.copy_qubits,
                    "links": b.links,
                    "depth": b.depth,
                    "single_x": b.single_x,
                }
                for b in self.branches.values()
            ],
            "anc_of": [self.anc_of[s] for s in range(self.input.m)],
            "ports": [[s, q, r] for (s, q), r in sorted(self.port.items())],
            "edge_lengths": [[u, g, ell] for (u, g), ell in sorted(self.edge_lengths.items())],
        }

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, doc):
        if doc.get("format") != FORMAT:
            raise ValueError(f"expected format {FORMAT!r}, got {doc.get('format')!r}")
        code = StabilizerCode.from_strings(doc["input"]["checks"])
        wc = cls(code)
        wc.register = list(doc["registers"])
        for gdoc in doc["gauges"]:
            wc.terms.append({int(u): p for u, p in gdoc["terms"]})
            wc.group.append(gdoc["group"])
            wc.owner.append(tuple(gdoc["owner"]))
        for i, grp in enumerate(wc.group):
            if grp == "single":
                (u,) = wc.terms[i]
                wc.single_of[u] = i
        for bdoc in doc["branches"]:
            b = Branch(bdoc["type"], bdoc["target"], list(bdoc["copies"]), list(bdoc["links"]),
                       list(bdoc["depth"]), list(bdoc["single_x"]))
            wc.branches[(b.target_qubit, b.pauli_type)] = b
        wc.anc_of = {s: list(v) for s, v in enumerate(doc["anc_of"])}
        wc.port = {(s, q): r for s, q, r in doc["ports"]}
        wc.edge_lengths = {(u, g): ell for u, g, ell in doc["edge_lengths"]}
        return wc

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def _anticommute(a, b):
    if a == "I" or b == "I" or a == b:
        return 0
    return 1


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------

def degree_reduce(code):
    """Branches for every (qubit, Pauli) seen by two or more checks; no weight reduction yet."""
    wc = WireCode(code)
    prof = degree_profile(code)
    for q in range(code.n):
        for letter in PAULI_TYPES:
            users = [s for s, c in enumerate(code.checks) if c.letter(q) == letter]
            if len(users) < 2:
                for s in users:
                    wc.port[(s, q)] = q
                continue
            assert len(users) == prof.of(q, letter)
            branch = Branch(letter, q, [])
            wc.branches[(q, letter)] = branch
            prev = None
            for j, s in enumerate(users):
                r = wc.add_qubit("copy", ("branch", q, letter))
                branch.copy_qubits.append(r)
                branch.single_x.append(wc.single_of[r])
                if prev is None:
                    link = wc.add_gauge({q: letter, r: "Z"}, "copy", ("branch", q, letter))
                else:
                    link = wc.add_gauge({prev: "Z", r: "Z"}, "copy", ("branch", q, letter))
                branch.links.append(link)
                branch.depth.append(j + 1)
                wc.port[(s, q)] = r
                prev = r
    return wc


def chain_terms(letters, ancillas):
    """Three-body chain for a check given as ``[(qubit, letter), ...]`` in chain order."""
    w = len(letters)
    if w <= 3:
        return [dict(letters)]
    if len(ancillas) != w - 3:
        raise ValueError(f"a weight-{w} check needs {w - 3} ancillas")
    (q1, p1), (q2, p2) = letters[0], letters[1]
    out = [{q1: p1, q2: p2, ancillas[0]: "Z"}]
    for i in range(1, w - 3):
        qi, pi = letters[i + 1]
        out.append({ancillas[i - 1]: "Z", qi: pi, ancillas[i]: "Z"})
    (qa, pa), (qb, pb) = letters[-2], letters[-1]
    out.append({ancillas[-1]: "Z", qa: pa, qb: pb})
    return out


def weight_reduce_check(check, order=None):
    """Split one check into weight-3 gauge checks on ``check.n + w - 3`` qubits.

    Returns ``(ancilla_ids, gauge_checks)``; the gauge checks include one
    single-site ``X`` per ancilla.
    """
    w = check.weight
    if w < 2:
        raise ValueError(f"cannot weight-reduce a weight-{w} check")
    order = list(order) if order is not None else check.support
    if sorted(order) != check.support:
        raise ValueError("order must be a permutation of the check support")
    n_anc = max(0, w - 3)
    n_total = check.n + n_anc
    ancillas = list(range(check.n, n_total))
    letters = [(q, check.letter(q)) for q in order]
    gauges = [PauliOperator.from_sparse(n_total, t) for t in chain_terms(letters, ancillas)]
    gauges += [PauliOperator.single(n_total, a, "X") for a in ancillas]
    return ancillas, gauges


def _reduce_checks(wc):
    code = wc.input
    for s, check in enumerate(code.checks):
        letters = []
        for q in check.support:
            r = wc.port[(s, q)]
            letters.append((r, "Z" if r != q else check.letter(q)))
        ancillas = [wc.add_qubit("anc", ("check", s)) for _ in range(max(0, len(letters) - 3))]
        for t in chain_terms(letters, ancillas):
            wc.anc_of[s].append(wc.add_gauge(t, "anc", ("check", s)))
    return wc


def build_wire_code(code, reduce=True):
    """Weight- and degree-three wire code with unit edge lengths.

    With ``reduce=False`` the checks are kept whole (no branches, no chains);
    this is the starting point for graph embeddings that skip the reduction.
    """
    if not isinstance(code, StabilizerCode):
        raise TypeError("build_wire_code expects a StabilizerCode")
    if not reduce:
        wc = WireCode(code)
        for s, check in enumerate(code.checks):
            for q in check.support:
                wc.port[(s, q)] = q
            wc.anc_of[s].append(wc.add_gauge(check.sparse(), "anc", ("check", s)))
        return wc
    return _reduce_checks(degree_reduce(code))


def stretch_edge(wire, edge, length):
    """Copy of ``wire`` with Tanner edge ``(qubit, gauge)`` replaced by a length-``length`` wire."""
    if length < 1:
        raise ValueError("edge length must be >= 1")
    out = wire.copy()
    u, g = edge
    out.stretch(u, g, length)
    return out


def stabilizer_recovery(wire, s):
    """Product of check ``s``'s gauges with its copy correction; must equal ``s (x) 1``."""
    img = wire.image_of(s)
    expected = wire.input.checks[s].extend(wire.n)
    if img != expected:
        raise RecoveryError(f"check {s}: recovered {img} != {expected}")
    return img


def recovery_ok(wire):
    try:
        for s in range(wire.input.m):
            stabilizer_recovery(wire, s)
    except RecoveryError:
        return False
    return True


def tanner_edges(wire):
    """Resolved Tanner graph edges ``(qubit, gauge)`` of the multi-qubit gauges."""
    return [(u, g) for g in wire.multi_gauges() for u in sorted(wire.terms[g])]


def n_wire_bound(code):
    """Loose qubit-count bound ``3 * delta * n`` for unit edge lengths."""
    return 3 * max(1, code.max_degree) * code.n

