"""Stabilizer and subsystem code model: k, bare logicals, dressed distance, relations."""

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .pauli import (
    DENSE_LIMIT,
    PauliOperator,
    PauliParseError,
    center,
    commutation_matrix,
    commutes,
    gf2_rank,
    matrix_rank,
    nullspace,
    parse_pauli,
    product,
    reduce_basis,
    symplectic_complement,
    symplectic_pairs,
    to_matrix,
)

PAULI_TYPES = ("X", "Y", "Z")


class CodeError(ValueError):
    pass


class CodeFormatError(CodeError):
    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class NonCommutingChecksError(CodeError):
    def __init__(self, i, j):
        self.pair = (i, j)
        super().__init__(f"checks {i} and {j} do not commute")


@dataclass
class StabilizerCode:
    n: int
    checks: list
    check_labels: list = None

    def __post_init__(self):
        if self.check_labels is None:
            self.check_labels = [f"s{i}" for i in range(len(self.checks))]
        for i, c in enumerate(self.checks):
            if c.n != self.n:
                raise CodeError(f"check {i} acts on {c.n} qubits, expected {self.n}")
            if c.weight == 0:
                raise CodeError(f"check {i} is the identity")
        for i in range(len(self.checks)):
            for j in range(i + 1, len(self.checks)):
                if not commutes(self.checks[i], self.checks[j]):
                    raise NonCommutingChecksError(i, j)

    @classmethod
    def from_strings(cls, strings, labels=None):
        checks = [parse_pauli(s) for s in strings]
        if not checks:
            raise CodeError("a code needs at least one check")
        return cls(checks[0].n, checks, labels)

    @property
    def m(self):
        return len(self.checks)

    @property
    def max_weight(self):
        return max(c.weight for c in self.checks)

    @property
    def max_degree(self):
        prof = degree_profile(self)
        return max(prof.total) if self.n else 0

    @property
    def k(self):
        return self.n - gf2_rank(self.checks, self.n)

    def as_subsystem(self):
        return SubsystemCode(
            self.n,
            list(self.checks),
            ["data"] * self.n,
            single_site_set=[],
            copy_set=[],
            anc_set=list(range(len(self.checks))),
        )

    def to_text(self):
        return "\n".join(str(c) for c in self.checks) + "\n"


def parse_code_text(text):
    """Code file: one Pauli string per line, ``#`` comments, blank lines ignored."""
    strings = []
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            p = parse_pauli(line)
        except PauliParseError as exc:
            raise CodeFormatError(str(exc), lineno) from None
        if strings and p.n != strings[0].n:
            raise CodeFormatError(f"length {p.n} differs from first check length {strings[0].n}", lineno)
        strings.append(p)
        lines.append(lineno)
    if not strings:
        raise CodeFormatError("no checks found")
    try:
        return StabilizerCode(strings[0].n, strings)
    except NonCommutingChecksError as exc:
        i, j = exc.pair
        raise CodeFormatError(f"checks on lines {lines[i]} and {lines[j]} do not commute", lines[j]) from None
    except CodeError as exc:
        raise CodeFormatError(str(exc)) from None


def load_code(path):
    with open(path) as fh:
        return parse_code_text(fh.read())


@dataclass
class DegreeProfile:
    x: list
    y: list
    z: list

    @property
    def total(self):
        return [a + b + c for a, b, c in zip(self.x, self.y, self.z)]

    def of(self, q, letter):
        return {"X": self.x, "Y": self.y, "Z": self.z}[letter][q]


def degree_profile(code):
    counts = {p: [0] * code.n for p in PAULI_TYPES}
    for c in code.checks:
        for q, letter in c.sparse().items():
            counts[letter][q] += 1
    return DegreeProfile(counts["X"], counts["Y"], counts["Z"])


@dataclass
class SubsystemCode:
    """Gauge group plus register tags; ``*_set`` index into ``gauge_generators``."""

    n: int
    gauge_generators: list
    register_of: list
    single_site_set: list = field(default_factory=list)
    copy_set: list = field(default_factory=list)
    anc_set: list = field(default_factory=list)

    def stabilizers(self):
        return center(self.gauge_generators, self.n)

    def qubits_in(self, register):
        return [q for q, r in enumerate(self.register_of) if r == register]


@dataclass
class CodeParams:
    n: int
    k: int
    d_lower: int = None
    d_exact: int = None


def _gauge_list(code):
    if isinstance(code, StabilizerCode):
        return code.n, list(code.checks)
    return code.n, list(code.gauge_generators)


def compute_k(code):
    """Logical qubits of a (possibly non-abelian) gauge group.

    Uses rank(G) = s + 2g, where the commutation matrix of the generators has
    rank 2g, so k = n - rank(G) + rank(C)/2.
    """
    n, gens = _gauge_list(code)
    if not gens:
        return n
    r = gf2_rank(gens, n)
    twice_g = matrix_rank(commutation_matrix(gens, n=n, as_sparse=2 * n > DENSE_LIMIT))
    return n - r + twice_g // 2


def compute_k_via_center(code):
    n, gens = _gauge_list(code)
    r = gf2_rank(gens, n) if gens else 0
    s = len(center(gens, n)) if gens else 0
    return n - (r + s) // 2


def logical_pairs(code):
    """Bare logicals as k anticommuting pairs (X-like, Z-like)."""
    n, gens = _gauge_list(code)
    normalizer = symplectic_complement(gens, n)
    stabs = center(gens, n) if gens else []
    basis = reduce_basis(stabs, n) if stabs else None
    # drop normalizer elements that are stabilizers; Gram-Schmidt ignores the
    # isotropic (stabilizer) directions automatically
    reps = [p for p in normalizer if basis is None or not basis.contains(p)]
    pairs, _ = symplectic_pairs(reps, n)
    return pairs


def bare_logicals(code):
    out = []
    for a, b in logical_pairs(code):
        out.extend([a, b])
    return out


@dataclass
class DistanceResult:
    found: bool
    d: int
    witness: PauliOperator = None
    w_max: int = 0

    def __iter__(self):
        return iter((self.found, self.d))


def _single_qubit_masks(rows, n):
    """(n, 3, words) anticommutation masks of X/Y/Z on each qubit against ``rows``."""
    if not rows:
        return np.zeros((n, 3, 1), dtype=np.uint64)
    mat = to_matrix(rows, n)
    xs, zs = mat[:, :n].T, mat[:, n:].T  # (n, r)
    stacked = np.stack([zs, xs ^ zs, xs], axis=1)  # X hits Z parts, Z hits X parts
    flat = stacked.reshape(n * 3, -1)
    return _kernels.pack_rows(flat).reshape(n, 3, -1)


def dressed_distance(code, w_max):
    """Smallest-weight Pauli commuting with the stabilizers but outside the gauge group.

    Searches weights 1..w_max in order; ``found=False`` means d > w_max.
    """
    if w_max < 1:
        raise ValueError("w_max must be >= 1")
    n, gens = _gauge_list(code)
    stabs = center(gens, n) if gens else []
    logicals = bare_logicals(code)
    if not logicals:
        return DistanceResult(False, 0, None, w_max)
    masks_s = _single_qubit_masks(stabs, n)
    masks_l = _single_qubit_masks(logicals, n)
    for w in range(1, min(w_max, n) + 1):
        hit = _kernels.first_logical(masks_s, masks_l, w)
        if hit is not None:
            qubits, types = hit
            witness = PauliOperator.from_sparse(
                n, {int(q): "XYZ"[int(t)] for q, t in zip(qubits, types)}
            )
            return DistanceResult(True, w, witness, w_max)
    return DistanceResult(False, w_max + 1, None, w_max)


def code_distance(code, w_max=None):
    """Exact distance of a small stabilizer code (search up to n by default)."""
    res = dressed_distance(code, w_max or code.n)
    return res.d if res.found else None


def relations(code):
    """Index sets of checks whose product is the identity (a kernel basis)."""
    if not code.checks:
        return []
    mat = to_matrix(code.checks, code.n)
    kern = nullspace(mat.T)
    return [sorted(int(i) for i in np.flatnonzero(row)) for row in kern]


def is_relation(code, rel):
    return product([code.checks[i] for i in rel], code.n).is_identity()


def verify_relation_image(input_code, wire, relation):
    """Product of the wire-code images of a relation's checks is the identity."""
    if not is_relation(input_code, relation):
        raise CodeError(f"{sorted(relation)} is not a relation of the input code")
    n = wire.n
    images = [wire.image_of(s) for s in relation]
    dressed = [wire.dressed_stabilizer(s) for s in relation]
    return product(images, n).is_identity() and product(dressed, n).is_identity()


def distance_lower_target(d_in, weight):
    return math.ceil(d_in / weight)

