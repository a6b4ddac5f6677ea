"""Phaseless Pauli operators and GF(2) symplectic linear algebra.

A Pauli operator on ``n`` qubits is stored as two Python integers used as
bit sets: bit ``i`` of ``x`` / ``z`` is the X / Z component on qubit ``i``.
Phases are dropped everywhere, so ``multiply`` is a plain XOR.
"""

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from . import _kernels

_SYMBOLS = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}
_LETTER = {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}


class PauliParseError(ValueError):
    pass


def iter_bits(v):
    """Indices of the set bits of a non-negative int, ascending."""
    while v:
        low = v & -v
        yield low.bit_length() - 1
        v ^= low


@dataclass(frozen=True)
class PauliOperator:
    n: int
    x: int = 0
    z: int = 0

    @classmethod
    def identity(cls, n):
        return cls(n)

    @classmethod
    def from_sparse(cls, n, terms):
        """Build from ``{qubit: 'X'|'Y'|'Z'}`` (or an iterable of pairs)."""
        x = z = 0
        items = terms.items() if isinstance(terms, dict) else terms
        for q, p in items:
            if not 0 <= q < n:
                raise IndexError(f"qubit {q} out of range for n={n}")
            bx, bz = _SYMBOLS[p]
            x ^= bx << q
            z ^= bz << q
        return cls(n, x, z)

    @classmethod
    def single(cls, n, qubit, letter):
        return cls.from_sparse(n, {qubit: letter})

    @property
    def weight(self):
        return (self.x | self.z).bit_count()

    @property
    def support(self):
        return list(iter_bits(self.x | self.z))

    def letter(self, q):
        return _LETTER[((self.x >> q) & 1, (self.z >> q) & 1)]

    def sparse(self):
        """``{qubit: letter}`` over the support."""
        return {q: self.letter(q) for q in self.support}

    def is_identity(self):
        return not (self.x or self.z)

    def extend(self, n):
        """Same operator viewed on ``n >= self.n`` qubits."""
        if n < self.n:
            raise ValueError("cannot shrink a Pauli operator")
        return PauliOperator(n, self.x, self.z)

    def restrict(self, qubits):
        """Keep only the components on ``qubits`` (same n)."""
        mask = 0
        for q in qubits:
            mask |= 1 << q
        return PauliOperator(self.n, self.x & mask, self.z & mask)

    def __mul__(self, other):
        return multiply(self, other)

    def __str__(self):
        return "".join(self.letter(q) for q in range(self.n))

    def __repr__(self):
        return f"PauliOperator({str(self)!r})"


def parse_pauli(text):
    text = text.strip()
    x = z = 0
    for i, ch in enumerate(text):
        try:
            bx, bz = _SYMBOLS[ch]
        except KeyError:
            raise PauliParseError(f"invalid Pauli symbol {ch!r} at position {i}") from None
        x |= bx << i
        z |= bz << i
    return PauliOperator(len(text), x, z)


def _check_len(a, b):
    if a.n != b.n:
        raise ValueError(f"qubit count mismatch: {a.n} != {b.n}")


def commutes(a, b):
    _check_len(a, b)
    return ((a.x & b.z) ^ (a.z & b.x)).bit_count() % 2 == 0


def multiply(a, b):
    _check_len(a, b)
    return PauliOperator(a.n, a.x ^ b.x, a.z ^ b.z)


def product(paulis, n):
    x = z = 0
    for p in paulis:
        x ^= p.x
        z ^= p.z
    return PauliOperator(n, x, z)


# ---------------------------------------------------------------------------
# conversions between operators and GF(2) matrices
# ---------------------------------------------------------------------------

def _row_int(p):
    return p.x | (p.z << p.n)


def to_words(paulis, n):
    """Packed (m, words) uint64 matrix with columns [x_0..x_{n-1}, z_0..z_{n-1}]."""
    nwords = max(1, (2 * n + 63) // 64)
    nbytes = 8 * nwords
    buf = b"".join(_row_int(p).to_bytes(nbytes, "little") for p in paulis)
    return np.frombuffer(buf, dtype=np.uint64).reshape(len(paulis), nwords).copy()


def to_matrix(paulis, n):
    """Dense (m, 2n) uint8 matrix [X | Z]."""
    return _kernels.unpack_rows(to_words(paulis, n), 2 * n).astype(np.uint8)


def from_words(words, n):
    out = []
    for row in np.ascontiguousarray(words, dtype=np.uint64):
        v = int.from_bytes(row.tobytes(), "little")
        out.append(PauliOperator(n, v & ((1 << n) - 1), v >> n))
    return out


def from_row(row, n):
    row = np.asarray(row, dtype=np.uint8)
    x = int.from_bytes(np.packbits(row[:n], bitorder="little").tobytes(), "little")
    z = int.from_bytes(np.packbits(row[n:2 * n], bitorder="little").tobytes(), "little")
    return PauliOperator(n, x, z)


def _common_n(paulis, n=None):
    if n is not None:
        return n
    if not paulis:
        return 0
    n = paulis[0].n
    for p in paulis:
        if p.n != n:
            raise ValueError("operators act on different qubit counts")
    return n


# ---------------------------------------------------------------------------
# linear algebra
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SymplecticBasis:
    """Independent generators in reduced row echelon form."""

    rows: tuple
    rank: int
    pivots: tuple

    def contains(self, p):
        v = _row_int(p)
        for row, piv in zip(self.rows, self.pivots):
            if (v >> piv) & 1:
                v ^= _row_int(row)
        return v == 0


def reduce_basis(paulis, n=None):
    n = _common_n(paulis, n)
    if not paulis:
        return SymplecticBasis((), 0, ())
    reduced, pivots = _kernels.rref(to_words(paulis, n), 2 * n)
    rows = from_words(reduced, n)
    return SymplecticBasis(tuple(rows), len(rows), tuple(int(c) for c in pivots))


# above this many columns the rank is taken on sparse int bitsets instead of
# the dense packed elimination; wire codes are very sparse and mostly chains
DENSE_LIMIT = 1024


def int_rank(rows):
    """GF(2) rank of rows given as Python int bitsets (leading-bit basis)."""
    basis = {}
    for v in rows:
        while v:
            top = v.bit_length() - 1
            b = basis.get(top)
            if b is None:
                basis[top] = v
                break
            v ^= b
    return len(basis)


def _interleaved(p):
    v = 0
    for q in iter_bits(p.x):
        v |= 1 << (2 * q)
    for q in iter_bits(p.z):
        v |= 1 << (2 * q + 1)
    return v


def gf2_rank(vectors, n=None):
    if not vectors:
        return 0
    n = _common_n(vectors, n)
    if 2 * n > DENSE_LIMIT:
        return int_rank(_interleaved(p) for p in vectors)
    reduced, _ = _kernels.rref(to_words(vectors, n), 2 * n)
    return reduced.shape[0]


def matrix_rank(bits):
    """GF(2) rank of a dense 0/1 array or a scipy sparse matrix."""
    if sparse.issparse(bits):
        csr = sparse.csr_matrix(bits)
        csr.data = csr.data & 1
        csr.eliminate_zeros()
        rows = []
        for i in range(csr.shape[0]):
            v = 0
            for c in csr.indices[csr.indptr[i]:csr.indptr[i + 1]]:
                v |= 1 << int(c)
            rows.append(v)
        return int_rank(rows)
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.size == 0:
        return 0
    reduced, _ = _kernels.rref(_kernels.pack_rows(bits), bits.shape[1])
    return reduced.shape[0]


def nullspace(bits):
    """Basis (rows) of {v : bits @ v = 0 mod 2}."""
    bits = np.asarray(bits, dtype=np.uint8)
    m, c = bits.shape
    if c == 0:
        return np.zeros((0, 0), dtype=np.uint8)
    if m == 0:
        return np.eye(c, dtype=np.uint8)
    reduced, pivots = _kernels.rref(_kernels.pack_rows(bits), c)
    r = reduced.shape[0]
    dense = _kernels.unpack_rows(reduced, c)
    free = np.setdiff1d(np.arange(c), pivots)
    basis = np.zeros((free.size, c), dtype=np.uint8)
    for i, f in enumerate(free):
        basis[i, f] = 1
        if r:
            basis[i, pivots] = dense[:, f]
    return basis


def gf2_solve(a, b):
    """One solution x of a @ x = b over GF(2), or None."""
    a = np.asarray(a, dtype=np.uint8)
    b = np.asarray(b, dtype=np.uint8).reshape(-1, 1)
    m, c = a.shape
    aug = np.hstack([a, b])
    reduced, pivots = _kernels.rref(_kernels.pack_rows(aug), c + 1)
    if len(pivots) and pivots[-1] == c:
        return None
    dense = _kernels.unpack_rows(reduced, c + 1)
    x = np.zeros(c, dtype=np.uint8)
    x[pivots] = dense[:, c]
    return x


def sparse_xz(paulis, n):
    """Sparse 0/1 matrices (m, n) of the X and Z components."""
    xr, xc, zr, zc = [], [], [], []
    for i, p in enumerate(paulis):
        for q in iter_bits(p.x):
            xr.append(i)
            xc.append(q)
        for q in iter_bits(p.z):
            zr.append(i)
            zc.append(q)
    m = len(paulis)
    xs = sparse.csr_matrix((np.ones(len(xr), dtype=np.int32), (xr, xc)), shape=(m, n))
    zs = sparse.csr_matrix((np.ones(len(zr), dtype=np.int32), (zr, zc)), shape=(m, n))
    return xs, zs


def commutation_matrix(rows, cols=None, n=None, as_sparse=False):
    """(len(rows), len(cols)) 0/1 matrix; entry 1 where the pair anticommutes."""
    if cols is None:
        cols = rows
    n = _common_n(list(rows) + list(cols), n)
    if not rows or not cols:
        return np.zeros((len(rows), len(cols)), dtype=np.uint8)
    rx, rz = sparse_xz(rows, n)
    cx, cz = sparse_xz(cols, n)
    sym = (rx @ cz.T + rz @ cx.T).tocsr()
    if as_sparse:
        sym.data = sym.data & 1
        sym.eliminate_zeros()
        return sym
    return (sym.toarray() & 1).astype(np.uint8)


def combine(coeffs, generators, n):
    """Rows of ``coeffs`` (0/1) applied to ``generators`` as GF(2) combinations."""
    out = []
    for row in np.asarray(coeffs, dtype=np.uint8):
        x = z = 0
        for i in np.flatnonzero(row):
            g = generators[i]
            x ^= g.x
            z ^= g.z
        out.append(PauliOperator(n, x, z))
    return out


def center(generators, n=None):
    """Independent generators of the phaseless center of the group generated."""
    if not generators:
        return []
    n = _common_n(generators, n)
    kern = nullspace(commutation_matrix(generators, n=n))
    elems = [p for p in combine(kern, generators, n) if not p.is_identity()]
    if not elems:
        return []
    return list(reduce_basis(elems, n).rows)


def in_group(p, generators):
    if p.is_identity():
        return True
    if not generators:
        return False
    n = _common_n(list(generators) + [p])
    return reduce_basis(generators, n).contains(p)


def symplectic_complement(generators, n):
    """Basis of all Paulis commuting with every generator (the normalizer, phaseless)."""
    if not generators:
        return [PauliOperator.single(n, q, "X") for q in range(n)] + [
            PauliOperator.single(n, q, "Z") for q in range(n)
        ]
    mat = to_matrix(generators, n)
    # v commutes with row g iff g_x . v_z + g_z . v_x = 0: swap the halves
    swapped = np.hstack([mat[:, n:], mat[:, :n]])
    return [from_row(v, n) for v in nullspace(swapped)]


def symplectic_pairs(vectors, n):
    """Symplectic Gram-Schmidt.

    Returns ``(pairs, isotropic)``: anticommuting pairs ``(a, b)`` that commute
    with every other returned operator, and a leftover list commuting with all.
    """
    pool = [v for v in vectors if not v.is_identity()]
    pairs = []
    isotropic = []
    while pool:
        a = pool.pop(0)
        partner = next((i for i, v in enumerate(pool) if not commutes(a, v)), None)
        if partner is None:
            isotropic.append(a)
            continue
        b = pool.pop(partner)
        fixed = []
        for v in pool:
            if not commutes(v, b):
                v = multiply(v, a)
            if not commutes(v, a):
                v = multiply(v, b)
            fixed.append(v)
        pool = [v for v in fixed if not v.is_identity()]
        pairs.append((a, b))
    return pairs, isotropic
