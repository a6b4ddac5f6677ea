import itertools

import pytest
from hypothesis import settings

from wirecodes import _kernels
from wirecodes.pauli import PauliOperator, commutes

# first calls pay for JIT compilation
settings.register_profile("wirecodes", deadline=None)
settings.load_profile("wirecodes")

BACKENDS = ["numpy"] + (["numba"] if _kernels.nb is not None else [])


@pytest.fixture(params=BACKENDS)
def backend(request):
    with _kernels.use_backend(request.param):
        yield request.param


def span_size(rows):
    """Size of the GF(2) span of int bitsets, by closing under XOR."""
    span = {0}
    for r in rows:
        span |= {s ^ r for s in span}
    return len(span)


def oracle_rank(rows):
    return span_size(rows).bit_length() - 1


def pauli_int(p):
    return p.x | (p.z << p.n)


def all_paulis(n, weight):
    for qubits in itertools.combinations(range(n), weight):
        for letters in itertools.product("XYZ", repeat=weight):
            yield PauliOperator.from_sparse(n, dict(zip(qubits, letters)))


def brute_distance(stabs, logicals, n, w_max):
    """Smallest weight commuting with every stabilizer and anticommuting with a logical."""
    for w in range(1, w_max + 1):
        for p in all_paulis(n, w):
            if all(commutes(p, s) for s in stabs) and not all(commutes(p, l) for l in logicals):
                return w
    return None


# one line per acceptance criterion, repeated at the end of the run
ACCEPTANCE_LINES = {}


def record_criterion(number, ok, detail):
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])
