"""One-call property report for a wire code, optionally placed on a grid or graph."""

import json
import math
from dataclasses import asdict, dataclass, field

from .codes import compute_k, dressed_distance, is_relation, relations, verify_relation_image
from .layout import PlacedWireCode, check_locality
from .wire import RecoveryError, WireCode, stabilizer_recovery

EXACT_INPUT_DISTANCE_MAX_N = 16


@dataclass
class VerificationReport:
    k_in: int
    k_wire: int
    match: bool
    max_weight: int
    max_degree: int
    d_in_used: int
    d_in_exact: bool
    target: int
    d_wire_found: int  # None when no dressed logical of weight <= w_max exists
    w_max: int
    bound_ok: bool
    placed: bool
    locality_violations: int
    stacking_max: int
    congestion_max: int
    relations_ok: bool
    recovery_ok: bool
    n_wire: int
    overhead_ratio: float
    witnesses: dict = field(default_factory=dict)

    @property
    def weight_ok(self):
        return self.max_weight <= 3 and self.max_degree <= 3

    @property
    def ok(self):
        return (
            self.match
            and self.weight_ok
            and self.bound_ok
            and self.locality_violations == 0
            and self.relations_ok
            and self.recovery_ok
        )

    def to_dict(self):
        doc = asdict(self)
        doc["weight_ok"] = self.weight_ok
        doc["ok"] = self.ok
        return doc

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)

    def table(self):
        d_wire = self.d_wire_found if self.d_wire_found is not None else f"> {self.w_max}"
        rows = [
            ("k (input -> wire)", f"{self.k_in} -> {self.k_wire}", self.match),
            ("max weight / degree", f"{self.max_weight} / {self.max_degree}", self.weight_ok),
            (
                "distance",
                f"d_in {'=' if self.d_in_exact else '>='} {self.d_in_used}, target {self.target}, d_wire {d_wire}",
                self.bound_ok,
            ),
            (
                "locality violations",
                str(self.locality_violations) if self.placed else "n/a (not placed)",
                self.locality_violations == 0,
            ),
            ("max stacking", str(self.stacking_max), None),
            ("max congestion", str(self.congestion_max), None),
            ("relations", "", self.relations_ok),
            ("stabilizer recovery", "", self.recovery_ok),
            ("qubits", f"{self.n_wire} (x{self.overhead_ratio:.2f})", None),
        ]
        width = max(len(r[0]) for r in rows)
        lines = []
        for name, value, flag in rows:
            mark = "" if flag is None else ("ok  " if flag else "FAIL")
            lines.append(f"{mark:4}  {name:<{width}}  {value}".rstrip())
        lines.append(f"overall: {'ok' if self.ok else 'FAIL'}")
        for key, val in self.witnesses.items():
            lines.append(f"witness {key}: {val}")
        return "\n".join(lines)


def _sparse(p):
    return " ".join(f"{letter}{q}" for q, letter in sorted(p.sparse().items())) or "I"


def input_distance(code, w_max):
    """Exact distance for small inputs, otherwise a lower bound from a ``w_max`` search."""
    limit = code.n if code.n <= EXACT_INPUT_DISTANCE_MAX_N else w_max
    res = dressed_distance(code, max(1, limit))
    return res.d, res.found or limit >= code.n


def _congestion(placed):
    if placed is None:
        return 0
    if "congestion" in placed.meta:
        return int(placed.meta["congestion"])
    routing = placed.routing or []
    return max((max(r.edge_usage().values(), default=0) for r in routing), default=0)


def verify_all(code, wire_or_placed, w_max=3):
    """Check k, weight/degree, the distance bound, locality, relations and recovery."""
    if isinstance(wire_or_placed, PlacedWireCode):
        placed, wire = wire_or_placed, wire_or_placed.wire
    elif isinstance(wire_or_placed, WireCode):
        placed, wire = None, wire_or_placed
    else:
        raise TypeError("expected a WireCode or PlacedWireCode")
    if not wire.port or set(wire.anc_of) != set(range(code.m)):
        raise ValueError("wire code has no provenance for the input checks")
    witnesses = {}
    base = wire.base
    k_in, k_wire = compute_k(code), compute_k(base)
    if k_in != k_wire:
        witnesses["k"] = f"input k={k_in}, wire k={k_wire}"

    max_weight, max_degree = wire.max_weight(), wire.max_degree()
    if max_weight > 3:
        g = max(wire.multi_gauges(), key=lambda i: len(wire.terms[i]))
        witnesses["weight"] = f"gauge {g} = {_sparse(wire.gauge(g))}"
    if max_degree > 3:
        deg = wire.degrees()
        witnesses["degree"] = f"qubit {deg.index(max_degree)} in {max_degree} gauges"

    d_in, d_in_exact = input_distance(code, w_max)
    omega = code.max_weight
    target = math.ceil(d_in / omega)
    # exhausting all weights below the target proves d_wire >= target
    below = dressed_distance(base, target - 1) if target > 1 else None
    bound_ok = below is None or not below.found
    found = dressed_distance(base, w_max) if w_max >= 1 else None
    d_wire = found.d if found is not None and found.found else None
    if found is not None and found.found:
        witnesses["distance"] = _sparse(found.witness)
    if not bound_ok:
        witnesses["bound"] = f"dressed logical {_sparse(below.witness)} of weight {below.d} < {target}"

    locality, stacking = 0, 0
    if placed is not None:
        rep = check_locality(placed)
        locality, stacking = len(rep.violations), rep.max_stacking
        if rep.violations:
            g, verts = rep.violations[0]
            witnesses["locality"] = f"gauge {g} spans {verts}"

    relations_ok = True
    for rel in relations(code):
        if not is_relation(code, rel) or not verify_relation_image(code, wire, rel):
            relations_ok = False
            witnesses["relations"] = f"checks {rel}"
            break

    recovery_ok = True
    for s in range(code.m):
        try:
            stabilizer_recovery(wire, s)
        except RecoveryError as exc:
            recovery_ok = False
            witnesses["recovery"] = str(exc)
            break

    return VerificationReport(
        k_in=k_in,
        k_wire=k_wire,
        match=k_in == k_wire,
        max_weight=max_weight,
        max_degree=max_degree,
        d_in_used=d_in,
        d_in_exact=d_in_exact,
        target=target,
        d_wire_found=d_wire,
        w_max=w_max,
        bound_ok=bound_ok,
        placed=placed is not None,
        locality_violations=locality,
        stacking_max=stacking,
        congestion_max=_congestion(placed),
        relations_ok=relations_ok,
        recovery_ok=recovery_ok,
        n_wire=wire.n,
        overhead_ratio=wire.n / code.n,
        witnesses=witnesses,
    )


def delete_single_x(wire, qubit):
    """Copy of ``wire`` with the single-site X gauge of an anc/copy ``qubit`` removed."""
    if wire.register[qubit] == "data":
        raise ValueError("data qubits carry no single-site gauge")
    out = wire.copy()
    out.terms[out.single_of[qubit]] = {}
    return out
