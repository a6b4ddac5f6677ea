"""Wire codes: weight/degree reduction, layouts, graph embeddings and verification."""

from .codes import StabilizerCode, SubsystemCode, compute_k, dressed_distance, load_code, parse_code_text
from .graphs import GeneralGraph, embed_on_graph, load_graph
from .layout import GridTarget, PlacedWireCode, check_locality, layout_2d, layout_Dd, route_grid
from .pauli import PauliOperator, parse_pauli
from .syndrome import build_schedule, simulate_extraction
from .verify import verify_all
from .wire import WireCode, build_wire_code, stabilizer_recovery, stretch_edge

__version__ = "0.1.0"
