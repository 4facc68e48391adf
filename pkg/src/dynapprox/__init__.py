"""Dynamic approximation for weighted independent set and dominating set on
planar graphs, with exact solvers and generators for verification."""

from .baker import baker_csp, baker_domination, layers_for
from .compressdyn import CspCompressionState, DomCompressionState
from .csp import CspInstance, compress, encode_mwis, equivalent, solve_brute
from .decomp import EliminationForest, TreeDecomposition, balance, \
    elimination_forest, heuristic_td, td_validate
from .errors import DynApproxError, InvalidDecomposition, InvalidEpsilon, \
    NoCombination, ParameterOverflow, PrefixViolation, PromiseViolation, \
    TooLarge, WidthExceeded
from .exactdp import compute_domination_tables, compute_tables, solve_csp, \
    solve_domination
from .gendom import DominationInstance, check_decent, clear, \
    compress_domination, encode_mwds, equivalent_domination, \
    solve_domination_brute
from .graph import DynGraph, ParseError, bfs_layers, format_graph, \
    format_stream, parse_graph, parse_stream
from .hierarchy import Hierarchy, config_tables, select_L
from .oracle import brute_mwds, brute_mwis, gen_host, gen_stream

__version__ = "0.1.0"

__all__ = [
    "CspCompressionState", "CspInstance", "DominationInstance",
    "DomCompressionState", "DynApproxError", "DynGraph",
    "EliminationForest", "Hierarchy", "InvalidDecomposition",
    "InvalidEpsilon", "NoCombination", "ParameterOverflow", "ParseError",
    "PrefixViolation", "PromiseViolation", "TooLarge", "TreeDecomposition",
    "WidthExceeded", "baker_csp", "baker_domination", "balance",
    "bfs_layers", "brute_mwds", "brute_mwis", "check_decent", "clear",
    "compress", "compress_domination", "compute_domination_tables",
    "compute_tables", "config_tables", "elimination_forest", "encode_mwds",
    "encode_mwis", "equivalent", "equivalent_domination", "format_graph",
    "format_stream", "gen_host", "gen_stream", "heuristic_td", "layers_for",
    "parse_graph", "parse_stream", "select_L", "solve_brute", "solve_csp",
    "solve_domination", "solve_domination_brute", "td_validate",
]
