"""Exact values and certified lower bounds for 2-page crossing numbers."""
from __future__ import annotations

from .circle_graph import build_chord_graph, zeta_bipartite, zeta_complete
from .maxcut import maxcut_exact, nu2_complete_exact, odd_to_even_step
from .pagecount import TwoPageDrawing, count_crossings

__all__ = [
    "TwoPageDrawing",
    "build_chord_graph",
    "count_crossings",
    "maxcut_exact",
    "nu2_complete_exact",
    "odd_to_even_step",
    "zeta_bipartite",
    "zeta_complete",
]
__version__ = "0.1.0"
