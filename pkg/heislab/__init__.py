"""
Laakso graphs, the double-diamond embedding into the Heisenberg group, and numerical checks of
the Markov convexity obstruction to embedding them.
"""

__all__ = [
    "HPoint",
    "LaaksoGraph",
    "build_graph",
    "EmbeddedMap",
    "embed",
    "angle_schedule",
    "Format",
    "JsonFormat",
    "CsvFormat",
]

from heislab.embedder import EmbeddedMap, angle_schedule, embed
from heislab.format import CsvFormat, Format, JsonFormat
from heislab.heis_core import HPoint
from heislab.laakso import LaaksoGraph, build_graph
