"""Edge-weighted graph of ASR overlap between clusters."""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .channel import SupportSet

__all__ = [
    "OverlapClass",
    "EdgeWeightedGraph",
    "overlap_weight",
    "classify_overlap",
    "build_graph",
    "degree_order",
    "read_edgelist",
    "write_edgelist",
    "format_edgelist",
    "parse_edgelist",
]


class OverlapClass(enum.Enum):
    Disjoint = "disjoint"
    Partial = "partial"
    Full = "full"


@dataclass(frozen=True)
class EdgeWeightedGraph:
    """Undirected graph with clusters as vertices and overlap weights on edges.

    ``weights`` maps each unordered pair ``(g, h)`` with ``g < h`` to its
    weight; absent pairs carry weight 0.
    """

    numVertices: int
    weights: Mapping[tuple[int, int], float]
    degrees: np.ndarray = field(init=False, repr=False, compare=False)
    _adjacency: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        G = int(self.numVertices)
        if G < 0:
            raise ValueError("numVertices must be non-negative")
        clean = {}
        for (a, b), w in self.weights.items():
            a, b, w = int(a), int(b), float(w)
            if a == b:
                raise ValueError(f"self-loop on vertex {a}")
            if not (0 <= a < G and 0 <= b < G):
                raise ValueError(f"edge ({a}, {b}) references a vertex outside [0, {G - 1}]")
            if not 0 < w <= 1:
                raise ValueError(f"edge ({a}, {b}) weight {w!r} outside (0, 1]")
            key = (a, b) if a < b else (b, a)
            if key in clean:
                raise ValueError(f"duplicate edge {key}")
            clean[key] = w
        adjacency = [dict() for _ in range(G)]
        for (a, b), w in sorted(clean.items()):
            adjacency[a][b] = w
            adjacency[b][a] = w
        # Sum in ascending neighbor order so degrees are reproducible bit for bit.
        degrees = np.array([sum(adj[h] for h in sorted(adj)) for adj in adjacency], dtype=float)
        degrees.setflags(write=False)
        object.__setattr__(self, "numVertices", G)
        object.__setattr__(self, "weights", dict(sorted(clean.items())))
        object.__setattr__(self, "degrees", degrees)
        object.__setattr__(self, "_adjacency", tuple(adjacency))

    @property
    def num_edges(self) -> int:
        return len(self.weights)

    def weight(self, a: int, b: int) -> float:
        return self._adjacency[a].get(b, 0.0)

    def neighbors(self, g: int) -> Mapping[int, float]:
        return self._adjacency[g]

    def has_edge(self, a: int, b: int) -> bool:
        return b in self._adjacency[a]

    def matrix(self) -> np.ndarray:
        """Dense symmetric weight matrix with zero diagonal."""
        W = np.zeros((self.numVertices, self.numVertices))
        for (a, b), w in self.weights.items():
            W[a, b] = W[b, a] = w
        return W

    def scaled(self, factor: float) -> "EdgeWeightedGraph":
        return EdgeWeightedGraph(self.numVertices, {k: w * factor for k, w in self.weights.items()})

    @classmethod
    def from_matrix(cls, W: np.ndarray) -> "EdgeWeightedGraph":
        W = np.asarray(W, dtype=float)
        if W.ndim != 2 or W.shape[0] != W.shape[1] or not np.allclose(W, W.T):
            raise ValueError("weight matrix must be square and symmetric")
        G = W.shape[0]
        edges = {(a, b): W[a, b] for a in range(G) for b in range(a + 1, G) if W[a, b] > 0}
        return cls(G, edges)


def overlap_weight(Ja: SupportSet, Jb: SupportSet, epsilon: float = 1.0) -> float:
    """Relative gain of orthogonalizing two clusters, ``2 eps |Ja & Jb| / (ra + rb)``."""
    if Ja.M != Jb.M:
        raise ValueError("support sets live in different dimensions")
    total = Ja.rank + Jb.rank
    if total == 0:
        raise ValueError("overlap weight is undefined for two empty support sets")
    return 2.0 * epsilon * len(Ja.members & Jb.members) / total


def classify_overlap(Ja: SupportSet, Jb: SupportSet) -> OverlapClass:
    common = Ja.members & Jb.members
    if not common:
        return OverlapClass.Disjoint
    if Ja.members <= Jb.members or Jb.members <= Ja.members:
        return OverlapClass.Full
    return OverlapClass.Partial


def build_graph(supports: Sequence[SupportSet], epsilon: float = 1.0, wMin: float = 0.0) -> EdgeWeightedGraph:
    """Connect every pair of clusters whose overlap weight exceeds ``wMin``.

    A pair of empty supports shares nothing and is left unconnected.
    """
    edges = {}
    for a in range(len(supports)):
        for b in range(a + 1, len(supports)):
            if supports[a].rank + supports[b].rank == 0:
                continue
            w = overlap_weight(supports[a], supports[b], epsilon)
            if w > wMin:
                edges[(a, b)] = w
    return EdgeWeightedGraph(len(supports), edges)


def degree_order(graph: EdgeWeightedGraph) -> list[int]:
    """Vertices by descending weighted degree, ties to the lower index.

    Degrees are compared after normalizing by the largest degree and rounding
    to 11 decimals, so rounding noise neither creates nor breaks ties and the
    order is unchanged when all weights are scaled by a common factor.
    """
    top = float(np.max(graph.degrees)) if graph.numVertices else 0.0
    if top == 0.0:
        return list(range(graph.numVertices))
    key = np.round(graph.degrees / top, 11)
    return sorted(range(graph.numVertices), key=lambda g: (-key[g], g))


# ---------------------------------------------------------------------------
# Edge-list text format
#
#   ewg <G> <P-hint>
#   <g> <g'> <weight>
#   ...
#
# Blank lines and lines starting with '#' are ignored.  A P-hint of 0 means
# "no suggestion".
# ---------------------------------------------------------------------------

def format_edgelist(graph: EdgeWeightedGraph, p_hint: int = 0) -> str:
    lines = [f"ewg {graph.numVertices} {int(p_hint)}"]
    lines += [f"{a} {b} {w!r}" for (a, b), w in graph.weights.items()]
    return "\n".join(lines) + "\n"


def parse_edgelist(text: str) -> tuple[EdgeWeightedGraph, int]:
    """Parse the edge-list format; returns the graph and its P-hint.

    Raises ``ValueError`` naming the offending line on malformed input.
    """
    header = None
    edges = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if header is None:
            if len(tokens) not in (2, 3) or tokens[0] != "ewg":
                raise ValueError(f"line {lineno}: expected header 'ewg <G> <P-hint>'")
            try:
                header = (int(tokens[1]), int(tokens[2]) if len(tokens) == 3 else 0)
            except ValueError:
                raise ValueError(f"line {lineno}: header fields must be integers") from None
            if header[0] < 0 or header[1] < 0:
                raise ValueError(f"line {lineno}: header fields must be non-negative")
            continue
        if len(tokens) != 3:
            raise ValueError(f"line {lineno}: expected '<g> <g2> <weight>'")
        try:
            a, b, w = int(tokens[0]), int(tokens[1]), float(tokens[2])
        except ValueError:
            raise ValueError(f"line {lineno}: could not parse edge") from None
        key = (min(a, b), max(a, b))
        if key in edges:
            raise ValueError(f"line {lineno}: duplicate edge {key}")
        if a == b or not (0 <= a < header[0] and 0 <= b < header[0]) or not 0 < w <= 1:
            raise ValueError(f"line {lineno}: invalid edge ({a}, {b}, {w})")
        edges[key] = w
    if header is None:
        raise ValueError("missing 'ewg' header")
    return EdgeWeightedGraph(header[0], edges), header[1]


def write_edgelist(graph: EdgeWeightedGraph, path: str | os.PathLike, p_hint: int = 0) -> None:
    with open(path, "w") as fh:
        fh.write(format_edgelist(graph, p_hint))


def read_edgelist(path: str | os.PathLike) -> tuple[EdgeWeightedGraph, int]:
    with open(path) as fh:
        return parse_edgelist(fh.read())
