"""Pattern assignment solvers for the edge-weighted coloring problem.

All solvers minimize the total weight of edges whose endpoints share a
pattern, subject to every cluster receiving exactly one of ``P`` patterns.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .asrgraph import EdgeWeightedGraph, degree_order

__all__ = [
    "PatternAssignment",
    "SolverTrace",
    "OracleCapError",
    "objective_f",
    "is_independent",
    "ewvc_pd",
    "esa_oracle",
    "greedy_baseline",
    "random_assignment",
    "DEFAULT_ORACLE_CAP",
]

DEFAULT_ORACLE_CAP = 12
# Two objective values closer than this are treated as a tie by the oracle.
_TIE_TOL = 1e-12
_ESA_CHUNK = 1 << 18
# Relative slack under which two weights or interference sums count as tied.
_TIE_RTOL = 1e-12


def _exceeds(a: float, b: float) -> bool:
    return a > b + _TIE_RTOL * max(abs(a), abs(b))


class OracleCapError(ValueError):
    """Raised when exhaustive search is asked to enumerate too many vertices."""


@dataclass(frozen=True)
class PatternAssignment:
    """Cluster-to-pattern map; patterns are numbered ``0 .. P-1``."""

    patternOf: tuple[int, ...]
    P: int

    def __post_init__(self):
        pat = tuple(int(p) for p in self.patternOf)
        if self.P < 1:
            raise ValueError("P must be at least 1")
        bad = [g for g, p in enumerate(pat) if not 0 <= p < self.P]
        if bad:
            raise ValueError(f"clusters {bad} have a pattern outside [0, {self.P - 1}]")
        object.__setattr__(self, "patternOf", pat)

    @classmethod
    def from_sets(cls, sets: Sequence[Iterable[int]], G: int) -> "PatternAssignment":
        pattern_of = [-1] * G
        for p, members in enumerate(sets):
            for g in members:
                if pattern_of[g] != -1:
                    raise ValueError(f"cluster {g} appears in more than one pattern")
                pattern_of[g] = p
        missing = [g for g, p in enumerate(pattern_of) if p < 0]
        if missing:
            raise ValueError(f"clusters {missing} are not assigned")
        return cls(tuple(pattern_of), len(sets))

    @property
    def G(self) -> int:
        return len(self.patternOf)

    @property
    def patternSets(self) -> tuple[tuple[int, ...], ...]:
        sets = [[] for _ in range(self.P)]
        for g, p in enumerate(self.patternOf):
            sets[p].append(g)
        return tuple(tuple(s) for s in sets)

    @property
    def patterns_used(self) -> int:
        return len(set(self.patternOf))

    def co_pattern(self, g: int) -> list[int]:
        """Clusters sharing ``g``'s pattern, excluding ``g``."""
        p = self.patternOf[g]
        return [h for h, q in enumerate(self.patternOf) if q == p and h != g]

    def format(self, graph: Optional[EdgeWeightedGraph] = None) -> str:
        """One ``g pattern`` line per cluster, plus ``f <value>`` when a graph is given."""
        lines = [f"{g} {p}" for g, p in enumerate(self.patternOf)]
        if graph is not None:
            lines.append(f"f {objective_f(graph, self):.12g}")
        return "\n".join(lines) + "\n"


@dataclass
class SolverTrace:
    """Bookkeeping from one EWVC-PD run.

    ``ops`` counts elementary weight lookups and comparisons, the quantity
    the complexity bounds are stated in.
    """

    initPair: Optional[tuple[int, int]] = None
    phase1Colored: int = 0
    phase2Colored: int = 0
    phase2Bypassed: bool = True
    elapsed: float = 0.0
    ops: int = 0
    phase_ops: dict = field(default_factory=lambda: {"init": 0, "phase1": 0, "phase2": 0})


def _check_complete(graph: EdgeWeightedGraph, assignment: PatternAssignment):
    if assignment.G != graph.numVertices:
        raise ValueError(
            f"assignment covers {assignment.G} clusters but the graph has {graph.numVertices}")


def objective_f(graph: EdgeWeightedGraph, assignment: PatternAssignment) -> float:
    """Total weight of edges inside the same pattern, each pair counted once."""
    _check_complete(graph, assignment)
    pat = assignment.patternOf
    return float(sum(w for (a, b), w in graph.weights.items() if pat[a] == pat[b]))


def is_independent(graph: EdgeWeightedGraph, cluster_set: Iterable[int]) -> bool:
    members = sorted(set(cluster_set))
    for i, a in enumerate(members):
        nbrs = graph.neighbors(a)
        if any(b in nbrs for b in members[i + 1:]):
            return False
    return True


def ewvc_pd(graph: EdgeWeightedGraph, P: int,
            order: Optional[Sequence[int]] = None) -> tuple[PatternAssignment, SolverTrace]:
    """Two-phase edge-weighted vertex coloring under a budget of ``P`` patterns.

    The heaviest edge seeds patterns 0 and 1.  Phase I walks the remaining
    vertices in descending-degree order and places each into the first
    pattern where it has no neighbor, stopping at the first vertex that fits
    nowhere.  Phase II then repeatedly picks the uncolored cluster with the
    largest potential interference ``max_p delta[p, g]`` and puts it on the
    pattern where its added interference ``delta[p, g]`` is smallest.

    Parameters
    ----------
    graph : EdgeWeightedGraph
        Overlap graph.
    P : int
        Number of available patterns; at least 2 if the graph has an edge.
    order : sequence of int, optional
        Vertex permutation to scan in Phase I.  Defaults to
        :func:`degree_order`.

    Returns
    -------
    assignment : PatternAssignment
    trace : SolverTrace
    """
    G = graph.numVertices
    if P < 1:
        raise ValueError("P must be at least 1")
    if graph.num_edges and P < 2:
        raise ValueError("a graph with edges needs at least two patterns")
    t0 = time.perf_counter()
    trace = SolverTrace()
    pi = list(degree_order(graph) if order is None else order)
    if sorted(pi) != list(range(G)):
        raise ValueError("order must be a permutation of the vertices")
    adj = [graph.neighbors(g) for g in range(G)]
    sets: list[list[int]] = [[] for _ in range(P)]
    pattern_of = [-1] * G
    ops = 0

    # Initialization: heaviest edge, lexicographically smallest on ties.
    if graph.num_edges:
        best, pair = -1.0, None
        for a in range(G):
            for b in range(a + 1, G):
                ops += 1
                w = adj[a].get(b, 0.0)
                if _exceeds(w, best):
                    best, pair = w, (a, b)
        g1, g2 = pair
        sets[0].append(g1)
        sets[1].append(g2)
        pattern_of[g1], pattern_of[g2] = 0, 1
        trace.initPair = pair
        pi = [g for g in pi if g != g1 and g != g2]
    trace.phase_ops["init"] = ops

    # Phase I: first-fit into independent sets, abort at the first misfit.
    remaining = []
    for i, g in enumerate(pi):
        for p in range(P):
            fits = True
            for h in sets[p]:
                ops += 1
                if h in adj[g]:
                    fits = False
                    break
            if fits:
                sets[p].append(g)
                pattern_of[g] = p
                trace.phase1Colored += 1
                break
        if pattern_of[g] < 0:
            remaining = pi[i:]
            break
    trace.phase_ops["phase1"] = ops - trace.phase_ops["init"]

    # Phase II: largest potential ICI first, least added ICI pattern.
    if remaining:
        trace.phase2Bypassed = False
        omega = sorted(remaining)
        delta = {}
        for g in omega:
            row = [0.0] * P
            for p in range(P):
                s = 0.0
                for h in sets[p]:
                    ops += 1
                    s += adj[g].get(h, 0.0)
                row[p] = s
            delta[g] = row
        while omega:
            g0, best = -1, -1.0
            for g in omega:
                peak = delta[g][0]
                for p in range(1, P):
                    ops += 1
                    if delta[g][p] > peak:
                        peak = delta[g][p]
                ops += 1
                if _exceeds(peak, best):
                    g0, best = g, peak
            row = delta[g0]
            p0 = 0
            for p in range(1, P):
                ops += 1
                if _exceeds(row[p0], row[p]):
                    p0 = p
            sets[p0].append(g0)
            pattern_of[g0] = p0
            trace.phase2Colored += 1
            omega.remove(g0)
            del delta[g0]
            for g in omega:
                ops += 1
                w = adj[g].get(g0)
                if w is not None:
                    delta[g][p0] += w
        trace.phase_ops["phase2"] = ops - trace.phase_ops["init"] - trace.phase_ops["phase1"]

    trace.ops = ops
    trace.elapsed = time.perf_counter() - t0
    if G and pattern_of and min(pattern_of) < 0:
        raise AssertionError("EWVC-PD left a cluster uncolored")
    return PatternAssignment(tuple(pattern_of), P), trace


def esa_oracle(graph: EdgeWeightedGraph, P: int,
               maxVertices: int = DEFAULT_ORACLE_CAP) -> tuple[PatternAssignment, float]:
    """Exhaustive minimizer of :func:`objective_f` over all ``P**G`` assignments.

    Among minimizers the lexicographically smallest ``patternOf`` is
    returned.  That minimizer always puts vertex 0 on pattern 0 (relabel the
    patterns otherwise), so only the ``P**(G-1)`` assignments with
    ``patternOf[0] == 0`` are enumerated.
    """
    G = graph.numVertices
    if P < 1:
        raise ValueError("P must be at least 1")
    if G > maxVertices:
        raise OracleCapError(
            f"exhaustive search over {G} vertices exceeds the cap of {maxVertices}")
    if G == 0:
        return PatternAssignment((), P), 0.0
    edges = list(graph.weights.items())
    free = G - 1
    total = P ** free
    best_val, best_code = np.inf, 0
    # Vertex 1 is the most significant digit so code order is lexicographic.
    place = [P ** (free - v) for v in range(1, G)]
    for start in range(0, total, _ESA_CHUNK):
        codes = np.arange(start, min(start + _ESA_CHUNK, total), dtype=np.int64)
        digits = np.zeros((G, codes.size), dtype=np.int8)
        for v in range(1, G):
            digits[v] = (codes // place[v - 1]) % P
        f = np.zeros(codes.size)
        for (a, b), w in edges:
            f += w * (digits[a] == digits[b])
        chunk_min = f.min()
        if chunk_min < best_val - _TIE_TOL:
            best_val = chunk_min
            best_code = int(codes[np.flatnonzero(f <= chunk_min + _TIE_TOL)[0]])
    pattern_of = [0] + [(best_code // place[v - 1]) % P for v in range(1, G)]
    assignment = PatternAssignment(tuple(pattern_of), P)
    return assignment, objective_f(graph, assignment)


def greedy_baseline(graph: EdgeWeightedGraph, P: int) -> PatternAssignment:
    """Index-order greedy: each vertex goes where it adds the least weight."""
    if P < 1:
        raise ValueError("P must be at least 1")
    pattern_of = []
    for g in range(graph.numVertices):
        delta = [0.0] * P
        for h, w in graph.neighbors(g).items():
            if h < g:
                delta[pattern_of[h]] += w
        pattern_of.append(min(range(P), key=lambda p: (delta[p], p)))
    return PatternAssignment(tuple(pattern_of), P)


def random_assignment(graph: EdgeWeightedGraph, P: int, rng: np.random.Generator) -> PatternAssignment:
    if P < 1:
        raise ValueError("P must be at least 1")
    return PatternAssignment(tuple(rng.integers(0, P, size=graph.numVertices).tolist()), P)
