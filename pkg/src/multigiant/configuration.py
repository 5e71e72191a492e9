"""Configuration-model sampling of multipartite multigraphs."""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from .degrees import DegreeSequence

Pair = Tuple[int, int]


class ConfigurationError(ValueError):
    """Degree sequence admits no clone matching."""


class RejectionLimitError(RuntimeError):
    def __init__(self, attempts: int):
        super().__init__(f"no simple graph in {attempts} attempts "
                         f"(observed acceptance rate 0/{attempts})")
        self.attempts = attempts


@dataclass
class CloneGraph:
    """Vertices, their typed clones, and the clone matching.

    Vertex ids are dense and assigned in (part, degree vector, replica)
    order.  Clones of vertex ``v`` are ``vertex_ptr[v]:vertex_ptr[v+1]``,
    grouped by target part; ``clone_type`` indexes ``pairs``.
    """

    parts: int
    pairs: Tuple[Pair, ...]
    vertex_part: np.ndarray
    vertex_degree: np.ndarray
    vertex_ptr: np.ndarray
    clone_vertex: np.ndarray
    clone_type: np.ndarray
    partner: np.ndarray

    @property
    def n(self) -> int:
        return len(self.vertex_part)

    @property
    def num_clones(self) -> int:
        return len(self.partner)

    def clones_of(self, pair: Pair) -> np.ndarray:
        """Clone ids of type ``pair``, ascending."""
        return np.flatnonzero(self.clone_type == self.pairs.index(pair))

    def edges(self) -> np.ndarray:
        """``(E, 2)`` vertex-id pairs, one row per matched clone pair."""
        c = np.flatnonzero(np.arange(self.num_clones) < self.partner)
        return np.stack([self.clone_vertex[c], self.clone_vertex[self.partner[c]]], axis=1)

    def realized_degrees(self) -> np.ndarray:
        out = np.zeros_like(self.vertex_degree)
        other_part = self.vertex_part[self.clone_vertex[self.partner]] - 1
        np.add.at(out, (self.clone_vertex, other_part), 1)
        return out


def clone_layout(seq: DegreeSequence):
    """Vertices and clones of ``seq`` before any matching is drawn."""
    p = seq.parts
    pairs = tuple(seq.pairs)
    pos = {pair: k for k, pair in enumerate(pairs)}
    vparts: List[int] = []
    vdeg: List[Tuple[int, ...]] = []
    for (i, d), c in seq.counts:
        vparts.extend([i] * c)
        vdeg.extend([d] * c)
    vertex_part = np.array(vparts, dtype=np.int64)
    vertex_degree = np.array(vdeg, dtype=np.int64).reshape(len(vparts), p)
    totals = vertex_degree.sum(axis=1)
    vertex_ptr = np.zeros(len(vparts) + 1, dtype=np.int64)
    np.cumsum(totals, out=vertex_ptr[1:])
    clone_vertex = np.repeat(np.arange(len(vparts), dtype=np.int64), totals)
    # type of each clone: vertex part i, target part j in ascending order
    type_table = np.full((p, p), -1, dtype=np.int64)
    for (i, j), k in pos.items():
        type_table[i - 1, j - 1] = k
    target = np.repeat(np.tile(np.arange(p, dtype=np.int64), len(vparts)), vertex_degree.ravel())
    clone_type = type_table[vertex_part[clone_vertex] - 1, target]
    return pairs, vertex_part, vertex_degree, vertex_ptr, clone_vertex, clone_type


def _check_matchable(seq: DegreeSequence) -> None:
    bad = seq.symmetry_violations()
    if bad:
        raise ConfigurationError("; ".join(bad))


def sample_configuration(seq: DegreeSequence, rng: np.random.Generator) -> CloneGraph:
    """Uniform clone matching, one independent matching per part pair.

    For ``i != j`` the ``(j, i)`` clones are shuffled and zipped against
    the ``(i, j)`` clones; for ``i == j`` the clones are shuffled and paired
    consecutively.  Pairs are processed in lexicographic order.
    """
    _check_matchable(seq)
    pairs, vpart, vdeg, vptr, cvert, ctype = clone_layout(seq)
    partner = np.full(len(cvert), -1, dtype=np.int64)
    for i, j in pairs:
        if i > j:
            continue
        xs = np.flatnonzero(ctype == pairs.index((i, j)))
        if i == j:
            perm = rng.permutation(xs)
            a, b = perm[0::2], perm[1::2]
            partner[a] = b
            partner[b] = a
        else:
            ys = rng.permutation(np.flatnonzero(ctype == pairs.index((j, i))))
            partner[xs] = ys
            partner[ys] = xs
    return CloneGraph(seq.parts, pairs, vpart, vdeg, vptr, cvert, ctype, partner)


def is_simple(g: CloneGraph) -> bool:
    """No self-loops and no repeated vertex pair."""
    e = g.edges()
    if len(e) == 0:
        return True
    if np.any(e[:, 0] == e[:, 1]):
        return False
    lo = np.minimum(e[:, 0], e[:, 1])
    hi = np.maximum(e[:, 0], e[:, 1])
    keys = lo * g.n + hi
    return len(np.unique(keys)) == len(keys)


def sample_simple(seq: DegreeSequence, rng: np.random.Generator, max_attempts: int = 1000):
    """Rejection-sample until simple; returns ``(graph, attempts)``."""
    _check_matchable(seq)
    for attempt in range(1, max_attempts + 1):
        g = sample_configuration(seq, rng)
        if is_simple(g):
            return g, attempt
    raise RejectionLimitError(max_attempts)
