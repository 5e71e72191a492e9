"""Component discovery by the clone exploration process, plus a union-find
oracle and the exact one-step transition law of the process."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from . import _kernels
from .configuration import CloneGraph

Pair = Tuple[int, int]
Atom = Tuple[int, Tuple[int, ...]]

EVENT_NAMES = {0: "init", 1: "restart", 2: "back-edge", 3: "wake"}


class InconsistentStateError(ValueError):
    pass


class IllegalEventError(ValueError):
    pass


@dataclass
class ComponentCensus:
    """Partition of the vertex set into connected components.

    ``labels`` is canonical: components are numbered by their smallest
    vertex id, so two censuses describe the same partition iff their
    label arrays are equal.
    """

    n: int
    labels: np.ndarray
    sizes: np.ndarray
    largest_size: int
    second_size: int
    largest_part_counts: Tuple[int, ...]
    num_components: int

    @property
    def largest_fraction(self) -> float:
        return self.largest_size / self.n if self.n else 0.0

    def components(self) -> List[frozenset]:
        order = np.argsort(self.labels, kind="stable")
        cuts = np.flatnonzero(np.diff(self.labels[order])) + 1
        return [frozenset(chunk.tolist()) for chunk in np.split(order, cuts)] if self.n else []

    def same_partition(self, other: "ComponentCensus") -> bool:
        return self.n == other.n and np.array_equal(self.labels, other.labels)


def census_from_labels(labels: np.ndarray, vertex_part: np.ndarray, parts: int) -> ComponentCensus:
    labels = np.asarray(labels, dtype=np.int64)
    n = len(labels)
    if n == 0:
        return ComponentCensus(0, labels, np.zeros(0, dtype=np.int64), 0, 0, (0,) * parts, 0)
    _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
    rank = np.empty(len(first), dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(len(first))
    canon = rank[inverse]
    counts = np.bincount(canon)
    big = int(np.argmax(counts))
    per_part = np.bincount(vertex_part[canon == big] - 1, minlength=parts)
    sizes = np.sort(counts)[::-1]
    second = int(sizes[1]) if len(sizes) > 1 else 0
    return ComponentCensus(n, canon, sizes, int(sizes[0]), second,
                           tuple(int(x) for x in per_part), len(counts))


@dataclass
class ExplorationRun:
    census: ComponentCensus
    case1_steps: int
    starts: int
    log: np.ndarray
    logged: int


def explore_components(g: CloneGraph, rng: np.random.Generator, log_capacity: int = 0,
                       kernels=None) -> ExplorationRun:
    """Run the exploration process to completion over ``g``.

    The partner revealed at each step is the clone pre-matched in ``g``.
    ``log`` rows are ``(k, event, clone, other)`` with event codes in
    :data:`EVENT_NAMES`; at most ``log_capacity`` of the latest rows kept.
    """
    k = kernels or _kernels.backend
    labels, case1, starts, log, logged = k.explore(rng, g.vertex_ptr, g.partner, log_capacity)
    census = census_from_labels(labels, g.vertex_part, g.parts)
    if log_capacity and logged > log_capacity:
        # unroll the ring buffer into chronological order
        log = np.roll(log, -(logged % log_capacity), axis=0)
    return ExplorationRun(census, int(case1), int(starts), log, int(logged))


def union_find_components(g: CloneGraph, kernels=None) -> ComponentCensus:
    k = kernels or _kernels.backend
    e = g.edges()
    roots = k.union_find(g.n, np.ascontiguousarray(e[:, 0]), np.ascontiguousarray(e[:, 1]))
    return census_from_labels(roots, g.vertex_part, g.parts)


# -- transition law ----------------------------------------------------------

class Event(NamedTuple):
    """One outcome of a single exploration step.

    ``kind`` is ``"back-edge"``, ``"wake"`` (Case 1) or ``"restart"``
    (Case 2).  ``clone`` is the type ``(i, j)`` of the chosen clone;
    ``vertex`` is the ``(part, degree)`` type of the woken vertex.
    """

    kind: str
    clone: Pair
    vertex: Optional[Atom] = None


@dataclass
class ExplorationState:
    """Counters of the exploration process at step ``k``.

    ``active[(i, j)]`` and ``living[(i, j)]`` count active and living
    clones of each type; ``sleeping[(i, d)]`` counts sleeping vertices.
    """

    pairs: Tuple[Pair, ...]
    active: Dict[Pair, int]
    living: Dict[Pair, int]
    sleeping: Dict[Atom, int]
    k: int = 0

    @property
    def A(self) -> int:
        return sum(self.active.get(p, 0) for p in self.pairs)

    @property
    def L(self) -> int:
        return sum(self.living.get(p, 0) for p in self.pairs)

    def L_part(self, i: int) -> int:
        return sum(v for (a, _), v in self.living.items() if a == i)

    @property
    def sleeping_total(self) -> int:
        return sum(self.sleeping.values())

    @classmethod
    def from_statuses(cls, g: CloneGraph, status: Sequence[int], k: int = 0) -> "ExplorationState":
        """Recount from per-clone statuses (0 sleeping, 1 active, 2 dead)."""
        status = np.asarray(status)
        active, living = {}, {}
        for t, pair in enumerate(g.pairs):
            sel = g.clone_type == t
            active[pair] = int(np.sum(status[sel] == 1))
            living[pair] = int(np.sum(status[sel] != 2))
        sleeping: Dict[Atom, int] = {}
        for v in range(g.n):
            lo, hi = g.vertex_ptr[v], g.vertex_ptr[v + 1]
            if hi > lo and np.all(status[lo:hi] == 0):
                key = (int(g.vertex_part[v]), tuple(int(x) for x in g.vertex_degree[v]))
                sleeping[key] = sleeping.get(key, 0) + 1
        return cls(tuple(g.pairs), active, living, sleeping, k)

    def check(self) -> None:
        for pair in self.pairs:
            a, l = self.active.get(pair, 0), self.living.get(pair, 0)
            if a < 0 or l < a:
                raise InconsistentStateError(f"type {pair}: active {a}, living {l}")
        if any(c < 0 for c in self.sleeping.values()):
            raise InconsistentStateError("negative sleeping-vertex count")
        for (i, d), c in self.sleeping.items():
            if c and any(d[j - 1] > 0 and (i, j) not in self.pairs for j in range(1, len(d) + 1)):
                raise InconsistentStateError(f"sleeping vertex type {(i, d)} has clones outside S")


def transition_distribution(state: ExplorationState) -> Dict[Event, float]:
    """Exact law of the next step's event given the counters.

    Case 1 (active clones exist): chosen type ``(i, j)`` with probability
    ``A_i^j / A``; its partner is a uniformly random other living
    ``(j, i)`` clone, which is active (back-edge) or belongs to a sleeping
    vertex of type ``d`` with weight ``d_i N_j^d``.  Case 2: a uniformly
    random living clone, i.e. type ``(i, j)`` on a type-``d`` vertex with
    probability ``d_j N_i^d / L``.  The very first step is different: it
    wakes a uniformly random vertex, and is not described here.
    """
    state.check()
    A = state.A
    out: Dict[Event, float] = {}
    if A > 0:
        for (i, j) in state.pairs:
            a_ij = state.active.get((i, j), 0)
            if a_ij == 0:
                continue
            pick = a_ij / A
            same = 1 if i == j else 0
            denom = state.living.get((j, i), 0) - same
            if denom <= 0:
                raise InconsistentStateError(f"active clone of type {(i, j)} has no candidate partner")
            partners_active = state.active.get((j, i), 0) - same
            if partners_active > 0:
                out[Event("back-edge", (i, j))] = pick * partners_active / denom
            for (part, d), cnt in state.sleeping.items():
                if part == j and cnt and d[i - 1]:
                    out[Event("wake", (i, j), (part, d))] = pick * d[i - 1] * cnt / denom
        return out
    L = state.L
    if L == 0:
        return out
    for (part, d), cnt in state.sleeping.items():
        if not cnt:
            continue
        for j in range(1, len(d) + 1):
            if d[j - 1]:
                out[Event("restart", (part, j), (part, d))] = d[j - 1] * cnt / L
    return out


def step_delta(event: Event, pairs: Sequence[Pair]) -> Dict[Pair, int]:
    """Change in active-clone counts ``Z`` caused by ``event``."""
    pairs = tuple(pairs)
    Z = {p: 0 for p in pairs}
    i, j = event.clone
    if (i, j) not in Z:
        raise IllegalEventError(f"clone type {(i, j)} not in S")
    if event.kind == "back-edge":
        if (j, i) not in Z:
            raise IllegalEventError(f"clone type {(j, i)} not in S")
        if i == j:
            Z[(i, i)] = -2
        else:
            Z[(i, j)] = Z[(j, i)] = -1
        return Z
    if event.vertex is None:
        raise IllegalEventError(f"{event.kind} event needs a vertex type")
    part, d = event.vertex
    if event.kind == "wake":
        if part != j or d[i - 1] == 0:
            raise IllegalEventError(f"vertex {event.vertex} has no clone of type {(j, i)}")
        Z[(i, j)] -= 1
        for m in range(1, len(d) + 1):
            kids = d[m - 1] - (1 if m == i else 0)
            if kids:
                if (j, m) not in Z:
                    raise IllegalEventError(f"clone type {(j, m)} not in S")
                Z[(j, m)] += kids
        return Z
    if event.kind == "restart":
        if part != i or d[j - 1] == 0:
            raise IllegalEventError(f"vertex {event.vertex} has no clone of type {(i, j)}")
        for m in range(1, len(d) + 1):
            if d[m - 1]:
                if (i, m) not in Z:
                    raise IllegalEventError(f"clone type {(i, m)} not in S")
                Z[(i, m)] += d[m - 1]
        return Z
    raise IllegalEventError(f"unknown event kind {event.kind!r}")


def classify_step(g: CloneGraph, row: Sequence[int]) -> Optional[Event]:
    """Translate a kernel log row into an :class:`Event` (None for init)."""
    _, code, c, other = (int(x) for x in row)
    if code == 0:
        return None
    if code == 1:
        w = int(g.clone_vertex[c])
        return Event("restart", g.pairs[g.clone_type[c]], _vertex_atom(g, w))
    pair = g.pairs[g.clone_type[c]]
    if code == 2:
        return Event("back-edge", pair)
    return Event("wake", pair, _vertex_atom(g, int(g.clone_vertex[other])))


def _vertex_atom(g: CloneGraph, v: int) -> Atom:
    return int(g.vertex_part[v]), tuple(int(x) for x in g.vertex_degree[v])
