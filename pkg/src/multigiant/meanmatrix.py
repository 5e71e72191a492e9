"""Edge-biased mean matrix, irreducibility, and its Perron-Frobenius pair."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .degrees import DegreeSpec, SpecError

Pair = Tuple[int, int]

BAND_EXACT = 1e-9
BAND_FLOAT = 1e-6


class NotIrreducibleError(ValueError):
    pass


class NoConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class MeanMatrix:
    """Expected-offspring matrix indexed by the clone types in ``index``.

    Entry ``[(i, j), (l, m)]`` is the mean number of type ``(l, m)``
    children of a type ``(i, j)`` individual; it is zero unless ``j == l``.
    ``exact`` holds the same entries as Fractions when the spec was exact.
    """

    index: Tuple[Pair, ...]
    entries: np.ndarray
    exact: Optional[Tuple[Tuple[Fraction, ...], ...]] = None

    @property
    def N(self) -> int:
        return len(self.index)

    def position(self, pair: Pair) -> int:
        return self.index.index(pair)

    def __getitem__(self, key: Tuple[Pair, Pair]) -> float:
        row, col = key
        return float(self.entries[self.position(row), self.position(col)])


def build_mean_matrix(spec: DegreeSpec) -> MeanMatrix:
    index = tuple(spec.pairs)
    pos = {pair: k for k, pair in enumerate(index)}
    N = len(index)
    exact = spec.exact
    table = [[Fraction(0) if exact else 0.0 for _ in range(N)] for _ in range(N)]
    lam = spec.lambda_matrix()
    for (i, j) in index:
        lam_ij = lam[i - 1][j - 1]
        for (part, d), mass in spec.atoms:
            if part != j or d[i - 1] == 0 or mass == 0:
                continue
            weight = d[i - 1] * mass / lam_ij
            for m in range(1, spec.parts + 1):
                kids = d[m - 1] - (1 if m == i else 0)
                if kids:
                    table[pos[(i, j)]][pos[(j, m)]] += kids * weight
    entries = np.array([[float(x) for x in row] for row in table], dtype=float).reshape(N, N)
    frozen = tuple(tuple(row) for row in table) if exact else None
    return MeanMatrix(index, entries, frozen)


def strongly_connected_components(adj: Sequence[Sequence[int]]) -> List[List[int]]:
    """Tarjan's algorithm, iterative.  Components come out in reverse
    topological order; each component is sorted."""
    n = len(adj)
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: List[int] = []
    out: List[List[int]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, k = work[-1]
            if k < len(adj[v]):
                work[-1] = (v, k + 1)
                w = adj[v][k]
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                out.append(sorted(comp))
    return out


@dataclass
class Irreducibility:
    irreducible: bool
    components: List[List[Pair]]


def check_irreducible(M: MeanMatrix) -> Irreducibility:
    """Strong connectivity of the positive-entry digraph of ``M``.

    A single node counts as strongly connected only through a positive
    self-loop, so the 1x1 zero matrix is reducible.
    """
    positive = M.entries > 0
    adj = [list(np.flatnonzero(positive[u])) for u in range(M.N)]
    comps = strongly_connected_components(adj)
    comps_pairs = sorted(([M.index[u] for u in c] for c in comps))
    if M.N == 0:
        return Irreducibility(False, [])
    ok = len(comps) == 1 and (M.N > 1 or bool(positive[0, 0]))
    return Irreducibility(ok, comps_pairs)


@dataclass
class SpectralResult:
    gamma: float
    left_vector: np.ndarray
    residual: float
    irreducible: bool
    regime: str
    iterations: int
    band: float


def classify(gamma: float, band: float) -> str:
    if gamma > 1 + band:
        return "supercritical"
    if gamma < 1 - band:
        return "subcritical"
    return "critical"


def perron_eigenpair(M: MeanMatrix, tol: float = 1e-12, max_iter: int = 100_000,
                     band: Optional[float] = None,
                     start: Optional[np.ndarray] = None) -> SpectralResult:
    """Perron-Frobenius eigenvalue and positive left eigenvector of ``M``.

    Power iteration runs on ``(M + I) / 2`` so period-2 index graphs do not
    oscillate; the eigenvalue is mapped back afterwards.  Convergence needs
    both a settled eigenvalue estimate and a small residual
    ``||z'M - gamma z'||_inf <= tol * max(1, gamma)``.  ``start`` must be
    strictly positive; the default is uniform.
    """
    if band is None:
        band = BAND_EXACT if M.exact is not None else BAND_FLOAT
    irr = check_irreducible(M)
    if not irr.irreducible:
        raise NotIrreducibleError(
            "mean matrix is not irreducible; strongly connected components: "
            + "; ".join(str(c) for c in irr.components))
    A = M.entries
    N = M.N
    B = 0.5 * (A + np.eye(N))
    if start is None:
        z = np.full(N, 1.0 / N)
    else:
        z = np.asarray(start, dtype=float)
        if z.shape != (N,) or np.any(z <= 0):
            raise ValueError("start vector must be strictly positive with one entry per type")
        z = z / z.sum()
    prev = np.inf
    for it in range(1, max_iter + 1):
        y = z @ B
        z = y / y.sum()
        zA = z @ A
        gamma = float(zA @ z / (z @ z))
        residual = float(np.max(np.abs(zA - gamma * z)))
        if abs(gamma - prev) <= tol and residual <= tol * max(1.0, gamma):
            return SpectralResult(gamma, z, residual, True, classify(gamma, band), it, band)
        prev = gamma
    raise NoConvergenceError(f"power iteration did not converge in {max_iter} iterations "
                             f"(residual {residual:.3e})")


def _is_bipartite_form(spec: DegreeSpec) -> bool:
    if spec.parts != 2:
        return False
    for (part, d), mass in spec.atoms:
        if mass == 0:
            continue
        if part == 1 and d[0] != 0:
            return False
        if part == 2 and d[1] != 0:
            return False
    return True


def bipartite_criterion(spec: DegreeSpec):
    """Newman's bipartite sum ``sum_{j,k} jk(jk - j - k) p_j q_k``.

    Positive exactly when the two-part mean matrix has spectral radius
    above one.  Exact when the spec is exact.
    """
    if not _is_bipartite_form(spec):
        raise SpecError("bipartite criterion needs p = 2 with degree vectors (0, j) in part 1 "
                        "and (k, 0) in part 2")
    left = [(d[1], m) for (part, d), m in spec.atoms if part == 1]
    right = [(d[0], m) for (part, d), m in spec.atoms if part == 2]
    total = Fraction(0)
    for j, pj in left:
        for k, qk in right:
            total = total + j * k * (j * k - j - k) * pj * qk
    return total
