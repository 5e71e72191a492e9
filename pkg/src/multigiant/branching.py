"""Edge-biased multi-type branching process: extinction fixed point and
Monte Carlo simulation of the total progeny."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import _kernels
from .degrees import DegreeSpec
from .meanmatrix import NoConvergenceError, build_mean_matrix, perron_eigenpair
from .rng import child

Pair = Tuple[int, int]
Atom = Tuple[int, Tuple[int, ...]]

# q within this distance of 1 is snapped to exactly 1 when the law's mean
# matrix has spectral radius <= 1 (slow convergence near q = 1 otherwise
# leaves a spurious positive survival probability).
SNAP = 1e-6


@dataclass
class OffspringLaw:
    """Size-biased offspring distributions of every clone type and the root.

    For type ``index[t]`` the atoms are ``type_atoms[type_ptr[t]:type_ptr[t+1]]``
    with probabilities ``type_weights`` and child-count rows
    ``type_children`` (columns follow ``index``).  The root draws a vertex
    type from ``root_atoms`` with ``root_weights``.
    """

    index: Tuple[Pair, ...]
    type_ptr: np.ndarray
    type_atoms: List[Atom]
    type_weights: np.ndarray
    type_children: np.ndarray
    root_atoms: List[Atom]
    root_weights: np.ndarray
    root_children: np.ndarray
    exact_type_weights: Optional[List[Fraction]] = None
    exact_root_weights: Optional[List[Fraction]] = None

    @property
    def N(self) -> int:
        return len(self.index)

    def distribution(self, pair: Pair) -> List[Tuple[Atom, float, Tuple[int, ...]]]:
        t = self.index.index(pair)
        lo, hi = self.type_ptr[t], self.type_ptr[t + 1]
        return [(self.type_atoms[a], float(self.type_weights[a]),
                 tuple(int(x) for x in self.type_children[a])) for a in range(lo, hi)]

    def mean_matrix(self) -> np.ndarray:
        out = np.zeros((self.N, self.N))
        for t in range(self.N):
            lo, hi = self.type_ptr[t], self.type_ptr[t + 1]
            out[t] = self.type_weights[lo:hi] @ self.type_children[lo:hi]
        return out


def build_offspring_law(spec: DegreeSpec) -> OffspringLaw:
    index = tuple(spec.pairs)
    pos = {pair: k for k, pair in enumerate(index)}
    N = len(index)
    lam = spec.lambda_matrix()
    ptr = [0]
    atoms: List[Atom] = []
    weights = []
    children = []
    for (i, j) in index:
        for (part, d), mass in spec.atoms:
            if part != j or d[i - 1] == 0 or mass == 0:
                continue
            row = [0] * N
            for m in range(1, spec.parts + 1):
                kids = d[m - 1] - (1 if m == i else 0)
                if kids:
                    row[pos[(j, m)]] = kids
            atoms.append((part, d))
            weights.append(d[i - 1] * mass / lam[i - 1][j - 1])
            children.append(row)
        ptr.append(len(atoms))
    root_atoms, root_weights, root_children = [], [], []
    for (part, d), mass in spec.atoms:
        if mass == 0:
            continue
        row = [0] * N
        for m in range(1, spec.parts + 1):
            if d[m - 1]:
                row[pos[(part, m)]] = d[m - 1]
        root_atoms.append((part, d))
        root_weights.append(mass)
        root_children.append(row)
    exact = spec.exact
    return OffspringLaw(
        index,
        np.array(ptr, dtype=np.int64),
        atoms,
        np.array([float(w) for w in weights]),
        np.array(children, dtype=np.int32).reshape(len(atoms), N),
        root_atoms,
        np.array([float(w) for w in root_weights]),
        np.array(root_children, dtype=np.int32).reshape(len(root_atoms), N),
        list(weights) if exact else None,
        list(root_weights) if exact else None,
    )


@dataclass
class SurvivalSolution:
    q: np.ndarray
    eta: float
    iterations: int
    residual: float
    index: Tuple[Pair, ...] = ()


def _generating_map(law: OffspringLaw) -> Callable[[np.ndarray], np.ndarray]:
    owner = np.repeat(np.arange(law.N), np.diff(law.type_ptr))
    C = law.type_children.astype(float)
    w = law.type_weights

    def F(q):
        terms = np.prod(np.power(q[None, :], C), axis=1) * w
        return np.bincount(owner, weights=terms, minlength=law.N)

    return F


def extinction_fixed_point(law: OffspringLaw, tol: float = 1e-12,
                           max_iter: int = 1_000_000) -> SurvivalSolution:
    """Smallest fixed point of the offspring generating map by monotone
    iteration from ``q = 0``, and the root survival probability."""
    F = _generating_map(law)
    q = np.zeros(law.N)
    for it in range(1, max_iter + 1):
        nxt = np.minimum(F(q), 1.0)
        if np.any(nxt < q - 1e-15):
            raise RuntimeError("extinction iteration lost monotonicity")
        step = float(np.max(np.abs(nxt - q))) if law.N else 0.0
        q = nxt
        if step <= tol:
            break
    else:
        raise NoConvergenceError(f"extinction iteration did not converge in {max_iter} steps")
    if law.N and np.max(1.0 - q) <= SNAP:
        rho = float(np.max(np.abs(np.linalg.eigvals(law.mean_matrix()))))
        if rho <= 1.0 + 1e-9:
            q = np.ones(law.N)
    residual = float(np.max(np.abs(q - F(q)))) if law.N else 0.0
    eta = survival_from_q(law, q)
    return SurvivalSolution(q, eta, it, residual, law.index)


def survival_from_q(law: OffspringLaw, q: np.ndarray) -> float:
    if np.all(q == 1.0):
        return 0.0  # root weights need not sum to exactly 1 in floating point
    extinct = float(np.prod(np.power(q[None, :], law.root_children.astype(float)), axis=1)
                    @ law.root_weights)
    return min(1.0, max(0.0, 1.0 - extinct))


# -- Monte Carlo -------------------------------------------------------------

@dataclass
class _Tables:
    root_cdf: np.ndarray
    root_children: np.ndarray
    type_ptr: np.ndarray
    type_cdf: np.ndarray
    type_children: np.ndarray
    max_children: int


def _tables(law: OffspringLaw) -> _Tables:
    type_cdf = np.zeros(len(law.type_weights))
    for t in range(law.N):
        lo, hi = law.type_ptr[t], law.type_ptr[t + 1]
        type_cdf[lo:hi] = np.cumsum(law.type_weights[lo:hi])
        if hi > lo:
            type_cdf[hi - 1] = np.inf
    root_cdf = np.cumsum(law.root_weights)
    if len(root_cdf):
        root_cdf[-1] = np.inf
    max_children = int(max(law.type_children.sum(axis=1).max(initial=0),
                           law.root_children.sum(axis=1).max(initial=0)))
    return _Tables(np.ascontiguousarray(root_cdf),
                   np.ascontiguousarray(law.root_children, dtype=np.int32),
                   np.ascontiguousarray(law.type_ptr, dtype=np.int64),
                   np.ascontiguousarray(type_cdf),
                   np.ascontiguousarray(law.type_children, dtype=np.int32),
                   max_children)


def simulate_total_size(law: OffspringLaw, cap: int, rng: np.random.Generator,
                        kernels=None, tables: Optional[_Tables] = None) -> Tuple[bool, int]:
    """Breadth-first run of the process.

    Returns ``(survived, size)``: ``survived`` when the total population
    exceeded ``cap``, otherwise ``size`` is the total progeny including
    the root.
    """
    if cap < 1:
        raise ValueError("cap must be >= 1")
    tb = tables or _tables(law)
    k = kernels or _kernels.backend
    return k.simulate_bp(rng, cap, tb.root_cdf, tb.root_children, tb.type_ptr,
                         tb.type_cdf, tb.type_children, tb.max_children)


@dataclass
class MonteCarloSurvival:
    trials: int
    survived: int
    cap: int

    @property
    def frequency(self) -> float:
        return self.survived / self.trials if self.trials else 0.0

    @property
    def stderr(self) -> float:
        f = self.frequency
        return math.sqrt(f * (1 - f) / self.trials) if self.trials else 0.0


def survival_monte_carlo(law: OffspringLaw, trials: int, cap: int = 10_000, seed: int = 0,
                         workers: int = 1, kernels=None) -> MonteCarloSurvival:
    """Independent runs, trial ``t`` drawing from stream ``bp/t``."""
    tb = _tables(law)

    def one(t):
        return simulate_total_size(law, cap, child(seed, f"bp/{t}"), kernels, tb)[0]

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            survived = sum(pool.map(one, range(trials), chunksize=256))
    else:
        survived = sum(one(t) for t in range(trials))
    return MonteCarloSurvival(trials, int(survived), cap)


# -- parameter sweeps --------------------------------------------------------

@dataclass
class CurveRow:
    param: object
    gamma: Optional[float]
    regime: Optional[str]
    eta: Optional[float]
    error: str = ""


def analyze_point(spec: DegreeSpec, tol: float = 1e-12) -> Tuple[float, str, float]:
    spectral = perron_eigenpair(build_mean_matrix(spec))
    eta = extinction_fixed_point(build_offspring_law(spec), tol=tol).eta
    return spectral.gamma, spectral.regime, eta


def survival_curve(family: Callable[[object], DegreeSpec], grid: Iterable) -> List[CurveRow]:
    """``(param, gamma, eta)`` for each grid point; failures are recorded
    per row rather than aborting the sweep."""
    rows = []
    for param in grid:
        try:
            gamma, regime, eta = analyze_point(family(param))
        except (ValueError, RuntimeError) as exc:
            rows.append(CurveRow(param, None, None, None, str(exc)))
            continue
        rows.append(CurveRow(param, gamma, regime, eta))
    return rows
