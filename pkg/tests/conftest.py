from fractions import Fraction as F

import numpy as np
import pytest

import multigiant.cli
import multigiant.configuration
import multigiant.experiments
from multigiant import _kernels
from multigiant.degrees import DegreeSequence, DegreeSpec

SUPER = {(1, (0, 1)): F(1, 4), (1, (0, 3)): F(1, 4), (2, (2, 0)): F(1, 2)}
SUB = {(1, (0, 1)): F(7, 13), (1, (0, 3)): F(1, 13), (2, (2, 0)): F(5, 13)}
DISJOINT = {
    (1, (0, 2, 0, 0)): F(1, 4), (2, (2, 0, 0, 0)): F(1, 4),
    (3, (0, 0, 0, 3)): F(1, 4), (4, (0, 0, 3, 0)): F(1, 4),
}


@pytest.fixture
def super_spec():
    return DegreeSpec(2, SUPER)


@pytest.fixture
def sub_spec():
    return DegreeSpec(2, SUB)


@pytest.fixture
def disjoint_spec():
    return DegreeSpec(4, DISJOINT)


KERNELS = [pytest.param(_kernels.python, id="python")]
if _kernels.compiled is not None:
    KERNELS.append(pytest.param(_kernels.compiled, id="cython"))


@pytest.fixture(params=KERNELS)
def kernels(request):
    return request.param


def graph_degree_counts(rng, parts, n, edges, loops=True):
    """Degree sequence of a random multipartite multigraph.

    Symmetric clone counts hold by construction, so the empirical
    distribution is always a valid spec.
    """
    part = rng.integers(1, parts + 1, size=n)
    deg = np.zeros((n, parts), dtype=int)
    for _ in range(edges):
        u, v = rng.integers(0, n, size=2)
        if u == v and not loops:
            continue
        deg[u, part[v] - 1] += 1
        deg[v, part[u] - 1] += 1
    counts = {}
    for v in range(n):
        key = (int(part[v]), tuple(int(x) for x in deg[v]))
        counts[key] = counts.get(key, 0) + 1
    return counts


def random_sequence(rng, parts, n, edges):
    return DegreeSequence(parts, graph_degree_counts(rng, parts, n, edges))


def random_spec(rng, parts, n, edges):
    counts = graph_degree_counts(rng, parts, n, edges)
    total = sum(counts.values())
    return DegreeSpec(parts, {k: F(c, total) for k, c in counts.items()})


def random_bipartite_spec(rng, max_support=3, max_degree=6):
    """Exact bipartite spec of the (0, j) / (k, 0) form, support <= 2 * max_support."""
    while True:
        js = rng.choice(np.arange(0, max_degree + 1), size=rng.integers(1, max_support + 1), replace=False)
        ks = rng.choice(np.arange(0, max_degree + 1), size=rng.integers(1, max_support + 1), replace=False)
        a = [F(int(x)) for x in rng.integers(1, 10, size=len(js))]
        b = [F(int(x)) for x in rng.integers(1, 10, size=len(ks))]
        m1 = sum(int(j) * w for j, w in zip(js, a)) / sum(a)
        m2 = sum(int(k) * w for k, w in zip(ks, b)) / sum(b)
        if m1 == 0 or m2 == 0:
            continue
        P1 = m2 / (m1 + m2)
        P2 = 1 - P1
        atoms = {(1, (0, int(j))): P1 * w / sum(a) for j, w in zip(js, a)}
        atoms.update({(2, (int(k), 0)): P2 * w / sum(b) for k, w in zip(ks, b)})
        return DegreeSpec(2, atoms)


# -- degree preservation on every sampled graph --------------------------------

SAMPLES_CHECKED = [0]
_sample_configuration = multigiant.configuration.sample_configuration


def check_clone_graph(g):
    C = g.num_clones
    partner = g.partner
    assert np.array_equal(partner[partner], np.arange(C)), "matching is not an involution"
    table = np.array(g.pairs, dtype=np.int64).reshape(-1, 2)
    own, other = table[g.clone_type], table[g.clone_type[partner]]
    assert np.array_equal(own[:, ::-1], other), "clone matched with a wrong type"
    assert np.array_equal(g.realized_degrees(), g.vertex_degree), "degree vector not preserved"


def _checked_sample(seq, rng):
    g = _sample_configuration(seq, rng)
    check_clone_graph(g)
    SAMPLES_CHECKED[0] += 1
    return g


for _mod in (multigiant, multigiant.configuration, multigiant.experiments, multigiant.cli):
    _mod.sample_configuration = _checked_sample


# -- acceptance reporting ------------------------------------------------------

ACCEPTANCE_LINES = []


def record_acceptance(number, passed, detail):
    line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append((number, line))
    print(line)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    terminalreporter.write_line(
        f"degree preservation verified on {SAMPLES_CHECKED[0]} sampled graphs")
    for _, line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
