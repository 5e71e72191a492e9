import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from multigiant.branching import (build_offspring_law, extinction_fixed_point,
                                  simulate_total_size, survival_curve, survival_monte_carlo)
from multigiant.degrees import DegreeSpec, interpolate
from multigiant.meanmatrix import build_mean_matrix, check_irreducible, perron_eigenpair
from multigiant.rng import child

from conftest import random_spec


def test_bipartite_laws(super_spec):
    law = build_offspring_law(super_spec)
    assert law.index == ((1, 2), (2, 1))
    d21 = law.distribution((2, 1))
    assert [(a, w, c) for a, w, c in d21] == [((1, (0, 1)), 0.25, (0, 0)), ((1, (0, 3)), 0.75, (2, 0))]
    assert law.distribution((1, 2)) == [((2, (2, 0)), 1.0, (0, 1))]
    assert law.exact_type_weights == [1, F(1, 4), F(3, 4)]
    assert np.allclose(law.mean_matrix(), build_mean_matrix(super_spec).entries)
    # root children are d_j with no delta correction
    roots = dict(zip(law.root_atoms, map(tuple, law.root_children.tolist())))
    assert roots[(1, (0, 3))] == (3, 0)
    assert roots[(2, (2, 0))] == (0, 2)


def test_unipartite_degree_one_law(kernels):
    spec = DegreeSpec(1, {(1, (1,)): F(1)})
    law = build_offspring_law(spec)
    assert law.distribution((1, 1)) == [((1, (1,)), 1.0, (0,))]
    for t in range(20):
        assert simulate_total_size(law, 100, child(0, f"bp/{t}"), kernels) == (False, 2)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), parts=st.integers(1, 3), n=st.integers(3, 20))
def test_laws_are_distributions(seed, parts, n):
    rng = np.random.default_rng(seed)
    spec = random_spec(rng, parts, n, int(rng.integers(1, 4 * n)))
    law = build_offspring_law(spec)
    for t in range(law.N):
        lo, hi = law.type_ptr[t], law.type_ptr[t + 1]
        assert abs(law.type_weights[lo:hi].sum() - 1) <= 1e-12
        assert sum(law.exact_type_weights[lo:hi]) == 1
    assert np.all(law.type_children >= 0)
    assert abs(law.root_weights.sum() - 1) <= 1e-12


def test_fixed_point_supercritical(super_spec):
    sol = extinction_fixed_point(build_offspring_law(super_spec))
    # smaller root of 3q^2 - 4q + 1
    small = min(np.roots([3, -4, 1]))
    assert np.allclose(sol.q, [small, small], atol=1e-10)
    assert abs(sol.eta - 23 / 27) <= 1e-10
    eta_hand = 1 - (F(1, 4) * F(1, 3) + F(1, 4) * F(1, 27) + F(1, 2) * F(1, 9))
    assert eta_hand == F(23, 27)
    assert sol.residual <= 1e-12


def test_fixed_point_subcritical(sub_spec):
    sol = extinction_fixed_point(build_offspring_law(sub_spec))
    assert sol.q.tolist() == [1.0, 1.0]
    assert sol.eta == 0.0


def test_fixed_point_certain_survival():
    spec = DegreeSpec(2, {(1, (0, 3)): F(2, 5), (2, (2, 0)): F(3, 5)})
    sol = extinction_fixed_point(build_offspring_law(spec))
    assert sol.q.tolist() == [0.0, 0.0]
    assert sol.eta == 1.0


def test_fixed_point_with_isolated_vertices():
    # a tenth of the vertices are isolated: eta is diluted by exactly that share
    base = {(1, (0, 1)): F(1, 4), (1, (0, 3)): F(1, 4), (2, (2, 0)): F(1, 2)}
    spec = DegreeSpec(2, {**{k: v * F(9, 10) for k, v in base.items()}, (1, (0, 0)): F(1, 10)})
    sol = extinction_fixed_point(build_offspring_law(spec))
    assert abs(sol.eta - 0.9 * 23 / 27) <= 1e-10


def test_fixed_point_no_convergence(super_spec):
    from multigiant.meanmatrix import NoConvergenceError
    with pytest.raises(NoConvergenceError):
        extinction_fixed_point(build_offspring_law(super_spec), max_iter=3)


@settings(max_examples=80, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), parts=st.integers(1, 3), n=st.integers(3, 20))
def test_eta_consistent_with_regime(seed, parts, n):
    rng = np.random.default_rng(seed)
    spec = random_spec(rng, parts, n, int(rng.integers(1, 3 * n)))
    M = build_mean_matrix(spec)
    if not check_irreducible(M).irreducible:
        return
    gamma = perron_eigenpair(M).gamma
    if abs(gamma - 1) <= 1e-3:
        return
    sol = extinction_fixed_point(build_offspring_law(spec))
    assert 0.0 <= sol.eta <= 1.0
    assert np.all((0 <= sol.q) & (sol.q <= 1))
    assert sol.residual <= 1e-9
    assert (sol.eta > 0) == (gamma > 1)


def test_monte_carlo_examples(super_spec, sub_spec):
    law = build_offspring_law(super_spec)
    mc = survival_monte_carlo(law, 20_000, cap=10_000, seed=3)
    se = math.sqrt((23 / 27) * (4 / 27) / mc.trials)
    assert abs(mc.frequency - 23 / 27) <= 3 * se + 1e-3
    sub = survival_monte_carlo(build_offspring_law(sub_spec), 20_000, cap=10_000, seed=3)
    assert sub.frequency <= 1e-3


def test_cap_doubling_slack(super_spec):
    law = build_offspring_law(super_spec)
    a = survival_monte_carlo(law, 10_000, cap=2_000, seed=5)
    b = survival_monte_carlo(law, 10_000, cap=4_000, seed=5)
    # same streams: doubling the cap can only turn survivors into deaths
    assert b.survived <= a.survived
    assert (a.survived - b.survived) / a.trials < 1e-3


def test_monte_carlo_workers_and_backends(super_spec, kernels):
    law = build_offspring_law(super_spec)
    one = survival_monte_carlo(law, 3000, cap=500, seed=11, kernels=kernels)
    many = survival_monte_carlo(law, 3000, cap=500, seed=11, workers=4, kernels=kernels)
    assert one.survived == many.survived


def test_simulate_rejects_bad_cap(super_spec):
    with pytest.raises(ValueError):
        simulate_total_size(build_offspring_law(super_spec), 0, child(0, "bp/0"))


def test_survival_curve(super_spec, sub_spec):
    grid = [F(k, 10) for k in range(11)]
    rows = survival_curve(lambda t: interpolate(sub_spec, super_spec, t), grid)
    assert [r.param for r in rows] == grid
    gammas = [r.gamma for r in rows]
    assert all(b > a for a, b in zip(gammas, gammas[1:]))
    for r in rows:
        if r.regime == "subcritical":
            assert r.eta == 0.0
        elif r.regime == "supercritical":
            assert r.eta > 0
    assert rows[0].eta == 0.0 and abs(rows[-1].eta - 23 / 27) < 1e-10


def test_survival_curve_edges(super_spec, disjoint_spec):
    assert survival_curve(lambda t: super_spec, []) == []
    [row] = survival_curve(lambda t: super_spec, [0])
    res = perron_eigenpair(build_mean_matrix(super_spec))
    assert (row.gamma, row.regime) == (res.gamma, res.regime)
    [bad] = survival_curve(lambda t: disjoint_spec, [1])
    assert bad.gamma is None and "irreducible" in bad.error
