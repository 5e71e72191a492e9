import json
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from multigiant.degrees import (DegreeSequence, DegreeSpec, RepairInfeasibleError, SpecError,
                                repair_counts,
                                SpecParseError, interpolate, load_sequence, load_spec,
                                realize_sequence, save_sequence, save_spec, sequence_stats,
                                validate_spec)

from conftest import random_spec


def lam_by_hand(atoms, i, j):
    return sum(d[j - 1] * m for (part, d), m in atoms.items() if part == i)


def test_validate_bipartite(super_spec):
    rep = validate_spec(super_spec)
    assert rep.ok
    assert rep.pairs == [(1, 2), (2, 1)]
    assert rep.N == 2
    assert rep.lam[0][1] == rep.lam[1][0] == 1
    assert rep.lam[0][1] == lam_by_hand(super_spec.mass, 1, 2)
    assert rep.first_moments == [1, 1]
    assert rep.second_moments == [F(5, 2), 2]


def test_validate_asymmetric():
    rep = validate_spec(DegreeSpec(2, {(1, (0, 1)): F(1)}))
    assert not rep.ok
    assert any("asymmetry" in e for e in rep.errors)
    assert any("zero mass" in l for l in rep.lints)


def test_validate_mass_sum():
    rep = validate_spec(DegreeSpec(2, {(1, (0, 1)): F(1, 3), (2, (1, 0)): F(1, 3)}))
    assert any("sum" in e for e in rep.errors)


def test_validate_empty_neighbourhood():
    # part 2 vertices are all isolated
    rep = validate_spec(DegreeSpec(2, {(1, (2, 0)): F(1, 2), (2, (0, 0)): F(1, 2)}))
    assert any("S_2" in e for e in rep.errors)


def test_disjoint_spec_is_valid(disjoint_spec):
    # reducibility is the mean matrix's business, not validation's
    assert validate_spec(disjoint_spec).ok


def test_float_masses_tolerance():
    spec = DegreeSpec(2, {(1, (0, 1)): 0.25, (1, (0, 3)): 0.25, (2, (2, 0)): 0.5 + 1e-14})
    assert not spec.exact
    assert validate_spec(spec).ok


@pytest.mark.parametrize("bad", [
    dict(parts=0, atoms={}),
    dict(parts=2, atoms={(3, (0, 1)): F(1)}),
    dict(parts=2, atoms={(1, (0, 1, 0)): F(1)}),
    dict(parts=2, atoms={(1, (0, -1)): F(1)}),
    dict(parts=2, atoms={(1, (0, 1)): F(-1)}),
])
def test_spec_construction_errors(bad):
    with pytest.raises(SpecError):
        DegreeSpec(**bad)


def test_realize_exact_multiple(super_spec):
    seq = realize_sequence(super_spec, 8)
    assert dict(seq.counts) == {(1, (0, 1)): 2, (1, (0, 3)): 2, (2, (2, 0)): 4}
    assert seq.clone_count(1, 2) == seq.clone_count(2, 1) == 8


def test_realize_n10_repaired(super_spec):
    seq = realize_sequence(super_spec, 10)
    assert seq.symmetry_violations() == []
    assert seq.clone_count(1, 2) == seq.clone_count(2, 1)


def test_realize_exhaustive_small_n(super_spec, sub_spec):
    for spec in (super_spec, sub_spec):
        for n in range(1, 101):
            seq = realize_sequence(spec, n)
            assert seq.symmetry_violations() == [], n
            assert seq.n <= n + len(spec.atoms)


def test_realize_zero_degree_only():
    spec = DegreeSpec(1, {(1, (0,)): F(1)})
    seq = realize_sequence(spec, 5)
    assert seq.n == 5
    assert seq.clone_count(1, 1) == 0


def test_realize_parity_repair():
    # unipartite: clones (1,1) must be even
    spec = DegreeSpec(1, {(1, (1,)): F(1, 2), (1, (3,)): F(1, 2)})
    for n in range(1, 60):
        assert realize_sequence(spec, n).symmetry_violations() == []


def test_realize_rejects_nonpositive_n(super_spec):
    with pytest.raises(SpecError):
        realize_sequence(super_spec, 0)


def test_repair_infeasible_parity():
    # a zero-mass atom contributes one (1,2) clone; every usable atom moves
    # (1,2) and (2,1) counts in steps of 2, so the odd gap can never close
    spec = DegreeSpec(2, {(1, (0, 1)): F(0), (1, (0, 2)): F(1, 2), (2, (2, 0)): F(1, 2)})
    with pytest.raises(RepairInfeasibleError, match=r"pair \(1, 2\)"):
        repair_counts(spec, {(1, (0, 1)): 1, (1, (0, 2)): 2, (2, (2, 0)): 2}, 5)


def test_repair_is_deterministic(super_spec):
    counts = {(1, (0, 1)): 3, (1, (0, 3)): 2, (2, (2, 0)): 5}
    a = repair_counts(super_spec, counts, 10)
    assert a == repair_counts(super_spec, counts, 10)
    assert DegreeSequence(2, a).symmetry_violations() == []


@pytest.mark.parametrize("n", [10 ** 3, 10 ** 4, 10 ** 5])
def test_stats_converge(super_spec, sub_spec, n):
    for spec in (super_spec, sub_spec):
        stats = sequence_stats(realize_sequence(spec, n))
        slack = 5 * len(spec.atoms) / n
        first, second = spec.moments()
        lam = spec.lambda_matrix()
        for i in range(2):
            assert abs(stats.first_moments[i] - first[i]) <= slack * 3
            assert abs(stats.second_moments[i] - second[i]) <= slack * 9
            for j in range(2):
                assert abs(stats.lam[i][j] - lam[i][j]) <= slack * 3


def test_stats_examples(super_spec):
    stats = sequence_stats(realize_sequence(super_spec, 8))
    assert stats.lam[0][1] == F(2 * 1 + 2 * 3, 8) == 1
    assert stats.omega == 3
    assert len(stats.lints) == 1  # 3^2 > 8
    assert sequence_stats(realize_sequence(super_spec, 12)).lints == []
    lint = sequence_stats(DegreeSequence(1, {(1, (9,)): 1, (1, (1,)): 7}))
    assert lint.n == 8 and lint.omega == 9
    assert any("81 > n = 8" in l for l in lint.lints)
    empty = sequence_stats(DegreeSequence(2, {}))
    assert empty.n == 0 and empty.omega == 0 and empty.lints == []
    assert empty.lam == [[0, 0], [0, 0]]


def test_roundtrip(tmp_path, super_spec):
    path = tmp_path / "spec.json"
    save_spec(super_spec, path)
    assert load_spec(path) == super_spec
    fl = DegreeSpec(2, {(1, (0, 1)): 0.1, (1, (0, 3)): 0.4 / 3, (2, (2, 0)): 1 - 0.1 - 0.4 / 3})
    save_spec(fl, path)
    back = load_spec(path)
    assert back == fl
    assert [m for _, m in back.atoms] == [m for _, m in fl.atoms]
    seq = realize_sequence(super_spec, 10)
    save_sequence(seq, tmp_path / "seq.json")
    assert load_sequence(tmp_path / "seq.json") == seq


def _write(tmp_path, doc):
    path = tmp_path / "x.json"
    path.write_text(json.dumps(doc) if not isinstance(doc, str) else doc)
    return path


def test_parse_negative_mass(tmp_path):
    doc = {"parts": 2, "atoms": [{"part": 1, "degree": [0, 1], "mass": "1/2"},
                                 {"part": 2, "degree": [1, 0], "mass": -0.5}]}
    with pytest.raises(SpecParseError, match=r"atoms\[1\].*part 2, degree \[1, 0\]"):
        load_spec(_write(tmp_path, doc))


def test_parse_duplicate_atom(tmp_path):
    doc = {"parts": 2, "atoms": [{"part": 1, "degree": [0, 1], "mass": "1/4"},
                                 {"part": 1, "degree": [0, 1], "mass": "1/4"},
                                 {"part": 2, "degree": [1, 0], "mass": "1/2"}]}
    with pytest.raises(SpecParseError, match="duplicate"):
        load_spec(_write(tmp_path, doc))


@pytest.mark.parametrize("doc,match", [
    ({"parts": 2, "atoms": [], "extra": 1}, "unknown field"),
    ({"parts": 2, "atoms": [{"part": 1, "degree": [0, 1], "mass": 1, "x": 0}]}, "unknown field"),
    ({"parts": 2}, "missing field"),
    ({"parts": 2, "atoms": [{"part": 1, "degree": [0, 1], "mass": "one"}]}, "cannot parse mass"),
    ({"parts": 2, "atoms": [{"part": 3, "degree": [0, 1], "mass": 1}]}, "outside"),
    ('{"parts": 2,\n "atoms": [}', "line 2"),
])
def test_parse_errors(tmp_path, doc, match):
    with pytest.raises(SpecParseError, match=match):
        load_spec(_write(tmp_path, doc))


def test_sequence_file_n_mismatch(tmp_path):
    doc = {"parts": 1, "n": 3, "atoms": [{"part": 1, "degree": [2], "count": 2}]}
    with pytest.raises(SpecParseError, match="counts sum to 2"):
        load_sequence(_write(tmp_path, doc))


def test_interpolate_stays_valid(super_spec, sub_spec):
    for t in (F(0), F(1, 3), F(1)):
        assert validate_spec(interpolate(sub_spec, super_spec, t)).ok
    assert interpolate(sub_spec, super_spec, F(1)).mass[(1, (0, 1))] == F(1, 4)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), parts=st.integers(1, 3), n=st.integers(2, 25))
def test_random_specs_valid_and_realizable(seed, parts, n):
    rng = np.random.default_rng(seed)
    spec = random_spec(rng, parts, n, edges=int(rng.integers(1, 3 * n)))
    total = spec.total_mass()
    assert abs(total - 1) <= 1e-12
    lam = spec.lambda_matrix()
    for i in range(parts):
        for j in range(parts):
            assert abs(lam[i][j] - lam[j][i]) <= 1e-12
    for size in (n, 3 * n + 1, 997):
        try:
            seq = realize_sequence(spec, size)
        except RepairInfeasibleError:
            continue
        assert seq.symmetry_violations() == []
