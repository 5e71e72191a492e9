"""Multipartite degree distributions and finite degree sequences.

Parts are labelled ``1..p`` everywhere in the public API.  A degree vector
``d`` is a tuple of length ``p`` whose entry ``d[j - 1]`` counts neighbours
in part ``j``.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Real
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Tuple, Union

Number = Union[Fraction, float]
Atom = Tuple[int, Tuple[int, ...]]

MASS_TOL = 1e-12


class SpecError(ValueError):
    """Malformed degree distribution or degree sequence."""


class SpecParseError(SpecError):
    """Raised when a spec or sequence file cannot be parsed."""


class RepairInfeasibleError(SpecError):
    """Raised when rounded counts cannot be balanced into a matchable sequence."""


def _check_atom(parts: int, part, degree) -> Atom:
    if isinstance(part, bool) or not isinstance(part, int) or not 1 <= part <= parts:
        raise SpecError(f"part {part!r} outside 1..{parts}")
    degree = tuple(degree)
    if len(degree) != parts:
        raise SpecError(f"degree vector {degree} has length {len(degree)}, expected {parts}")
    for x in degree:
        if isinstance(x, bool) or not isinstance(x, int) or x < 0:
            raise SpecError(f"degree vector {degree} must hold non-negative integers")
    return part, degree


def _as_number(x) -> Number:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise SpecError(f"invalid mass {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, Real):
        return float(x)
    raise SpecError(f"invalid mass {x!r}")


def _exact_or_float(values: Iterable[Number]):
    """Sum helper that keeps Fractions exact and otherwise degrades to float."""
    total: Number = Fraction(0)
    for v in values:
        total = total + v
    return total


@dataclass(frozen=True)
class DegreeSpec:
    """Asymptotic degree distribution ``p_i^d`` with finite support.

    Parameters
    ----------
    parts : int
        Number of parts ``p``.
    atoms : mapping
        ``(part, degree_vector) -> mass``.  Masses are ``Fraction`` (exact
        mode) or ``float``; integers are promoted to ``Fraction``.
    """

    parts: int
    atoms: Tuple[Tuple[Atom, Number], ...] = field(repr=False)

    def __init__(self, parts: int, atoms: Union[Mapping[Atom, Number], Iterable[Tuple[Atom, Number]]]):
        if isinstance(parts, bool) or not isinstance(parts, int) or parts < 1:
            raise SpecError(f"parts must be an integer >= 1, got {parts!r}")
        items = atoms.items() if isinstance(atoms, Mapping) else atoms
        table: Dict[Atom, Number] = {}
        for (part, degree), mass in items:
            key = _check_atom(parts, part, degree)
            if key in table:
                raise SpecError(f"duplicate atom {key}")
            mass = _as_number(mass)
            if mass < 0 or (isinstance(mass, float) and not math.isfinite(mass)):
                raise SpecError(f"atom {key} has invalid mass {mass}")
            table[key] = mass
        object.__setattr__(self, "parts", parts)
        object.__setattr__(self, "atoms", tuple(sorted(table.items())))

    @property
    def exact(self) -> bool:
        return all(isinstance(m, Fraction) for _, m in self.atoms)

    @property
    def mass(self) -> Dict[Atom, Number]:
        return dict(self.atoms)

    def total_mass(self) -> Number:
        return _exact_or_float(m for _, m in self.atoms)

    def lam(self, i: int, j: int) -> Number:
        """``lambda_i^j = sum_d d_j p_i^d``."""
        return _exact_or_float(d[j - 1] * m for (part, d), m in self.atoms if part == i)

    def lambda_matrix(self) -> List[List[Number]]:
        return [[self.lam(i, j) for j in range(1, self.parts + 1)] for i in range(1, self.parts + 1)]

    @property
    def pairs(self) -> List[Tuple[int, int]]:
        """Ordered pairs ``(i, j)`` with ``lambda_i^j > 0``, lexicographic."""
        lam = self.lambda_matrix()
        return [(i, j) for i in range(1, self.parts + 1) for j in range(1, self.parts + 1)
                if lam[i - 1][j - 1] > 0]

    def neighbours(self, i: int) -> List[int]:
        return [j for a, j in self.pairs if a == i]

    def moments(self) -> Tuple[List[Number], List[Number]]:
        """Per-part first and second moments of the total degree."""
        first, second = [], []
        for i in range(1, self.parts + 1):
            first.append(_exact_or_float(sum(d) * m for (part, d), m in self.atoms if part == i))
            second.append(_exact_or_float(sum(d) ** 2 * m for (part, d), m in self.atoms if part == i))
        return first, second

    def part_mass(self, i: int) -> Number:
        return _exact_or_float(m for (part, _), m in self.atoms if part == i)

    def max_degree(self) -> int:
        return max((sum(d) for (_, d), m in self.atoms if m > 0), default=0)


@dataclass
class ValidationReport:
    errors: List[str]
    lints: List[str]
    pairs: List[Tuple[int, int]]
    lam: List[List[Number]]
    first_moments: List[Number]
    second_moments: List[Number]

    @property
    def ok(self) -> bool:
        return not self.errors

    @property
    def N(self) -> int:
        return len(self.pairs)

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "errors": list(self.errors),
            "lints": list(self.lints),
            "pairs": [list(p) for p in self.pairs],
            "N": self.N,
            "lambda": [[_jsonable(x) for x in row] for row in self.lam],
            "first_moments": [_jsonable(x) for x in self.first_moments],
            "second_moments": [_jsonable(x) for x in self.second_moments],
        }


def _jsonable(x: Number):
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else x.numerator
    return x


def _differs(a: Number, b: Number, exact: bool) -> bool:
    if exact:
        return a != b
    return abs(float(a) - float(b)) > MASS_TOL


def validate_spec(spec: DegreeSpec) -> ValidationReport:
    """Check the structural assumptions a degree distribution must satisfy.

    Failures are collected into the report; nothing is raised.
    """
    errors: List[str] = []
    lints: List[str] = []
    exact = spec.exact
    total = spec.total_mass()
    if _differs(total, Fraction(1), exact):
        errors.append(f"masses sum to {total}, expected 1")
    lam = spec.lambda_matrix()
    p = spec.parts
    for i in range(1, p + 1):
        for j in range(i + 1, p + 1):
            a, b = lam[i - 1][j - 1], lam[j - 1][i - 1]
            if _differs(a, b, exact):
                errors.append(f"lambda asymmetry: lambda_{i}^{j} = {a} != lambda_{j}^{i} = {b}")
    pairs = spec.pairs
    for i in range(1, p + 1):
        if spec.part_mass(i) == 0:
            lints.append(f"part {i} carries zero mass")
        if not any(a == i for a, _ in pairs):
            errors.append(f"part {i} has no neighbouring part (S_{i} is empty)")
    first, second = spec.moments()
    return ValidationReport(errors, lints, pairs, lam, first, second)


@dataclass(frozen=True)
class DegreeSequence:
    """Finite degree sequence ``n_i^d(n)``: integer vertex counts per atom."""

    parts: int
    counts: Tuple[Tuple[Atom, int], ...] = field(repr=False)

    def __init__(self, parts: int, counts: Union[Mapping[Atom, int], Iterable[Tuple[Atom, int]]]):
        if isinstance(parts, bool) or not isinstance(parts, int) or parts < 1:
            raise SpecError(f"parts must be an integer >= 1, got {parts!r}")
        items = counts.items() if isinstance(counts, Mapping) else counts
        table: Dict[Atom, int] = {}
        for (part, degree), c in items:
            key = _check_atom(parts, part, degree)
            if key in table:
                raise SpecError(f"duplicate atom {key}")
            if isinstance(c, bool) or not isinstance(c, int) or c < 0:
                raise SpecError(f"atom {key} has invalid count {c!r}")
            if c:
                table[key] = c
        object.__setattr__(self, "parts", parts)
        object.__setattr__(self, "counts", tuple(sorted(table.items())))

    @property
    def n(self) -> int:
        return sum(c for _, c in self.counts)

    @property
    def omega(self) -> int:
        return max((sum(d) for (_, d), _c in self.counts), default=0)

    def clone_count(self, i: int, j: int) -> int:
        """Number of clones of type ``(i, j)``."""
        return sum(d[j - 1] * c for (part, d), c in self.counts if part == i)

    @property
    def pairs(self) -> List[Tuple[int, int]]:
        return [(i, j) for i in range(1, self.parts + 1) for j in range(1, self.parts + 1)
                if self.clone_count(i, j) > 0]

    def symmetry_violations(self) -> List[str]:
        out = []
        for i in range(1, self.parts + 1):
            for j in range(i, self.parts + 1):
                a, b = self.clone_count(i, j), self.clone_count(j, i)
                if i != j and a != b:
                    out.append(f"clones ({i},{j}) = {a} != clones ({j},{i}) = {b}")
                elif i == j and a % 2:
                    out.append(f"clones ({i},{i}) = {a} is odd")
        return out


def _imbalance(parts: int, counts: Dict[Atom, int]) -> List[Tuple[Tuple[int, int], int]]:
    clones = [[0] * parts for _ in range(parts)]
    for (i, d), c in counts.items():
        for j in range(parts):
            clones[i - 1][j] += d[j] * c
    out = []
    for i in range(parts):
        for j in range(i, parts):
            if i == j:
                out.append(((i + 1, i + 1), clones[i][i] % 2))
            else:
                out.append(((i + 1, j + 1), clones[i][j] - clones[j][i]))
    return out


def _score(parts: int, counts: Dict[Atom, int]) -> int:
    return sum(abs(v) for _, v in _imbalance(parts, counts))


def _relevant(spec_mass: Dict[Atom, Number], pair: Tuple[int, int]) -> List[List[Atom]]:
    """Atoms whose counts move the given pair's imbalance, grouped by side."""
    i, j = pair
    if i == j:
        side = [a for a in spec_mass if a[0] == i and a[1][i - 1] % 2 == 1]
        return [side]
    return [[a for a in spec_mass if a[0] == i and a[1][j - 1] > 0],
            [a for a in spec_mass if a[0] == j and a[1][i - 1] > 0]]


def _by_mass(atoms: List[Atom], spec_mass: Dict[Atom, Number]) -> List[Atom]:
    return sorted(atoms, key=lambda a: (-spec_mass[a], a))


def _best_move(parts, counts, n, candidates, steps, width):
    base = _score(parts, counts)
    best = None
    for combo in itertools.combinations(candidates, min(width, len(candidates))):
        for deltas in itertools.product(steps, repeat=len(combo)):
            if not any(deltas) or any(counts.get(a, 0) + s < 0 for a, s in zip(combo, deltas)):
                continue
            trial = dict(counts)
            for a, s in zip(combo, deltas):
                trial[a] = trial.get(a, 0) + s
            score = _score(parts, trial)
            if score >= base:
                continue
            drift = abs(sum(trial.values()) - n)
            key = (score, sum(abs(s) for s in deltas), drift, combo, deltas)
            if best is None or key < best[0]:
                best = (key, trial)
    return None if best is None else best[1]


def repair_counts(spec: DegreeSpec, counts: Dict[Atom, int], n: int) -> Dict[Atom, int]:
    """Balance clone counts so a perfect clone matching exists.

    Works on the first imbalanced pair in lexicographic order, trying
    small integer moves on the two highest-mass atoms on each side of that
    pair; if none of those lowers the total imbalance, every relevant atom
    of the pair is tried.  Deterministic for a given input.
    """
    parts = spec.parts
    spec_mass = {a: m for a, m in spec.atoms if m > 0}
    counts = dict(counts)
    steps = (-2, -1, 0, 1, 2)
    limit = 100 + 10 * len(spec_mass) + 4 * _score(parts, counts)
    for _ in range(limit):
        bad = [pair for pair, v in _imbalance(parts, counts) if v]
        if not bad:
            return counts
        pair = bad[0]
        sides = _relevant(spec_mass, pair)
        top = [a for side in sides for a in _by_mass(side, spec_mass)[:2]]
        moved = _best_move(parts, counts, n, top, steps, width=len(top))
        if moved is None:
            everyone = sorted({a for side in sides for a in side})
            moved = _best_move(parts, counts, n, everyone, steps, width=2)
        if moved is None:
            raise RepairInfeasibleError(
                f"cannot balance clone counts for pair {pair} with the given support")
        counts = moved
    raise RepairInfeasibleError("clone-count repair did not terminate")


def realize_sequence(spec: DegreeSpec, n: int) -> DegreeSequence:
    """Instantiate ``spec`` at ``n`` vertices.

    Largest-remainder rounding of ``n * p_i^d`` (remainder ties broken in
    atom order) followed by :func:`repair_counts`.
    """
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise SpecError(f"n must be a positive integer, got {n!r}")
    support = [(a, m) for a, m in spec.atoms if m > 0]
    targets = [(a, (m * n) if isinstance(m, Fraction) else float(m) * n) for a, m in support]
    floors = {a: int(math.floor(t)) for a, t in targets}
    remainder = n - sum(floors.values())
    order = sorted(range(len(targets)), key=lambda k: (-(targets[k][1] - floors[targets[k][0]]), k))
    for k in order[:max(remainder, 0)]:
        floors[targets[k][0]] += 1
    counts = repair_counts(spec, floors, n)
    return DegreeSequence(spec.parts, counts)


@dataclass
class SequenceStats:
    n: int
    omega: int
    lam: List[List[Fraction]]
    first_moments: List[Fraction]
    second_moments: List[Fraction]
    lints: List[str]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "omega": self.omega,
            "lambda": [[_jsonable(x) for x in row] for row in self.lam],
            "first_moments": [_jsonable(x) for x in self.first_moments],
            "second_moments": [_jsonable(x) for x in self.second_moments],
            "lints": list(self.lints),
        }


def sequence_stats(seq: DegreeSequence) -> SequenceStats:
    n = seq.n
    p = seq.parts
    lam = [[Fraction(0)] * p for _ in range(p)]
    first = [Fraction(0)] * p
    second = [Fraction(0)] * p
    if n:
        for (i, d), c in seq.counts:
            for j in range(p):
                lam[i - 1][j] += Fraction(d[j] * c, n)
            first[i - 1] += Fraction(sum(d) * c, n)
            second[i - 1] += Fraction(sum(d) ** 2 * c, n)
    lints = []
    omega = seq.omega
    if omega * omega > n:
        lints.append(f"max degree omega(n) = {omega} exceeds sqrt(n): omega^2 = {omega * omega} > n = {n}")
    return SequenceStats(n, omega, lam, first, second, lints)


# -- file formats ------------------------------------------------------------

_SPEC_KEYS = {"parts", "atoms"}
_SPEC_ATOM_KEYS = {"part", "degree", "mass"}
_SEQ_KEYS = {"parts", "n", "atoms"}
_SEQ_ATOM_KEYS = {"part", "degree", "count"}


def _parse_mass(raw, where: str) -> Number:
    if isinstance(raw, bool):
        raise SpecParseError(f"{where}: mass must be a number or 'a/b' string")
    if isinstance(raw, str):
        try:
            return Fraction(raw.strip())
        except (ValueError, ZeroDivisionError):
            raise SpecParseError(f"{where}: cannot parse mass {raw!r}") from None
    if isinstance(raw, int):
        return Fraction(raw)
    if isinstance(raw, float):
        return raw
    raise SpecParseError(f"{where}: mass must be a number or 'a/b' string")


def _format_mass(m: Number):
    if isinstance(m, Fraction):
        return f"{m.numerator}/{m.denominator}"
    return m


def _load_json(text: str, source: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecParseError(f"{source}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise SpecParseError(f"{source}: top level must be a JSON object")
    return doc


def _check_keys(obj: dict, allowed: set, where: str) -> None:
    unknown = sorted(set(obj) - allowed)
    if unknown:
        raise SpecParseError(f"{where}: unknown field(s) {', '.join(unknown)}")
    missing = sorted(allowed - set(obj))
    if missing:
        raise SpecParseError(f"{where}: missing field(s) {', '.join(missing)}")


def _parse_atoms(doc: dict, source: str, value_key: str):
    parts = doc["parts"]
    if isinstance(parts, bool) or not isinstance(parts, int) or parts < 1:
        raise SpecParseError(f"{source}: 'parts' must be a positive integer")
    if not isinstance(doc["atoms"], list):
        raise SpecParseError(f"{source}: 'atoms' must be a list")
    allowed = {"part", "degree", value_key}
    seen = {}
    out = []
    for k, raw in enumerate(doc["atoms"]):
        where = f"{source}: atoms[{k}]"
        if not isinstance(raw, dict):
            raise SpecParseError(f"{where}: must be an object")
        _check_keys(raw, allowed, where)
        try:
            key = _check_atom(parts, raw["part"], raw["degree"] if isinstance(raw["degree"], list) else None)
        except (SpecError, TypeError) as exc:
            raise SpecParseError(f"{where}: {exc}") from None
        where = f"{where} (part {key[0]}, degree {list(key[1])})"
        if key in seen:
            raise SpecParseError(f"{where}: duplicate of atoms[{seen[key]}]")
        seen[key] = k
        out.append((key, raw[value_key], where))
    return parts, out


def spec_from_dict(doc: dict, source: str = "<spec>") -> DegreeSpec:
    _check_keys(doc, _SPEC_KEYS, source)
    parts, raw_atoms = _parse_atoms(doc, source, "mass")
    atoms = []
    for key, raw, where in raw_atoms:
        mass = _parse_mass(raw, where)
        if mass < 0 or (isinstance(mass, float) and not math.isfinite(mass)):
            raise SpecParseError(f"{where}: negative or non-finite mass {raw!r}")
        atoms.append((key, mass))
    return DegreeSpec(parts, atoms)


def spec_to_dict(spec: DegreeSpec) -> dict:
    return {
        "parts": spec.parts,
        "atoms": [{"part": i, "degree": list(d), "mass": _format_mass(m)} for (i, d), m in spec.atoms],
    }


def sequence_from_dict(doc: dict, source: str = "<sequence>") -> DegreeSequence:
    _check_keys(doc, _SEQ_KEYS, source)
    parts, raw_atoms = _parse_atoms(doc, source, "count")
    counts = []
    for key, raw, where in raw_atoms:
        if isinstance(raw, bool) or not isinstance(raw, int) or raw < 0:
            raise SpecParseError(f"{where}: count must be a non-negative integer, got {raw!r}")
        counts.append((key, raw))
    seq = DegreeSequence(parts, counts)
    if doc["n"] != seq.n:
        raise SpecParseError(f"{source}: 'n' = {doc['n']!r} but counts sum to {seq.n}")
    return seq


def sequence_to_dict(seq: DegreeSequence) -> dict:
    return {
        "parts": seq.parts,
        "n": seq.n,
        "atoms": [{"part": i, "degree": list(d), "count": c} for (i, d), c in seq.counts],
    }


def load_spec(path: Union[str, Path]) -> DegreeSpec:
    path = Path(path)
    return spec_from_dict(_load_json(path.read_text(), str(path)), str(path))


def save_spec(spec: DegreeSpec, path: Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(spec_to_dict(spec), indent=2) + "\n")


def load_sequence(path: Union[str, Path]) -> DegreeSequence:
    path = Path(path)
    return sequence_from_dict(_load_json(path.read_text(), str(path)), str(path))


def save_sequence(seq: DegreeSequence, path: Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(sequence_to_dict(seq), indent=2) + "\n")


def interpolate(a: DegreeSpec, b: DegreeSpec, t: Number) -> DegreeSpec:
    """Mixture ``(1 - t) a + t b``; stays a valid spec when both inputs are."""
    if a.parts != b.parts:
        raise SpecError("cannot interpolate specs with different part counts")
    if not isinstance(t, Fraction):
        t = float(t)
    ma, mb = a.mass, b.mass
    atoms = {}
    for key in sorted(set(ma) | set(mb)):
        atoms[key] = (1 - t) * ma.get(key, Fraction(0)) + t * mb.get(key, Fraction(0))
    return DegreeSpec(a.parts, atoms)
