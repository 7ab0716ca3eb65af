"""Exact arithmetic on the dual torus Q^d/Z^d and the induced GL(d,Z) action.

Lattice vectors are columns and matrices act on the left.  An automorphism
``a -> R a`` of the lattice moves characters by ``xi -> (R^T)^{-1} xi``, the
unique rule for which ``xi'(R a) = xi(a)``.
"""
from __future__ import annotations

import cmath
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError, InvalidAutomorphism, OrbitOverflow

__all__ = [
    "TorusPoint",
    "LatticeAuto",
    "Orbit",
    "Stratum",
    "dual_action_matrix",
    "act",
    "orbit_of",
    "enumerate_orbits",
    "stratify",
    "character_eval",
]


def _frac(x) -> Fraction:
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        raise TypeError("torus coordinates must be exact; got float %r" % x)
    return Fraction(x)


@dataclass(frozen=True, order=True)
class TorusPoint:
    """A torsion character of the lattice, stored as canonical fractions in [0, 1)."""

    coords: tuple[Fraction, ...]

    def __init__(self, coords: Iterable):
        object.__setattr__(self, "coords", tuple(_frac(c) % 1 for c in coords))

    @classmethod
    def zero(cls, d: int) -> "TorusPoint":
        return cls([0] * d)

    @property
    def d(self) -> int:
        return len(self.coords)

    @property
    def order(self) -> int:
        """Order of the point in the torus group, the lcm of the denominators."""
        return math.lcm(*(c.denominator for c in self.coords)) if self.coords else 1

    def __add__(self, other: "TorusPoint") -> "TorusPoint":
        _check_dim(self.d, other.d)
        return TorusPoint(a + b for a, b in zip(self.coords, other.coords))

    def __neg__(self) -> "TorusPoint":
        return TorusPoint(-c for c in self.coords)

    def as_floats(self) -> np.ndarray:
        return np.array([float(c) for c in self.coords])

    def to_json(self) -> list[str]:
        return [f"{c.numerator}/{c.denominator}" for c in self.coords]

    @classmethod
    def from_json(cls, data: Sequence[str]) -> "TorusPoint":
        return cls(Fraction(s) for s in data)

    def __repr__(self) -> str:
        return "TorusPoint(%s)" % ", ".join(self.to_json())


def _check_dim(a: int, b: int) -> None:
    if a != b:
        raise DimensionError(f"dimension mismatch: {a} != {b}")


def _int_det(rows: Sequence[Sequence[int]]) -> int:
    m = [[Fraction(x) for x in r] for r in rows]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return 0
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            if f:
                for k in range(c, n):
                    m[r][k] -= f * m[c][k]
    return int(det)


def _frac_inverse(rows: Sequence[Sequence[int]]) -> list[list[Fraction]]:
    n = len(rows)
    m = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)]
         for i, r in enumerate(rows)]
    for c in range(n):
        piv = next(r for r in range(c, n) if m[r][c] != 0)
        m[c], m[piv] = m[piv], m[c]
        p = m[c][c]
        m[c] = [x / p for x in m[c]]
        for r in range(n):
            if r != c and m[r][c] != 0:
                f = m[r][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return [row[n:] for row in m]


@dataclass(frozen=True)
class LatticeAuto:
    """A unimodular integer matrix, i.e. an element of GL(d, Z)."""

    matrix: tuple[tuple[int, ...], ...]

    def __init__(self, matrix):
        rows = tuple(tuple(int(x) for x in row) for row in matrix)
        if not rows or any(len(r) != len(rows) for r in rows):
            raise InvalidAutomorphism(f"matrix must be square and non-empty: {matrix!r}")
        for row, src in zip(rows, matrix):
            if any(int(x) != x for x in src):
                raise InvalidAutomorphism(f"matrix entries must be integers: {matrix!r}")
        if abs(_int_det(rows)) != 1:
            raise InvalidAutomorphism(f"matrix is not unimodular: {matrix!r}")
        object.__setattr__(self, "matrix", rows)

    @classmethod
    def identity(cls, d: int) -> "LatticeAuto":
        return cls([[int(i == j) for j in range(d)] for i in range(d)])

    @property
    def d(self) -> int:
        return len(self.matrix)

    @property
    def det(self) -> int:
        return _int_det(self.matrix)

    def __matmul__(self, other: "LatticeAuto") -> "LatticeAuto":
        _check_dim(self.d, other.d)
        a, b = self.matrix, other.matrix
        n = self.d
        return LatticeAuto([[sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)]
                            for i in range(n)])

    def inverse(self) -> "LatticeAuto":
        inv = _frac_inverse(self.matrix)
        return LatticeAuto([[int(x) for x in row] for row in inv])

    def transpose(self) -> "LatticeAuto":
        return LatticeAuto(list(zip(*self.matrix)))

    def apply(self, v: Sequence[int]) -> tuple[int, ...]:
        _check_dim(self.d, len(v))
        return tuple(sum(r * x for r, x in zip(row, v)) for row in self.matrix)

    def to_array(self) -> np.ndarray:
        return np.array(self.matrix, dtype=np.int64)

    def to_json(self) -> list[list[int]]:
        return [list(r) for r in self.matrix]

    @classmethod
    def from_json(cls, data) -> "LatticeAuto":
        return cls(data)


def dual_action_matrix(R: LatticeAuto) -> LatticeAuto:
    """Return (R^T)^{-1}, the matrix by which R moves characters."""
    if not isinstance(R, LatticeAuto):
        R = LatticeAuto(R)
    return R.transpose().inverse()


def act(xi: TorusPoint, D: LatticeAuto) -> TorusPoint:
    _check_dim(xi.d, D.d)
    return TorusPoint(sum(r * c for r, c in zip(row, xi.coords)) for row in D.matrix)


@dataclass(frozen=True)
class Orbit:
    """A finite orbit of torus points; ``points[base_index]`` is the base point."""

    points: tuple[TorusPoint, ...]
    base_index: int = 0
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        index = {p: i for i, p in enumerate(self.points)}
        if len(index) != len(self.points):
            raise ValueError("orbit contains duplicate points")
        if not 0 <= self.base_index < len(self.points):
            raise ValueError("base_index out of range")
        object.__setattr__(self, "_index", index)

    @property
    def base(self) -> TorusPoint:
        return self.points[self.base_index]

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def smallest(self) -> TorusPoint:
        return min(self.points)

    def index(self, xi: TorusPoint) -> int:
        return self._index[xi]

    def __contains__(self, xi) -> bool:
        return xi in self._index

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def is_closed(self, gens: Sequence[LatticeAuto]) -> bool:
        return all(act(p, g) in self._index for g in gens for p in self.points)

    def to_json(self) -> dict:
        return {"points": [p.to_json() for p in self.points], "base_index": self.base_index}


@dataclass(frozen=True)
class Stratum:
    """All orbits of a fixed size ``order`` among points of denominator at most q."""

    order: int
    orbit_reps: tuple[Orbit, ...]
    denominator_bound: int


def orbit_of(xi: TorusPoint, gens: Sequence[LatticeAuto], max_size: int = 10_000) -> Orbit:
    """Breadth-first closure of ``{xi}`` under ``gens`` and their inverses.

    ``gens`` are already dual-action matrices.  Points are listed in discovery
    order, generators tried in declared order and then their inverses.
    """
    for g in gens:
        _check_dim(xi.d, g.d)
    moves = list(gens) + [g.inverse() for g in gens]
    seen = {xi}
    order = [xi]
    queue = deque([xi])
    while queue:
        p = queue.popleft()
        for g in moves:
            image = act(p, g)
            if image not in seen:
                if len(order) >= max_size:
                    raise OrbitOverflow(f"orbit of {xi!r} exceeds {max_size} points")
                seen.add(image)
                order.append(image)
                queue.append(image)
    return Orbit(tuple(order), 0)


# Grid machinery: points of (1/q)Z^d/Z^d are encoded by the integer index of
# their numerator vector in base q, which makes index order lexicographic.

def _grid_vectors(d: int, q: int) -> np.ndarray:
    return np.array(list(product(range(q), repeat=d)), dtype=np.int64).reshape(-1, d)


def _grid_perms(d: int, q: int, gens: Sequence[LatticeAuto]) -> list[np.ndarray]:
    vecs = _grid_vectors(d, q)
    weights = q ** np.arange(d - 1, -1, -1, dtype=np.int64)
    perms = []
    for g in list(gens) + [g.inverse() for g in gens]:
        _check_dim(d, g.d)
        images = (vecs @ g.to_array().T) % q
        perms.append(images @ weights)
    return perms


def _grid_orbit_indices(d: int, q: int, gens: Sequence[LatticeAuto]) -> list[list[int]]:
    """Orbits on the q-grid as index lists, each in BFS order from its smallest point."""
    total = q ** d
    perms = [p.tolist() for p in _grid_perms(d, q, gens)]
    seen = bytearray(total)
    orbits = []
    for start in range(total):
        if seen[start]:
            continue
        seen[start] = 1
        members = [start]
        head = 0
        while head < len(members):
            p = members[head]
            head += 1
            for perm in perms:
                j = perm[p]
                if not seen[j]:
                    seen[j] = 1
                    members.append(j)
        orbits.append(members)
    return orbits


def _index_to_point(idx: int, d: int, q: int) -> TorusPoint:
    digits = []
    for _ in range(d):
        idx, r = divmod(idx, q)
        digits.append(Fraction(r, q))
    return TorusPoint(reversed(digits))


def _orbit_from_indices(members: list[int], d: int, q: int) -> Orbit:
    return Orbit(tuple(_index_to_point(i, d, q) for i in members), 0)


def enumerate_orbits(d: int, q: int, gens: Sequence[LatticeAuto]) -> list[Orbit]:
    """Partition (1/q)Z^d/Z^d into orbits of the group generated by ``gens``.

    Each orbit is based at its lexicographically smallest point; the list is
    sorted by (size, smallest point).
    """
    if q < 1:
        raise ValueError("q must be >= 1")
    orbits = _grid_orbit_indices(d, q, gens)
    orbits.sort(key=lambda m: (len(m), m[0]))
    return [_orbit_from_indices(m, d, q) for m in orbits]


def _exact_order_mask(d: int, m: int) -> np.ndarray:
    vecs = _grid_vectors(d, m)
    g = np.gcd.reduce(np.concatenate([vecs, np.full((len(vecs), 1), m)], axis=1), axis=1)
    return g == 1


def stratify(d: int, q: int, gens: Sequence[LatticeAuto], n: int) -> list[Stratum]:
    """Orbits of size dividing ``n`` among all points of order at most ``q``.

    Within a stratum, orbits are sorted by their smallest point.
    """
    if n < 1 or q < 1:
        raise ValueError("n and q must be >= 1")
    by_size: dict[int, list[Orbit]] = {}
    for m in range(1, q + 1):
        exact = _exact_order_mask(d, m)
        for members in _grid_orbit_indices(d, m, gens):
            # the action preserves the order of a point, so testing one member suffices
            if not exact[members[0]] or n % len(members):
                continue
            by_size.setdefault(len(members), []).append(_orbit_from_indices(members, d, m))
    return [Stratum(size, tuple(sorted(by_size[size], key=lambda o: o.base)), q)
            for size in sorted(by_size)]


_EXACT_PHASES = {Fraction(0): 1 + 0j, Fraction(1, 4): 1j, Fraction(1, 2): -1 + 0j,
                 Fraction(3, 4): -1j}


def character_eval(xi: TorusPoint, a: Sequence[int]) -> complex:
    """exp(2 pi i xi.a), with the pairing reduced mod 1 exactly before exponentiating."""
    _check_dim(xi.d, len(a))
    phase = sum(c * int(x) for c, x in zip(xi.coords, a)) % 1
    if phase in _EXACT_PHASES:
        return _EXACT_PHASES[phase]
    return cmath.exp(2j * math.pi * float(phase))
