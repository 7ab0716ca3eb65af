"""Finite presentations of Z^d x| F and Schreier data for point stabilizers.

The base group is modelled as the free group on the declared generators.
Relators are constraints that the holonomy (and later every unitary image)
must satisfy; they are verified, never used for rewriting.

Words are written ``a(1,0) t^2 s^-1``: an optional lattice part in front,
followed by base letters.  The identity is written ``1``.
"""
from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

from .errors import DimensionError, InvalidPresentation, NotInIsotropy, NotInvariant
from .lattice_dual import LatticeAuto, Orbit, TorusPoint, act, dual_action_matrix

Letter = tuple[int, int]


def _free_reduce(letters) -> tuple[Letter, ...]:
    out: list[Letter] = []
    for g, e in letters:
        if e not in (1, -1):
            raise ValueError(f"letter exponent must be +-1, got {e}")
        if out and out[-1][0] == g and out[-1][1] == -e:
            out.pop()
        else:
            out.append((int(g), int(e)))
    return tuple(out)


@dataclass(frozen=True)
class Word:
    """Normal form ``a . w`` with ``a`` in the lattice and ``w`` a reduced base word.

    An all-zero lattice part is stored as the empty tuple.
    """

    letters: tuple[Letter, ...] = ()
    lattice: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "letters", _free_reduce(self.letters))
        lat = tuple(int(x) for x in self.lattice)
        object.__setattr__(self, "lattice", lat if any(lat) else ())

    @classmethod
    def gen(cls, g: int, power: int = 1) -> "Word":
        e = 1 if power > 0 else -1
        return cls(((g, e),) * abs(power))

    def is_identity(self) -> bool:
        return not self.letters and not self.lattice

    @property
    def base(self) -> "Word":
        return Word(self.letters)

    def base_inverse(self) -> "Word":
        if self.lattice:
            raise ValueError("base_inverse needs a word without lattice part")
        return Word(tuple((g, -e) for g, e in reversed(self.letters)))

    def __mul__(self, other: "Word") -> "Word":
        # without a holonomy we can only multiply words whose right factor is pure base
        if other.lattice:
            raise ValueError("use BundlePresentation.multiply for words with lattice parts")
        return Word(self.letters + other.letters, self.lattice)

    def __len__(self) -> int:
        return len(self.letters)

    def format(self, names: Sequence[str]) -> str:
        parts = []
        if self.lattice:
            parts.append("a(%s)" % ",".join(str(x) for x in self.lattice))
        i = 0
        letters = self.letters
        while i < len(letters):
            g, e = letters[i]
            j = i
            while j < len(letters) and letters[j] == (g, e):
                j += 1
            power = (j - i) * e
            parts.append(names[g] if power == 1 else f"{names[g]}^{power}")
            i = j
        return " ".join(parts) if parts else "1"


_LATTICE_RE = re.compile(r"a\(\s*(-?\d+(?:\s*,\s*-?\d+)*)?\s*\)")
_LETTER_RE = re.compile(r"([A-Za-z_]\w*)(?:\^\s*(-?\d+))?")


def parse_word(text: str, names: Sequence[str], d: int | None = None) -> Word:
    """Parse the textual word format; see the module docstring."""
    s = text.strip()
    if s in ("", "1"):
        return Word()
    lattice: tuple[int, ...] = ()
    m = _LATTICE_RE.match(s)
    if m:
        lattice = tuple(int(x) for x in m.group(1).split(",")) if m.group(1) else ()
        if d is not None and m.group(1) and len(lattice) != d:
            raise DimensionError(f"lattice part of {text!r} has rank {len(lattice)}, expected {d}")
        s = s[m.end():].strip()
    lookup = {name: i for i, name in enumerate(names)}
    letters: list[Letter] = []
    pos = 0
    while pos < len(s):
        if s[pos].isspace():
            pos += 1
            continue
        m = _LETTER_RE.match(s, pos)
        if not m or m.group(1) not in lookup:
            raise ValueError(f"cannot parse word {text!r} at position {pos}")
        power = int(m.group(2)) if m.group(2) else 1
        g = lookup[m.group(1)]
        letters.extend([(g, 1 if power > 0 else -1)] * abs(power))
        pos = m.end()
    return Word(tuple(letters), lattice)


@dataclass(frozen=True)
class BundlePresentation:
    """pi_1 of a torus bundle: the lattice Z^d, base generators with holonomy, relators.

    Construction only checks shapes; use :func:`validate_presentation` for
    the semantic checks.
    """

    d: int
    names: tuple[str, ...]
    holonomy: tuple[LatticeAuto, ...]
    relators: tuple[Word, ...] = ()
    dual: tuple[LatticeAuto, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        hol = tuple(h if isinstance(h, LatticeAuto) else LatticeAuto(h) for h in self.holonomy)
        object.__setattr__(self, "holonomy", hol)
        object.__setattr__(self, "relators", tuple(self.relators))
        if len(self.names) != len(hol):
            raise InvalidPresentation("need exactly one holonomy matrix per generator")
        if not hol:
            raise InvalidPresentation("the base group needs at least one generator")
        if len(set(self.names)) != len(self.names):
            raise InvalidPresentation("generator names must be distinct")
        for name in self.names:
            if not re.fullmatch(r"[A-Za-z_]\w*", name) or name == "a":
                raise InvalidPresentation(f"bad generator name {name!r}")
        for h in hol:
            if h.d != self.d:
                raise DimensionError(f"holonomy matrix of size {h.d} for lattice rank {self.d}")
        for w in self.relators:
            if w.lattice or any(g >= len(hol) for g, _ in w.letters):
                raise InvalidPresentation("relators must be words in the base generators")
        object.__setattr__(self, "dual", tuple(dual_action_matrix(h) for h in hol))

    @classmethod
    def build(cls, d: int, generators: dict, relators: Sequence[str] = ()) -> "BundlePresentation":
        """Convenience constructor: ``generators`` maps names to integer matrices."""
        names = tuple(generators)
        rels = tuple(parse_word(r, names) for r in relators)
        return cls(d, names, tuple(LatticeAuto(m) for m in generators.values()), rels)

    @property
    def rank(self) -> int:
        return len(self.names)

    def parse(self, text: str) -> Word:
        return parse_word(text, self.names, self.d)

    def format(self, w: Word) -> str:
        return w.format(self.names)

    def rho(self, w: Word) -> LatticeAuto:
        """Holonomy of the base part of ``w``."""
        m = LatticeAuto.identity(self.d)
        for g, e in w.letters:
            h = self.holonomy[g]
            m = m @ (h if e == 1 else h.inverse())
        return m

    def dual_of(self, w: Word) -> LatticeAuto:
        """Matrix by which the base part of ``w`` acts on the dual torus."""
        return dual_action_matrix(self.rho(w))

    def act_word(self, xi: TorusPoint, w: Word) -> TorusPoint:
        for g, e in reversed(w.letters):
            D = self.dual[g]
            xi = act(xi, D if e == 1 else D.inverse())
        return xi

    def multiply(self, u: Word, v: Word) -> Word:
        """(a, w)(b, x) = (a + rho(w) b, w x)."""
        a = u.lattice or (0,) * self.d
        b = v.lattice or (0,) * self.d
        moved = self.rho(u).apply(b)
        return Word(u.letters + v.letters, tuple(x + y for x, y in zip(a, moved)))

    def inverse(self, w: Word) -> Word:
        """(a, w)^{-1} = (-rho(w)^{-1} a, w^{-1})."""
        a = w.lattice or (0,) * self.d
        back = self.rho(w).inverse().apply(a)
        return Word(w.base.base_inverse().letters, tuple(-x for x in back))

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "generators": [{"name": n, "matrix": h.to_json()} for n, h in zip(self.names, self.holonomy)],
            "relators": [self.format(r) for r in self.relators],
        }

    @classmethod
    def from_json(cls, data: dict) -> "BundlePresentation":
        names = tuple(g["name"] for g in data["generators"])
        hol = tuple(LatticeAuto(g["matrix"]) for g in data["generators"])
        rels = tuple(parse_word(r, names) for r in data.get("relators", []))
        return cls(int(data["d"]), names, hol, rels)


@dataclass
class PresentationReport:
    valid: bool
    failures: list[str]

    def to_json(self) -> dict:
        return {"valid": self.valid, "failures": self.failures}


def validate_presentation(p: BundlePresentation) -> PresentationReport:
    failures = []
    for name, h in zip(p.names, p.holonomy):
        if abs(h.det) != 1:
            failures.append(f"holonomy of {name} is not unimodular")
    ident = LatticeAuto.identity(p.d)
    for r in p.relators:
        if p.rho(r) != ident:
            failures.append(f"relator {p.format(r)} does not map to the identity matrix")
    return PresentationReport(not failures, failures)


@dataclass(frozen=True)
class IsotropyData:
    """Coset table and Schreier generators for the stabilizer of an orbit's base point.

    ``table[i][g]`` is the index of ``g . points[i]`` and ``inverse_table`` the
    same for ``g^-1``.  ``schreier_pairs[s] = (i, g)`` records the coset and
    generator producing Schreier generator ``s``.
    """

    orbit: Orbit
    table: tuple[tuple[int, ...], ...]
    inverse_table: tuple[tuple[int, ...], ...]
    transversal: tuple[Word, ...]
    schreier_gens: tuple[Word, ...]
    schreier_pairs: tuple[tuple[int, int], ...]
    _pair_index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "_pair_index", {pr: s for s, pr in enumerate(self.schreier_pairs)})

    @property
    def index(self) -> int:
        return self.orbit.size

    def coset_of(self, w: Word) -> int:
        """Index of ``w . base`` computed through the coset table."""
        c = self.orbit.base_index
        for g, e in reversed(w.letters):
            c = (self.table if e == 1 else self.inverse_table)[c][g]
        return c


def schreier_data(orbit: Orbit, p: BundlePresentation) -> IsotropyData:
    """Schreier transversal and generators of the stabilizer of ``orbit.base``.

    The transversal is built breadth-first from the base point (generators in
    declared order, then inverses), so ``t_j = g^{+-1} t_i`` for a tree edge.
    """
    size = orbit.size
    table = []
    for xi in orbit.points:
        row = []
        for D in p.dual:
            image = act(xi, D)
            if image not in orbit:
                raise NotInvariant(f"orbit is not closed: {xi!r} maps to {image!r}")
            row.append(orbit.index(image))
        table.append(tuple(row))
    inverse_table = [[0] * p.rank for _ in range(size)]
    for i, row in enumerate(table):
        for g, j in enumerate(row):
            inverse_table[j][g] = i

    transversal: list[Word | None] = [None] * size
    transversal[orbit.base_index] = Word()
    queue = deque([orbit.base_index])
    while queue:
        i = queue.popleft()
        moves = [(g, 1, table[i][g]) for g in range(p.rank)]
        moves += [(g, -1, inverse_table[i][g]) for g in range(p.rank)]
        for g, e, j in moves:
            if transversal[j] is None:
                transversal[j] = Word(((g, e),) + transversal[i].letters)
                queue.append(j)
    if any(t is None for t in transversal):
        raise NotInvariant("orbit is not a single orbit of the base group")

    gens, pairs = [], []
    for i in range(size):
        for g in range(p.rank):
            j = table[i][g]
            w = transversal[j].base_inverse() * Word(((g, 1),)) * transversal[i]
            if not w.is_identity():
                gens.append(w)
                pairs.append((i, g))
    return IsotropyData(orbit, tuple(table), tuple(tuple(r) for r in inverse_table),
                        tuple(transversal), tuple(gens), tuple(pairs))


def rewrite(w: Word, iso: IsotropyData) -> list[tuple[int, int]]:
    """Express a stabilizer word as a product of Schreier generators.

    Returns ``[(s, e), ...]`` in left-to-right product order.  Only the base
    letters of ``w`` matter.
    """
    c = iso.orbit.base_index
    factors = []
    for g, e in reversed(w.letters):
        if e == 1:
            s = iso._pair_index.get((c, g))
            c = iso.table[c][g]
        else:
            c = iso.inverse_table[c][g]
            s = iso._pair_index.get((c, g))
        if s is not None:
            factors.append((s, e))
    if c != iso.orbit.base_index:
        raise NotInIsotropy("word does not fix the base point")
    factors.reverse()
    return factors


def expand(factors: Sequence[tuple[int, int]], iso: IsotropyData) -> Word:
    """Multiply Schreier generators back into a base word."""
    w = Word()
    for s, e in factors:
        g = iso.schreier_gens[s]
        w = w * (g if e == 1 else g.base_inverse())
    return w
