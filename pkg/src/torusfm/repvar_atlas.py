"""Orbit atlas of the irreducible representation variety in rank n.

Each entry is an orbit of size l | n among torsion characters of bounded
order, together with its stabilizer data; sampling an entry draws a
monodromy eta and induces it.
"""
from __future__ import annotations

import csv
import io
import json
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InfeasibleStratum, SamplingFailure
from .fm_transform import LeafComponent, SpectralData, check_monodromy, inverse_transform
from .group_model import BundlePresentation, IsotropyData, Word, schreier_data
from .lattice_dual import Orbit, stratify
from .errors import InvalidMonodromy
from .unitary_rep import UnitaryRep, haar_unitary, hom_dim

MAX_SAMPLING_TRIES = 50


@dataclass(frozen=True)
class AtlasEntry:
    ell: int
    orbit: Orbit
    isotropy: IsotropyData
    k: int
    feasible: bool | None  # None: existence of an irreducible U(k) rep not decided
    presentation: BundlePresentation

    @property
    def index(self) -> int:
        return self.ell

    @property
    def schreier_count(self) -> int:
        return len(self.isotropy.schreier_gens)

    def to_json(self) -> dict:
        p = self.presentation
        return {
            "ell": self.ell,
            "orbit": [pt.to_json() for pt in self.orbit.points],
            "base_index": self.orbit.base_index,
            "index": self.index,
            "schreier_count": self.schreier_count,
            "schreier_gens": [p.format(w) for w in self.isotropy.schreier_gens],
            "k": self.k,
            "feasible": "unknown" if self.feasible is None else self.feasible,
        }


def _is_commutator(w: Word, a: int, b: int) -> bool:
    letters = w.letters
    if len(letters) != 4:
        return False
    pattern = ((a, 1), (b, 1), (a, -1), (b, -1))
    # any cyclic rotation of [a, b] or of its inverse [b, a]
    for rel in (pattern, ((b, 1), (a, 1), (b, -1), (a, -1))):
        for r in range(4):
            if letters == rel[r:] + rel[:r]:
                return True
    return False


def base_visibly_abelian(p: BundlePresentation) -> bool:
    """True when the base group is cyclic or the relators contain every commutator."""
    if p.rank == 1:
        return True
    return all(any(_is_commutator(w, a, b) for w in p.relators)
               for a in range(p.rank) for b in range(a + 1, p.rank))


def feasibility(iso: IsotropyData, k: int, p: BundlePresentation) -> bool | None:
    if k == 1:
        return True
    # a subgroup of an abelian group is abelian: only 1-dim irreducibles
    if base_visibly_abelian(p) or len(iso.schreier_gens) == 1:
        return False
    if not p.relators:
        return True  # free of rank >= 2
    return None


def build_atlas(p: BundlePresentation, n: int, q: int) -> list[AtlasEntry]:
    entries = []
    for stratum in stratify(p.d, q, p.dual, n):
        for orbit in stratum.orbit_reps:
            iso = schreier_data(orbit, p)
            k = n // stratum.order
            entries.append(AtlasEntry(stratum.order, orbit, iso, k, feasibility(iso, k, p), p))
    entries.sort(key=lambda e: (e.ell, e.orbit.smallest))
    return entries


def sample_representation(entry: AtlasEntry, seed: int = 0) -> UnitaryRep:
    """Induce a randomly drawn irreducible monodromy on the entry's orbit."""
    if entry.feasible is False:
        raise InfeasibleStratum(
            f"no irreducible U({entry.k}) reps of the stabilizer of {entry.orbit.base!r}")
    rng = np.random.default_rng(seed)
    p, k, iso = entry.presentation, entry.k, entry.isotropy
    m = len(iso.schreier_gens)
    for attempt in range(MAX_SAMPLING_TRIES + 1):
        if k == 1:
            if attempt == MAX_SAMPLING_TRIES:
                eta = [np.ones((1, 1), dtype=complex)] * m  # trivial eta always satisfies relators
            else:
                eta = [np.exp(2j * np.pi * rng.random()).reshape(1, 1) for _ in range(m)]
        else:
            eta = [haar_unitary(k, rng) for _ in range(m)]
            if hom_dim(eta, eta) != 1:
                continue
        comp = LeafComponent(entry.orbit, k, tuple(eta), iso)
        try:
            check_monodromy(comp, p)
        except InvalidMonodromy:
            continue
        return inverse_transform(SpectralData((comp,), entry.ell * k), p)
    raise SamplingFailure(f"no admissible monodromy after {MAX_SAMPLING_TRIES} draws")


def atlas_jsonl(entries: Sequence[AtlasEntry]) -> str:
    return "".join(json.dumps(e.to_json(), sort_keys=True) + "\n" for e in entries)


def atlas_summary_csv(entries: Sequence[AtlasEntry]) -> str:
    counts = Counter(e.ell for e in entries)
    feasible = Counter(e.ell for e in entries if e.feasible is True)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["ell", "count", "feasible_count"])
    for ell in sorted(counts):
        w.writerow([ell, counts[ell], feasible[ell]])
    return buf.getvalue()
