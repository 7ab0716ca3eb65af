"""Random test corpora shared by the property and acceptance suites."""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from torusfm import presets
from torusfm.fm_transform import LeafComponent, SpectralData, inverse_transform
from torusfm.group_model import BundlePresentation
from torusfm.repvar_atlas import build_atlas
from torusfm.unitary_rep import UnitaryRep, conjugate_by, haar_unitary

CORPUS_PRESETS = ("klein", "rotation", "cat", "dihedral")
N_MAX = 16

# per-criterion outcome lines, printed by the terminal-summary hook in conftest
ACCEPTANCE_LINES: list[str] = []


@lru_cache(maxsize=None)
def presentation(name: str) -> BundlePresentation:
    return presets.PRESETS[name]()


@lru_cache(maxsize=None)
def atlas(name: str, n: int, q: int):
    return tuple(build_atlas(presentation(name), n, q))


def random_eta(k: int, count: int, rng: np.random.Generator) -> tuple[np.ndarray, ...]:
    if k == 1:
        return tuple(np.exp(2j * np.pi * rng.random()).reshape(1, 1) for _ in range(count))
    return tuple(haar_unitary(k, rng) for _ in range(count))


def random_spectral(name: str, rng: np.random.Generator, max_components: int = 3,
                    budget: int = N_MAX) -> SpectralData:
    """1..max_components leaf components on pairwise distinct orbits.

    Orbits are atlas entries (base point = smallest point), so the data is in
    the canonical form produced by the forward transform.
    """
    comps: list[LeafComponent] = []
    used = set()
    target = int(rng.integers(1, max_components + 1))
    for _ in range(50):
        if len(comps) == target:
            break
        n = int(rng.integers(1, 7))
        q = int(rng.integers(1, 7))
        entries = [e for e in atlas(name, n, q) if e.ell * e.k <= budget]
        if not entries:
            continue
        e = entries[int(rng.integers(len(entries)))]
        if e.orbit.base in used:
            continue
        used.add(e.orbit.base)
        budget -= e.ell * e.k
        eta = random_eta(e.k, e.schreier_count, rng)
        comps.append(LeafComponent(e.orbit, e.k, eta, e.isotropy))
    comps.sort(key=lambda c: (c.ell, c.orbit.base))
    return SpectralData(tuple(comps), sum(c.ell * c.k for c in comps))


def random_rep(name: str, rng: np.random.Generator, **kw) -> tuple[UnitaryRep, SpectralData]:
    """Induced from random spectral data, then conjugated by a Haar unitary."""
    s = random_spectral(name, rng, **kw)
    rep = inverse_transform(s, presentation(name))
    return conjugate_by(rep, haar_unitary(rep.n, rng)), s


def rep_corpus(count: int, seed: int) -> list[tuple[str, UnitaryRep, SpectralData]]:
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        name = CORPUS_PRESETS[i % len(CORPUS_PRESETS)]
        rep, s = random_rep(name, rng)
        out.append((name, rep, s))
    return out
