"""Forward and inverse transform between crossed-product reps and spectral data.

Forward: split C^n into joint eigenspaces of the lattice images, read off
the characters, group them into orbits of the base group and record how
the stabilizer of each orbit's base point acts on its eigenspace.

Inverse: induce each (character, monodromy) pair from Z^d x| Stab up to
the whole group and take the direct sum.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
import scipy.linalg

from .errors import (
    AmbiguousSnap,
    InvalidMonodromy,
    NotCommuting,
    NotLocallyConstant,
    SnapFailure,
    ValidationError,
)
from .group_model import BundlePresentation, IsotropyData, Word, rewrite, schreier_data
from .lattice_dual import Orbit, TorusPoint, act, character_eval, orbit_of
from .unitary_rep import (
    UnitaryRep,
    evaluate_word,
    hom_basis,
    hom_dim,
    images_equivalent,
)

PHASE_TOL = 1e-7
SNAP_TOL = 1e-6
DEFAULT_QMAX = 60


@dataclass(frozen=True)
class LeafComponent:
    """One leaf of the spectral cover: an orbit with rank-k monodromy.

    ``monodromy[s]`` is the k x k unitary image of Schreier generator ``s``
    of ``isotropy``.
    """

    orbit: Orbit
    multiplicity: int
    monodromy: tuple[np.ndarray, ...]
    isotropy: IsotropyData

    @property
    def ell(self) -> int:
        return self.orbit.size

    @property
    def k(self) -> int:
        return self.multiplicity

    def eta(self, w: Word) -> np.ndarray:
        """Monodromy of an arbitrary stabilizer word."""
        out = np.eye(self.k, dtype=complex)
        for s, e in rewrite(w, self.isotropy):
            m = self.monodromy[s]
            out = out @ (m if e == 1 else m.conj().T)
        return out


@dataclass(frozen=True)
class SpectralData:
    components: tuple[LeafComponent, ...]
    n: int

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        mass = sum(c.ell * c.k for c in self.components)
        if mass != self.n:
            raise ValidationError(f"sum of orbit size x multiplicity is {mass}, expected n={self.n}")


def make_component(orbit: Orbit, monodromy: Sequence, p: BundlePresentation,
                   isotropy: IsotropyData | None = None) -> LeafComponent:
    iso = isotropy or schreier_data(orbit, p)
    mats = tuple(np.array(m, dtype=complex).reshape(np.shape(m)) for m in monodromy)
    if len(mats) != len(iso.schreier_gens):
        raise ValidationError(
            f"need {len(iso.schreier_gens)} monodromy matrices, got {len(mats)}")
    k = mats[0].shape[0] if mats else 1
    return LeafComponent(orbit, k, mats, iso)


# ---------------------------------------------------------------------------
# joint eigenspaces


def _circular_clusters(phases: np.ndarray, tol: float) -> list[np.ndarray]:
    """Single-linkage clusters of phases in [0, 1) on the circle."""
    order = np.argsort(phases)
    sp = phases[order]
    m = len(sp)
    if m == 1:
        return [order]
    gaps = np.diff(np.concatenate([sp, [sp[0] + 1.0]]))
    breaks = np.flatnonzero(gaps >= tol)
    if breaks.size == 0:
        return [order]
    # rotate so that the first cluster starts right after a break
    start = (breaks[-1] + 1) % m
    rolled = np.roll(order, -start)
    cut = ((breaks - start) % m) + 1
    return [c for c in np.split(rolled, np.sort(cut)[:-1]) if c.size]


def _phase_of(eigs: np.ndarray) -> float:
    z = np.mean(eigs / np.abs(eigs))
    x = (np.angle(z) / (2 * np.pi)) % 1.0
    return 0.0 if x >= 1.0 else float(x)


def _canonical_basis(B: np.ndarray) -> np.ndarray:
    """Gauge-fix an orthonormal basis of span(B) from the projector alone."""
    k = B.shape[1]
    if k == 0:
        return B
    P = B @ B.conj().T
    _, _, piv = scipy.linalg.qr(P, pivoting=True)
    cols = np.sort(piv[:k])
    Q, _ = np.linalg.qr(P[:, cols])
    for j in range(k):
        col = Q[:, j]
        lead = np.flatnonzero(np.abs(col) > 1e-8 * np.abs(col).max())[0]
        Q[:, j] = col * (abs(col[lead]) / col[lead])
    return Q


def joint_eigenspaces(mats: Sequence[np.ndarray], tol: float = 1e-9,
                      phase_tol: float = PHASE_TOL) -> list[tuple[np.ndarray, np.ndarray]]:
    """Common eigenspaces of commuting unitaries.

    Returns ``(phases, basis)`` pairs sorted by phase vector, where
    ``phases[j]`` is the eigenvalue angle of ``mats[j]`` divided by 2 pi.
    """
    mats = [np.asarray(m, dtype=complex) for m in mats]
    if not mats:
        raise ValueError("need at least one matrix")
    n = mats[0].shape[0]
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            r = np.linalg.norm(mats[i] @ mats[j] - mats[j] @ mats[i], ord=np.inf)
            if r > tol:
                raise NotCommuting(f"matrices {i} and {j} have commutator residual {r:.3e}")
    spaces = [((), np.eye(n, dtype=complex))]
    for U in mats:
        refined = []
        for phases, B in spaces:
            C = B.conj().T @ U @ B
            T, Z = scipy.linalg.schur(C, output="complex")
            eigs = np.diag(T)
            angles = (np.angle(eigs) / (2 * np.pi)) % 1.0
            for idx in _circular_clusters(angles, phase_tol):
                refined.append((phases + (_phase_of(eigs[idx]),), B @ Z[:, idx]))
        spaces = refined
    out = [(np.array(ph), _canonical_basis(B)) for ph, B in spaces]
    out.sort(key=lambda t: tuple(t[0]))
    return out


def snap_to_rational(x: Sequence[float], qmax: int = DEFAULT_QMAX,
                     tol: float = SNAP_TOL) -> TorusPoint:
    """Snap each coordinate to the unique p/q (q <= qmax) within ``tol`` on the circle."""
    if qmax < 1:
        raise ValueError("qmax must be >= 1")
    coords = []
    for v in np.atleast_1d(np.asarray(x, dtype=float)):
        found = set()
        for q in range(1, qmax + 1):
            p = round(v * q)
            if abs(v - p / q) <= tol:
                found.add(Fraction(p, q) % 1)
        if not found:
            raise SnapFailure(f"no rational with denominator <= {qmax} within {tol} of {v!r}")
        if len(found) > 1:
            raise AmbiguousSnap(f"{v!r} is within {tol} of {sorted(found)}")
        coords.append(found.pop())
    return TorusPoint(coords)


# ---------------------------------------------------------------------------
# forward transform


def _pool_map(fn, items, workers: int):
    if workers and workers > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(fn, items))
    return [fn(x) for x in items]


def forward_transform(rep: UnitaryRep, p: BundlePresentation, qmax: int = DEFAULT_QMAX,
                      tol: float = SNAP_TOL, phase_tol: float = PHASE_TOL,
                      workers: int = 1) -> SpectralData:
    """Spectral data of a crossed-product representation."""
    spaces = joint_eigenspaces(rep.lattice_images, tol=rep.tol, phase_tol=phase_tol)
    eigen: dict[TorusPoint, np.ndarray] = {}
    for phases, B in spaces:
        xi = snap_to_rational(phases, qmax, tol)
        if xi in eigen:
            raise NotLocallyConstant(f"two eigenspace clusters snap to {xi!r}; lower the snap tolerance")
        eigen[xi] = B

    for D in p.dual:
        for xi, B in eigen.items():
            image = act(xi, D)
            if image not in eigen or eigen[image].shape[1] != B.shape[1]:
                raise NotLocallyConstant(
                    f"characters are not invariant under the base action: {xi!r} -> {image!r}")

    orbits, seen = [], set()
    for xi in sorted(eigen):
        if xi in seen:
            continue
        orb = orbit_of(xi, p.dual, max_size=len(eigen))
        seen.update(orb.points)
        orbits.append(orb)
    orbits.sort(key=lambda o: (o.size, o.base))

    def component(orb: Orbit) -> LeafComponent:
        iso = schreier_data(orb, p)
        B = eigen[orb.base]
        eta = []
        for w in iso.schreier_gens:
            m = B.conj().T @ evaluate_word(rep, w) @ B
            # a stabilizer word must map the base eigenspace to itself
            if np.linalg.norm(m.conj().T @ m - np.eye(len(m)), ord=np.inf) > 1e-6:
                raise NotLocallyConstant(f"stabilizer word does not preserve the eigenspace of {orb.base!r}")
            eta.append(m)
        return LeafComponent(orb, B.shape[1], tuple(eta), iso)

    return SpectralData(tuple(_pool_map(component, orbits, workers)), rep.n)


# ---------------------------------------------------------------------------
# inverse transform


def check_monodromy(c: LeafComponent, p: BundlePresentation, tol: float = 1e-9) -> None:
    """Raise InvalidMonodromy unless eta is unitary and kills every conjugated relator."""
    k = c.k
    eye = np.eye(k)
    for m in c.monodromy:
        if m.shape != (k, k) or np.linalg.norm(m.conj().T @ m - eye, ord=np.inf) > tol:
            raise InvalidMonodromy("monodromy images must be unitary k x k matrices")
    for r in p.relators:
        for t in c.isotropy.transversal:
            w = t.base_inverse() * r * t
            if np.linalg.norm(c.eta(w) - eye, ord=np.inf) > tol:
                raise InvalidMonodromy(f"monodromy violates relator {p.format(r)}")


def induce(c: LeafComponent, p: BundlePresentation, tol: float = 1e-9) -> UnitaryRep:
    """Induced representation of (character of the base point, eta)."""
    check_monodromy(c, p, tol)
    iso, k, ell = c.isotropy, c.k, c.ell
    n = ell * k
    lattice = []
    for j in range(p.d):
        e = [int(i == j) for i in range(p.d)]
        diag = np.repeat([character_eval(xi, e) for xi in c.orbit.points], k)
        lattice.append(np.diag(diag))
    base = []
    for g in range(p.rank):
        V = np.zeros((n, n), dtype=complex)
        for i in range(ell):
            j = iso.table[i][g]
            w = iso.transversal[j].base_inverse() * Word(((g, 1),)) * iso.transversal[i]
            V[j * k:(j + 1) * k, i * k:(i + 1) * k] = c.eta(w)
        base.append(V)
    return UnitaryRep(tuple(lattice), tuple(base), tol)


def inverse_transform(s: SpectralData, p: BundlePresentation, tol: float = 1e-9,
                      workers: int = 1) -> UnitaryRep:
    blocks = _pool_map(lambda c: induce(c, p, tol), list(s.components), workers)
    n = s.n
    lattice = [np.zeros((n, n), dtype=complex) for _ in range(p.d)]
    base = [np.zeros((n, n), dtype=complex) for _ in range(p.rank)]
    off = 0
    for rep in blocks:
        m = rep.n
        for acc, M in zip(lattice + base, rep.images):
            acc[off:off + m, off:off + m] = M
        off += m
    return UnitaryRep(tuple(lattice), tuple(base), tol)


# ---------------------------------------------------------------------------
# decomposition


def _split(mats: list[np.ndarray], rng: np.random.Generator, depth: int = 0) -> list[list[np.ndarray]]:
    """Split a unitary rep (given by generator images) into irreducible pieces."""
    k = mats[0].shape[0]
    basis = hom_basis(mats, mats)
    if len(basis) <= 1 or depth > 2 * k:
        return [mats]
    for _ in range(20):
        coef = rng.standard_normal(len(basis)) + 1j * rng.standard_normal(len(basis))
        X = sum(c * b for c, b in zip(coef, basis))
        H = X + X.conj().T
        H = H - np.trace(H) / k * np.eye(k)
        if np.linalg.norm(H) > 1e-6:
            break
    w, v = np.linalg.eigh(H / np.linalg.norm(H))
    groups, start = [], 0
    for i in range(1, k + 1):
        if i == k or w[i] - w[i - 1] > 1e-6:
            groups.append(v[:, start:i])
            start = i
    if len(groups) == 1:
        return [mats]
    pieces = []
    for Q in groups:
        sub = [Q.conj().T @ m @ Q for m in mats]
        pieces.extend(_split(sub, rng, depth + 1))
    return pieces


def eta_irreducible(c: LeafComponent) -> bool:
    return hom_dim(c.monodromy, c.monodromy) == 1


def decompose(rep: UnitaryRep, p: BundlePresentation, qmax: int = DEFAULT_QMAX,
              tol: float = SNAP_TOL, seed: int = 0) -> list[tuple[LeafComponent, int]]:
    """Irreducible constituents with their outer multiplicities."""
    rng = np.random.default_rng(seed)
    out: list[tuple[LeafComponent, int]] = []
    for c in forward_transform(rep, p, qmax, tol).components:
        pieces = _split(list(c.monodromy), rng)
        classes: list[list] = []
        for piece in pieces:
            for cls in classes:
                if images_equivalent(cls[0], piece):
                    cls[1] += 1
                    break
            else:
                classes.append([piece, 1])
        for piece, mult in classes:
            out.append((LeafComponent(c.orbit, piece[0].shape[0], tuple(piece), c.isotropy), mult))
    return out


def monodromy_equivalent(c1: LeafComponent, c2: LeafComponent) -> bool:
    """Same orbit and base point, equal rank, and equivalent eta."""
    if c1.orbit.base != c2.orbit.base or set(c1.orbit.points) != set(c2.orbit.points):
        return False
    if c1.k != c2.k:
        return False
    return images_equivalent(c1.monodromy, c2.monodromy)
