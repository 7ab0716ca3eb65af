"""Unitary representations of Z^d x| F given by generator images.

Rank and nullity decisions use singular values against a threshold of
``RANK_RTOL * max(s_max, 1)``: generator images are unitary so the natural
scale of every stacked system is order one, and the floor keeps numerically
zero systems (e.g. two copies of a trivial rep) from being read as full rank.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.linalg import matrix_power

from .errors import DimensionError, InvalidBaseRep
from .group_model import BundlePresentation, Word

RANK_RTOL = 1e-7
DEFAULT_TOL = 1e-9


def _as_matrix(m) -> np.ndarray:
    a = np.array(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    return a


@dataclass(frozen=True)
class UnitaryRep:
    """Images of the lattice generators and of the base generators."""

    lattice_images: tuple[np.ndarray, ...]
    base_images: tuple[np.ndarray, ...]
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        lat = tuple(_as_matrix(m) for m in self.lattice_images)
        base = tuple(_as_matrix(m) for m in self.base_images)
        sizes = {m.shape[0] for m in lat + base}
        if len(sizes) > 1:
            raise DimensionError(f"generator images have inconsistent sizes {sorted(sizes)}")
        if not lat and not base:
            raise DimensionError("a representation needs at least one generator image")
        object.__setattr__(self, "lattice_images", lat)
        object.__setattr__(self, "base_images", base)

    @property
    def n(self) -> int:
        return (self.lattice_images or self.base_images)[0].shape[0]

    @property
    def d(self) -> int:
        return len(self.lattice_images)

    @property
    def images(self) -> list[np.ndarray]:
        return list(self.lattice_images) + list(self.base_images)

    @classmethod
    def trivial(cls, n: int, p: BundlePresentation) -> "UnitaryRep":
        eye = np.eye(n, dtype=complex)
        return cls((eye,) * p.d, (eye,) * p.rank)


def lattice_element(rep: UnitaryRep, a: Sequence[int]) -> np.ndarray:
    """pi(a) = prod_i U_i^{a_i}."""
    out = np.eye(rep.n, dtype=complex)
    for U, x in zip(rep.lattice_images, a):
        if x:
            out = out @ (matrix_power(U, x) if x > 0 else matrix_power(U.conj().T, -x))
    return out


def evaluate_word(rep: UnitaryRep, w: Word) -> np.ndarray:
    out = lattice_element(rep, w.lattice) if w.lattice else np.eye(rep.n, dtype=complex)
    for g, e in w.letters:
        V = rep.base_images[g]
        out = out @ (V if e == 1 else V.conj().T)
    return out


def evaluate_base_word(images: Sequence[np.ndarray], w: Word, k: int) -> np.ndarray:
    """Evaluate a base word on an arbitrary list of unitary generator images."""
    out = np.eye(k, dtype=complex)
    for g, e in w.letters:
        out = out @ (images[g] if e == 1 else images[g].conj().T)
    return out


def _resid(m: np.ndarray) -> float:
    return float(np.linalg.norm(m, ord=np.inf)) if m.size else 0.0


@dataclass
class RepReport:
    valid: bool
    residuals: dict[str, float]
    failures: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"valid": self.valid, "residuals": self.residuals, "failures": self.failures}


def validate_rep(rep: UnitaryRep, p: BundlePresentation, tol: float | None = None) -> RepReport:
    """Check unitarity, commuting lattice images, covariance and relators.

    Covariance is ``V_k U^{e_j} V_k^{-1} = pi(R_k e_j)``.
    """
    tol = rep.tol if tol is None else tol
    if rep.d != p.d or len(rep.base_images) != p.rank:
        raise DimensionError(
            f"rep has {rep.d} lattice / {len(rep.base_images)} base images, "
            f"presentation needs {p.d} / {p.rank}")
    n = rep.n
    eye = np.eye(n)
    res = {"unitarity": 0.0, "commutation": 0.0, "covariance": 0.0, "relators": 0.0}
    for M in rep.images:
        res["unitarity"] = max(res["unitarity"], _resid(M.conj().T @ M - eye))
    U = rep.lattice_images
    for i in range(len(U)):
        for j in range(i + 1, len(U)):
            res["commutation"] = max(res["commutation"], _resid(U[i] @ U[j] - U[j] @ U[i]))
    for V, R in zip(rep.base_images, p.holonomy):
        Vinv = V.conj().T
        for j in range(p.d):
            moved = lattice_element(rep, [row[j] for row in R.matrix])
            res["covariance"] = max(res["covariance"], _resid(V @ U[j] @ Vinv - moved))
    for r in p.relators:
        res["relators"] = max(res["relators"], _resid(evaluate_word(rep, r) - eye))
    failures = [f"{key} residual {val:.3e} exceeds tol {tol:.1e}"
                for key, val in res.items() if val > tol]
    return RepReport(not failures, res, failures)


def _stacked_system(As: Sequence[np.ndarray], Bs: Sequence[np.ndarray]) -> np.ndarray:
    # row-major vec: vec(A X) = (A (x) I) vec X,  vec(X B) = (I (x) B^T) vec X
    n1 = As[0].shape[0]
    n2 = Bs[0].shape[0]
    I1, I2 = np.eye(n1), np.eye(n2)
    return np.vstack([np.kron(A, I2) - np.kron(I1, B.T) for A, B in zip(As, Bs)])


def _null_threshold(s: np.ndarray) -> float:
    smax = float(s[0]) if s.size else 0.0
    return RANK_RTOL * max(smax, 1.0)


def hom_dim(As: Sequence[np.ndarray], Bs: Sequence[np.ndarray]) -> int:
    """dim {X : A_g X = X B_g for all g} for paired generator images."""
    if len(As) != len(Bs):
        raise DimensionError("both representations need the same number of generator images")
    n1, n2 = As[0].shape[0], Bs[0].shape[0]
    s = np.linalg.svd(_stacked_system(As, Bs), compute_uv=False)
    return int(n1 * n2 - np.count_nonzero(s > _null_threshold(s)))


def hom_basis(As: Sequence[np.ndarray], Bs: Sequence[np.ndarray]) -> list[np.ndarray]:
    """Orthonormal (Frobenius) basis of the intertwiner space, as n1 x n2 matrices."""
    n1, n2 = As[0].shape[0], Bs[0].shape[0]
    _, s, vh = np.linalg.svd(_stacked_system(As, Bs))
    rank = int(np.count_nonzero(s > _null_threshold(s)))
    return [v.conj().reshape(n1, n2) for v in vh[rank:]]


def images_equivalent(As: Sequence[np.ndarray], Bs: Sequence[np.ndarray]) -> bool:
    """Equivalence of two unitary reps of the same group, given generator images.

    Unitary reps are completely reducible, so Hom(A,B) = End(A) = End(B)
    forces equal multiplicity vectors.
    """
    if As[0].shape != Bs[0].shape:
        return False
    h = hom_dim(As, Bs)
    return h == hom_dim(As, As) == hom_dim(Bs, Bs)


def intertwiner_space_dim(rep1: UnitaryRep, rep2: UnitaryRep) -> int:
    if rep1.d != rep2.d or len(rep1.base_images) != len(rep2.base_images):
        raise DimensionError("representations of different presentations")
    return hom_dim(rep1.images, rep2.images)


def is_irreducible(rep: UnitaryRep) -> bool:
    return intertwiner_space_dim(rep, rep) == 1


def are_equivalent(rep1: UnitaryRep, rep2: UnitaryRep) -> bool:
    if rep1.n != rep2.n:
        raise DimensionError(f"dimensions differ: {rep1.n} != {rep2.n}")
    h = intertwiner_space_dim(rep1, rep2)
    return h == intertwiner_space_dim(rep1, rep1) == intertwiner_space_dim(rep2, rep2)


def _block_diag(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.zeros((a.shape[0] + b.shape[0],) * 2, dtype=complex)
    out[: a.shape[0], : a.shape[0]] = a
    out[a.shape[0]:, a.shape[0]:] = b
    return out


def direct_sum(rep1: UnitaryRep, rep2: UnitaryRep) -> UnitaryRep:
    if rep1.d != rep2.d or len(rep1.base_images) != len(rep2.base_images):
        raise DimensionError("representations of different presentations")
    return UnitaryRep(
        tuple(_block_diag(a, b) for a, b in zip(rep1.lattice_images, rep2.lattice_images)),
        tuple(_block_diag(a, b) for a, b in zip(rep1.base_images, rep2.base_images)),
        max(rep1.tol, rep2.tol),
    )


def conjugate_by(rep: UnitaryRep, X: np.ndarray) -> UnitaryRep:
    """X pi X^dagger."""
    X = _as_matrix(X)
    Xh = X.conj().T
    return UnitaryRep(tuple(X @ U @ Xh for U in rep.lattice_images),
                      tuple(X @ V @ Xh for V in rep.base_images), rep.tol)


def tensor_with_base_rep(rep: UnitaryRep, V: Sequence, p: BundlePresentation | None = None) -> UnitaryRep:
    """Tensor with the pullback of a base representation (trivial on the lattice)."""
    V = [_as_matrix(v) for v in V]
    if len(V) != len(rep.base_images):
        raise InvalidBaseRep(f"need {len(rep.base_images)} base images, got {len(V)}")
    m = V[0].shape[0] if V else 1
    for v in V:
        if v.shape[0] != m or _resid(v.conj().T @ v - np.eye(m)) > rep.tol:
            raise InvalidBaseRep("base images must be unitary of a common size")
    if p is not None:
        for r in p.relators:
            if _resid(evaluate_base_word(V, r, m) - np.eye(m)) > rep.tol:
                raise InvalidBaseRep(f"base rep violates relator {p.format(r)}")
    Im = np.eye(m)
    return UnitaryRep(tuple(np.kron(U, Im) for U in rep.lattice_images),
                      tuple(np.kron(B, v) for B, v in zip(rep.base_images, V)), rep.tol)


def haar_unitary(k: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Gaussian matrix."""
    z = (rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))
