"""Spectral flow of sampled families of fiber holonomies.

A family is a finite grid of parameters b in [0, 1], each carrying commuting
unitaries for the lattice generators.  Nothing is snapped to rationals here.
The semicontinuity check works at grid resolution only and cannot certify
the statement for the continuum.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimensionError, NotCommuting
from .fm_transform import PHASE_TOL, joint_eigenspaces


@dataclass(frozen=True)
class FamilySample:
    b: float
    lattice_images: tuple[np.ndarray, ...]

    def __post_init__(self):
        object.__setattr__(self, "lattice_images",
                           tuple(np.asarray(m, dtype=complex) for m in self.lattice_images))


@dataclass
class SpectralFlow:
    samples: list[tuple[float, list[tuple[np.ndarray, int]]]]
    counting: list[int]

    @property
    def n(self) -> int:
        return sum(m for _, m in self.samples[0][1]) if self.samples else 0

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        d = len(self.samples[0][1][0][0]) if self.samples else 0
        w.writerow(["b"] + [f"xi{j}" for j in range(d)] + ["multiplicity"])
        for b, points in self.samples:
            for xi, mult in points:
                w.writerow([repr(b)] + [repr(float(x)) for x in xi] + [mult])
        return buf.getvalue()


def spectral_flow(family: Sequence[FamilySample], tol: float = 1e-9,
                  phase_tol: float = PHASE_TOL) -> SpectralFlow:
    if not family:
        raise ValueError("a family needs at least one sample")
    n = family[0].lattice_images[0].shape[0]
    samples, counting = [], []
    for s in family:
        if any(m.shape != (n, n) for m in s.lattice_images):
            raise DimensionError(f"sample at b={s.b} has inconsistent matrix sizes")
        try:
            spaces = joint_eigenspaces(s.lattice_images, tol, phase_tol)
        except NotCommuting as exc:
            raise NotCommuting(f"at b={s.b}: {exc}") from None
        points = [(phases, B.shape[1]) for phases, B in spaces]
        samples.append((float(s.b), points))
        counting.append(len(points))
    return SpectralFlow(samples, counting)


@dataclass
class SemicontinuityReport:
    passed: bool
    bounds_ok: bool
    violations: list[str] = field(default_factory=list)
    suspects: list[str] = field(default_factory=list)
    note: str = "checked on the sample grid only; the continuum statement is not certified"

    def to_json(self) -> dict:
        return {"passed": self.passed, "bounds_ok": self.bounds_ok, "violations": self.violations,
                "suspects": self.suspects, "note": self.note}


def check_semicontinuity(flow: SpectralFlow, n: int) -> SemicontinuityReport:
    """Check 1 <= |Sigma_b| <= n and grid-level openness of {b : |Sigma_b| >= l}.

    An interior sample whose count exceeds both neighbours makes a superlevel
    set contain an isolated grid point: a violation.  A sample below both
    neighbours is an isolated collision, legitimate but also the signature
    of a clustering tolerance that is too loose, so it is reported as a
    suspect.
    """
    c = flow.counting
    bs = [b for b, _ in flow.samples]
    violations, suspects = [], []
    bounds_ok = True
    for b, val, (_, points) in zip(bs, c, flow.samples):
        if not 1 <= val <= n:
            bounds_ok = False
            violations.append(f"|Sigma_b| = {val} outside [1, {n}] at b={b}")
        if sum(m for _, m in points) != n:
            bounds_ok = False
            violations.append(f"multiplicities at b={b} do not sum to {n}")
    for i, val in enumerate(c):
        if i == 0 or i == len(c) - 1:
            continue
        nbrs = (c[i - 1], c[i + 1])
        if all(val > v for v in nbrs):
            violations.append(f"isolated rise to {val} at b={bs[i]}: {{|Sigma_b| >= {val}}} is not open")
        elif all(val < v for v in nbrs):
            suspects.append(f"isolated drop to {val} at b={bs[i]}")
    return SemicontinuityReport(bounds_ok and not violations, bounds_ok, violations, suspects)
