"""JSON encodings of the public data types.

Complex matrices are row-major nested ``[re, im]`` pairs, torus points are
lists of ``"p/q"`` strings, lattice automorphisms are nested integer lists
and words use the textual format of :mod:`torusfm.group_model`.
"""
from __future__ import annotations

import json
import os
import tempfile
from typing import Any

import numpy as np

from .fm_transform import LeafComponent, SpectralData
from .group_model import BundlePresentation, schreier_data
from .lattice_dual import Orbit, TorusPoint
from .repvar_atlas import AtlasEntry, feasibility
from .spectral_family import FamilySample
from .unitary_rep import DEFAULT_TOL, UnitaryRep


class SchemaError(ValueError):
    """Input JSON does not follow the documented schema."""


def matrix_to_json(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m, dtype=complex)]


def matrix_from_json(data) -> np.ndarray:
    try:
        a = np.array(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"bad matrix encoding: {exc}") from None
    if a.ndim != 3 or a.shape[2] != 2 or a.shape[0] != a.shape[1]:
        raise SchemaError(f"matrix must be an n x n array of [re, im] pairs, got shape {a.shape}")
    return a[..., 0] + 1j * a[..., 1]


def rep_to_json(rep: UnitaryRep, p: BundlePresentation | None = None) -> dict:
    out: dict[str, Any] = {
        "n": rep.n,
        "lattice_images": [matrix_to_json(m) for m in rep.lattice_images],
        "base_images": [matrix_to_json(m) for m in rep.base_images],
        "tol": rep.tol,
    }
    if p is not None:
        out["presentation"] = p.to_json()
    return out


def rep_from_json(data: dict) -> UnitaryRep:
    try:
        return UnitaryRep(tuple(matrix_from_json(m) for m in data["lattice_images"]),
                          tuple(matrix_from_json(m) for m in data["base_images"]),
                          float(data.get("tol", DEFAULT_TOL)))
    except KeyError as exc:
        raise SchemaError(f"representation JSON lacks field {exc}") from None


def _point_from_json(pt, d: int) -> TorusPoint:
    if isinstance(pt, str):
        pt = [pt]
    xi = TorusPoint.from_json(pt)
    if xi.d != d:
        raise SchemaError(f"point {pt!r} has dimension {xi.d}, expected {d}")
    return xi


def orbit_from_json(points, base_index: int, d: int) -> Orbit:
    return Orbit(tuple(_point_from_json(pt, d) for pt in points), int(base_index))


def component_to_json(c: LeafComponent, p: BundlePresentation) -> dict:
    return {
        "orbit": [pt.to_json() for pt in c.orbit.points],
        "base_index": c.orbit.base_index,
        "k": c.k,
        "eta": {p.format(w): matrix_to_json(m)
                for w, m in zip(c.isotropy.schreier_gens, c.monodromy)},
    }


def component_from_json(data: dict, p: BundlePresentation) -> LeafComponent:
    orbit = orbit_from_json(data["orbit"], data.get("base_index", 0), p.d)
    iso = schreier_data(orbit, p)
    eta_in = {p.format(p.parse(w)): matrix_from_json(m) for w, m in data["eta"].items()}
    names = [p.format(w) for w in iso.schreier_gens]
    if set(eta_in) != set(names):
        raise SchemaError(f"eta must be keyed by the Schreier generators {names}, got {sorted(eta_in)}")
    k = int(data["k"])
    mats = tuple(eta_in[w] for w in names)
    if any(m.shape != (k, k) for m in mats):
        raise SchemaError(f"eta matrices must be {k} x {k}")
    return LeafComponent(orbit, k, mats, iso)


def spectral_to_json(s: SpectralData, p: BundlePresentation, embed: bool = True) -> dict:
    out: dict[str, Any] = {"n": s.n, "components": [component_to_json(c, p) for c in s.components]}
    if embed:
        out["presentation"] = p.to_json()
    return out


def spectral_from_json(data: dict, p: BundlePresentation) -> SpectralData:
    try:
        comps = tuple(component_from_json(c, p) for c in data["components"])
        n = int(data.get("n", sum(c.ell * c.k for c in comps)))
    except KeyError as exc:
        raise SchemaError(f"spectral JSON lacks field {exc}") from None
    return SpectralData(comps, n)


def atlas_entry_from_json(data: dict, p: BundlePresentation) -> AtlasEntry:
    orbit = orbit_from_json(data["orbit"], data.get("base_index", 0), p.d)
    iso = schreier_data(orbit, p)
    k = int(data["k"])
    return AtlasEntry(orbit.size, orbit, iso, k, feasibility(iso, k, p), p)


def family_to_json(family) -> dict:
    return {"samples": [{"b": s.b, "lattice_images": [matrix_to_json(m) for m in s.lattice_images]}
                        for s in family]}


def family_from_json(data: dict) -> list[FamilySample]:
    try:
        return [FamilySample(float(s["b"]), tuple(matrix_from_json(m) for m in s["lattice_images"]))
                for s in data["samples"]]
    except KeyError as exc:
        raise SchemaError(f"family JSON lacks field {exc}") from None


def presentation_from_json(data: dict) -> BundlePresentation:
    try:
        return BundlePresentation.from_json(data)
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"bad presentation JSON: {exc!r}") from None


def write_atomic(path: str, text: str) -> None:
    """Write via a temporary file in the same directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


__all__ = [
    "SchemaError",
    "matrix_to_json",
    "matrix_from_json",
    "rep_to_json",
    "rep_from_json",
    "orbit_from_json",
    "component_to_json",
    "component_from_json",
    "spectral_to_json",
    "spectral_from_json",
    "atlas_entry_from_json",
    "family_to_json",
    "family_from_json",
    "presentation_from_json",
    "write_atomic",
    "dumps",
]
