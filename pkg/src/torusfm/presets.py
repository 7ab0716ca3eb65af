"""Ready-made presentations used in docs, tests and the CLI ``--preset`` flag."""
from __future__ import annotations

from .group_model import BundlePresentation


def klein() -> BundlePresentation:
    """Klein bottle group Z x| Z, the base loop reversing the fiber circle."""
    return BundlePresentation.build(1, {"t": [[-1]]})


def rotation() -> BundlePresentation:
    """Mapping torus of the order-4 rotation of T^2."""
    return BundlePresentation.build(2, {"t": [[0, -1], [1, 0]]})


def cat_map() -> BundlePresentation:
    """Mapping torus of Arnold's cat map on T^2."""
    return BundlePresentation.build(2, {"t": [[2, 1], [1, 1]]})


def heisenberg() -> BundlePresentation:
    """Heisenberg nilmanifold: unipotent holonomy, a whole circle of fixed characters."""
    return BundlePresentation.build(2, {"t": [[1, 1], [0, 1]]})


def dihedral() -> BundlePresentation:
    """Free rank-2 base acting through the dihedral group of order 8."""
    return BundlePresentation.build(2, {"t": [[0, -1], [1, 0]], "s": [[0, 1], [1, 0]]})


PRESETS = {
    "klein": klein,
    "rotation": rotation,
    "cat": cat_map,
    "heisenberg": heisenberg,
    "dihedral": dihedral,
}
