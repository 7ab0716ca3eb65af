"""Discrete Fourier-Mukai correspondence for flat torus bundles.

Unitary representations of Z^d x| F (F free, acting through GL(d, Z)) are
turned into spectral data -- orbits of torsion characters on the dual torus
with a monodromy representation of each orbit's stabilizer -- and back by
induction.
"""
from .errors import *  # noqa: F401,F403
from .fm_transform import (
    LeafComponent,
    SpectralData,
    decompose,
    forward_transform,
    inverse_transform,
    joint_eigenspaces,
    snap_to_rational,
)
from .group_model import (
    BundlePresentation,
    IsotropyData,
    Word,
    parse_word,
    rewrite,
    schreier_data,
    validate_presentation,
)
from .lattice_dual import (
    LatticeAuto,
    Orbit,
    Stratum,
    TorusPoint,
    act,
    character_eval,
    dual_action_matrix,
    enumerate_orbits,
    orbit_of,
    stratify,
)
from .repvar_atlas import AtlasEntry, build_atlas, sample_representation
from .spectral_family import FamilySample, SpectralFlow, check_semicontinuity, spectral_flow
from .unitary_rep import (
    UnitaryRep,
    are_equivalent,
    conjugate_by,
    direct_sum,
    evaluate_word,
    intertwiner_space_dim,
    is_irreducible,
    tensor_with_base_rep,
    validate_rep,
)

__version__ = "0.1.0"
