from fractions import Fraction as F

import numpy as np
import pytest

from torusfm import presets
from torusfm.errors import InfeasibleStratum
from torusfm.fm_transform import forward_transform
from torusfm.group_model import BundlePresentation
from torusfm.lattice_dual import TorusPoint
from torusfm.repvar_atlas import (
    atlas_jsonl,
    atlas_summary_csv,
    base_visibly_abelian,
    build_atlas,
    sample_representation,
)
from torusfm.unitary_rep import is_irreducible, validate_rep


def pt(*xs):
    return TorusPoint([F(x) for x in xs])


def test_klein_atlas():
    entries = build_atlas(presets.klein(), 2, 6)
    summary = [(e.ell, e.orbit.base, e.k, e.feasible) for e in entries]
    assert summary == [
        (1, pt(0), 2, False),
        (1, pt("1/2"), 2, False),
        (2, pt("1/6"), 1, True),
        (2, pt("1/5"), 1, True),
        (2, pt("1/4"), 1, True),
        (2, pt("1/3"), 1, True),
        (2, pt("2/5"), 1, True),
    ]
    assert all(e.ell * e.k == 2 for e in entries)


def test_trivial_atlas():
    for name, make in presets.PRESETS.items():
        p = make()
        (e,) = build_atlas(p, 1, 1)
        assert (e.ell, e.k, e.feasible) == (1, 1, True)
        assert e.orbit.points == (TorusPoint.zero(p.d),)


def test_cat_atlas():
    entries = build_atlas(presets.cat_map(), 2, 5)
    assert [(e.ell, e.k, e.feasible) for e in entries] == [(1, 2, False), (2, 1, True), (2, 1, True)]
    assert entries[0].orbit.points == (pt(0, 0),)


def test_visibly_abelian():
    assert base_visibly_abelian(presets.klein())
    assert not base_visibly_abelian(presets.dihedral())
    z2 = BundlePresentation.build(2, {"t": [[0, -1], [1, 0]], "s": [[-1, 0], [0, -1]]}, ["t s t^-1 s^-1"])
    assert base_visibly_abelian(z2)
    e = build_atlas(z2, 2, 1)[0]
    assert e.feasible is False


def test_feasibility_unknown_with_relators():
    p = BundlePresentation.build(2, {"t": [[0, -1], [1, 0]], "s": [[0, 1], [1, 0]]}, ["t^4"])
    e = build_atlas(p, 2, 1)[0]
    assert e.feasible is None
    assert e.to_json()["feasible"] == "unknown"


def test_sample_klein_entry():
    p = presets.klein()
    e = next(e for e in build_atlas(p, 2, 6) if e.orbit.base == pt("1/3"))
    rep = sample_representation(e, seed=7)
    assert rep.n == 2 and validate_rep(rep, p).valid and is_irreducible(rep)
    (c,) = forward_transform(rep, p).components
    assert set(c.orbit.points) == {pt("1/3"), pt("2/3")} and c.k == 1
    # distinct fiber characters on the generic stratum
    assert len(set(np.round(np.diag(rep.lattice_images[0]), 9))) == 2


def test_sample_character():
    p = presets.dihedral()
    (e,) = build_atlas(p, 1, 1)
    rep = sample_representation(e, seed=3)
    assert rep.n == 1 and validate_rep(rep, p).valid
    assert np.allclose(rep.lattice_images[0], 1)


def test_sample_free_rank_two():
    p = presets.dihedral()
    e = next(e for e in build_atlas(p, 4, 2) if e.ell == 2)
    assert (e.k, e.schreier_count, e.feasible) == (2, 3, True)
    rep = sample_representation(e, seed=11)
    assert rep.n == 4 and validate_rep(rep, p).valid
    assert is_irreducible(rep)
    (c,) = forward_transform(rep, p).components
    assert (c.ell, c.k) == (2, 2)
    # smaller strata: repeated characters
    diag = np.round(np.diag(rep.lattice_images[0]), 9)
    assert len(set(diag)) < 4


def test_infeasible_entry():
    e = build_atlas(presets.klein(), 2, 6)[0]
    with pytest.raises(InfeasibleStratum):
        sample_representation(e)


def test_samples_roundtrip_across_atlas():
    for name in ("klein", "rotation", "cat", "dihedral"):
        p = presets.PRESETS[name]()
        for n in (1, 2, 4):
            for e in build_atlas(p, n, 4):
                if e.feasible is False:
                    continue
                rep = sample_representation(e, seed=n)
                assert validate_rep(rep, p).valid
                (c,) = forward_transform(rep, p).components
                assert set(c.orbit.points) == set(e.orbit.points) and c.k == e.k


def test_determinism_and_serialization():
    p = presets.rotation()
    a, b = atlas_jsonl(build_atlas(p, 4, 4)), atlas_jsonl(build_atlas(p, 4, 4))
    assert a == b
    s1 = sample_representation(build_atlas(p, 4, 4)[-1], seed=5)
    s2 = sample_representation(build_atlas(p, 4, 4)[-1], seed=5)
    assert all(np.array_equal(x, y) for x, y in zip(s1.images, s2.images))


def test_summary_csv():
    csv_text = atlas_summary_csv(build_atlas(presets.klein(), 2, 6))
    assert csv_text.splitlines() == ["ell,count,feasible_count", "1,2,0", "2,5,5"]
