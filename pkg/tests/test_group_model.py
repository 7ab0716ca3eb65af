from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torusfm import presets
from torusfm.errors import NotInIsotropy, NotInvariant
from torusfm.group_model import (
    BundlePresentation,
    Word,
    expand,
    rewrite,
    schreier_data,
    validate_presentation,
)
from torusfm.lattice_dual import Orbit, TorusPoint, act, enumerate_orbits


def pt(*xs):
    return TorusPoint([F(x) for x in xs])


def test_validate_presentation_examples():
    assert validate_presentation(presets.klein()).valid
    assert validate_presentation(presets.cat_map()).valid
    assert validate_presentation(BundlePresentation.build(1, {"t": [[-1]]}, ["t^2"])).valid
    bad = validate_presentation(BundlePresentation.build(1, {"t": [[-1]]}, ["t"]))
    assert not bad.valid and "t" in bad.failures[0]
    assert validate_presentation(BundlePresentation.build(2, {"t": [[0, -1], [1, 0]]}, ["t^4"])).valid


def test_word_parse_format_roundtrip():
    p = presets.dihedral()
    for text in ["1", "t", "t^2 s^-1", "a(1,0) t^2 s^-1", "s t^-3 s"]:
        w = p.parse(text)
        assert p.format(w) == text
        assert p.parse(p.format(w)) == w
    assert p.parse("t t^-1") == Word()
    with pytest.raises(ValueError):
        p.parse("x^2")


def test_multiply_and_inverse():
    p = presets.klein()
    u, v = p.parse("a(1) t"), p.parse("a(2) t")
    # t a t^-1 = rho(t) a = -a, so (a t)(a^2 t) = a a^-2 t^2
    assert p.multiply(u, v) == p.parse("a(-1) t^2")
    assert p.multiply(u, p.inverse(u)).is_identity()


def test_schreier_klein():
    p = presets.klein()
    iso = schreier_data(Orbit((pt("1/3"), pt("2/3"))), p)
    assert [p.format(t) for t in iso.transversal] == ["1", "t"]
    assert [p.format(g) for g in iso.schreier_gens] == ["t^2"]
    # oracle re-check: t^2 acts trivially on 1/3
    assert p.act_word(pt("1/3"), iso.schreier_gens[0]) == pt("1/3")


def test_schreier_full_isotropy():
    p = presets.dihedral()
    iso = schreier_data(Orbit((pt(0, 0),)), p)
    assert iso.transversal == (Word(),)
    assert iso.schreier_gens == (p.parse("t"), p.parse("s"))


def schreier_graph_count(orbit, p):
    """Independent Nielsen-Schreier count: edges minus spanning-tree edges."""
    idx = {x: i for i, x in enumerate(orbit.points)}
    parent = list(range(len(idx)))

    def find(i):
        while parent[i] != i:
            i = parent[i]
        return i

    extra = 0
    for x in orbit.points:
        for D in p.dual:
            a, b = find(idx[x]), find(idx[act(x, D)])
            if a == b:
                extra += 1
            else:
                parent[a] = b
    return extra


def test_schreier_count_free_rank_two():
    p = presets.dihedral()
    orbit = next(o for o in enumerate_orbits(2, 2, p.dual) if len(o) == 2)
    assert len(schreier_data(orbit, p).schreier_gens) == 2 * (2 - 1) + 1
    r2 = BundlePresentation.build(2, {"t": [[0, 1], [-1, -1]], "s": [[0, 1], [1, 0]]})
    orbit = next(o for o in enumerate_orbits(2, 2, r2.dual) if len(o) == 3)
    iso = schreier_data(orbit, r2)
    assert len(iso.schreier_gens) == 4 == schreier_graph_count(orbit, r2)


def test_schreier_not_closed():
    with pytest.raises(NotInvariant):
        schreier_data(Orbit((pt("1/3"),)), presets.klein())


def test_rewrite_examples():
    p = presets.klein()
    iso = schreier_data(Orbit((pt("1/3"), pt("2/3"))), p)
    assert rewrite(Word(), iso) == []
    assert rewrite(p.parse("t^2"), iso) == [(0, 1)]
    assert rewrite(p.parse("t^4"), iso) == [(0, 1), (0, 1)]
    assert rewrite(p.parse("t^-2"), iso) == [(0, -1)]
    with pytest.raises(NotInIsotropy):
        rewrite(p.parse("t"), iso)


def _isotropies():
    out = []
    for name in ["klein", "rotation", "dihedral", "cat"]:
        p = presets.PRESETS[name]()
        for q in (3, 4, 5):
            for o in enumerate_orbits(p.d, q, p.dual)[:6]:
                out.append((p, schreier_data(o, p)))
    return out


ISOS = _isotropies()


@settings(max_examples=80, deadline=None)
@given(st.sampled_from(ISOS), st.lists(st.tuples(st.integers(0, 9), st.sampled_from([1, -1])), max_size=6))
def test_rewrite_roundtrip(case, factors):
    p, iso = case
    m = len(iso.schreier_gens)
    factors = [(s % m, e) for s, e in factors]
    w = expand(factors, iso)
    assert p.act_word(iso.orbit.base, w) == iso.orbit.base
    back = rewrite(w, iso)
    w2 = expand(back, iso)
    assert w2 == w
    assert p.rho(w2) == p.rho(w)
    assert iso.coset_of(w2) == iso.orbit.base_index


@pytest.mark.parametrize("case", ISOS[::3])
def test_transversal_and_table(case):
    p, iso = case
    for i, t in enumerate(iso.transversal):
        assert p.act_word(iso.orbit.base, t) == iso.orbit.points[i]
    for i in range(iso.index):
        for g in range(p.rank):
            assert iso.inverse_table[iso.table[i][g]][g] == i
    for w in iso.schreier_gens:
        assert p.act_word(iso.orbit.base, w) == iso.orbit.base
