import pytest

from knotlab.diagram import generic_project
from knotlab.geometry import RngStream
from knotlab.homfly import gauss, homfly_gauss
from knotlab.sampling import sample_closed_equilateral


def small_codes(count, lo=3, hi=10, n=14, seed=21):
    out = []
    i = 0
    while len(out) < count:
        p = sample_closed_equilateral(n, RngStream(seed, i))
        d = generic_project(p, RngStream(seed + 1, i))
        i += 1
        if lo <= len(d) <= hi:
            out.append(d.gauss_code())
    return out


def test_pd_round_trip_on_projections():
    for comps, signs in small_codes(30):
        word, sig = comps[0], signs
        pd = gauss.to_pd(word, sig)
        w2, s2 = gauss.from_pd(pd)
        assert gauss.canonical_key([w2], s2) == gauss.canonical_key(*gauss.relabel([word], sig))
        assert gauss.to_pd(w2, s2) == pd or sorted(map(tuple, gauss.to_pd(w2, s2))) == sorted(map(tuple, pd))


def test_from_pd_rejects_broken_codes():
    with pytest.raises(ValueError):
        gauss.from_pd([[1, 5, 3, 4], [3, 1, 4, 6], [5, 3, 6, 2]])
    with pytest.raises(ValueError):
        gauss.from_pd([[1, 5, 2, 4], [3, 1, 4, 6], [5, 3, 6, 9]])


def test_trefoil_pd_signs():
    word, signs = gauss.from_pd([[1, 5, 2, 4], [3, 1, 4, 6], [5, 3, 6, 2]])
    # in X[a,b,c,d] the over-strand runs d -> b when b = d + 1: positive
    assert len(word) == 6
    assert set(signs.values()) == {1}


def test_validate_catches_unpaired_crossing():
    with pytest.raises(ValueError):
        gauss.validate([[0, 1, 2]], {0: 1, 1: 1})
    with pytest.raises(ValueError):
        gauss.validate([[0, 2, 1, 3]], {0: 1})


def test_reduce_local_r1_and_r2():
    # a kink: crossing 0 visited twice in a row
    comps, signs, free = gauss.reduce_local([[1, 0]], {0: 1})
    assert comps == [[]] and free == 0
    # R2 bigon between two unknotted strands of a two-component link
    comps, signs, free = gauss.reduce_local([[1, 3], [0, 2]], {0: 1, 1: -1})
    assert gauss.ncross(comps) == 0 and len(comps) + free == 2


def test_mirror_flips_bits_and_signs():
    comps, signs = [[1, 2, 5, 0, 3, 4]], {0: 1, 1: 1, 2: 1}
    mc, ms = gauss.mirror(comps, signs)
    assert mc == [[0, 3, 4, 1, 2, 5]]
    assert ms == {0: -1, 1: -1, 2: -1}


def test_factor_knot_splits_granny():
    tre = [1, 2, 5, 0, 3, 4]
    shifted = [p + 6 for p in tre]
    factors = gauss.factor_knot(tre + shifted)
    assert sorted(len(f) for f in factors) == [6, 6]


def test_nugatory_crossing_removed():
    # a kink spliced into a trefoil code
    tre = [1, 2, 5, 0, 3, 4]
    word = tre[:3] + [7, 6] + tre[3:]
    assert sorted(gauss.remove_nugatory(word)) == sorted(tre)


def test_planarity_of_projected_codes():
    for comps, signs in small_codes(10):
        assert gauss.is_connected_planar(comps, signs)


def test_strand_simplify_preserves_polynomial():
    for comps, signs in small_codes(25, lo=6, hi=11, n=18, seed=33):
        raw = homfly_gauss(comps, signs, cap=None, simplify=False)
        c2, s2, free = gauss.strand_simplify(comps, signs)
        assert gauss.ncross(c2) <= gauss.ncross(comps)
        assert len(c2) + free == 1
        assert homfly_gauss(c2, s2, cap=None, simplify=False) == raw
