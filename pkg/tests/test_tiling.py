from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from waveset.errors import PreconditionError
from waveset.lattice import Lattice
from waveset.linalg import Matrix
from waveset.regions import (
    FundamentalDomain,
    Region,
    d_map,
    dilation_check,
    dilation_generator,
    redundant_partition,
    tau_map,
    translation_check,
)

HALF = Fraction(1, 2)
SHANNON = Region.intervals([(-1, -HALF), (HALF, 1)])
Z1 = Lattice.integer(1)

coord = st.fractions(min_value=-3, max_value=3, max_denominator=8)


@st.composite
def intervals(draw, lo=-3, hi=3, max_pieces=3):
    c = st.fractions(min_value=lo, max_value=hi, max_denominator=8)
    pairs = []
    for _ in range(draw(st.integers(1, max_pieces))):
        a, b = draw(c), draw(c)
        if a != b:
            pairs.append((min(a, b), max(a, b)))
    return Region.intervals(pairs)


def lattices2():
    entry = st.fractions(min_value=-2, max_value=2, max_denominator=4)
    return (
        st.lists(entry, min_size=4, max_size=4)
        .filter(lambda e: e[0] * e[3] - e[1] * e[2] != 0)
        .map(lambda e: Lattice.from_rows([e[:2], e[2:]]))
    )


def brute_tau(v, u, window=8):
    out = Region.empty(1)
    for k in range(-window, window + 1):
        out = out | (v.translate([k]) & u)
    return out


def brute_d(v, w, a, window=12):
    out = Region.empty(1)
    for j in range(-window, window + 1):
        out = out | (v.affine_image(Matrix.from_rows([[a]]).power(j)) & w)
    return out


# --- translations ----------------------------------------------------------


@given(lattices2())
@settings(max_examples=25, deadline=None)
def test_fundamental_domain_tiles(lattice):
    fd = FundamentalDomain.of(lattice)
    rep = translation_check(fd.region, lattice)
    assert rep.packs and rep.covers
    assert fd.region.volume == lattice.covolume


def test_interval_of_length_two():
    rep = translation_check(Region.interval(0, 2), Z1)
    assert rep.covers and not rep.packs
    assert rep.excess_volume == 1 and rep.multiplicity == 2


def test_shannon_tiles_by_translation():
    rep = translation_check(SHANNON, Z1)
    assert rep.tiles and rep.excess_volume == 0 and rep.deficit_volume == 0


@given(intervals(), st.integers(-5, 5))
@settings(max_examples=40, deadline=None)
def test_translation_excess_is_shift_invariant(s, k):
    a = translation_check(s, Z1)
    b = translation_check(s.translate([k]), Z1)
    assert (a.excess_volume, a.deficit_volume) == (b.excess_volume, b.deficit_volume)


def test_redundant_partition_examples():
    layers = redundant_partition(Region.interval(0, 2), Z1, 2)
    assert layers == [Region.interval(0, 1), Region.interval(1, 2)]
    assert redundant_partition(SHANNON, Z1, 1) == [SHANNON]


def test_redundant_partition_three_layers():
    u = Region.intervals([(0, Fraction(3, 2)), (2, Fraction(5, 2))])
    with pytest.raises(PreconditionError):
        redundant_partition(u, Z1, 2)
    layers = redundant_partition(u, Z1, 3)
    assert [x.volume for x in layers] == [1, HALF, HALF]


@given(intervals(max_pieces=4))
@settings(max_examples=40, deadline=None)
def test_redundant_partition_layers_pack(u):
    if u.is_null():
        return
    m = translation_check(u, Z1).multiplicity
    layers = redundant_partition(u, Z1, m)
    assert sum(x.volume for x in layers) == u.volume
    assert all(translation_check(x, Z1).packs for x in layers)
    total = Region.empty(1)
    for x in layers:
        assert (total & x).is_null()
        total = total | x
    assert total == u


def test_tau_examples():
    fd = FundamentalDomain.of(Z1).region
    v = Region.interval(Fraction(5, 2), Fraction(13, 4))
    assert tau_map(v, fd, Z1) == Region.interval(HALF, Fraction(1, 1)) | Region.interval(0, Fraction(1, 4))
    inner = Region.interval(HALF, Fraction(3, 4))
    assert tau_map(inner, SHANNON, Z1).issubset(SHANNON)
    assert inner.issubset(tau_map(inner, SHANNON, Z1))


@given(intervals(), intervals())
@settings(max_examples=40, deadline=None)
def test_tau_matches_brute_force(v, u):
    assert tau_map(v, u, Z1) == brute_tau(v, u)


@given(intervals(), intervals(), intervals())
@settings(max_examples=40, deadline=None)
def test_tau_idempotent_and_monotone(v, w, u):
    t = tau_map(v, u, Z1)
    assert tau_map(t, u, Z1) == t
    assert tau_map(v & w, u, Z1).issubset(t)


# --- dilations -------------------------------------------------------------


def test_dilation_generator_tiles():
    rep = dilation_check(Region.intervals([(-2, -1), (1, 2)]), 2)
    assert rep.tiles


def test_shannon_tiles_by_dilation():
    rep = dilation_check(SHANNON, 2)
    assert rep.tiles and rep.excess_volume == 0 and rep.deficit_volume == 0


def test_overlapping_dilates():
    rep = dilation_check(Region.interval(1, 3), 2)
    assert not rep.packs and rep.excess_volume == 1


def test_unit_square_does_not_pack_under_doubling():
    rep = dilation_check(Region.box([0, 0], [1, 1]), Matrix.diag([2, 2]))
    assert not rep.packs


@pytest.mark.parametrize(
    "a",
    [Matrix.from_rows([[1, 1], [-1, 1]]), Matrix.diag([2, 3]), Matrix.diag([2, 3, 5])],
)
def test_generators_tile(a):
    gen = dilation_generator(a)
    assert dilation_check(gen.region, a).tiles


def test_d_map_examples():
    w = Region.intervals([(-2, -1), (1, 2)])
    v = Region.interval(Fraction(5, 4), Fraction(3, 2))
    assert d_map(v, w, 2) == v
    far = v.affine_image(Matrix.from_rows([[Fraction(1, 8)]]))
    assert d_map(far, w, 2) == v


@given(intervals(lo=Fraction(1, 8), hi=12))
@settings(max_examples=30, deadline=None)
def test_d_map_matches_brute_force(v):
    w = Region.intervals([(-2, -1), (1, 2)])
    got = d_map(v, w, 2)
    assert got == brute_d(v, w, 2)
    assert d_map(got, w, 2) == got
