import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from waveset.errors import PreconditionError, ValidationError
from waveset.linalg import Matrix
from waveset.regions import Region, affine_image, boolean, load_region, save_region, to_svg, volume

coord = st.fractions(min_value=-4, max_value=4, max_denominator=6)


@st.composite
def intervals(draw, max_pieces=4):
    pairs = []
    for _ in range(draw(st.integers(1, max_pieces))):
        a, b = draw(coord), draw(coord)
        if a != b:
            pairs.append((min(a, b), max(a, b)))
    return Region.intervals(pairs)


@st.composite
def polygons(draw, max_pieces=3):
    pieces = []
    for _ in range(draw(st.integers(1, max_pieces))):
        pts = [(draw(coord), draw(coord)) for _ in range(draw(st.integers(3, 5)))]
        r = Region.polygon(pts)
        pieces.append(r)
    out = Region.empty(2)
    for p in pieces:
        out = out | p
    return out


@st.composite
def boxes3(draw, max_pieces=3):
    out = Region.empty(3)
    for _ in range(draw(st.integers(1, max_pieces))):
        lo = [draw(coord) for _ in range(3)]
        hi = [x + draw(st.fractions(min_value=Fraction(1, 6), max_value=3, max_denominator=6)) for x in lo]
        out = out | Region.box(lo, hi)
    return out


def regions():
    return st.one_of(
        st.tuples(intervals(), intervals()),
        st.tuples(polygons(), polygons()),
        st.tuples(boxes3(), boxes3()),
    )


# --- volumes and booleans --------------------------------------------------


def test_unit_square_volume():
    assert volume(Region.box([0, 0], [1, 1])) == 1


def test_overlapping_squares():
    s = Region.box([0, 0], [1, 1]) | Region.box([Fraction(1, 2), Fraction(1, 2)], [Fraction(3, 2), Fraction(3, 2)])
    assert s.volume == Fraction(7, 4)


def test_self_intersection_and_disjoint_union():
    s = Region.polygon([(0, 0), (2, 0), (0, 1)])
    assert boolean(s, s, "intersect") == s
    t = s.translate([5, 0])
    assert (s | t).volume == s.volume + t.volume


@given(regions())
@settings(max_examples=60, deadline=None)
def test_inclusion_exclusion(pair):
    s, t = pair
    inter = (s & t).volume
    assert (s | t).volume == s.volume + t.volume - inter
    assert (s - t).volume == s.volume - inter
    assert (s ^ t).volume == s.volume + t.volume - 2 * inter
    assert (s & t).issubset(s) and s.issubset(s | t)


@given(regions())
@settings(max_examples=40, deadline=None)
def test_boolean_identities(pair):
    s, t = pair
    assert (s - t) | (s & t) == s
    assert ((s - t) & t).is_null()
    assert s ^ t == (s | t) - (s & t)


@given(polygons(), st.lists(st.integers(-3, 3), min_size=4, max_size=4), st.tuples(coord, coord))
@settings(max_examples=40, deadline=None)
def test_affine_volume_scaling(s, entries, t):
    m = Matrix.from_rows([entries[:2], entries[2:]])
    if m.det() == 0:
        return
    img = affine_image(s, m, t)
    assert img.volume == abs(m.det()) * s.volume


def test_affine_examples():
    sq = Region.box([0, 0], [1, 1])
    assert affine_image(sq, Matrix.identity(2)) == sq
    assert affine_image(sq, Matrix.diag([2, 2])).volume == 4
    tri = Region.polygon([(0, 0), (1, 0), (0, 1)])
    sheared = affine_image(tri, Matrix.from_rows([[1, 3], [0, 1]]))
    assert sheared.volume == tri.volume
    assert sheared.contains([3, 1])


@given(boxes3(), st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=4).filter(bool), min_size=3, max_size=3))
@settings(max_examples=30, deadline=None)
def test_diagonal_image_3d(s, d):
    m = Matrix.diag(d)
    assert s.affine_image(m).volume == abs(m.det()) * s.volume


def test_non_diagonal_3d_rejected():
    with pytest.raises(PreconditionError):
        Region.box([0, 0, 0], [1, 1, 1]).affine_image(Matrix.from_rows([[1, 1, 0], [0, 1, 0], [0, 0, 1]]))


@pytest.mark.parametrize("seed", range(3))
def test_triangle_soup_against_monte_carlo(seed):
    rng = np.random.default_rng(seed)
    s = Region.empty(2)
    for _ in range(5):
        pts = [tuple(Fraction(int(x), 4) for x in rng.integers(-8, 9, size=2)) for _ in range(3)]
        s = s | Region.polygon(pts)
    lo, hi = s.bounding_box()
    lo, hi = np.array(lo, dtype=float), np.array(hi, dtype=float)
    n = 4_000
    xs = rng.uniform(lo, hi, size=(n, 2))
    hits = sum(s.contains([Fraction(float(x)), Fraction(float(y))]) for x, y in xs)
    box = float(np.prod(hi - lo))
    p = hits / n
    est = p * box
    sigma = box * np.sqrt(max(p * (1 - p), 1e-12) / n)
    assert abs(est - float(s.volume)) <= 3 * sigma + 1e-9


# --- serialisation ---------------------------------------------------------


@given(regions())
@settings(max_examples=30, deadline=None)
def test_json_roundtrip(pair):
    s, _ = pair
    back = Region.from_json(json.loads(json.dumps(s.to_json())))
    assert back == s and back.volume == s.volume


def test_save_load(tmp_path):
    s = Region.intervals([(-1, Fraction(-1, 2)), (Fraction(1, 2), 1)])
    path = tmp_path / "shannon.json"
    save_region(s, path)
    assert load_region(path) == s


def test_bad_json_rejected():
    with pytest.raises(ValidationError):
        Region.from_json({"dim": 2, "pieces": [{"vertices": [[0, 0], [1, "x"]]}]})
    with pytest.raises(ValidationError):
        Region.from_json({"dim": 7, "pieces": []})


def test_svg_output():
    svg = to_svg(Region.polygon([(0, 0), (1, 0), (0, 1)]))
    assert svg.startswith("<svg") and "polygon" in svg
    assert to_svg(Region.interval(0, 1)).count("<rect") == 1


def test_dimension_mismatch():
    with pytest.raises(ValidationError):
        Region.interval(0, 1) | Region.box([0, 0], [1, 1])
