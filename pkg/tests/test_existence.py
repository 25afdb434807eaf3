from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from waveset.errors import PreconditionError, SingularMatrixError, ValidationError
from waveset.existence import (
    EXISTS_PROVEN,
    NOT_EXISTS_PROVEN,
    R0,
    R1,
    R3,
    R4,
    decide,
    envelope_bound,
    iw2d,
    lce_bound_check,
    series_diagnostics,
)
from waveset.lattice import Lattice, Subspace, count_series
from waveset.linalg import Matrix

HALF = Fraction(1, 2)
QUINCUNX = Matrix.from_rows([[1, 1], [-1, 1]])
SHEARED = Lattice.from_rows([[1, 0], ["sqrt(2)", 1]])


def test_dyadic_scalar_exists():
    v = decide(Matrix.from_rows([[2]]), Lattice.integer(1))
    assert (v.status, v.rule) == (EXISTS_PROVEN, R1)
    assert v.exit_code == 0


def test_unimodular_diagonal_has_none():
    v = decide(Matrix.diag([2, HALF]), Lattice.integer(2))
    assert v.status == NOT_EXISTS_PROVEN and v.rule == R0
    w = v.evidence["subspace_witness"]
    assert w["base"] == "2"
    assert Subspace.span(w["subspace"]).contains([0, 1])
    assert v.exit_code == 1


def test_expanding_plane_witness():
    lat = Lattice.from_rows([[1, 1, 0], [0, 0, 1], [1, 0, 0]])
    v = decide(Matrix.diag([2, 2, Fraction(1, 3)]), lat, jmax=10)
    assert (v.status, v.rule) == (NOT_EXISTS_PROVEN, R4)
    w = v.evidence[R4]["witness"]
    assert w["base"] == "3/2"
    plane = Subspace.span(w["subspace"])
    assert plane.dim == 2 and plane.contains([1, 1, 0]) and plane.contains([0, 0, 1])


def test_contracting_axis_off_lattice_exists():
    v = decide(Matrix.diag([4, HALF]), SHEARED)
    assert (v.status, v.rule) == (EXISTS_PROVEN, R3)


def test_iw2d_rule():
    assert iw2d(QUINCUNX, Lattice.integer(2)).status == EXISTS_PROVEN
    assert iw2d(Matrix.diag([4, HALF]), Lattice.integer(2)).status == NOT_EXISTS_PROVEN
    assert iw2d(Matrix.diag([4, HALF]), SHEARED).status == EXISTS_PROVEN


def test_iw2d_rejects_wrong_dimension():
    with pytest.raises((PreconditionError, ValidationError)):
        iw2d(Matrix.identity(3).scale(2), Lattice.integer(3))


def test_contracting_matrix_uses_inverse():
    v = decide(Matrix.diag([HALF, 2, HALF]).scale(HALF), Lattice.integer(3))
    w = decide(Matrix.diag([2, HALF, 2]).scale(2), Lattice.integer(3))
    assert v.status == w.status
    assert v.evidence.get("inverted")


def test_singular_and_mismatched_inputs():
    with pytest.raises(SingularMatrixError):
        decide(Matrix.from_rows([[1, 2], [2, 4]]), Lattice.integer(2))
    with pytest.raises(ValidationError):
        decide(Matrix.identity(2).scale(2), Lattice.integer(3))


def test_verdict_json_roundtrip_shape():
    js = decide(QUINCUNX, Lattice.integer(2), jmax=5).to_json()
    assert set(js) == {"status", "rule", "supporting_rules", "borderline", "evidence"}
    assert js["status"] == EXISTS_PROVEN


# --- series diagnostics ----------------------------------------------------


def test_diagnostics_constant_series():
    s = count_series(Matrix.from_rows([[2]]), Lattice.integer(1), 1, jmax=20)
    d = series_diagnostics(s)
    assert d.partial_sums == tuple(float(j) for j in range(1, 21))
    assert d.bounded_witness[0] == 1 and len(d.bounded_witness[1]) == 20


def test_diagnostics_geometric_series():
    s = count_series(Matrix.diag([2, HALF]), Lattice.integer(2), 1, jmax=20)
    d = series_diagnostics(s)
    assert d.bounded_witness is None
    assert d.geometric_fit[1] == pytest.approx(2, rel=1e-3)
    direct = sum(1 / (2 ** (j + 1) + 1) for j in range(1, 21))
    assert d.partial_sums[-1] == pytest.approx(direct, abs=1e-12)


def test_diagnostics_sheared_bounded():
    s = count_series(Matrix.diag([2, HALF]), SHEARED, 1, jmax=20)
    d = series_diagnostics(s)
    assert d.bounded_witness is not None and d.bounded_witness[0] <= 5
    assert d.partial_sums[-1] > 20 / 5


# --- counting envelope -----------------------------------------------------


def test_envelope_scalar():
    rep = lce_bound_check(Matrix.from_rows([[2]]), radii=[1], jrange=range(-10, 11))
    counts = {j: c for _, j, c in rep.counts}
    assert all(counts[j] == 1 for j in range(-10, 0))
    assert all(counts[j] == 2 ** (j + 1) + 1 for j in range(0, 11))
    assert rep.holds and rep.empirical_constant <= 3


@pytest.mark.parametrize(
    "a, radii, js",
    [(QUINCUNX, [1], range(-8, 9)), (Matrix.diag([2, 3]), [5], range(-6, 7))],
)
def test_envelope_holds(a, radii, js):
    rep = lce_bound_check(a, radii=radii, jrange=js)
    assert rep.holds and rep.empirical_constant <= envelope_bound(a.n)


def test_envelope_needs_integer_matrix():
    with pytest.raises(PreconditionError):
        lce_bound_check(Matrix.diag([HALF, 4]))


# --- verdict invariance ----------------------------------------------------

CORPUS = [
    (Matrix.from_rows([[2]]), Lattice.integer(1)),
    (QUINCUNX, Lattice.integer(2)),
    (Matrix.diag([4, HALF]), Lattice.integer(2)),
    (Matrix.diag([4, HALF]), Lattice.from_rows([[1, 0], [Fraction(1, 3), 1]])),
    (Matrix.diag([2, 2, Fraction(1, 3)]), Lattice.from_rows([[1, 1, 0], [0, 0, 1], [1, 0, 0]])),
    (Matrix.diag([2, 3]), Lattice.integer(2)),
]


def _unimodular(rng, n):
    u = np.eye(n, dtype=int)
    for _ in range(4):
        i, j = rng.choice(n, size=2, replace=False) if n > 1 else (0, 0)
        if i != j:
            u[i] += int(rng.integers(-2, 3)) * u[j]
    if rng.random() < 0.5:
        u[0] *= -1
    return u.tolist()


@given(st.integers(0, 10_000), st.sampled_from(range(len(CORPUS))))
@settings(max_examples=20, deadline=None)
def test_rebasing_keeps_verdict(seed, idx):
    a, lat = CORPUS[idx]
    rng = np.random.default_rng(seed)
    base = decide(a, lat, jmax=8).status
    assert decide(a, lat.rebase(_unimodular(rng, a.n)), jmax=8).status == base


@given(st.sampled_from(range(len(CORPUS))))
@settings(max_examples=6, deadline=None)
def test_inverse_keeps_verdict(idx):
    a, lat = CORPUS[idx]
    assert decide(a.inv(), lat, jmax=8).status == decide(a, lat, jmax=8).status


@given(st.integers(0, 10_000), st.sampled_from(range(len(CORPUS))))
@settings(max_examples=20, deadline=None)
def test_conjugation_keeps_verdict(seed, idx):
    a, lat = CORPUS[idx]
    rng = np.random.default_rng(seed)
    n = a.n
    s = Matrix.from_rows([[Fraction(int(x)) for x in row] for row in rng.integers(-2, 3, size=(n, n))])
    if s.det() == 0:
        s = s + Matrix.identity(n).scale(3)
        if s.det() == 0:
            return
    conj = s @ a @ s.inv()
    assert decide(conj, lat.transform(s), jmax=8).status == decide(a, lat, jmax=8).status
