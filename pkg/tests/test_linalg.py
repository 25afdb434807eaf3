import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from waveset.errors import SingularMatrixError, ValidationError
from waveset.linalg import (
    Matrix,
    operator_norm,
    parse_scalar,
    positive_companion,
    real_jordan,
    sandwich_holds,
    spectrum,
)

QUINCUNX = [[1, 1], [-1, 1]]

small_ints = st.integers(min_value=-4, max_value=4)


def int_matrix(n):
    return st.lists(st.lists(small_ints, min_size=n, max_size=n), min_size=n, max_size=n)


def invertible(n):
    return int_matrix(n).filter(lambda r: round(np.linalg.det(np.array(r, dtype=float))) != 0)


# --- parsing ---------------------------------------------------------------


def test_parse_rational_and_irrational():
    assert parse_scalar("3/4") == Fraction(3, 4)
    assert parse_scalar("0.25") == Fraction(1, 4)
    r2 = parse_scalar("sqrt(2)")
    assert isinstance(r2, mpmath.mpf)
    assert abs(r2**2 - 2) < mpmath.mpf(10) ** -40


@pytest.mark.parametrize("bad", ["[[1,2", "x+", True, float("nan")])
def test_parse_rejects_garbage(bad):
    with pytest.raises(ValidationError):
        parse_scalar(bad)


def test_exact_mode_rejects_irrational():
    with pytest.raises(ValidationError):
        Matrix.from_rows([["sqrt(2)", 0], [0, 1]], mode="exact")


def test_singular_matrix_rejected():
    m = Matrix.from_rows([[1, 2], [2, 4]])
    with pytest.raises(SingularMatrixError):
        m.require_invertible()


# --- exact arithmetic ------------------------------------------------------


@given(invertible(3), invertible(3))
@settings(max_examples=40, deadline=None)
def test_det_multiplicative(r1, r2):
    a, b = Matrix.from_rows(r1), Matrix.from_rows(r2)
    assert (a @ b).det() == a.det() * b.det()


@given(invertible(3))
@settings(max_examples=40, deadline=None)
def test_inverse_is_exact(rows):
    a = Matrix.from_rows(rows)
    assert a @ a.inv() == Matrix.identity(3)


@given(invertible(2), st.integers(min_value=-4, max_value=4))
@settings(max_examples=40, deadline=None)
def test_power_matches_numpy(rows, k):
    a = Matrix.from_rows(rows)
    ref = np.linalg.matrix_power(np.array(rows, dtype=float), k) if k >= 0 else np.linalg.matrix_power(
        np.linalg.inv(np.array(rows, dtype=float)), -k
    )
    assert np.allclose(a.power(k).to_numpy(), ref)


# --- spectrum --------------------------------------------------------------


def test_spectrum_diagonal():
    s = spectrum(Matrix.diag([2, 3]))
    assert [float(m) for m in s.moduli_sorted] == [3.0, 2.0]


@pytest.mark.parametrize("rows, modulus", [(QUINCUNX, math.sqrt(2)), ([[0, -2], [2, 0]], 2.0)])
def test_spectrum_complex_pairs(rows, modulus):
    s = spectrum(Matrix.from_rows(rows))
    assert all(abs(float(m) - modulus) < 1e-12 for m in s.moduli_sorted)
    vals = sorted((complex(z) for z, mult in s.eigenvalues for _ in range(mult)), key=lambda z: z.imag)
    assert abs(vals[0] - vals[1].conjugate()) < 1e-12


@given(invertible(3))
@settings(max_examples=40, deadline=None)
def test_moduli_multiply_to_abs_det(rows):
    a = Matrix.from_rows(rows)
    s = spectrum(a)
    assert len(s.moduli_sorted) == 3
    assert list(s.moduli_sorted) == sorted(s.moduli_sorted, reverse=True)
    prod = math.prod(float(m) for m in s.moduli_sorted)
    assert prod == pytest.approx(abs(float(a.det())), rel=1e-9)


# --- Jordan form -----------------------------------------------------------


def test_jordan_diagonal_is_identity_change():
    jd = real_jordan(Matrix.diag([2, Fraction(1, 2)]))
    assert len(jd.blocks) == 2 and all(b.size == 1 for b in jd.blocks)
    assert jd.jordan.is_diagonal()


def test_jordan_unipotent_block():
    jd = real_jordan(Matrix.from_rows([[1, 0], [1, 1]]))
    assert len(jd.blocks) == 1
    assert jd.blocks[0].size == 2 and not jd.blocks[0].is_complex
    j = jd.jordan
    # lower-diagonal convention: the 1 sits below the diagonal
    assert j[1, 0] == 1 and j[0, 1] == 0


def test_jordan_complex_block():
    jd = real_jordan(Matrix.from_rows(QUINCUNX))
    assert len(jd.blocks) == 1 and jd.blocks[0].is_complex
    assert abs(jd.blocks[0].modulus - math.sqrt(2)) < 1e-12


@given(invertible(3))
@settings(max_examples=30, deadline=None)
def test_jordan_reassembles(rows):
    a = Matrix.from_rows(rows)
    jd = real_jordan(a)
    p = jd.basis_change.to_numpy()
    lhs = p @ a.to_numpy() @ np.linalg.inv(p)
    assert np.allclose(lhs, jd.jordan.to_numpy(), atol=1e-8)
    assert sum(b.real_dim for b in jd.blocks) == 3


# --- positive companion ----------------------------------------------------


def test_companion_of_negative_scalar():
    c = positive_companion(Matrix.diag([-2, -2]))
    assert np.allclose(c.companion.to_numpy(), 2 * np.eye(2))
    assert c.sandwich_constant == pytest.approx(1.0)


def test_companion_flips_sign():
    c = positive_companion(Matrix.diag([2, -3]))
    assert np.allclose(c.companion.to_numpy(), np.diag([2.0, 3.0]))


def test_companion_strips_rotation():
    a = Matrix.from_rows(QUINCUNX)
    c = positive_companion(a)
    assert np.allclose(c.companion.to_numpy(), math.sqrt(2) * np.eye(2))
    assert sandwich_holds(a, c, range(-8, 9))


@given(invertible(2))
@settings(max_examples=30, deadline=None)
def test_companion_eigenvalues_are_moduli(rows):
    a = Matrix.from_rows(rows)
    c = positive_companion(a)
    ev = np.sort(np.linalg.eigvals(c.companion.to_numpy()).real)
    mod = np.sort(np.abs(np.linalg.eigvals(a.to_numpy())))
    assert np.allclose(ev, mod, rtol=1e-6)
    assert sandwich_holds(a, c, range(-5, 6), slack=1e-6)


# --- operator norm ---------------------------------------------------------


def test_operator_norm_simple():
    assert operator_norm(Matrix.identity(3)) == pytest.approx(1.0)
    assert operator_norm(Matrix.diag([2, Fraction(1, 2)])) == pytest.approx(2.0)


def test_operator_norm_shear_against_power_iteration():
    m = Matrix.from_rows([[1, 1], [0, 1]])
    x = np.array([1.0, 0.3])
    arr = m.to_numpy()
    for _ in range(200):
        x = arr.T @ (arr @ x)
        x /= np.linalg.norm(x)
    est = np.linalg.norm(arr @ x)
    assert operator_norm(m) == pytest.approx(est, rel=1e-10)
    assert operator_norm(m) == pytest.approx((1 + math.sqrt(5)) / 2, rel=1e-12)
