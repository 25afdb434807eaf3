"""Dilation matrices, spectra, real Jordan form and the positive-spectrum companion.

Entries are either exact rationals (:class:`fractions.Fraction`) or
high-precision floats (:class:`mpmath.mpf`); the mode is uniform per matrix.
All arithmetic below is written once and works for both number types.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath
import numpy as np
import sympy

from .errors import (
    EigenSolverError,
    JordanAmbiguityError,
    SingularMatrixError,
    ValidationError,
)

DEFAULT_DPS = 50
mpmath.mp.dps = max(mpmath.mp.dps, DEFAULT_DPS)

CLUSTER_TOL = 1e-8
RANK_TOL = 1e-8
# Exact-mode moduli closer than this to 1 are unimodular: roots of small-height
# rational polynomials cannot sit this close to the unit circle without being on it.
EXACT_UNIT_TOL = mpmath.mpf(10) ** (-30)


# ---------------------------------------------------------------------------
# scalars


def to_mpf(x) -> mpmath.mpf:
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


def to_float(x) -> float:
    if isinstance(x, Fraction):
        return x.numerator / x.denominator
    return float(x)


def is_exact(x) -> bool:
    return isinstance(x, (int, Fraction))


def parse_scalar(value, exact: bool | None = None):
    """Parse a JSON scalar into a Fraction or an mpf.

    Strings may be rationals (``"3/4"``, ``"0.25"``) or closed-form
    expressions such as ``"sqrt(2)"``; numbers are taken at face value.
    ``exact=True`` rejects irrational input; ``exact=False`` forces mpf.
    """
    if isinstance(value, bool):
        raise ValidationError(f"not a number: {value!r}")
    if isinstance(value, Fraction):
        out = value
    elif isinstance(value, int):
        out = Fraction(value)
    elif isinstance(value, float):
        if not math.isfinite(value):
            raise ValidationError(f"non-finite entry {value!r}")
        out = Fraction(repr(value)) if exact is not False else mpmath.mpf(value)
    elif isinstance(value, mpmath.mpf):
        out = value
    elif isinstance(value, str):
        text = value.strip()
        try:
            out = Fraction(text)
        except (ValueError, ZeroDivisionError):
            try:
                expr = sympy.sympify(text, rational=True)
            except (sympy.SympifyError, SyntaxError, TypeError) as exc:
                raise ValidationError(f"cannot parse entry {value!r}") from exc
            if expr.is_Rational:
                out = Fraction(int(expr.p), int(expr.q))
            elif expr.is_real and expr.is_finite:
                out = mpmath.mpf(str(sympy.N(expr, mpmath.mp.dps + 5)))
            else:
                raise ValidationError(f"entry {value!r} is not a finite real number")
    else:
        raise ValidationError(f"unsupported entry type {type(value).__name__}")
    if exact is True and not isinstance(out, Fraction):
        raise ValidationError(f"entry {value!r} is irrational but exact mode was requested")
    if exact is False and isinstance(out, Fraction):
        out = to_mpf(out)
    return out


def format_scalar(x) -> str | float:
    if isinstance(x, Fraction):
        return str(x)
    return float(x)


# ---------------------------------------------------------------------------
# generic elimination over Fraction / mpf


def _abs(x):
    return abs(x)


def _is_zero(x, tol) -> bool:
    if tol == 0:
        return x == 0
    return abs(x) <= tol


def rref(rows: Sequence[Sequence], tol=0):
    """Reduced row echelon form.

    Returns ``(reduced_rows, pivot_columns, min_pivot)`` where ``min_pivot`` is
    the smallest absolute pivot used before normalisation (a conditioning
    indicator for floating input). ``tol`` is an absolute zero threshold.
    """
    m = [list(r) for r in rows]
    if not m:
        return [], [], None
    nrows, ncols = len(m), len(m[0])
    pivots: list[int] = []
    min_pivot = None
    r = 0
    for c in range(ncols):
        if r >= nrows:
            break
        best = max(range(r, nrows), key=lambda i: _abs(m[i][c]))
        if _is_zero(m[best][c], tol):
            for i in range(r, nrows):
                m[i][c] = m[i][c] * 0
            continue
        m[r], m[best] = m[best], m[r]
        piv = m[r][c]
        min_pivot = abs(piv) if min_pivot is None else min(min_pivot, abs(piv))
        m[r] = [x / piv for x in m[r]]
        for i in range(nrows):
            if i != r and not _is_zero(m[i][c], 0):
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m[:r], pivots, min_pivot


def rank(rows: Sequence[Sequence], tol=0) -> int:
    return len(rref(rows, tol)[1])


def _det(rows):
    m = [list(r) for r in rows]
    n = len(m)
    det = m[0][0] * 0 + 1
    for c in range(n):
        best = max(range(c, n), key=lambda i: _abs(m[i][c]))
        if m[best][c] == 0:
            return det * 0
        if best != c:
            m[c], m[best] = m[best], m[c]
            det = -det
        piv = m[c][c]
        det = det * piv
        for i in range(c + 1, n):
            f = m[i][c] / piv
            if f != 0:
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return det


def _inverse(rows):
    n = len(rows)
    one = rows[0][0] * 0 + 1
    zero = one * 0
    m = [list(r) + [one if i == j else zero for j in range(n)] for i, r in enumerate(rows)]
    for c in range(n):
        best = max(range(c, n), key=lambda i: _abs(m[i][c]))
        if m[best][c] == 0:
            raise SingularMatrixError("matrix is singular")
        m[c], m[best] = m[best], m[c]
        piv = m[c][c]
        m[c] = [x / piv for x in m[c]]
        for i in range(n):
            if i != c and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return [r[n:] for r in m]


# ---------------------------------------------------------------------------
# Matrix


@dataclass(frozen=True)
class Matrix:
    """Square matrix with uniformly exact (Fraction) or mpf entries."""

    rows: tuple
    exact: bool = True

    def __post_init__(self):
        n = len(self.rows)
        if n == 0 or any(len(r) != n for r in self.rows):
            raise ValidationError("matrix must be square and non-empty")

    # construction -----------------------------------------------------
    @classmethod
    def from_rows(cls, rows: Iterable[Iterable], mode: str = "auto") -> "Matrix":
        """Build from nested rows of numbers/strings.

        ``mode`` is ``"exact"``, ``"float"`` or ``"auto"`` (exact unless an
        entry is irrational).
        """
        if mode not in ("auto", "exact", "float"):
            raise ValidationError(f"unknown mode {mode!r}")
        rows = [list(r) for r in rows]
        want = {"exact": True, "float": False, "auto": None}[mode]
        parsed = [[parse_scalar(x, want) for x in r] for r in rows]
        exact = all(isinstance(x, Fraction) for r in parsed for x in r)
        if not exact:
            parsed = [[to_mpf(x) for x in r] for r in parsed]
        return cls(tuple(tuple(r) for r in parsed), exact)

    @classmethod
    def from_json(cls, obj) -> "Matrix":
        if isinstance(obj, dict):
            return cls.from_rows(obj["rows"], obj.get("mode", "auto"))
        return cls.from_rows(obj)

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls.diag([1] * n)

    @classmethod
    def diag(cls, values: Sequence) -> "Matrix":
        vals = [parse_scalar(v) for v in values]
        n = len(vals)
        zero = Fraction(0)
        rows = [[vals[i] if i == j else zero for j in range(n)] for i in range(n)]
        return cls.from_rows(rows)

    @classmethod
    def from_numpy(cls, arr) -> "Matrix":
        return cls(tuple(tuple(mpmath.mpf(float(x)) for x in r) for r in np.asarray(arr)), False)

    # views ------------------------------------------------------------
    @property
    def n(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def to_numpy(self) -> np.ndarray:
        return np.array([[to_float(x) for x in r] for r in self.rows], dtype=float)

    def to_mp(self) -> "Matrix":
        if not self.exact:
            return self
        return Matrix(tuple(tuple(to_mpf(x) for x in r) for r in self.rows), False)

    def to_json(self) -> dict:
        return {
            "mode": "exact" if self.exact else "float",
            "rows": [[format_scalar(x) for x in r] for r in self.rows],
        }

    @property
    def T(self) -> "Matrix":
        return Matrix(tuple(zip(*self.rows)), self.exact)

    def is_diagonal(self) -> bool:
        return all(self.rows[i][j] == 0 for i in range(self.n) for j in range(self.n) if i != j)

    def diagonal(self) -> list:
        return [self.rows[i][i] for i in range(self.n)]

    def is_integer(self) -> bool:
        return self.exact and all(x.denominator == 1 for r in self.rows for x in r)

    # arithmetic -------------------------------------------------------
    def _coerce(self, other: "Matrix"):
        if self.exact and other.exact:
            return self, other
        return self.to_mp(), other.to_mp()

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            a, b = self._coerce(other)
            cols = list(zip(*b.rows))
            rows = tuple(tuple(sum((x * y for x, y in zip(r, c)), r[0] * 0) for c in cols) for r in a.rows)
            return Matrix(rows, a.exact and b.exact)
        vec = list(other)
        if not self.exact:
            vec = [to_mpf(v) for v in vec]
        return [sum((x * y for x, y in zip(r, vec)), r[0] * 0) for r in self.rows]

    def __neg__(self) -> "Matrix":
        return Matrix(tuple(tuple(-x for x in r) for r in self.rows), self.exact)

    def __sub__(self, other: "Matrix") -> "Matrix":
        a, b = self._coerce(other)
        return Matrix(tuple(tuple(x - y for x, y in zip(r, s)) for r, s in zip(a.rows, b.rows)), a.exact)

    def __add__(self, other: "Matrix") -> "Matrix":
        a, b = self._coerce(other)
        return Matrix(tuple(tuple(x + y for x, y in zip(r, s)) for r, s in zip(a.rows, b.rows)), a.exact)

    def scale(self, s) -> "Matrix":
        s = parse_scalar(s) if not isinstance(s, (Fraction, mpmath.mpf)) else s
        m = self if (self.exact and isinstance(s, Fraction)) else self.to_mp()
        if not m.exact:
            s = to_mpf(s)
        return Matrix(tuple(tuple(x * s for x in r) for r in m.rows), m.exact)

    def det(self):
        return _det(self.rows)

    def abs_det(self):
        return abs(self.det())

    def inv(self) -> "Matrix":
        return Matrix(tuple(tuple(r) for r in _inverse(self.rows)), self.exact)

    def power(self, k: int) -> "Matrix":
        if k < 0:
            return self.inv().power(-k)
        result = Matrix.identity(self.n)
        if not self.exact:
            result = result.to_mp()
        base = self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def conj(self, s: "Matrix") -> "Matrix":
        """Return ``S M S^{-1}``."""
        return s @ self @ s.inv()

    def require_invertible(self) -> "Matrix":
        d = self.det()
        if d == 0 or (not self.exact and abs(d) < mpmath.mpf(10) ** (-(mpmath.mp.dps - 5))):
            raise SingularMatrixError("matrix is singular")
        return self


def mat(rows, mode: str = "auto") -> Matrix:
    """Shorthand for :meth:`Matrix.from_rows`."""
    return Matrix.from_rows(rows, mode)


# ---------------------------------------------------------------------------
# spectrum


@dataclass(frozen=True)
class SpectrumData:
    eigenvalues: tuple  # ((complex, multiplicity), ...)
    moduli_sorted: tuple  # nonincreasing, repeated by multiplicity
    exact: bool
    unit_status: tuple  # per eigenvalue entry: -1 (<1), 0 (=1), +1 (>1)
    borderline: tuple  # per eigenvalue entry: modulus decided only within tolerance

    @property
    def any_borderline(self) -> bool:
        return any(self.borderline)

    def all_at_least_one(self) -> bool:
        return all(s >= 0 for s in self.unit_status)

    def all_greater_than_one(self) -> bool:
        return all(s > 0 for s in self.unit_status)


def charpoly_coefficients(m: Matrix) -> list[Fraction]:
    """Exact characteristic polynomial coefficients, leading first."""
    if not m.exact:
        raise ValidationError("exact characteristic polynomial needs an exact matrix")
    sm = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in r] for r in m.rows])
    poly = sm.charpoly()
    return [Fraction(int(c.p), int(c.q)) for c in poly.all_coeffs()]


def _unit_compare(modulus, tol):
    diff = modulus - 1
    if abs(diff) <= tol:
        return 0
    return 1 if diff > 0 else -1


def spectrum(m: Matrix) -> SpectrumData:
    """Eigenvalues with multiplicities and the nonincreasing list of moduli.

    Exact matrices use a squarefree factorisation of the exact characteristic
    polynomial (exact multiplicities) and high-precision roots; floating
    matrices use a high-precision eigensolver and cluster at ``CLUSTER_TOL``.
    """
    m.require_invertible()
    pairs: list[tuple] = []
    if m.exact:
        x = sympy.Symbol("x")
        coeffs = charpoly_coefficients(m)
        poly = sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in coeffs], x, domain="QQ")
        _, factors = poly.sqf_list()
        for fac, mult in factors:
            fc = [to_mpf(Fraction(int(c.p), int(c.q))) for c in fac.all_coeffs()]
            if len(fc) == 2:
                roots = [-fc[1] / fc[0]]
            else:
                try:
                    roots = mpmath.polyroots(fc, maxsteps=400, extraprec=2 * mpmath.mp.prec)
                except mpmath.libmp.NoConvergence as exc:
                    raise EigenSolverError(f"eigenvalue iteration failed: {exc}") from exc
            for r in roots:
                pairs.append((mpmath.mpc(r), mult))
        tol = EXACT_UNIT_TOL
    else:
        try:
            evals = mpmath.eig(mpmath.matrix([list(r) for r in m.rows]), left=False, right=False)
        except mpmath.libmp.NoConvergence as exc:
            raise EigenSolverError(f"eigenvalue iteration failed: {exc}") from exc
        scale = max(abs(e) for e in evals)
        clusters: list[list] = []
        for e in evals:
            for c in clusters:
                if abs(c[0] - e) <= CLUSTER_TOL * scale:
                    c.append(e)
                    break
            else:
                clusters.append([e])
        for c in clusters:
            pairs.append((sum(c) / len(c), len(c)))
        tol = CLUSTER_TOL
    pairs.sort(key=lambda p: (-abs(p[0]), -float(mpmath.re(p[0])), -float(mpmath.im(p[0]))))
    eig = tuple((complex(p[0]), p[1]) for p in pairs)
    status = tuple(_unit_compare(abs(p[0]), tol) for p in pairs)
    border = tuple((not m.exact) and s == 0 for s in status)
    moduli = []
    for p in pairs:
        moduli.extend([float(abs(p[0]))] * p[1])
    moduli.sort(reverse=True)
    return SpectrumData(eig, tuple(moduli), m.exact, status, border)


def operator_norm(m: Matrix) -> float:
    """Spectral norm (largest singular value)."""
    arr = m.to_numpy()
    if not np.all(np.isfinite(arr)):
        raise ValidationError("matrix entries overflow float64")
    return float(np.linalg.norm(arr, 2))


# ---------------------------------------------------------------------------
# real Jordan form


@dataclass(frozen=True)
class JordanBlock:
    eigenvalue: complex
    size: int  # Jordan size over C
    is_complex: bool
    start: int  # first coordinate of the block
    exact_value: Fraction | None = None

    @property
    def real_dim(self) -> int:
        return 2 * self.size if self.is_complex else self.size

    @property
    def modulus(self) -> float:
        return abs(self.eigenvalue)


@dataclass(frozen=True)
class JordanDecomposition:
    """``basis_change @ A @ basis_change^{-1} == jordan`` with lower-diagonal blocks."""

    basis_change: Matrix
    blocks: tuple
    jordan: Matrix
    reconstruction_error: float
    exact: bool


def _rotation_scaling(z: complex, exact_re=None, exact_im=None):
    a = exact_re if exact_re is not None else z.real
    b = exact_im if exact_im is not None else z.imag
    return [[a, b], [-b, a]]


def jordan_matrix(blocks: Sequence[JordanBlock], exact: bool) -> Matrix:
    """Assemble the block-diagonal lower-diagonal real Jordan matrix."""
    n = sum(b.real_dim for b in blocks)
    zero = Fraction(0) if exact else mpmath.mpf(0)
    one = zero + 1
    rows = [[zero] * n for _ in range(n)]
    for b in blocks:
        s = b.start
        if b.is_complex:
            lam = mpmath.mpc(b.eigenvalue.real, b.eigenvalue.imag)
            mz = _rotation_scaling(b.eigenvalue, mpmath.re(lam), mpmath.im(lam))
            for k in range(b.size):
                o = s + 2 * k
                for i in range(2):
                    for j in range(2):
                        rows[o + i][o + j] = mpmath.mpf(mz[i][j])
                if k + 1 < b.size:
                    rows[o + 2][o] = one
                    rows[o + 3][o + 1] = one
        else:
            val = b.exact_value if (exact and b.exact_value is not None) else (
                mpmath.mpf(b.eigenvalue.real) if not exact else Fraction(b.eigenvalue.real)
            )
            for k in range(b.size):
                rows[s + k][s + k] = val
                if k + 1 < b.size:
                    rows[s + k + 1][s + k] = one
    return Matrix(tuple(tuple(r) for r in rows), exact)


def _sym_to_value(e, exact: bool):
    e = sympy.nsimplify(e) if exact else e
    if e.is_Rational:
        return Fraction(int(e.p), int(e.q))
    return mpmath.mpf(str(sympy.N(e, mpmath.mp.dps + 5)))


def _finish(a: Matrix, chains: list, value_exact: bool) -> JordanDecomposition:
    """Assemble P and blocks from realified chains.

    ``chains``: list of (eigenvalue complex, exact_value|None, is_complex,
    columns) with columns already ordered for the lower-diagonal convention.
    """
    chains.sort(key=lambda c: (abs(c[0]), c[0].real, c[0].imag, -len(c[3])))
    cols = []
    blocks = []
    start = 0
    for lam, ev, is_c, vecs in chains:
        size = len(vecs) // 2 if is_c else len(vecs)
        blocks.append(JordanBlock(lam, size, is_c, start, ev))
        start += len(vecs)
        cols.extend(vecs)
    exact = value_exact and all(isinstance(x, Fraction) for c in cols for x in c) and not any(
        b.is_complex for b in blocks
    ) and all(b.exact_value is not None for b in blocks)
    if not exact:
        cols = [[to_mpf(x) for x in c] for c in cols]
    s = Matrix(tuple(zip(*cols)), exact)
    p = s.inv()
    j = jordan_matrix(blocks, exact)
    got = p @ (a if exact else a.to_mp()) @ s
    err = float(np.max(np.abs((got - j).to_numpy()))) if not exact else float(
        max(abs(x) for r in (got - j).rows for x in r)
    )
    return JordanDecomposition(p, tuple(blocks), j, err, exact)


def _split_over_rationals(a: Matrix):
    """(squarefree, rational roots) of the exact characteristic polynomial."""
    x = sympy.Symbol("x")
    coeffs = charpoly_coefficients(a)
    poly = sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in coeffs], x, domain="QQ")
    _, factors = poly.factor_list()
    squarefree = all(mult == 1 for _, mult in factors)
    linear = all(f.degree() == 1 for f, _ in factors)
    roots = []
    for f, _ in factors:
        if f.degree() == 1:
            c1, c0 = f.all_coeffs()
            r = -c0 / c1
            roots.append(Fraction(int(r.p), int(r.q)))
    return squarefree, linear, roots


def _simple_jordan(a: Matrix, rational_roots: list) -> JordanDecomposition:
    """Distinct eigenvalues, some irrational: eigenvectors from a high-precision solver."""
    evals, vecs = mpmath.eig(mpmath.matrix([[to_mpf(x) for x in r] for r in a.rows]))
    n = a.n
    scale = max(abs(e) for e in evals)
    chains = []
    for k, lam in enumerate(evals):
        v = [vecs[i, k] for i in range(n)]
        im = mpmath.im(lam)
        if abs(im) <= mpmath.mpf(10) ** (-mpmath.mp.dps // 2) * scale:
            re = mpmath.re(lam)
            ev = min(rational_roots, key=lambda r: abs(to_mpf(r) - re), default=None)
            if ev is not None and abs(to_mpf(ev) - re) > mpmath.mpf(10) ** (-mpmath.mp.dps // 2) * scale:
                ev = None
            # real eigenvalue: rotate the vector to be real
            pivot = max(v, key=abs)
            phase = abs(pivot) / pivot
            col = [mpmath.re(x * phase) for x in v]
            chains.append((complex(float(re), 0.0), ev, False, [col]))
        elif im > 0:
            cols = [[mpmath.re(x) for x in v], [mpmath.im(x) for x in v]]
            chains.append((complex(lam), None, True, cols))
    return _finish(a, chains, False)


def _exact_jordan(a: Matrix) -> JordanDecomposition:
    squarefree, linear, roots = _split_over_rationals(a)
    if squarefree and not linear:
        # symbolic Jordan forms with radicals are slow and end up as floats anyway
        return _simple_jordan(a, roots)
    sm = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in r] for r in a.rows])
    ps, js = sm.jordan_form()
    n = a.n
    chains = []
    i = 0
    all_rational = True
    while i < n:
        k = i
        while k + 1 < n and js[k, k + 1] != 0:
            k += 1
        lam = sympy.nsimplify(js[i, i])
        vecs = [ps[:, c] for c in range(i, k + 1)]
        lam_c = complex(sympy.N(lam, 30))
        im = sympy.im(lam)
        if im == 0 or abs(lam_c.imag) < 1e-40:
            cols = [[sympy.re(sympy.expand(x)) for x in v] for v in reversed(vecs)]
            ev = Fraction(int(lam.p), int(lam.q)) if lam.is_Rational else None
            all_rational &= ev is not None
            chains.append((complex(lam_c.real, 0.0), ev, False, cols))
        elif lam_c.imag > 0:
            cols = []
            for v in reversed(vecs):
                cols.append([sympy.re(sympy.expand(x)) for x in v])
                cols.append([sympy.im(sympy.expand(x)) for x in v])
            chains.append((lam_c, None, True, cols))
            all_rational = False
        i = k + 1
    conv = [
        (lam, ev, is_c, [[_sym_to_value(x, True) for x in c] for c in cols])
        for lam, ev, is_c, cols in chains
    ]
    return _finish(a, conv, all_rational)


def _numeric_jordan(a: Matrix) -> JordanDecomposition:
    arr = a.to_numpy()
    n = arr.shape[0]
    scale = max(np.linalg.norm(arr, 2), 1.0)
    evals = np.linalg.eigvals(arr)
    clusters: list[list] = []
    # defective eigenvalues split by ~eps**(1/k); group loosely, decide structure by rank
    group_tol = 1e-5 * scale
    for e in evals:
        for c in clusters:
            if abs(np.mean(c) - e) <= group_tol:
                c.append(e)
                break
        else:
            clusters.append([e])
    chains = []
    diagnostics = []
    for c in clusters:
        lam = complex(np.mean(c))
        mult = len(c)
        if abs(lam.imag) <= group_tol:
            lam = complex(lam.real, 0.0)
        elif lam.imag < 0:
            continue
        is_c = lam.imag != 0
        dtype = complex if is_c else float
        nmat = arr.astype(dtype) - (lam if is_c else lam.real) * np.eye(n)
        kernels = [np.zeros((n, 0), dtype=dtype)]
        power = np.eye(n, dtype=dtype)
        svals_log = []
        while kernels[-1].shape[1] < mult:
            power = power @ nmat
            _, sv, vh = np.linalg.svd(power)
            thresh = RANK_TOL * max(np.linalg.norm(power, 2), 1e-300)
            svals_log.append(sv.tolist())
            ambiguous = any(thresh < x < 1e3 * thresh for x in sv)
            null = vh[sv <= thresh].conj().T
            if null.shape[1] <= kernels[-1].shape[1] or ambiguous:
                diagnostics.append((lam, mult, sv.tolist()))
                raise JordanAmbiguityError(
                    f"Jordan structure of eigenvalue {lam:.6g} is numerically ambiguous", diagnostics
                )
            kernels.append(null)
            if len(kernels) > mult + 1:
                raise JordanAmbiguityError("kernel staircase did not stabilise", diagnostics)
        if kernels[-1].shape[1] != mult:
            diagnostics.append((lam, mult, svals_log))
            raise JordanAmbiguityError(
                f"generalised eigenspace of {lam:.6g} has dimension {kernels[-1].shape[1]} != {mult}",
                diagnostics,
            )
        top = len(kernels) - 1
        heads: list[tuple[int, np.ndarray]] = []
        for k in range(top, 0, -1):
            existing = [np.linalg.matrix_power(nmat, length - k) @ h for length, h in heads]
            base = np.column_stack([kernels[k - 1]] + existing)
            if base.shape[1]:
                q, _ = np.linalg.qr(base)
                comp = kernels[k] - q @ (q.conj().T @ kernels[k])
            else:
                comp = kernels[k]
            u, sv, _ = np.linalg.svd(comp)
            need = kernels[k].shape[1] - kernels[k - 1].shape[1] - len(existing)
            for t in range(need):
                heads.append((k, u[:, t]))
        for length, h in heads:
            vecs = [np.linalg.matrix_power(nmat, length - 1 - t) @ h for t in range(length)]
            # vecs[0] is the eigenvector; order reversed for lower-diagonal blocks
            ordered = list(reversed(vecs))
            if is_c:
                cols = []
                for v in ordered:
                    cols.append([mpmath.mpf(float(x)) for x in v.real])
                    cols.append([mpmath.mpf(float(x)) for x in v.imag])
                chains.append((lam, None, True, cols))
            else:
                cols = [[mpmath.mpf(float(x)) for x in np.real(v)] for v in ordered]
                chains.append((lam, None, False, cols))
    result = _finish(a, chains, False)
    if result.reconstruction_error > 1e-6 * scale:
        raise JordanAmbiguityError(
            f"real Jordan reconstruction error {result.reconstruction_error:.3g} exceeds tolerance",
            [(complex(np.mean(c)), len(c), None) for c in clusters],
        )
    return result


def real_jordan(m: Matrix) -> JordanDecomposition:
    """Real Jordan form with lower-diagonal blocks, sorted by ascending modulus.

    Complex-conjugate pairs appear as one block of 2x2 rotation-scaling
    matrices ``[[Re z, Im z], [-Im z, Re z]]`` with identity blocks below the
    diagonal. Exact input is decomposed symbolically; the result stays exact
    when all eigenvalues and basis vectors are rational.
    """
    m.require_invertible()
    if m.exact:
        return _exact_jordan(m)
    return _numeric_jordan(m)


# ---------------------------------------------------------------------------
# positive-spectrum companion


@dataclass(frozen=True)
class PositiveSpectrumCompanion:
    companion: Matrix
    sandwich_constant: float
    jordan: JordanDecomposition
    rotation: Matrix  # orthogonal, commutes with the Jordan matrix


def positive_companion(m: Matrix) -> PositiveSpectrumCompanion:
    """Matrix with eigenvalues |lambda_i| whose powers sandwich those of ``m``.

    With ``P m P^{-1} = J`` in real Jordan form and ``R`` the block-orthogonal
    matrix undoing signs and rotations, the companion is ``P^{-1} R J P``
    and the sandwich constant is ``||P^{-1}|| * ||P||``.
    """
    jd = real_jordan(m)
    exact = jd.exact
    n = m.n
    zero = Fraction(0) if exact else mpmath.mpf(0)
    rot = [[zero] * n for _ in range(n)]
    for b in jd.blocks:
        s = b.start
        if b.is_complex:
            lam = mpmath.mpc(b.eigenvalue.real, b.eigenvalue.imag)
            w = mpmath.conj(lam / abs(lam))
            mz = [[mpmath.re(w), mpmath.im(w)], [-mpmath.im(w), mpmath.re(w)]]
            for k in range(b.size):
                o = s + 2 * k
                for i in range(2):
                    for j in range(2):
                        rot[o + i][o + j] = mz[i][j]
        else:
            sign = -1 if b.eigenvalue.real < 0 else 1
            for k in range(b.size):
                rot[s + k][s + k] = zero + sign
    r = Matrix(tuple(tuple(row) for row in rot), exact)
    jp = r @ jd.jordan
    p = jd.basis_change
    comp = p.inv() @ jp @ p
    c = operator_norm(p.inv()) * operator_norm(p)
    return PositiveSpectrumCompanion(comp, c, jd, r)


def sandwich_holds(m: Matrix, comp: PositiveSpectrumCompanion, js: Iterable[int], slack: float = 1e-9) -> bool:
    """Check ``A^j(B(0, r/c)) ⊆ Ã^j(B(0, r)) ⊆ A^j(B(0, c r))`` for the given powers.

    The inclusions are equivalent to ``||Ã^{-j} A^j|| <= c`` and
    ``||A^{-j} Ã^j|| <= c``.
    """
    c = comp.sandwich_constant
    a = m.to_numpy()
    t = comp.companion.to_numpy()
    for j in js:
        aj = np.linalg.matrix_power(a, j) if j >= 0 else np.linalg.matrix_power(np.linalg.inv(a), -j)
        tj = np.linalg.matrix_power(t, j) if j >= 0 else np.linalg.matrix_power(np.linalg.inv(t), -j)
        if np.linalg.norm(np.linalg.solve(tj, aj), 2) > c * (1 + slack):
            return False
        if np.linalg.norm(np.linalg.solve(aj, tj), 2) > c * (1 + slack):
            return False
    return True
