"""Integer lattice reductions: Hermite normal form, integer kernels, Gram-LLL."""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Sequence

import mpmath


def _sub(a: list[int], b: list[int], q: int) -> list[int]:
    return [x - q * y for x, y in zip(a, b)]


def _eliminate(rows: list[list[int]], ncols: int) -> int:
    """Row-reduce in place over the first ``ncols`` columns; return the rank.

    After the call rows ``[:rank]`` are in Hermite form on those columns and
    the remaining rows are zero there.
    """
    nrows = len(rows)
    r = 0
    for col in range(ncols):
        if r >= nrows:
            break
        for i in range(r + 1, nrows):
            while rows[i][col] != 0:
                q = rows[r][col] // rows[i][col]
                rows[r] = _sub(rows[r], rows[i], q)
                rows[r], rows[i] = rows[i], rows[r]
        if rows[r][col] == 0:
            continue
        if rows[r][col] < 0:
            rows[r] = [-x for x in rows[r]]
        piv = rows[r][col]
        for i in range(r):
            q = rows[i][col] // piv
            if q:
                rows[i] = _sub(rows[i], rows[r], q)
        r += 1
    return r


def hnf_rows(rows: Sequence[Sequence[int]]) -> list[list[int]]:
    """Row Hermite normal form with zero rows dropped."""
    work = [list(map(int, r)) for r in rows]
    if not work:
        return []
    rank = _eliminate(work, len(work[0]))
    return work[:rank]


def integer_kernel(matrix: Sequence[Sequence[int]]) -> list[list[int]]:
    """Basis (in Hermite form) of ``{z in Z^n : z @ matrix == 0}``.

    ``matrix`` is n x m with integer entries.
    """
    n = len(matrix)
    m = len(matrix[0]) if n else 0
    aug = [list(map(int, matrix[i])) + [1 if i == j else 0 for j in range(n)] for i in range(n)]
    rank = _eliminate(aug, m)
    kernel = [row[m:] for row in aug[rank:]]
    return hnf_rows(kernel)


def rational_to_integer_rows(rows: Sequence[Sequence[Fraction]]) -> tuple[list[list[int]], int]:
    """Scale rational rows by one common denominator."""
    den = 1
    for r in rows:
        for x in r:
            den = lcm(den, Fraction(x).denominator)
    return [[int(Fraction(x) * den) for x in r] for r in rows], den


def column_scale_to_integers(matrix: Sequence[Sequence[Fraction]]) -> list[list[int]]:
    """Scale each column by its own common denominator (kernel-preserving)."""
    n = len(matrix)
    m = len(matrix[0]) if n else 0
    out = [[0] * m for _ in range(n)]
    for c in range(m):
        den = 1
        for i in range(n):
            den = lcm(den, Fraction(matrix[i][c]).denominator)
        for i in range(n):
            out[i][c] = int(Fraction(matrix[i][c]) * den)
    return out


def lll_gram(gram: Sequence[Sequence], delta: float = 0.99):
    """LLL-reduce the lattice with the given Gram matrix.

    Returns ``(U, reduced_gram)`` where the columns of the integer matrix
    ``U`` are the reduced basis in the original coordinates, i.e.
    ``reduced_gram = U^T gram U``. Arithmetic runs in mpmath at the current
    precision; ``U`` is exact.
    """
    n = len(gram)
    g = [[mpmath.mpf(x) if not isinstance(x, Fraction) else mpmath.mpf(x.numerator) / x.denominator
          for x in row] for row in gram]
    u = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    delta = mpmath.mpf(delta)

    def gso():
        mu = [[mpmath.mpf(0)] * n for _ in range(n)]
        bstar = [mpmath.mpf(0)] * n
        for i in range(n):
            for j in range(i):
                s = g[i][j] - sum(mu[j][k] * mu[i][k] * bstar[k] for k in range(j))
                mu[i][j] = s / bstar[j]
            bstar[i] = g[i][i] - sum(mu[i][k] ** 2 * bstar[k] for k in range(i))
        return mu, bstar

    def reduce(k, j, q):
        for i in range(n):
            g[k][i] -= q * g[j][i]
        for i in range(n):
            g[i][k] = g[i][k] - q * g[i][j] if i != k else g[k][k] - q * g[k][j]
        for i in range(n):
            u[i][k] -= q * u[i][j]

    def swap(k):
        g[k], g[k - 1] = g[k - 1], g[k]
        for row in g:
            row[k], row[k - 1] = row[k - 1], row[k]
        for row in u:
            row[k], row[k - 1] = row[k - 1], row[k]

    k = 1
    guard = 0
    while k < n:
        guard += 1
        if guard > 100000:
            break
        mu, bstar = gso()
        for j in range(k - 1, -1, -1):
            q = int(mpmath.nint(mu[k][j]))
            if q:
                reduce(k, j, q)
                mu, bstar = gso()
        if bstar[k] >= (delta - mu[k][k - 1] ** 2) * bstar[k - 1]:
            k += 1
        else:
            swap(k)
            k = max(k - 1, 1)
    return u, g


def apply_unimodular(gram: Sequence[Sequence], u: Sequence[Sequence[int]]):
    """Exact ``U^T gram U`` for Fraction or mpf Gram matrices."""
    n = len(gram)
    tmp = [[sum((gram[i][k] * u[k][j] for k in range(n)), gram[0][0] * 0) for j in range(n)] for i in range(n)]
    return [[sum((u[k][i] * tmp[k][j] for k in range(n)), gram[0][0] * 0) for j in range(n)] for i in range(n)]
