"""Canned reproductions of worked examples, each returning a JSON-ready report."""

from __future__ import annotations

from fractions import Fraction

from .asymptotics import cube_section_area
from .construct import tiling_generator, verify_wavelet
from .existence import decide, series_diagnostics
from .lattice import Lattice, Subspace, count_series, intersection_lattice
from .linalg import Matrix
from .regions import Region

DEMOS = ("shannon", "iw2d", "obvious", "lcc", "quincunx")


def shannon() -> dict:
    """The set ``[-1, -1/2) ∪ [1/2, 1)`` is a wavelet set for ``A = 2``, ``Gamma = Z``."""
    s = Region.intervals([(-1, Fraction(-1, 2)), (Fraction(1, 2), 1)])
    rep = verify_wavelet(s, 2, Lattice.integer(1), tol=0)
    return {"demo": "shannon", "region": s.to_json(), "verification": rep.to_json(), "passed": rep.passed}


def sheared_lattice() -> Lattice:
    return Lattice.from_rows([[1, 0], ["sqrt(2)", 1]])


def iw2d(jmax: int = 20) -> dict:
    """Diagonal planar dilations against the lattice spanned by (1, 0), (sqrt 2, 1).

    ``diag(4, 1/2)`` has ``|det| = 2`` and a contracting axis that meets the
    lattice only at 0, so a wavelet set exists; the counts for the
    determinant-one matrix ``diag(2, 1/2)`` stay bounded on the same lattice.
    """
    lat = sheared_lattice()
    positive = decide(Matrix.diag([4, Fraction(1, 2)]), lat, jmax=jmax)
    unimodular = Matrix.diag([2, Fraction(1, 2)])
    series = count_series(unimodular, lat, 1, jmax=jmax)
    kernel = intersection_lattice(lat, Subspace.coordinate(2, [1]))
    return {
        "demo": "iw2d",
        "verdict": positive.to_json(),
        "unimodular_counts": list(series.counts),
        "unimodular_max_count": max(series.counts),
        "unimodular_verdict": decide(unimodular, lat, jmax=jmax).to_json(),
        "contracting_axis_rank": kernel.rank,
    }


def obvious_lattice() -> Lattice:
    return Lattice.from_rows([[1, 1, 0], [0, 0, 1], [1, 0, 0]])


def obvious(jmax: int = 20) -> dict:
    """``A = diag(2, 2, 1/3)``: the plane spanned by (1,1,0), (0,0,1) has growing sections."""
    a = Matrix.diag([2, 2, Fraction(1, 3)])
    lat = obvious_lattice()
    verdict = decide(a, lat, jmax=min(jmax, 12))
    plane = Subspace.span([[1, 1, 0], [0, 0, 1]], 3)
    areas = [float(cube_section_area(a, plane, j)) for j in range(1, jmax + 1)]
    return {"demo": "obvious", "verdict": verdict.to_json(), "section_areas": areas}


def nested_approximants() -> tuple[Fraction, Fraction]:
    """Rational stand-ins ``(11^-12, 11^-24)`` for the existence-only pair.

    The relations ``|alpha| < 11^-j`` (for ``j < 12``) and ``|beta| < 11^-j``
    (for ``j < 24``) have coefficients ``a = 1`` or ``b = 1``, so the count
    lower bound applies exactly on those scales. Beyond them the rational
    lattice behaves differently; results are scheme-dependent.
    """
    return Fraction(1, 11**12), Fraction(1, 11**24)


def lcc(alpha=None, beta=None, jmax: int = 14) -> dict:
    """Counts for ``diag(10, 1/2, 1/2)`` on the lattice with rows (1,0,0), (alpha,1,0), (beta,0,1)."""
    if alpha is None or beta is None:
        alpha, beta = nested_approximants()
    a = Matrix.diag([10, Fraction(1, 2), Fraction(1, 2)])
    lat = Lattice.from_rows([[1, 0, 0], [alpha, 1, 0], [beta, 0, 1]])
    series = count_series(a, lat, 1, jmax=jmax)
    rows = [{"j": j, "N_j": n, "lower": (11 / 10) ** j, "meets_lower": n >= (11 / 10) ** j} for j, n in series.entries]
    return {
        "demo": "lcc",
        "alpha": str(alpha),
        "beta": str(beta),
        "scheme_dependent": True,
        "counts": rows,
        "diagnostics": series_diagnostics(series).to_json(),
    }


def quincunx(jmax: int = 20) -> dict:
    a = Matrix.from_rows([[1, 1], [-1, 1]])
    verdict = decide(a, Lattice.integer(2), jmax=jmax)
    region, spec = tiling_generator(a)
    return {"demo": "quincunx", "verdict": verdict.to_json(), "generator": spec.to_json(), "generator_area": str(region.volume)}


def run(name: str, **kw) -> dict:
    table = {"shannon": shannon, "iw2d": iw2d, "obvious": obvious, "lcc": lcc, "quincunx": quincunx}
    if name not in table:
        raise KeyError(name)
    return table[name](**kw)
