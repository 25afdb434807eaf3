"""Verdict engine: proven decision rules first, series heuristics last.

Rules, in priority order:

* ``R0``  ``|det A| = 1``: no wavelet set.
* ``R0'`` ``|det A| < 1``: decide for ``A^{-1}`` instead (same answer).
* ``R1``  every eigenvalue has modulus at least one: a wavelet set exists.
* ``R2``  ``A`` acts on ``Gamma`` by an integer matrix and ``|det A| >= 2``: exists.
* ``R3``  dimension two: exists iff ``|lambda_2| >= 1`` or the contracting
  eigenline meets ``Gamma`` only at 0.
* ``R3'`` diagonal ``A`` with ``|lambda_{n-1} lambda_n| >= 1 > |lambda_n|``:
  exists iff ``Gamma ∩ span(e_n) = {0}``.
* ``R4``  a lattice subspace ``V`` whose sections ``V ∩ A^{-j}B`` grow
  geometrically: no wavelet set.
* ``R5``  heuristics on the counts ``N_j``.

The first applicable proven rule decides; every other applicable proven
rule is evaluated too and must agree.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath
import numpy as np

from .asymptotics import GrowthRate, _fit, subspace_growth
from .errors import (
    AmbiguousMembershipError,
    JordanAmbiguityError,
    PreconditionError,
    RuleConflictError,
    ValidationError,
)
from .lattice import (
    DEFAULT_CAP,
    CountSeries,
    Lattice,
    Subspace,
    count_series,
    intersection_lattice,
    orbit_count,
    unit_ball_volume,
)
from .linalg import CLUSTER_TOL, Matrix, positive_companion, real_jordan, rref, spectrum, to_float, to_mpf

EXISTS_PROVEN = "ExistsProven"
NOT_EXISTS_PROVEN = "NotExistsProven"
EXISTS_LIKELY = "ExistsLikely"
NOT_EXISTS_LIKELY = "NotExistsLikely"
INCONCLUSIVE = "Inconclusive"

R0 = "R0-unimodular-determinant"
R1 = "R1-eigenvalues-at-least-one"
R2 = "R2-integer-lattice-counting"
R3 = "R3-two-dimensional-kernel"
R3P = "R3p-diagonal-last-axis"
R4 = "R4-expanding-lattice-subspace"
R5 = "R5-series-heuristic"

_DOWNGRADE = {EXISTS_PROVEN: EXISTS_LIKELY, NOT_EXISTS_PROVEN: NOT_EXISTS_LIKELY}
EXIT_CODES = {EXISTS_PROVEN: 0, NOT_EXISTS_PROVEN: 1, EXISTS_LIKELY: 2, NOT_EXISTS_LIKELY: 2, INCONCLUSIVE: 2}


def _num(x):
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else int(x)
    if isinstance(x, (int, float, str, bool)) or x is None:
        return x
    if isinstance(x, complex):
        return [x.real, x.imag]
    return float(x)


@dataclass(frozen=True)
class Verdict:
    status: str
    rule: str
    evidence: dict = field(default_factory=dict)
    supporting_rules: tuple = ()
    borderline: bool = False

    @property
    def exists(self) -> bool | None:
        if self.status in (EXISTS_PROVEN, EXISTS_LIKELY):
            return True
        if self.status in (NOT_EXISTS_PROVEN, NOT_EXISTS_LIKELY):
            return False
        return None

    @property
    def proven(self) -> bool:
        return self.status in (EXISTS_PROVEN, NOT_EXISTS_PROVEN)

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "rule": self.rule,
            "supporting_rules": list(self.supporting_rules),
            "borderline": self.borderline,
            "evidence": self.evidence,
        }


# ---------------------------------------------------------------------------
# series diagnostics


@dataclass(frozen=True)
class SeriesDiagnostics:
    partial_sums: tuple  # floats, nondecreasing
    bounded_witness: tuple | None  # (M, (j, ...))
    geometric_fit: tuple | None  # (c, b, r2)

    def to_json(self) -> dict:
        return {
            "partial_sums": list(self.partial_sums),
            "bounded_witness": None if self.bounded_witness is None else {
                "M": self.bounded_witness[0], "js": list(self.bounded_witness[1])},
            "geometric_fit": None if self.geometric_fit is None else {
                "c": self.geometric_fit[0], "b": self.geometric_fit[1], "r2": self.geometric_fit[2]},
        }


def series_diagnostics(series: CountSeries, fraction: float = 0.25, spread: int = 10) -> SeriesDiagnostics:
    """Partial sums plus bounded-subsequence and geometric-growth witnesses.

    A bounded witness needs at least ``fraction`` of the terms to share a
    bound ``M <= spread * min N_j``, with at least one of them in the last
    quarter of the computed range (so early terms of a growing series do not
    qualify). The geometric fit regresses ``log N_j`` on ``j`` over the
    second half of the range and is kept when ``R^2 >= 0.99``.
    """
    entries = list(series.entries)
    if not entries:
        raise PreconditionError("series is empty")
    sums = tuple(float(s) for s in series.partial_sums())
    counts = [c for _, c in entries]
    js = [j for j, _ in entries]
    total = len(counts)
    need = max(1, math.ceil(fraction * total))
    m = sorted(counts)[need - 1]
    witness = None
    if m <= spread * min(counts):
        hits = tuple(j for j, c in entries if c <= m)
        tail_start = js[0] + (3 * total) // 4
        if any(j >= tail_start for j in hits):
            witness = (m, hits)
    fit = None
    half = entries[total // 2:] if total >= 4 else entries
    if len(half) >= 2:
        b, c, r2 = _fit([j for j, _ in half], [mpmath.mpf(n) for _, n in half])
        if r2 >= 0.99:
            fit = (c, b, r2)
    return SeriesDiagnostics(sums, witness, fit)


# ---------------------------------------------------------------------------
# individual rules


@dataclass
class _RuleOutcome:
    rule: str
    exists: bool
    detail: dict
    borderline: bool = False


def _abs_det_status(a: Matrix) -> tuple[int, bool]:
    """Compare |det A| with 1: (-1/0/+1, borderline)."""
    d = a.abs_det()
    if a.exact:
        return (0 if d == 1 else (1 if d > 1 else -1)), False
    if abs(d - 1) <= CLUSTER_TOL:
        return 0, True
    return (1 if d > 1 else -1), False


def rule_eigenvalues(a: Matrix, spec) -> _RuleOutcome | None:
    if not spec.all_at_least_one():
        return None
    border = any(b and s == 0 for b, s in zip(spec.borderline, spec.unit_status))
    return _RuleOutcome(R1, True, {"moduli": list(spec.moduli_sorted)}, border)


def rule_integer_action(a: Matrix, lattice: Lattice) -> _RuleOutcome | None:
    if not (a.exact and lattice.exact):
        return None
    lcol = lattice.column_matrix
    coord = lcol.inv() @ a @ lcol
    if not coord.is_integer() or a.abs_det() < 2:
        return None
    return _RuleOutcome(R2, True, {"lattice_coordinates": coord.to_json()["rows"]})


def _eigvec_2d(a: Matrix, lam):
    """A nonzero vector of ``ker(A - lam I)`` for a real eigenvalue ``lam``."""
    m = a if isinstance(lam, Fraction) else a.to_mp()
    r0 = [m[0, 0] - lam, m[0, 1]]
    r1 = [m[1, 0], m[1, 1] - lam]
    row = r0 if abs(r0[0]) + abs(r0[1]) >= abs(r1[0]) + abs(r1[1]) else r1
    vec = [-row[1], row[0]]
    scale = max(abs(x) for x in vec)
    return [x / scale for x in vec]


def _exact_real_eigs_2d(a: Matrix):
    tr = a[0, 0] + a[1, 1]
    det = a.det()
    disc = tr * tr - 4 * det
    if disc < 0:
        return None
    num, den = disc.numerator, disc.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        s = Fraction(rn, rd)
        return [(tr + s) / 2, (tr - s) / 2]
    root = mpmath.sqrt(to_mpf(disc))
    return [(to_mpf(tr) + root) / 2, (to_mpf(tr) - root) / 2]


def iw2d(a: Matrix, lattice: Lattice) -> "Verdict":
    """Two-dimensional rule: exists iff ``|lambda_2| >= 1`` or
    ``ker(A - lambda_2 I) ∩ Gamma = {0}``."""
    outcome = _rule_iw2d(a, lattice)
    if outcome is None:
        raise PreconditionError("two-dimensional rule needs n = 2 and |det A| > 1")
    status = EXISTS_PROVEN if outcome.exists else NOT_EXISTS_PROVEN
    if outcome.borderline:
        status = _DOWNGRADE[status]
    return Verdict(status, R3, outcome.detail, (), outcome.borderline)


def _rule_iw2d(a: Matrix, lattice: Lattice) -> _RuleOutcome | None:
    if a.n != 2 or _abs_det_status(a)[0] <= 0:
        return None
    spec = spectrum(a)
    idx = min(range(len(spec.eigenvalues)), key=lambda i: abs(spec.eigenvalues[i][0]))
    lam2 = spec.eigenvalues[idx][0]
    status = spec.unit_status[idx]
    border = spec.borderline[idx]
    detail = {"lambda_2": _num(lam2) if lam2.imag else lam2.real, "modulus": abs(lam2)}
    if status >= 0:
        return _RuleOutcome(R3, True, detail, border)
    # |lambda_2| < 1 < |lambda_1| forces lambda_2 real and simple
    if a.exact:
        eigs = _exact_real_eigs_2d(a)
        lam = min(eigs, key=abs)
    else:
        lam = mpmath.mpf(lam2.real)
    vec = _eigvec_2d(a, lam)
    v = Subspace.span([vec])
    try:
        inter = intersection_lattice(lattice, v)
    except AmbiguousMembershipError as exc:
        detail["ambiguous"] = exc.near_misses
        return None
    detail["kernel"] = [_num(x) for x in vec]
    detail["kernel_lattice_rank"] = inter.rank
    if inter.rank:
        detail["kernel_lattice_basis"] = [[_num(x) for x in b] for b in inter.basis]
    return _RuleOutcome(R3, inter.rank == 0, detail, border)


def _rule_diagonal(a: Matrix, lattice: Lattice) -> _RuleOutcome | None:
    if a.n < 2 or not a.is_diagonal() or _abs_det_status(a)[0] <= 0:
        return None
    diag = a.diagonal()
    order = sorted(range(a.n), key=lambda i: abs(diag[i]))
    small, second = order[0], order[1]
    prod = abs(diag[small] * diag[second])
    smallest = abs(diag[small])
    if not (prod >= 1 and smallest < 1):
        return None
    border = (not a.exact) and (abs(prod - 1) <= CLUSTER_TOL or abs(smallest - 1) <= CLUSTER_TOL)
    try:
        inter = intersection_lattice(lattice, Subspace.coordinate(a.n, [small]))
    except AmbiguousMembershipError:
        return None
    detail = {"axis": small + 1, "axis_lattice_rank": inter.rank}
    return _RuleOutcome(R3P, inter.rank == 0, detail, border)


def _diagonalizable_note(a: Matrix) -> dict | None:
    """Evidence entry for non-diagonal matrices that R3' would cover after diagonalising."""
    if a.n < 3 or a.is_diagonal():
        return None
    try:
        jd = real_jordan(a)
    except JordanAmbiguityError:
        return None
    if any(b.is_complex or b.size > 1 for b in jd.blocks):
        return None
    mods = sorted(abs(b.eigenvalue) for b in jd.blocks)
    if len(mods) >= 2 and mods[0] * mods[1] >= 1 > mods[0]:
        return {"diagonalizable_last_axis_case": True, "moduli": mods}
    return None


# ---------------------------------------------------------------------------
# R4 candidate subspaces


def _subspace_key(v: Subspace):
    if not v.exact:
        return None
    red, _, _ = rref(v.basis)
    return tuple(tuple(r) for r in red)


def candidate_subspaces(a: Matrix, lattice: Lattice, user: Iterable[Subspace] = ()) -> list[tuple[str, Subspace]]:
    """Proper lattice subspaces tried by R4, in a fixed order.

    User-supplied subspaces first, then spans of subsets of the given basis
    and of the Hermite basis (larger subsets first), then spans of the
    lattice points inside sums of generalised eigenspaces of ``A``.
    """
    n = a.n
    out: list[tuple[str, Subspace]] = []
    seen = set()

    def add(tag: str, v: Subspace) -> None:
        if v.dim == 0 or v.dim == n:
            return
        key = _subspace_key(v)
        if key is not None:
            if key in seen:
                return
            seen.add(key)
        out.append((tag, v))

    for v in user:
        add("user", v)
    bases = [("basis", lattice.generators)]
    if lattice.exact:
        bases.append(("hermite", lattice.hermite().generators))
    for tag, gens in bases:
        for d in range(n - 1, 0, -1):
            for idx in itertools.combinations(range(n), d):
                add(tag, Subspace.span([gens[i] for i in idx], n))
    try:
        jd = real_jordan(a)
    except JordanAmbiguityError:
        return out
    pinv = jd.basis_change.inv()
    cols = list(zip(*pinv.rows))
    blocks = list(jd.blocks)
    if len(blocks) <= 8:
        for k in range(1, len(blocks)):
            for sub in itertools.combinations(blocks, k):
                vecs = [list(cols[b.start + t]) for b in sub for t in range(b.real_dim)]
                inv_space = Subspace.span(vecs, n)
                try:
                    inter = intersection_lattice(lattice, inv_space)
                except AmbiguousMembershipError:
                    continue
                if inter.rank:
                    add("eigenspace", Subspace.span(inter.basis, n))
    return out


def _growth_witness(a: Matrix, lattice: Lattice, user=()) -> tuple[str, GrowthRate] | None:
    """First candidate whose sections under ``A^{-1}`` grow with exact base > 1."""
    b = a.inv()
    try:
        comp = positive_companion(b)
    except JordanAmbiguityError:
        comp = None
    for tag, v in candidate_subspaces(a, lattice, user):
        g = subspace_growth(b, v, companion=comp)
        if g.certainty != "exact":
            continue
        base = g.base
        margin = 0 if isinstance(base, Fraction) else (CLUSTER_TOL if not a.exact else mpmath.mpf(10) ** -30)
        if base > 1 + margin:
            return tag, g
    return None


def _rule_subspace(a: Matrix, lattice: Lattice, user=()) -> _RuleOutcome | None:
    found = _growth_witness(a, lattice, user)
    if found is None:
        return None
    tag, g = found
    detail = {"witness": g.to_json(), "witness_source": tag}
    return _RuleOutcome(R4, False, detail)


# ---------------------------------------------------------------------------
# decide


def _series_evidence(a: Matrix, lattice: Lattice, radius, jmax: int, cap: int) -> tuple[dict, SeriesDiagnostics | None]:
    try:
        s = count_series(a, lattice, radius, jmax, cap)
    except PreconditionError:
        return {}, None
    ev = {"series": s.to_json()}
    if not s.entries:
        return ev, None
    diag = series_diagnostics(s)
    ev["diagnostics"] = diag.to_json()
    return ev, diag


def decide(
    a: Matrix,
    lattice: Lattice,
    radius=1,
    jmax: int = 20,
    candidates: Sequence[Subspace] = (),
    cap: int = DEFAULT_CAP,
    series: bool = True,
) -> Verdict:
    """Classify the pair ``(A, Gamma)``; see the module docstring for the rules."""
    a.require_invertible()
    if a.n != lattice.n:
        raise ValidationError("matrix and lattice dimensions differ")
    det_status, det_border = _abs_det_status(a)
    if det_status < 0:
        inner = decide(a.inv(), lattice, radius, jmax, candidates, cap, series)
        ev = dict(inner.evidence)
        ev["inverted"] = True
        return Verdict(inner.status, inner.rule, ev, inner.supporting_rules, inner.borderline)

    evidence: dict = {"abs_det": _num(a.abs_det()), "dimension": a.n}
    if series:
        ev, diag = _series_evidence(a, lattice, radius, jmax, cap)
        evidence.update(ev)
    else:
        diag = None

    if det_status == 0:
        found = _growth_witness(a, lattice, candidates)
        if found is not None:
            evidence["subspace_witness"] = found[1].to_json()
        status = NOT_EXISTS_LIKELY if det_border else NOT_EXISTS_PROVEN
        return Verdict(status, R0, evidence, (), det_border)

    spec = spectrum(a)
    evidence["moduli"] = list(spec.moduli_sorted)
    outcomes: list[_RuleOutcome] = []
    for fn in (
        lambda: rule_eigenvalues(a, spec),
        lambda: rule_integer_action(a, lattice),
        lambda: _rule_iw2d(a, lattice),
        lambda: _rule_diagonal(a, lattice),
        lambda: _rule_subspace(a, lattice, candidates),
    ):
        o = fn()
        if o is not None:
            outcomes.append(o)
    note = _diagonalizable_note(a)
    if note:
        evidence["near_miss"] = note

    firm = [o for o in outcomes if not o.borderline]
    if firm:
        verdicts = {o.exists for o in firm}
        if len(verdicts) > 1:
            raise RuleConflictError(
                "proven rules disagree: " + ", ".join(f"{o.rule}={'exists' if o.exists else 'not'}" for o in firm)
            )
    if outcomes:
        head = firm[0] if firm else outcomes[0]
        for o in outcomes:
            evidence[o.rule] = o.detail
        status = EXISTS_PROVEN if head.exists else NOT_EXISTS_PROVEN
        border = head.borderline
        if border:
            status = _DOWNGRADE[status]
        support = tuple(o.rule for o in firm if o is not head)
        return Verdict(status, head.rule, evidence, support, border)

    border = spec.any_borderline
    if diag is None:
        return Verdict(INCONCLUSIVE, R5, evidence, (), border)
    if diag.bounded_witness is not None:
        return Verdict(EXISTS_LIKELY, R5, evidence, (), border)
    if diag.geometric_fit is not None and diag.geometric_fit[1] > 1:
        return Verdict(NOT_EXISTS_LIKELY, R5, evidence, (), border)
    return Verdict(INCONCLUSIVE, R5, evidence, (), border)


# ---------------------------------------------------------------------------
# lattice counting envelope


@dataclass(frozen=True)
class EnvelopeReport:
    holds: bool
    empirical_constant: float
    bound: float
    counts: tuple  # ((r, j, count), ...)


def envelope_bound(n: int) -> float:
    """``3^n vol(B(0,1)) (1 + sqrt(n))^n``."""
    return float(3**n * unit_ball_volume(n) * (1 + mpmath.sqrt(n)) ** n)


def lce_bound_check(a: Matrix, radii: Sequence = (1,), jrange: Iterable[int] = range(-10, 11),
                    cap: int = DEFAULT_CAP) -> EnvelopeReport:
    """Check ``#(Z^n ∩ A^j B(0,r)) <= C max(1, r^n) max(1, |det A|^j)``.

    Reports the smallest constant ``C`` that works for every (r, j) given.
    """
    if not a.is_integer():
        raise PreconditionError("lattice counting envelope needs an integer matrix")
    det = abs(a.det())
    if det < 2:
        raise PreconditionError("lattice counting envelope needs |det A| >= 2")
    n = a.n
    z = Lattice.integer(n)
    rows = []
    worst = 0.0
    for r in radii:
        r = Fraction(r) if not isinstance(r, Fraction) else r
        for j in jrange:
            c = orbit_count(a, z, r, -j, cap)
            scale = max(Fraction(1), r**n) * max(Fraction(1), Fraction(det) ** j)
            worst = max(worst, float(Fraction(c) / scale))
            rows.append((r, j, c))
    bound = envelope_bound(n)
    return EnvelopeReport(worst <= bound, worst, bound, tuple(rows))
