"""Checkers for the exceptional-set bounds, incidence identities and statistics.

Each checker computes the exceptional set it needs, tests the hypotheses of
the statement, and returns a ``BoundReport``.  ``holds`` is "not-applicable"
exactly when the hypotheses fail; otherwise it records whether the measured
count satisfies the stated comparison.  All comparisons are exact.

Theorem ids used in reports:

    line_sum_identity    sum over all lines of e^2 = qbinom|E| + |E|(|E|-1)
    line_variance        sum over all lines of (e - |E|q^(1-d))^2 <= qbinom|E|
    pair_lower           sum over L of e*t >= |E||T|
    pair_upper_large_e   sum over L of e*t <= b|E||T| + sqrt((M|T|+|T|^2)|E|qbinom)
    pair_upper_large_t   sum over L of e*t < (b+ac)|E||T| + |E|sqrt(2 qbinom|T|)/(1-1/c)
    large_e              #{|pi^y E| <= M} < 12 q^(d-1) M/|E|
    large_e_general      #{|pi^y E| <= M} < C qbinom M/|E|
    large_t              #{|pi^y E| <= |E|/10} < 8 q^(d-1)
    large_t_general      #{|pi^y E| <= M} < 2(1-b-ac)^-2 (1-1/c)^-2 qbinom
    few_directions       #{|pi^y E| < |E|/C} < q|E|/(C-1)
    off_line             |T| <= k|E|/(C-1) when every line meets T in < k points
    on_line              |line & {|pi^y E| <= M}| <= 2M for a line missing E
    four_m_squared       #{|pi^y E| < M} < 4M^2
    unique_bad_point     #{|pi^y E| < |E|^(1/2)/2} <= 1
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable

import numpy as np

from .bounds import Surd, eval_large_e, eval_large_t, sqrt_le
from .geom import Line, Space
from .radial import (
    IncidenceLedger,
    PointSet,
    exceptional_from_profile,
    incidence_ledger,
    projection_profile,
    projection_size_oracle,
)

__all__ = [
    "BoundReport",
    "Witness",
    "check_few_directions",
    "check_four_m_squared",
    "check_large_e",
    "check_large_e_general",
    "check_large_t",
    "check_large_t_general",
    "check_off_line",
    "check_on_line",
    "check_unique_bad_point",
    "conjecture_scan",
    "rich_lines",
    "rich_sum_statistic",
    "verify_et_inequalities",
    "verify_line_sum_identity",
    "verify_variance_bound",
]

YES, NO, NA = "yes", "no", "not-applicable"


def _num(x):
    """JSON-friendly exact number: int when integral, else "p/q"."""
    if x is None:
        return None
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else str(x)


@dataclass
class BoundReport:
    theorem: str
    q: int
    d: int
    e: int
    size_e: int
    hypotheses_met: bool
    measured: int | None
    bound: Fraction | float | None
    holds: str
    M: Fraction | int | None = None
    C: Fraction | None = None
    family: str = ""
    seed: int | None = None
    runtime_ms: float = 0.0
    detail: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        assert (self.holds == NA) == (not self.hypotheses_met), self

    @property
    def failed(self) -> bool:
        return self.holds == NO

    def to_json(self) -> dict:
        bound = self.bound
        if isinstance(bound, Fraction):
            bound = _num(bound)
        return {
            "theorem": self.theorem,
            "q": self.q,
            "d": self.d,
            "e": self.e,
            "family": self.family,
            "sizeE": self.size_e,
            "M": _num(self.M),
            "C": _num(self.C),
            "hypotheses_met": self.hypotheses_met,
            "measured": self.measured,
            "bound": bound,
            "holds": self.holds,
            "seed": self.seed,
            "runtime_ms": round(self.runtime_ms, 3),
        }


def _report(theorem, E: PointSet, started, hyp, measured, bound, ok, **kw) -> BoundReport:
    sp = E.space
    holds = NA if not hyp else (YES if ok else NO)
    return BoundReport(
        theorem=theorem,
        q=sp.q,
        d=sp.d,
        e=sp.field.e,
        size_e=len(E),
        hypotheses_met=bool(hyp),
        measured=measured,
        bound=bound,
        holds=holds,
        runtime_ms=(time.perf_counter() - started) * 1000,
        **kw,
    )


def _profile(E: PointSet, profile):
    return projection_profile(E) if profile is None else profile


# -- incidence identities --


def verify_line_sum_identity(E: PointSet, ledger: IncidenceLedger | None = None) -> BoundReport:
    t0 = time.perf_counter()
    led = incidence_ledger(E) if ledger is None else ledger
    n = len(E)
    lhs = led.sum_e2("G")
    rhs = E.space.n_dirs * n + n * (n - 1)
    return _report("line_sum_identity", E, t0, True, lhs, Fraction(rhs), lhs == rhs)


def verify_variance_bound(E: PointSet, ledger: IncidenceLedger | None = None) -> BoundReport:
    t0 = time.perf_counter()
    sp = E.space
    led = incidence_ledger(E) if ledger is None else ledger
    mean = Fraction(len(E), sp.q ** (sp.d - 1))
    # stored lines exactly, then the empty lines each contribute mean^2
    e = led.e
    s1, s2 = int(e.sum()), int(np.dot(e, e))
    lhs = s2 - 2 * mean * s1 + len(led) * mean * mean + led.n_empty * mean * mean
    bound = Fraction(sp.n_dirs * len(E))
    return _report("line_variance", E, t0, True, None, bound, lhs <= bound, detail={"lhs": lhs})


def verify_et_inequalities(E: PointSet, M: int, profile=None) -> list[BoundReport]:
    """Lower bound and both upper bounds on sum over L of e(l)t(l), T = {|pi^y E| <= M}."""
    if not isinstance(M, int) or M < 1:
        raise ValueError("M must be a positive integer")
    t0 = time.perf_counter()
    sp = E.space
    T = exceptional_from_profile(sp, _profile(E, profile), M)
    led = incidence_ledger(E, T)
    S = led.sum_et("L")
    nE, nT, qb = len(E), len(T), sp.n_dirs
    detail = {"sum_et": S, "size_T": nT, "T_meets_E": len(E.intersection(T))}
    out = [_report("pair_lower", E, t0, True, S, Fraction(nE * nT), S >= nE * nT, M=M, detail=detail)]

    rational = Fraction(M, sp.q ** (sp.d - 1)) * nE * nT
    radicand = (M * nT + nT * nT) * nE * qb
    ok = sqrt_le(S - rational, radicand)
    approx = float(rational) + float(radicand) ** 0.5
    out.append(_report("pair_upper_large_e", E, t0, True, S, approx, ok, M=M, detail=detail))

    # the strict form needs T nonempty: at |T| = 0 both sides vanish
    lt = eval_large_t(sp.q, sp.d, nE, M) if nE else None
    if lt is None or not lt.applicable or nT == 0:
        out.append(_report("pair_upper_large_t", E, t0, False, S, None, False, M=M, detail=detail))
    else:
        ok = _large_t_upper_holds(S, nE, nT, qb, lt.a, lt.b, lt.c_sq)
        c = float(lt.c_sq) ** 0.5
        approx = (float(lt.b) + float(lt.a) * c) * nE * nT + nE * (2 * qb * nT) ** 0.5 / (1 - 1 / c)
        out.append(_report("pair_upper_large_t", E, t0, True, S, approx, ok, M=M, detail=detail))
    return out


def _large_t_upper_holds(S, nE, nT, qb, a, b, c_sq) -> bool:
    """S < (b + a c)|E||T| + (1 - 1/c)^-1 |E| sqrt(2 qbinom |T|), exactly.

    Multiplying by 1 - 1/c > 0 leaves  lhs < |E| sqrt(2 qbinom |T|)  with
    lhs in Q(c).
    """
    c = Surd.root(c_sq)
    shrink = 1 - Surd(Fraction(0), 1 / c_sq, c_sq)
    lhs = (S - (b + a * c) * nE * nT) * shrink
    rad = Fraction(2 * qb * nT)
    if lhs.sign() < 0:
        return True
    if lhs.sign() == 0:
        return nE > 0 and rad > 0
    return (nE * nE * rad - lhs * lhs).sign() > 0


# -- exceptional-set bounds --


def check_large_e(E: PointSet, M: int, profile=None) -> BoundReport:
    if not isinstance(M, int) or M < 1:
        raise ValueError("M must be a positive integer")
    t0 = time.perf_counter()
    sp = E.space
    qd1 = sp.q ** (sp.d - 1)
    n = len(E)
    hyp = n >= 6 * qd1 and 4 * M <= qd1
    if not hyp:
        return _report("large_e", E, t0, False, None, None, False, M=M)
    T = exceptional_from_profile(sp, _profile(E, profile), M)
    bound = Fraction(12 * qd1 * M, n)
    return _report("large_e", E, t0, True, len(T), bound, len(T) < bound, M=M)


def check_large_e_general(E: PointSet, M: int, profile=None) -> BoundReport:
    t0 = time.perf_counter()
    sp = E.space
    if not len(E):
        return _report("large_e_general", E, t0, False, None, None, False, M=M)
    params = eval_large_e(sp.q, sp.d, len(E), M)
    if not params.applicable:
        return _report("large_e_general", E, t0, False, None, None, False, M=M, detail={"params": params})
    T = exceptional_from_profile(sp, _profile(E, profile), M)
    return _report(
        "large_e_general", E, t0, True, len(T), params.bound, len(T) < params.bound,
        M=M, C=params.C, detail={"params": params},
    )


def check_large_t(E: PointSet, profile=None) -> BoundReport:
    t0 = time.perf_counter()
    sp = E.space
    qd1 = sp.q ** (sp.d - 1)
    n = len(E)
    M = Fraction(n, 10)
    if not (n >= 1 and 100 * n <= qd1):
        return _report("large_t", E, t0, False, None, None, False, M=M)
    T = exceptional_from_profile(sp, _profile(E, profile), M)
    bound = Fraction(8 * qd1)
    return _report("large_t", E, t0, True, len(T), bound, len(T) < bound, M=M)


def check_large_t_general(E: PointSet, M: int, profile=None) -> BoundReport:
    t0 = time.perf_counter()
    sp = E.space
    params = eval_large_t(sp.q, sp.d, len(E), M)
    if not params.applicable:
        return _report("large_t_general", E, t0, False, None, None, False, M=M, detail={"params": params})
    T = exceptional_from_profile(sp, _profile(E, profile), M)
    ok = params.admits(len(T))
    return _report(
        "large_t_general", E, t0, True, len(T), params.upper(), ok, M=M, detail={"params": params}
    )


def check_few_directions(E: PointSet, C, profile=None) -> BoundReport:
    C = Fraction(C)
    if C <= 1:
        raise ValueError("C must exceed 1")
    t0 = time.perf_counter()
    sp = E.space
    n = len(E)
    if not C < n:
        return _report("few_directions", E, t0, False, None, None, False, C=C)
    T = exceptional_from_profile(sp, _profile(E, profile), n / C, strict=True)
    bound = sp.q * n / (C - 1)
    return _report("few_directions", E, t0, True, len(T), bound, len(T) < bound, C=C)


def check_off_line(E: PointSet, C, k: int, T_candidate: PointSet, profile=None) -> BoundReport:
    """|T| <= k|E|/(C-1), after confirming both hypotheses on T_candidate."""
    t0 = time.perf_counter()
    C = Fraction(C)
    n = len(E)
    hyp = 1 < C < n and k >= 1
    if hyp and len(T_candidate):
        prof = _profile(E, profile)
        # |pi^y E| < |E|/C  <=>  C.num * size < |E| * C.den
        hyp = bool(np.all(C.numerator * prof[T_candidate.idx] < n * C.denominator))
        if hyp:
            led = incidence_ledger(E, T_candidate)
            hyp = int(led.t.max()) < k
    if not hyp:
        return _report("off_line", E, t0, False, None, None, False, C=C, detail={"k": k})
    bound = k * n / (C - 1)
    m = len(T_candidate)
    return _report("off_line", E, t0, True, m, bound, m <= bound, C=C, detail={"k": k})


def check_on_line(E: PointSet, M, line: Line, profile=None) -> BoundReport:
    t0 = time.perf_counter()
    sp = E.space
    M = Fraction(M)
    pts = sp.line_point_ids(sp.line_id(line))
    hyp = M >= 0 and 2 * M < len(E) and not E.mask[pts].any()
    if not hyp:
        return _report("on_line", E, t0, False, None, None, False, M=M)
    T = exceptional_from_profile(sp, _profile(E, profile), M)
    measured = int(T.mask[pts].sum())
    return _report("on_line", E, t0, True, measured, 2 * M, measured <= 2 * M, M=M)


def check_four_m_squared(E: PointSet, M, profile=None, max_on_line: int | None = None) -> BoundReport:
    t0 = time.perf_counter()
    sp = E.space
    M = Fraction(M)
    n = len(E)
    if max_on_line is None:
        max_on_line = int(incidence_ledger(E).max_e)
    hyp = M > 0 and 4 * M < n and 2 * max_on_line <= n
    if not hyp:
        return _report("four_m_squared", E, t0, False, None, None, False, M=M)
    T = exceptional_from_profile(sp, _profile(E, profile), M, strict=True)
    bound = 4 * M * M
    return _report("four_m_squared", E, t0, True, len(T), bound, len(T) < bound, M=M)


def check_unique_bad_point(E: PointSet, profile=None, max_on_line: int | None = None) -> BoundReport:
    t0 = time.perf_counter()
    n = len(E)
    if max_on_line is None:
        max_on_line = int(incidence_ledger(E).max_e)
    if 4 * max_on_line > 3 * n:
        return _report("unique_bad_point", E, t0, False, None, None, False)
    prof = _profile(E, profile)
    # size < sqrt(n)/2  <=>  4 size^2 < n
    measured = int(np.count_nonzero(4 * prof * prof < n))
    return _report("unique_bad_point", E, t0, True, measured, Fraction(1), measured <= 1)


# -- rich lines --


def rich_lines(E: PointSet, k: int) -> tuple[int, list[Line]]:
    """Lines holding at least k points of E."""
    if k < 1:
        raise ValueError("k must be positive")
    led = incidence_ledger(E)
    ids = led.line_ids[led.e >= k]
    return int(ids.size), [E.space.line_from_id(int(i)) for i in ids]


def rich_sum_statistic(E: PointSet, k_lo: int, k_hi: int) -> dict:
    """sum over k_lo <= k <= k_hi of k^2 |L_{=k}|, next to |E|^2/10 (no verdict).

    An empty range (k_lo > k_hi) sums to 0.
    """
    hist = incidence_ledger(E).e_histogram()
    value = sum(k * k * c for k, c in hist.items() if k_lo <= k <= k_hi)
    return {"value": value, "reference": Fraction(len(E) ** 2, 10), "histogram": hist}


# -- small-set conjecture hunt --


@dataclass
class Witness:
    """A set whose count of centers with |pi^y E| < |E|/10 exceeds 10 q^k."""

    space: Space
    E: PointSet
    k: int
    measured: int
    profile: list[int]
    family: str = ""
    seed: int | None = None

    def to_json(self) -> dict:
        sp = self.space
        return {
            "p": sp.field.p,
            "e": sp.field.e,
            "d": sp.d,
            "k": self.k,
            "family": self.family,
            "seed": self.seed,
            "points": [list(pt) for pt in self.E],
            "measured": self.measured,
            "bound": 10 * sp.q**self.k,
            "profile": self.profile,
        }


def conjecture_in_range(E: PointSet, k: int) -> bool:
    sp = E.space
    return 1 <= k <= sp.d - 1 and sp.q ** (k - 1) < len(E) <= sp.q**k


def conjecture_count(E: PointSet, profile=None) -> int:
    prof = _profile(E, profile)
    return int(np.count_nonzero(10 * prof < len(E)))


def conjecture_scan(sets: Iterable[PointSet], k: int, family: str = "", seeds=None) -> list[Witness]:
    """Flag sets exceeding 10 q^k; each flag is recounted with the slow oracle."""
    seeds = list(seeds) if seeds is not None else None
    found = []
    for i, E in enumerate(sets):
        if not conjecture_in_range(E, k):
            continue
        measured = conjecture_count(E)
        sp = E.space
        if measured <= 10 * sp.q**k:
            continue
        oracle = [projection_size_oracle(E, y) for y in range(sp.n_points)]
        recount = sum(1 for s in oracle if 10 * s < len(E))
        if recount > 10 * sp.q**k:
            found.append(
                Witness(sp, E, k, recount, oracle, family, None if seeds is None else seeds[i])
            )
    return found


def with_meta(report: BoundReport, **meta) -> BoundReport:
    return replace(report, **meta)
