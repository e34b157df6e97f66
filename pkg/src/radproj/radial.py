"""Radial projections, exceptional sets and the per-line incidence ledger.

For a center y the radial projection of E is the set of lines through y that
meet E \\ {y}; only its size matters here.  ``projection_size`` buckets the
differences x - y by canonical direction.  ``projection_size_oracle``
deliberately takes the slow road through ``geom.line_through`` so the two can
be checked against each other.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import ceil, floor
from numbers import Rational
from typing import Iterable, Iterator, Sequence

import numpy as np

from .geom import Space, line_through

__all__ = [
    "IncidenceLedger",
    "PointSet",
    "exceptional_set",
    "exceptional_from_profile",
    "incidence_ledger",
    "projection_profile",
    "projection_size",
    "projection_size_oracle",
    "subset_profiles",
]


@dataclass(frozen=True, eq=False)
class PointSet:
    """A set of points of ``space``, held as sorted packed indices."""

    space: Space
    idx: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.unique(np.asarray(self.idx, dtype=np.int64))
        if arr.size and (arr[0] < 0 or arr[-1] >= self.space.n_points):
            raise ValueError("packed point index out of range")
        arr.setflags(write=False)
        object.__setattr__(self, "idx", arr)

    @classmethod
    def from_points(cls, sp: Space, points: Iterable[Sequence[int]]) -> "PointSet":
        return cls(sp, [sp.pack(pt) for pt in points])

    @classmethod
    def empty(cls, sp: Space) -> "PointSet":
        return cls(sp, [])

    @classmethod
    def full(cls, sp: Space) -> "PointSet":
        return cls(sp, np.arange(sp.n_points))

    @cached_property
    def members(self) -> frozenset[int]:
        return frozenset(int(i) for i in self.idx)

    @cached_property
    def mask(self) -> np.ndarray:
        m = np.zeros(self.space.n_points, dtype=bool)
        m[self.idx] = True
        return m

    def __len__(self):
        return int(self.idx.size)

    def __contains__(self, pt) -> bool:
        i = pt if isinstance(pt, (int, np.integer)) else self.space.pack(pt)
        return int(i) in self.members

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        return (self.space.unpack(int(i)) for i in self.idx)

    def __eq__(self, other):
        if not isinstance(other, PointSet):
            return NotImplemented
        return self.space is other.space and np.array_equal(self.idx, other.idx)

    def __hash__(self):
        return hash((id(self.space), self.idx.tobytes()))

    def __le__(self, other: "PointSet") -> bool:
        return self.members <= other.members

    def union(self, other: "PointSet") -> "PointSet":
        return PointSet(self.space, np.concatenate([self.idx, other.idx]))

    def intersection(self, other: "PointSet") -> "PointSet":
        return PointSet(self.space, np.intersect1d(self.idx, other.idx))

    def coords(self) -> np.ndarray:
        return self.space.coords[self.idx]

    def to_json(self) -> list[int]:
        return [int(i) for i in self.idx]

    def to_text(self) -> str:
        return "".join(" ".join(map(str, pt)) + "\n" for pt in self)

    @classmethod
    def from_text(cls, sp: Space, text: str) -> "PointSet":
        pts = []
        for raw in text.splitlines():
            raw = raw.split("#", 1)[0].strip()
            if raw:
                pts.append(tuple(int(tok) for tok in raw.split()))
        return cls.from_points(sp, pts)


def _as_index(sp: Space, y) -> int:
    if isinstance(y, (int, np.integer)):
        return int(y)
    return sp.pack(y)


def _direction_ranks(sp: Space, centers: np.ndarray, pts: np.ndarray) -> np.ndarray:
    """Direction rank of x - y for every (center y, point x); -1 when x == y."""
    f = sp.field
    diff = f.sub_arr(sp.coords[pts][None, :, :], sp.coords[centers][:, None, :])
    return sp.dir_rank_of[sp.pack_arr(diff)]


def projection_size(E: PointSet, y) -> int:
    """|pi^y(E)|: distinct directions from y to the points of E \\ {y}."""
    sp = E.space
    if not len(E):
        return 0
    ranks = _direction_ranks(sp, np.array([_as_index(sp, y)]), E.idx)[0]
    ranks = ranks[ranks >= 0]
    return int(np.unique(ranks).size)


def projection_size_oracle(E: PointSet, y) -> int:
    """Same value as ``projection_size``, by building each line y x explicitly."""
    sp = E.space
    y = sp.unpack(_as_index(sp, y))
    lines = {line_through(sp, y, x) for x in E if x != y}
    return len(lines)


def projection_profile(E: PointSet, method: str = "auto", chunk: int = 2048) -> np.ndarray:
    """|pi^y(E)| for every center y of the space, indexed by packed y.

    ``method="directions"`` buckets differences by direction, O(q^d |E| d).
    ``method="lines"`` counts per-line occupancy and reads it back through the
    point/line table, O(q^d qbinom): a line through y counts when it holds a
    point of E other than y.
    """
    sp = E.space
    n = len(E)
    out = np.zeros(sp.n_points, dtype=np.int64)
    if n == 0:
        return out
    if method == "auto":
        cheap_table = sp.n_points * sp.n_dirs <= 4_000_000
        method = "lines" if cheap_table and n * sp.d > sp.n_dirs else "directions"
    if method == "lines":
        e = np.bincount(sp.line_ids_through(E.idx).ravel(), minlength=sp.n_lines)
        for s in range(0, sp.n_points, chunk):
            ys = np.arange(s, min(s + chunk, sp.n_points))
            occ = e[sp.line_ids_through(ys)]
            need = 1 + E.mask[ys].astype(np.int64)
            out[ys] = (occ >= need[:, None]).sum(axis=1)
        return out
    if method != "directions":
        raise ValueError(f"unknown method {method!r}")
    step = max(1, chunk * 16 // max(n, 1))
    for s in range(0, sp.n_points, step):
        ys = np.arange(s, min(s + step, sp.n_points))
        ranks = _direction_ranks(sp, ys, E.idx)
        hits = np.zeros((len(ys), sp.n_dirs + 1), dtype=bool)
        hits[np.arange(len(ys))[:, None], ranks + 1] = True
        out[ys] = hits[:, 1:].sum(axis=1)
    return out


def _threshold(M, strict: bool) -> int:
    """Largest integer size s with s <= M (or s < M when strict)."""
    if not isinstance(M, (int, Rational)):
        raise TypeError(f"threshold must be an exact rational, got {type(M).__name__}")
    M = Fraction(M)
    if M < 0:
        raise ValueError("threshold must be non-negative")
    return ceil(M) - 1 if strict else floor(M)


def exceptional_from_profile(sp: Space, profile: np.ndarray, M, strict: bool = False) -> "PointSet":
    return PointSet(sp, np.flatnonzero(profile <= _threshold(M, strict)))


def exceptional_set(E: PointSet, M, strict: bool = False, profile: np.ndarray | None = None) -> PointSet:
    """All centers y with |pi^y(E)| <= M, or < M when ``strict``.

    M may be any exact rational; the integer projection size is compared
    against it directly, without rounding M first.
    """
    if profile is None:
        profile = projection_profile(E)
    return exceptional_from_profile(E.space, profile, M, strict)


@dataclass(frozen=True, eq=False)
class IncidenceLedger:
    """Per-line counts e = |line & E| and t = |line & T| over the lines meeting E or T.

    Lines missing both sets have e = t = 0 and are not stored; every sum of a
    function vanishing at (0, 0) over all lines is therefore a sum over the
    stored lines.
    """

    space: Space
    size_E: int
    size_T: int
    line_ids: np.ndarray
    e: np.ndarray
    t: np.ndarray

    def __len__(self):
        return int(self.line_ids.size)

    @property
    def n_empty(self) -> int:
        return self.space.n_lines - len(self)

    def select(self, family: str = "G") -> np.ndarray:
        """Boolean mask of the stored lines belonging to a named family.

        Families: ``G`` (all), ``L`` (e >= 1 and t >= 1), ``e>=k``, ``e=k``,
        ``t>k``, ``t=k``, and ``&``-joined combinations such as ``L&e>=2&t>1``.
        """
        mask = np.ones(len(self), dtype=bool)
        for term in family.split("&"):
            term = term.strip()
            if term == "G":
                continue
            if term == "L":
                mask &= (self.e >= 1) & (self.t >= 1)
                continue
            for op in (">=", "<=", ">", "<", "="):
                if op in term:
                    name, val = term.split(op)
                    break
            else:
                raise ValueError(f"bad line family {family!r}")
            col = {"e": self.e, "t": self.t}[name.strip()]
            v = int(val)
            mask &= {
                ">=": col >= v,
                "<=": col <= v,
                ">": col > v,
                "<": col < v,
                "=": col == v,
            }[op]
        return mask

    def sum_et(self, family: str = "G") -> int:
        m = self.select(family)
        return int(np.dot(self.e[m], self.t[m]))

    def sum_e2(self, family: str = "G") -> int:
        m = self.select(family)
        return int(np.dot(self.e[m], self.e[m]))

    def sum_t2(self, family: str = "G") -> int:
        m = self.select(family)
        return int(np.dot(self.t[m], self.t[m]))

    def sum_e(self, family: str = "G") -> int:
        return int(self.e[self.select(family)].sum())

    def sum_t(self, family: str = "G") -> int:
        return int(self.t[self.select(family)].sum())

    def count(self, family: str = "G") -> int:
        if family == "G":
            return self.space.n_lines
        return int(self.select(family).sum())

    @property
    def max_e(self) -> int:
        return int(self.e.max()) if len(self) else 0

    def e_histogram(self) -> dict[int, int]:
        """|L_{=k}| for every k >= 1 that occurs."""
        ks, counts = np.unique(self.e[self.e > 0], return_counts=True)
        return {int(k): int(c) for k, c in zip(ks, counts)}

    def items(self) -> Iterator[tuple[tuple[int, int], int, int]]:
        for i, e, t in zip(self.line_ids, self.e, self.t):
            yield self.space.line_key(int(i)), int(e), int(t)


def _line_counts(sp: Space, S: PointSet) -> tuple[np.ndarray, np.ndarray]:
    if not len(S):
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    return np.unique(sp.line_ids_through(S.idx).ravel(), return_counts=True)


def incidence_ledger(E: PointSet, T: PointSet | None = None) -> IncidenceLedger:
    sp = E.space
    if T is None:
        T = PointSet.empty(sp)
    if T.space is not sp:
        raise ValueError("E and T live in different spaces")
    e_ids, e_cnt = _line_counts(sp, E)
    t_ids, t_cnt = _line_counts(sp, T)
    ids = np.union1d(e_ids, t_ids)
    e = np.zeros(ids.size, dtype=np.int64)
    t = np.zeros(ids.size, dtype=np.int64)
    e[np.searchsorted(ids, e_ids)] = e_cnt
    t[np.searchsorted(ids, t_ids)] = t_cnt
    return IncidenceLedger(sp, len(E), len(T), ids, e, t)


def subset_profiles(sp: Space, subsets: np.ndarray) -> np.ndarray:
    """Projection profiles of many subsets at once, for spaces with q^d <= 64.

    ``subsets`` holds bitmasks (bit i set = packed point i present).  Returns
    an array of shape (len(subsets), q^d) with |pi^y(S)| at [s, y].
    """
    if sp.n_points > 64:
        raise ValueError("bitmask profiles need at most 64 points")
    subsets = np.asarray(subsets, dtype=np.uint64)
    table = sp.line_ids_through(np.arange(sp.n_points))
    line_masks = np.zeros(sp.n_lines, dtype=np.uint64)
    for y in range(sp.n_points):
        line_masks[table[y]] |= np.uint64(1 << y)
    out = np.zeros((subsets.size, sp.n_points), dtype=np.int16)
    for y in range(sp.n_points):
        own = np.uint64(1 << y)
        for lid in table[y]:
            punctured = line_masks[lid] & ~own
            out[:, y] += (subsets & punctured) != 0
    return out
