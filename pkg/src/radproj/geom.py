"""Points, projective directions and canonical lines of the affine space F_q^d.

Points pack into ``[0, q^d)`` in mixed radix q with coordinate 0 least
significant.  A direction is the scalar multiple of a nonzero vector whose
first nonzero coordinate (the pivot) is 1.  A line is stored as its direction
plus the unique point on it whose pivot coordinate is 0.

Besides the canonical key ``(packed direction, packed base)`` every line has a
dense id ``dir_rank * q^(d-1) + base_rank`` where ``base_rank`` is the packed
base with the pivot coordinate dropped.  Dense ids enumerate lines in the same
order as ``enumerate_lines``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterator, Sequence

import numpy as np

from .gf import FieldSpec, field_create

__all__ = [
    "CountingConstants",
    "Direction",
    "GeometryError",
    "Line",
    "LINE_CAP",
    "Space",
    "canonical_direction",
    "counting_constants",
    "enumerate_lines",
    "line_points",
    "line_through",
    "lines_through",
    "space",
]

LINE_CAP = 10**8
# dense (point x direction) line-id tables are cached below this many entries
_TABLE_CAP = 4_000_000

Point = tuple[int, ...]


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class Direction:
    vec: Point
    pivot: int


@dataclass(frozen=True)
class Line:
    dir: Direction
    base: Point

    def to_json(self) -> dict:
        return {"dir": list(self.dir.vec), "base": list(self.base)}


@dataclass(frozen=True)
class CountingConstants:
    qbinom: int
    lines_total: int
    points_total: int


def counting_constants(q: int, d: int) -> CountingConstants:
    qbinom = (q**d - 1) // (q - 1)
    return CountingConstants(qbinom, q ** (d - 1) * qbinom, q**d)


class Space:
    """The affine space F_q^d together with its precomputed direction data."""

    def __init__(self, field: FieldSpec, d: int):
        if d < 1:
            raise GeometryError(f"dimension must be >= 1, got {d}")
        self.field = field
        self.d = d
        self.q = field.q
        self.n_points = self.q**d
        self.counts = counting_constants(self.q, d)
        self.n_dirs = self.counts.qbinom
        self.n_lines = self.counts.lines_total
        self._radix = self.q ** np.arange(d, dtype=np.int64)

    def __repr__(self):
        return f"Space(F_{self.field.label}, d={self.d})"

    # -- packing --

    def pack(self, pt: Sequence[int]) -> int:
        if len(pt) != self.d:
            raise GeometryError(f"expected {self.d} coordinates, got {len(pt)}")
        idx = 0
        for c in reversed(pt):
            self.field.check(c)
            idx = idx * self.q + c
        return idx

    def unpack(self, idx: int) -> Point:
        if not 0 <= idx < self.n_points:
            raise GeometryError(f"packed index {idx} out of range")
        out = []
        for _ in range(self.d):
            idx, r = divmod(idx, self.q)
            out.append(r)
        return tuple(out)

    def pack_arr(self, coords: np.ndarray) -> np.ndarray:
        return coords @ self._radix

    @cached_property
    def coords(self) -> np.ndarray:
        """(q^d, d) array of every point's coordinates, in packed order."""
        idx = np.arange(self.n_points, dtype=np.int64)
        return (idx[:, None] // self._radix[None, :]) % self.q

    # -- directions --

    @cached_property
    def _dir_data(self):
        q, d = self.q, self.d
        blocks = []
        for piv in range(d):
            # coordinates after the pivot range freely, pivot = 1, before = 0
            free = d - piv - 1
            tail = np.arange(q**free, dtype=np.int64)
            vecs = np.zeros((q**free, d), dtype=np.int64)
            vecs[:, piv] = 1
            for j in range(free):
                vecs[:, piv + 1 + j] = (tail // q**j) % q
            blocks.append(vecs)
        vecs = np.concatenate(blocks)
        packed = self.pack_arr(vecs)
        order = np.argsort(packed, kind="stable")
        vecs, packed = vecs[order], packed[order]
        pivots = np.argmax(vecs != 0, axis=1)
        return vecs, packed, pivots

    @property
    def dir_vecs(self) -> np.ndarray:
        return self._dir_data[0]

    @property
    def dir_packed(self) -> np.ndarray:
        return self._dir_data[1]

    @property
    def dir_pivots(self) -> np.ndarray:
        return self._dir_data[2]

    @cached_property
    def dir_rank_of(self) -> np.ndarray:
        """Map packed vector -> rank of its direction; -1 for the zero vector."""
        out = np.full(self.n_points, -1, dtype=np.int64)
        ranks = np.arange(self.n_dirs, dtype=np.int64)
        for lam in range(1, self.q):
            scaled = self.field.mul_arr(lam, self.dir_vecs)
            out[self.pack_arr(scaled)] = ranks
        return out

    def direction(self, rank: int) -> Direction:
        return Direction(tuple(int(c) for c in self.dir_vecs[rank]), int(self.dir_pivots[rank]))

    # -- lines --

    def line_ids_through(self, pts: np.ndarray) -> np.ndarray:
        """Dense ids of every line through each packed point: shape (n, qbinom)."""
        pts = np.asarray(pts, dtype=np.int64)
        table = self._line_table
        if table is not None:
            return table[pts]
        return self._line_ids_raw(pts)

    @cached_property
    def _line_table(self) -> np.ndarray | None:
        if self.n_points * self.n_dirs > _TABLE_CAP:
            return None
        return self._line_ids_raw(np.arange(self.n_points, dtype=np.int64))

    def _line_ids_raw(self, pts: np.ndarray, chunk: int = 4096) -> np.ndarray:
        out = np.empty((len(pts), self.n_dirs), dtype=np.int64)
        vecs, pivots = self.dir_vecs, self.dir_pivots
        q = self.q
        lo_mod = q**pivots
        hi_div = q ** (pivots + 1)
        base_stride = self.q ** (self.d - 1)
        ranks = np.arange(self.n_dirs, dtype=np.int64) * base_stride
        for s in range(0, len(pts), chunk):
            x = self.coords[pts[s : s + chunk]]
            t = x[:, pivots]
            base = self.field.sub_arr(x[:, None, :], self.field.mul_arr(t[:, :, None], vecs[None, :, :]))
            full = base @ self._radix
            out[s : s + chunk] = ranks + full % lo_mod + (full // hi_div) * lo_mod
        return out

    def line_key(self, line_id: int) -> tuple[int, int]:
        """Canonical (packed direction, packed base) key of a dense line id."""
        line = self.line_from_id(line_id)
        return self.pack(line.dir.vec), self.pack(line.base)

    def line_from_id(self, line_id: int) -> Line:
        if not 0 <= line_id < self.n_lines:
            raise GeometryError(f"line id {line_id} out of range")
        stride = self.q ** (self.d - 1)
        rank, rest = divmod(int(line_id), stride)
        dr = self.direction(rank)
        base = [0] * self.d
        for k in range(self.d):
            if k != dr.pivot:
                rest, base[k] = divmod(rest, self.q)
        return Line(dr, tuple(base))

    def line_id(self, line: Line) -> int:
        rank = int(np.searchsorted(self.dir_packed, self.pack(line.dir.vec)))
        if rank >= self.n_dirs or int(self.dir_packed[rank]) != self.pack(line.dir.vec):
            raise GeometryError(f"{line.dir.vec} is not a canonical direction")
        if line.base[line.dir.pivot] != 0:
            raise GeometryError("line base must vanish at the direction pivot")
        rest = 0
        for k in reversed(range(self.d)):
            if k != line.dir.pivot:
                rest = rest * self.q + line.base[k]
        return rank * self.q ** (self.d - 1) + rest

    def line_point_ids(self, line_id: int) -> np.ndarray:
        """Packed points of a line in t-order, t = 0..q-1."""
        line = self.line_from_id(line_id)
        t = np.arange(self.q, dtype=np.int64)
        vec = np.asarray(line.dir.vec, dtype=np.int64)
        base = np.asarray(line.base, dtype=np.int64)
        pts = self.field.add_arr(base[None, :], self.field.mul_arr(t[:, None], vec[None, :]))
        return self.pack_arr(pts)


@lru_cache(maxsize=32)
def space(p: int, e: int, d: int) -> Space:
    return Space(field_create(p, e), d)


def canonical_direction(field: FieldSpec, v: Sequence[int]) -> Direction:
    for pivot, c in enumerate(v):
        if c:
            break
    else:
        raise GeometryError("the zero vector has no direction")
    s = field.inv(c)
    return Direction(tuple(field.mul(s, x) for x in v), pivot)


def line_through(sp: Space, p1: Sequence[int], p2: Sequence[int]) -> Line:
    p1, p2 = tuple(p1), tuple(p2)
    if p1 == p2:
        raise GeometryError("a line needs two distinct points")
    f = sp.field
    dr = canonical_direction(f, [f.sub(b, a) for a, b in zip(p1, p2)])
    t = p1[dr.pivot]
    base = tuple(f.sub(a, f.mul(t, u)) for a, u in zip(p1, dr.vec))
    return Line(dr, base)


def line_points(sp: Space, line: Line) -> list[Point]:
    f = sp.field
    return [
        tuple(f.add(b, f.mul(t, u)) for b, u in zip(line.base, line.dir.vec))
        for t in range(sp.q)
    ]


def lines_through(sp: Space, y: Sequence[int]) -> list[Line]:
    ids = sp.line_ids_through(np.array([sp.pack(y)]))[0]
    return [sp.line_from_id(int(i)) for i in ids]


def enumerate_lines(sp: Space) -> Iterator[Line]:
    if sp.n_lines > LINE_CAP:
        raise GeometryError(f"{sp.n_lines} lines exceeds enumeration cap {LINE_CAP}")
    stride = sp.q ** (sp.d - 1)
    rest = np.arange(stride, dtype=np.int64)
    for rank in range(sp.n_dirs):
        dr = sp.direction(rank)
        # bases in id order: the free coordinates read off ``rest`` in base q
        bases = np.zeros((stride, sp.d), dtype=np.int64)
        free = [k for k in range(sp.d) if k != dr.pivot]
        for j, k in enumerate(free):
            bases[:, k] = (rest // sp.q**j) % sp.q
        for b in bases.tolist():
            yield Line(dr, tuple(b))
