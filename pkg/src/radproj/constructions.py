"""Point-set families: extremal examples, sharpness witnesses and random fodder."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np

from .geom import Space, space
from .gf import subfield_elements
from .radial import PointSet

__all__ = [
    "FAMILY_KINDS",
    "FamilySpec",
    "GenerationError",
    "affine_subspace_set",
    "collinear_set",
    "concurrent_lines_set",
    "generate",
    "max_collinear",
    "product_set",
    "random_set",
    "subfield_subplane",
]

FAMILY_KINDS = ("subspace", "subplane", "collinear", "concurrent_lines", "random", "product")


class GenerationError(RuntimeError):
    pass


def affine_subspace_set(sp: Space, k: int, shift: Sequence[int] | None = None) -> PointSet:
    """The q^k points spanned by the first k axes, translated by ``shift``."""
    if not 0 <= k <= sp.d:
        raise ValueError(f"subspace dimension {k} outside [0, {sp.d}]")
    shift = np.zeros(sp.d, dtype=np.int64) if shift is None else np.asarray(shift, dtype=np.int64)
    if shift.shape != (sp.d,):
        raise ValueError("shift has the wrong dimension")
    # packed indices below q^k are exactly the points with coords k.. zero
    pts = sp.coords[: sp.q**k]
    return PointSet(sp, sp.pack_arr(sp.field.add_arr(pts, shift[None, :])))


def subfield_subplane(p: int) -> PointSet:
    """The copy of F_p^2 inside F_{p^2}^2 cut out by the prime subfield."""
    sp = space(p, 2, 2)
    sub = sorted(subfield_elements(sp.field))
    return PointSet.from_points(sp, [(a, b) for a in sub for b in sub])


def collinear_set(sp: Space, n: int) -> PointSet:
    """n points on the first coordinate axis."""
    if not 0 <= n <= sp.q:
        raise ValueError(f"a line holds at most {sp.q} points")
    return PointSet(sp, np.arange(n))


def concurrent_lines_set(
    sp: Space, m: int, apex: Sequence[int] | None = None, include_apex: bool = True
) -> PointSet:
    """Union of the first m canonical lines through ``apex``."""
    if not 1 <= m <= sp.n_dirs:
        raise ValueError(f"m must lie in [1, {sp.n_dirs}]")
    apex_idx = 0 if apex is None else sp.pack(apex)
    ids = sp.line_ids_through(np.array([apex_idx]))[0][:m]
    pts = np.concatenate([sp.line_point_ids(int(i)) for i in ids])
    if not include_apex:
        pts = pts[pts != apex_idx]
    return PointSet(sp, pts)


def max_collinear(E: PointSet) -> int:
    """max over lines of |line & E|."""
    if not len(E):
        return 0
    return int(np.bincount(E.space.line_ids_through(E.idx).ravel()).max())


def random_set(
    sp: Space,
    n: int,
    seed: int | np.random.Generator,
    max_collinear_cap: int | None = None,
    max_tries: int = 10_000,
) -> PointSet:
    """Random n-subset.

    Without a cap the subset is uniform.  With a cap, points are drawn one at
    a time in uniformly random order and a point is rejected when it would
    put more than ``max_collinear_cap`` points on some line; a dead end
    restarts the draw, up to ``max_tries`` times.
    """
    if not 0 <= n <= sp.n_points:
        raise ValueError(f"cannot draw {n} of {sp.n_points} points")
    rng = np.random.default_rng(seed)
    if max_collinear_cap is None or max_collinear_cap >= min(n, sp.q):
        return PointSet(sp, rng.choice(sp.n_points, size=n, replace=False))
    cap = int(max_collinear_cap)
    if cap < 1 and n > 0:
        raise GenerationError("a nonempty set needs cap >= 1")
    for _ in range(max_tries):
        occupancy = np.zeros(sp.n_lines, dtype=np.int64)
        chosen = []
        for x in rng.permutation(sp.n_points):
            if len(chosen) == n:
                break
            ids = sp.line_ids_through(np.array([x]))[0]
            if occupancy[ids].max() < cap:
                occupancy[ids] += 1
                chosen.append(x)
        if len(chosen) == n:
            return PointSet(sp, chosen)
    raise GenerationError(
        f"no {n}-point set with at most {max_collinear_cap} per line after {max_tries} draws"
    )


def product_set(sp: Space, A: Iterable[int], B: Iterable[int]) -> PointSet:
    if sp.d != 2:
        raise ValueError("product sets live in the plane")
    A, B = sorted(set(A)), sorted(set(B))
    if not A or not B:
        raise ValueError("product set factors must be nonempty")
    return PointSet.from_points(sp, [(a, b) for a in A for b in B])


@dataclass(frozen=True)
class FamilySpec:
    """A named family plus its parameters, e.g. ``FamilySpec("random", {"n": 12})``.

    Parameters by kind: subspace ``k`` (optional ``shift``); subplane none
    (the space must be F_{p^2}^2); collinear ``n``; concurrent_lines ``m``,
    ``include_apex``; random ``n`` (int or [lo, hi]) and optional ``cap``;
    product ``m``, ``n`` (sizes of random factors).
    """

    kind: str
    params: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in FAMILY_KINDS:
            raise ValueError(f"unknown family kind {self.kind!r}")

    def validate(self, sp: Space) -> None:
        p = self.params
        if self.kind == "subspace":
            if not 0 <= int(p.get("k", 1)) <= sp.d:
                raise ValueError(f"subspace k={p.get('k')} out of range for d={sp.d}")
        elif self.kind == "subplane":
            if sp.field.e != 2 or sp.d != 2:
                raise ValueError("subplane family needs the space F_{p^2}^2")
        elif self.kind == "collinear":
            if not 0 <= int(p.get("n", sp.q)) <= sp.q:
                raise ValueError("collinear n exceeds q")
        elif self.kind == "concurrent_lines":
            if not 1 <= int(p.get("m", 1)) <= sp.n_dirs:
                raise ValueError("concurrent_lines m out of range")
        elif self.kind == "random":
            lo, hi = self.size_range(sp)
            if not 0 <= lo <= hi <= sp.n_points:
                raise ValueError(f"random size range [{lo}, {hi}] infeasible in {sp}")
        elif self.kind == "product":
            if sp.d != 2:
                raise ValueError("product family needs d = 2")
            if not (1 <= int(p.get("m", 2)) <= sp.q and 1 <= int(p.get("n", 2)) <= sp.q):
                raise ValueError("product factor sizes must lie in [1, q]")

    def size_range(self, sp: Space) -> tuple[int, int]:
        n = self.params.get("n", [1, sp.n_points])
        if isinstance(n, (list, tuple)):
            return int(n[0]), int(n[1])
        return int(n), int(n)

    def label(self) -> str:
        if not self.params:
            return self.kind
        def fmt(v):
            return ":".join(map(str, v)) if isinstance(v, (list, tuple)) else str(v)

        inner = ",".join(f"{k}={fmt(v)}" for k, v in sorted(self.params.items()))
        return f"{self.kind}({inner})"

    def to_json(self) -> dict:
        return {"kind": self.kind, **self.params}


def generate(sp: Space, family: FamilySpec, seed: int) -> PointSet:
    """One member of ``family`` in ``sp``; deterministic in ``seed``."""
    family.validate(sp)
    p = family.params
    rng = np.random.default_rng(seed)
    kind = family.kind
    if kind == "subspace":
        return affine_subspace_set(sp, int(p.get("k", 1)), p.get("shift"))
    if kind == "subplane":
        return subfield_subplane(sp.field.p)
    if kind == "collinear":
        return collinear_set(sp, int(p.get("n", sp.q)))
    if kind == "concurrent_lines":
        return concurrent_lines_set(sp, int(p.get("m", 1)), include_apex=bool(p.get("include_apex", True)))
    if kind == "random":
        lo, hi = family.size_range(sp)
        n = int(rng.integers(lo, hi + 1))
        return random_set(sp, n, rng, p.get("cap"))
    if kind == "product":
        A = rng.choice(sp.q, size=int(p.get("m", 2)), replace=False)
        B = rng.choice(sp.q, size=int(p.get("n", 2)), replace=False)
        return product_set(sp, A.tolist(), B.tolist())
    raise AssertionError(kind)
