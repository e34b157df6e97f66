import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from radproj.geom import (
    Direction,
    GeometryError,
    Line,
    canonical_direction,
    counting_constants,
    enumerate_lines,
    line_points,
    line_through,
    lines_through,
    space,
)
from radproj.gf import field_create


def test_canonical_direction_examples():
    f3 = field_create(3)
    assert canonical_direction(f3, (0, 2)) == Direction((0, 1), 1)
    assert canonical_direction(f3, (2, 1)) == Direction((1, 2), 0)
    with pytest.raises(GeometryError):
        canonical_direction(field_create(5), (0, 0))


@pytest.mark.parametrize("p,e,d", [(3, 1, 2), (2, 2, 3), (5, 1, 2), (3, 2, 2)])
def test_canonical_direction_scale_invariant(p, e, d):
    sp = space(p, e, d)
    f = sp.field
    for v in itertools.islice(itertools.product(range(sp.q), repeat=d), 1, 200):
        ref = canonical_direction(f, v)
        assert ref.vec[ref.pivot] == 1 and not any(ref.vec[: ref.pivot])
        for lam in range(1, sp.q):
            assert canonical_direction(f, [f.mul(lam, c) for c in v]) == ref


def test_line_through_examples():
    sp = space(3, 1, 2)
    line = line_through(sp, (0, 0), (2, 1))
    assert line == Line(Direction((1, 2), 0), (0, 0))
    assert set(line_points(sp, line)) == {(0, 0), (1, 2), (2, 1)}
    assert line_through(sp, (1, 1), (1, 2)) == Line(Direction((0, 1), 1), (1, 0))
    assert line_through(sp, (2, 1), (0, 0)) == line
    with pytest.raises(GeometryError):
        line_through(sp, (1, 1), (1, 1))


def test_line_points_examples():
    sp = space(2, 1, 2)
    assert line_points(sp, Line(Direction((1, 0), 0), (0, 0))) == [(0, 0), (1, 0)]
    sp3 = space(3, 1, 2)
    assert line_points(sp3, Line(Direction((1, 2), 0), (0, 0))) == [(0, 0), (1, 2), (2, 1)]


@pytest.mark.parametrize("p,e,d,expected", [(3, 1, 2, 12), (2, 1, 3, 28), (5, 1, 3, 775), (2, 2, 2, 20)])
def test_enumeration_counts(p, e, d, expected):
    sp = space(p, e, d)
    lines = list(enumerate_lines(sp))
    assert len(lines) == len(set(lines)) == expected == sp.n_lines


@pytest.mark.parametrize("p,e,d,n", [(3, 1, 2, 4), (2, 1, 3, 7), (5, 1, 2, 6)])
def test_lines_through_counts(p, e, d, n):
    sp = space(p, e, d)
    for y in itertools.islice(itertools.product(range(sp.q), repeat=d), 0, None, 3):
        lines = lines_through(sp, y)
        assert len(set(lines)) == n
        assert all(y in line_points(sp, ln) for ln in lines)


def test_pencil_at_origin_f5():
    sp = space(5, 1, 2)
    lines = lines_through(sp, (0, 0))
    assert all(ln.base == (0, 0) for ln in lines)


def test_counting_constants():
    c = counting_constants(3, 2)
    assert (c.qbinom, c.lines_total, c.points_total) == (4, 12, 9)


def test_line_json():
    assert Line(Direction((1, 2), 0), (0, 0)).to_json() == {"dir": [1, 2], "base": [0, 0]}


def test_id_key_roundtrip():
    sp = space(3, 2, 2)
    for i, line in enumerate(enumerate_lines(sp)):
        assert sp.line_id(line) == i
        assert sp.line_key(i) == (sp.pack(line.dir.vec), sp.pack(line.base))
        assert sorted(sp.line_point_ids(i).tolist()) == sorted(sp.pack(pt) for pt in line_points(sp, line))


def test_enumeration_order_is_by_packed_key():
    sp = space(3, 1, 3)
    keys = [(sp.pack(ln.dir.vec), sp.pack(ln.base)) for ln in enumerate_lines(sp)]
    assert keys == sorted(keys)


@pytest.mark.parametrize("p,e,d", [(3, 1, 2), (2, 1, 4), (5, 1, 2), (2, 2, 2), (3, 1, 3), (7, 1, 2)])
def test_pencil_partition_exhaustive(p, e, d):
    sp = space(p, e, d)
    ids = sp.line_ids_through(np.arange(sp.n_points))
    for y in range(sp.n_points):
        pts = [sp.line_point_ids(int(i)) for i in ids[y]]
        assert all(y in P for P in pts)
        union = np.concatenate([P[P != y] for P in pts])
        # lines through y cover everything else exactly once
        assert sorted(union.tolist()) == [x for x in range(sp.n_points) if x != y]


def test_unique_line_axiom():
    rng = np.random.default_rng(7)
    for p, e, d in [(5, 1, 2), (3, 1, 3), (7, 1, 2), (2, 2, 3), (3, 2, 2)]:
        sp = space(p, e, d)
        through = sp.line_ids_through(np.arange(sp.n_points))
        for _ in range(2000):
            a, b = rng.choice(sp.n_points, size=2, replace=False)
            line = line_through(sp, sp.unpack(int(a)), sp.unpack(int(b)))
            lid = sp.line_id(line)
            pts = line_points(sp, line)
            assert sp.unpack(int(a)) in pts and sp.unpack(int(b)) in pts
            shared = np.intersect1d(through[a], through[b])
            assert shared.tolist() == [lid]


@settings(max_examples=300, deadline=None)
@given(st.sampled_from([(3, 1, 2), (5, 1, 3), (2, 3, 2), (11, 1, 2)]), st.data())
def test_canonical_form_idempotent(pe, data):
    sp = space(*pe)
    a, b = data.draw(
        st.lists(st.integers(0, sp.n_points - 1), min_size=2, max_size=2, unique=True)
    )
    line = line_through(sp, sp.unpack(a), sp.unpack(b))
    pts = line_points(sp, line)
    i, j = data.draw(st.lists(st.integers(0, sp.q - 1), min_size=2, max_size=2, unique=True))
    assert line_through(sp, pts[i], pts[j]) == line
    assert line.base[line.dir.pivot] == 0


def test_pack_unpack():
    sp = space(5, 1, 3)
    for idx in range(sp.n_points):
        assert sp.pack(sp.unpack(idx)) == idx
    assert sp.pack((1, 0, 0)) == 1 and sp.pack((0, 1, 0)) == 5
    with pytest.raises(GeometryError):
        sp.pack((1, 2))
    with pytest.raises(GeometryError):
        sp.unpack(125)


def test_dimension_must_be_positive():
    with pytest.raises(GeometryError):
        space(3, 1, 0)
