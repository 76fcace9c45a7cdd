import itertools

import pytest
from hypothesis import given, strategies as st

from tensorlattice.errors import CoverageError, MismatchError, OverlapError, RangeError, SizeError
from tensorlattice.partitions import (
    Partition,
    canonicalize,
    cover_edges,
    enumerate_level,
    enumerate_partitions,
    is_refinement,
    meet,
    upper_cone,
)


def bell_triangle(n):
    row = [1]
    bells = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for v in row:
            nxt.append(nxt[-1] + v)
        row = nxt
        bells.append(row[0])
    return bells


def stirling2(n, k):
    if n == k:
        return 1
    if k == 0 or k > n:
        return 0
    return k * stirling2(n - 1, k) + stirling2(n - 1, k - 1)


def brute_force_partitions(k):
    """Every labelling of modes, deduplicated as frozensets of blocks."""
    seen = set()
    for labels in itertools.product(range(k), repeat=k):
        blocks = {}
        for mode, lab in enumerate(labels, start=1):
            blocks.setdefault(lab, set()).add(mode)
        seen.add(frozenset(frozenset(b) for b in blocks.values()))
    return seen


def P(text, k=None):
    return Partition.parse(text, k)


def test_canonicalize_examples():
    p = canonicalize(4, [{2, 3}, {1, 4}])
    assert p.blocks == ((1, 4), (2, 3))
    assert p.rgs == (0, 1, 1, 0)
    bottom = canonicalize(4, [{1}, {2}, {3}, {4}])
    assert bottom == Partition.bottom(4)
    assert bottom.rgs == (0, 1, 2, 3)
    with pytest.raises(OverlapError):
        canonicalize(3, [{1, 2}, {2, 3}])


def test_canonicalize_errors():
    with pytest.raises(CoverageError):
        canonicalize(3, [{1, 2}])
    with pytest.raises(RangeError):
        canonicalize(3, [{1, 2}, {3, 4}])
    with pytest.raises(RangeError):
        canonicalize(2, [{1, 2}, set()])


def test_canonicalize_is_idempotent():
    for p in enumerate_partitions(5):
        assert canonicalize(p.k, p.blocks) == p
        assert Partition.from_rgs(p.rgs) == p


def test_parse_grammar():
    assert P("1,2|3,4").blocks == ((1, 2), (3, 4))
    assert str(P("1,4|2,3")) == "1,4|2,3"
    with pytest.raises(RangeError):
        P("2,3|1,4")
    with pytest.raises(RangeError):
        P("1;2")


@pytest.mark.parametrize("k, count", [(1, 1), (3, 5), (4, 15)])
def test_enumerate_counts(k, count):
    assert len(enumerate_partitions(k)) == count


def test_enumerate_k1():
    assert [p.blocks for p in enumerate_partitions(1)] == [((1,),)]


def test_enumerate_matches_bell_and_brute_force():
    bells = bell_triangle(8)
    for k in range(1, 9):
        parts = enumerate_partitions(k)
        assert len(parts) == bells[k]
        assert sum(len(enumerate_level(k, l)) for l in range(1, k + 1)) == bells[k]
    for k in range(1, 6):
        got = {frozenset(frozenset(b) for b in p.blocks) for p in enumerate_partitions(k)}
        assert got == brute_force_partitions(k)


def test_enumeration_order_is_lexicographic_rgs():
    rgs = [p.rgs for p in enumerate_partitions(5)]
    assert rgs == sorted(rgs)
    assert len(set(rgs)) == len(rgs)


def test_enumerate_guard():
    with pytest.raises(SizeError):
        enumerate_partitions(13)
    with pytest.raises(SizeError):
        enumerate_partitions(0)


def test_enumerate_level_examples():
    assert len(enumerate_level(4, 2)) == 7
    assert enumerate_level(4, 4) == [Partition.bottom(4)]
    brute = sum(1 for p in brute_force_partitions(5) if len(p) == 3)
    assert brute == 25
    assert len(enumerate_level(5, 3)) == brute
    for k in range(1, 7):
        for l in range(1, k + 1):
            assert len(enumerate_level(k, l)) == stirling2(k, l)
    with pytest.raises(RangeError):
        enumerate_level(4, 5)


def test_refinement_examples():
    assert is_refinement(P("1|2|3,4"), P("1,2|3,4"))
    assert not is_refinement(P("1,4|2,3"), P("1,3,4|2"))
    assert not is_refinement(P("1,3,4|2"), P("1,4|2,3"))
    for p in enumerate_partitions(4):
        assert is_refinement(p, Partition.top(4))
        assert is_refinement(Partition.bottom(4), p)
    with pytest.raises(MismatchError):
        is_refinement(Partition.bottom(3), Partition.bottom(4))


def test_meet_examples():
    assert meet(P("1,4|2,3"), P("1,3,4|2")) == P("1,4|2|3")
    for p in enumerate_partitions(4):
        assert meet(p, Partition.top(4)) == p
        assert meet(p, Partition.bottom(4)) == Partition.bottom(4)
    with pytest.raises(MismatchError):
        meet(Partition.top(2), Partition.top(3))


def test_meet_lattice_laws_exhaustive():
    for k in range(1, 6):
        parts = enumerate_partitions(k)
        for a in parts:
            assert meet(a, a) == a
            for b in parts:
                m = meet(a, b)
                assert m == meet(b, a)
                assert is_refinement(m, a) and is_refinement(m, b)
                if k <= 4:
                    # greatest lower bound
                    for c in parts:
                        if is_refinement(c, a) and is_refinement(c, b):
                            assert is_refinement(c, m)
                    for c in parts:
                        assert meet(meet(a, b), c) == meet(a, meet(b, c))


def test_cover_edges_examples():
    parts3 = enumerate_partitions(3)
    brute = [
        (a, b)
        for a in parts3
        for b in parts3
        if is_refinement(a, b) and a.level == b.level + 1
    ]
    assert len(brute) == 6
    assert set(cover_edges(3)) == set(brute)
    assert cover_edges(2) == [(Partition.bottom(2), Partition.top(2))]
    for a, b in cover_edges(4):
        assert is_refinement(a, b) and a.level == b.level + 1


def test_refinement_equals_path_existence():
    for k in range(1, 6):
        parts = enumerate_partitions(k)
        up = {p: set() for p in parts}
        for a, b in cover_edges(k):
            up[a].add(b)
        reach = {}
        for p in sorted(parts, key=lambda q: q.level):
            r = {p}
            for c in up[p]:
                r |= reach[c]
            reach[p] = r
        for a in parts:
            for b in parts:
                assert is_refinement(a, b) == (b in reach[a])


def test_upper_cone_examples():
    assert upper_cone(Partition.top(4)) == []
    assert len(upper_cone(Partition.bottom(3))) == 4
    base = P("1,2|3|4")
    brute = [t for t in enumerate_partitions(4) if is_refinement(base, t) and t.level > 1]
    assert upper_cone(base) == brute
    assert len(brute) == 4
    assert base in upper_cone(base)


def test_upper_cone_membership_exhaustive():
    parts = enumerate_partitions(4)
    for s in parts:
        cone = set(upper_cone(s))
        for t in parts:
            assert (t in cone) == (is_refinement(s, t) and t != Partition.top(4))


@st.composite
def rgs_strings(draw, max_k=9):
    k = draw(st.integers(1, max_k))
    out, top = [0], 0
    for _ in range(k - 1):
        v = draw(st.integers(0, top + 1))
        out.append(v)
        top = max(top, v)
    return out


@given(rgs_strings())
def test_rgs_round_trip(rgs):
    p = Partition.from_rgs(rgs)
    assert list(p.rgs) == rgs
    assert p.level == 1 + max(rgs)
    assert canonicalize(p.k, p.blocks) == p
    assert Partition.parse(str(p), p.k) == p
    mins = [b[0] for b in p.blocks]
    assert mins == sorted(mins) and len(set(mins)) == len(mins)
    flat = sorted(m for b in p.blocks for m in b)
    assert flat == list(range(1, p.k + 1))
