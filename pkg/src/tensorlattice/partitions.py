"""Set partitions of the mode set {1, ..., k} and the refinement lattice.

Partitions are stored canonically: elements ascend within a block and blocks
are ordered by their smallest element. The restricted-growth string (RGS) of a
partition assigns to each mode the 0-based index of its block, so the
canonical block order is exactly the RGS labelling.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence

from .errors import (
    CoverageError,
    MismatchError,
    OrderError,
    OverlapError,
    RangeError,
    SizeError,
)

MAX_ORDER = 12


@dataclass(frozen=True)
class Partition:
    """A canonical set partition of ``{1, ..., k}``.

    Use :func:`canonicalize`, :meth:`from_rgs` or :meth:`parse` to build one;
    the constructor assumes its ``blocks`` are already canonical.
    """

    k: int
    blocks: tuple[tuple[int, ...], ...]

    @classmethod
    def from_rgs(cls, rgs: Sequence[int]) -> "Partition":
        rgs = tuple(int(v) for v in rgs)
        if not rgs:
            raise RangeError("a partition needs at least one mode")
        top = -1
        for v in rgs:
            if v < 0 or v > top + 1:
                raise RangeError(f"{rgs} is not a restricted-growth string")
            top = max(top, v)
        blocks = [[] for _ in range(top + 1)]
        for mode, label in enumerate(rgs, start=1):
            blocks[label].append(mode)
        return cls(len(rgs), tuple(tuple(b) for b in blocks))

    @classmethod
    def parse(cls, text: str, k: int | None = None) -> "Partition":
        """Parse the ``"1,2|3,4"`` text form; the input must already be canonical."""
        try:
            raw = [[int(tok) for tok in chunk.split(",")] for chunk in text.strip().split("|")]
        except ValueError:
            raise RangeError(f"malformed partition string {text!r}") from None
        if k is None:
            k = max(max(b) for b in raw)
        part = canonicalize(k, raw)
        if [list(b) for b in part.blocks] != raw:
            raise RangeError(f"partition string {text!r} is not in canonical order")
        return part

    @classmethod
    def bottom(cls, k: int) -> "Partition":
        """The all-singletons partition (finest element)."""
        return cls.from_rgs(range(k))

    @classmethod
    def top(cls, k: int) -> "Partition":
        """The single-block partition (coarsest element)."""
        return cls.from_rgs([0] * k)

    @cached_property
    def rgs(self) -> tuple[int, ...]:
        labels = [0] * self.k
        for j, block in enumerate(self.blocks):
            for mode in block:
                labels[mode - 1] = j
        return tuple(labels)

    @property
    def level(self) -> int:
        return len(self.blocks)

    @property
    def is_bottom(self) -> bool:
        return self.level == self.k

    @property
    def is_top(self) -> bool:
        return self.level == 1

    def block_of(self, mode: int) -> int:
        """0-based index of the block containing ``mode``."""
        return self.rgs[mode - 1]

    def merge(self, i: int, j: int) -> "Partition":
        """Merge blocks ``i`` and ``j`` (0-based) into one."""
        if i == j or not (0 <= i < self.level and 0 <= j < self.level):
            raise RangeError(f"cannot merge blocks {i} and {j} of {self}")
        rest = [set(b) for n, b in enumerate(self.blocks) if n not in (i, j)]
        return canonicalize(self.k, rest + [set(self.blocks[i]) | set(self.blocks[j])])

    def __str__(self) -> str:
        return "|".join(",".join(str(m) for m in b) for b in self.blocks)

    def __repr__(self) -> str:
        return f"Partition({self})"

    def __lt__(self, other: "Partition") -> bool:
        # sort key only (RGS lexicographic); use is_refinement for the lattice order
        return (self.k, self.rgs) < (other.k, other.rgs)


def canonicalize(k: int, raw_blocks: Iterable[Iterable[int]]) -> Partition:
    """Return the canonical :class:`Partition` of ``{1..k}`` given raw blocks."""
    if k < 1:
        raise RangeError(f"k must be positive, got {k}")
    seen: set[int] = set()
    blocks = []
    for raw in raw_blocks:
        block = sorted(int(m) for m in raw)
        if not block:
            raise RangeError("blocks must be nonempty")
        for m in block:
            if m < 1 or m > k:
                raise RangeError(f"mode {m} outside 1..{k}")
            if m in seen:
                raise OverlapError(f"mode {m} appears in more than one block")
            seen.add(m)
        if len(set(block)) != len(block):
            raise OverlapError(f"duplicate mode inside block {block}")
        blocks.append(tuple(block))
    missing = set(range(1, k + 1)) - seen
    if missing:
        raise CoverageError(f"modes {sorted(missing)} are not covered")
    blocks.sort(key=lambda b: b[0])
    return Partition(k, tuple(blocks))


def _check_order(k: int) -> None:
    if not 1 <= k <= MAX_ORDER:
        raise SizeError(f"lattice enumeration supports 1 <= k <= {MAX_ORDER}, got {k}")


def _rgs_iter(k: int) -> Iterator[list[int]]:
    # lexicographic restricted-growth strings
    rgs = [0] * k
    maxes = [0] * k  # maxes[i] = max(rgs[:i+1])

    def rec(i: int) -> Iterator[list[int]]:
        if i == k:
            yield rgs
            return
        for v in range(maxes[i - 1] + 2):
            rgs[i] = v
            maxes[i] = max(maxes[i - 1], v)
            yield from rec(i + 1)

    yield from rec(1)


def enumerate_partitions(k: int) -> list[Partition]:
    """All partitions of ``{1..k}`` in lexicographic RGS order (Bell(k) of them)."""
    _check_order(k)
    return [Partition.from_rgs(r) for r in _rgs_iter(k)]


def enumerate_level(k: int, level: int) -> list[Partition]:
    """Partitions with exactly ``level`` blocks, in RGS order."""
    _check_order(k)
    if not 1 <= level <= k:
        raise RangeError(f"level must lie in 1..{k}, got {level}")
    return [p for p in enumerate_partitions(k) if p.level == level]


def _same_k(p1: Partition, p2: Partition) -> None:
    if p1.k != p2.k:
        raise MismatchError(f"partitions of different mode sets: k={p1.k} vs k={p2.k}")


def is_refinement(finer: Partition, coarser: Partition) -> bool:
    """True iff every block of ``finer`` lies inside a block of ``coarser``."""
    _same_k(finer, coarser)
    target = coarser.rgs
    return all(len({target[m - 1] for m in b}) == 1 for b in finer.blocks)


def meet(p1: Partition, p2: Partition) -> Partition:
    """Greatest lower bound: all nonempty pairwise block intersections."""
    _same_k(p1, p2)
    labels: dict[tuple[int, int], int] = {}
    rgs = [labels.setdefault(pair, len(labels)) for pair in zip(p1.rgs, p2.rgs)]
    return Partition.from_rgs(rgs)


def cover_edges(k: int) -> list[tuple[Partition, Partition]]:
    """All ``(finer, coarser)`` pairs where ``coarser`` merges two blocks of ``finer``."""
    edges = []
    for fine in enumerate_partitions(k):
        for i in range(fine.level):
            for j in range(i + 1, fine.level):
                edges.append((fine, fine.merge(i, j)))
    return edges


def upper_cone(p: Partition) -> list[Partition]:
    """Partitions ``t`` with ``p <= t`` and ``t`` not the single-block partition."""
    return [t for t in enumerate_partitions(p.k) if not t.is_top and is_refinement(p, t)]


def merged_blocks(finer: Partition, coarser: Partition) -> tuple[int, int]:
    """For a cover edge, the 0-based indices of the two blocks of ``finer`` that merge."""
    if finer.level != coarser.level + 1 or not is_refinement(finer, coarser):
        raise OrderError(f"{finer} -> {coarser} is not a cover edge")
    owners: dict[int, list[int]] = {}
    for j, block in enumerate(finer.blocks):
        owners.setdefault(coarser.block_of(block[0]), []).append(j)
    (i, j), = [v for v in owners.values() if len(v) == 2]
    return i, j

