"""Dimension-overlap factors and audits of the unfolding norm inequalities.

Every audit returns :class:`InequalityReport` records of the two-sided form

    lower_factor * lhs <= rhs <= upper_factor * lhs

where a missing factor (``None``) leaves that side unchecked. ``caveat`` is
set when both compared values are estimates rather than exact norms: a pass
then means that no violation was detected among certified lower bounds.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

from .errors import DimsError, MismatchError, RangeError
from .norms import AscentConfig, NormEstimate, check_p, cross_estimates, landscape
from .partitions import Partition, cover_edges, enumerate_level, meet
from .tensor import Tensor, frobenius, unfolded_dims

TOLERANCE = 1e-8


@dataclass
class InequalityReport:
    name: str
    instance: dict
    lower_factor: float | None
    upper_factor: float | None
    lhs: float
    rhs: float
    caveat: bool = False
    tolerance: float = TOLERANCE
    slack: tuple = field(init=False)
    passed: bool = field(init=False)

    def __post_init__(self):
        lo = None if self.lower_factor is None else self.rhs - self.lower_factor * self.lhs
        hi = None if self.upper_factor is None else self.upper_factor * self.lhs - self.rhs
        self.slack = (lo, hi)
        bound = [abs(self.rhs)]
        for f in (self.lower_factor, self.upper_factor):
            if f is not None:
                bound.append(abs(f * self.lhs))
        tol = self.tolerance * max(bound)
        self.passed = all(s is None or s >= -tol for s in self.slack)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=False)


def _check_modes(dims: Sequence[int], *subsets: Iterable[int]) -> None:
    k = len(dims)
    for s in subsets:
        for m in s:
            if not 1 <= m <= k:
                raise RangeError(f"mode {m} outside 1..{k}")


def block_overlap_dim(dims: Sequence[int], block: Iterable[int], other: Iterable[int]) -> int:
    """Product of ``dims`` over the intersection of two mode sets; 0 when disjoint."""
    block, other = set(block), set(other)
    _check_modes(dims, block, other)
    common = block & other
    if not common:
        return 0
    return math.prod(dims[m - 1] for m in common)


def dim_map(dims: Sequence[int], p1: Partition, p2: Partition) -> int:
    """``prod_{B in p1} max_{B' in p2} D(B, B')``; not symmetric in its arguments."""
    if p1.k != p2.k or p1.k != len(dims):
        raise MismatchError("partitions and dims must share the same order")
    return math.prod(max(block_overlap_dim(dims, b, c) for c in p2.blocks) for b in p1.blocks)


def main_theorem_factors(dims: Sequence[int], p1: Partition, p2: Partition) -> tuple[float, float]:
    """Factors with ``lower * ||U_p1|| <= ||U_p2|| <= upper * ||U_p1||`` at p = 2."""
    total = math.prod(dims)
    lower = (total / dim_map(dims, p1, p2)) ** -0.5
    upper = (total / dim_map(dims, p2, p1)) ** 0.5
    return lower, upper


def overlap_exponents(p1: Partition, p2: Partition) -> tuple[int, int]:
    """Equal-dimension exponents ``(c1, c2)``: the factors become ``d**(-c1/2)``, ``d**(c2/2)``."""
    if p1.k != p2.k:
        raise MismatchError("partitions of different orders")

    def c(a: Partition, b: Partition) -> int:
        return a.k - sum(max(len(set(x) & set(y)) for y in b.blocks) for x in a.blocks)

    return c(p1, p2), c(p2, p1)


def lp_theorem_factors(dims, p1: Partition, p2: Partition, p: float) -> tuple[float, float]:
    """Factors of the l^p version of the two-partition inequality."""
    p = check_p(p)
    total = math.prod(dims)
    m12, m21 = dim_map(dims, p1, p2), dim_map(dims, p2, p1)
    inv = 0.0 if math.isinf(p) else 1.0 / p
    expo = inv if p <= 2 else 1.0 - inv
    return total ** -expo * m12 ** 0.5, total ** expo * m21 ** -0.5


def _both_estimated(*ests: NormEstimate) -> bool:
    return not any(e.is_exact for e in ests)


def audit_pq_sandwich(tensor: Tensor, p: float, q: float, config: AscentConfig | None = None) -> InequalityReport:
    """Check ``||A||_p <= ||A||_q <= dim(A)**(1/p - 1/q) ||A||_p`` for ``p <= q``."""
    p, q = check_p(p), check_p(q)
    if p > q:
        raise RangeError(f"need p <= q, got p={p}, q={q}")
    est_p, est_q = cross_estimates(tensor, p, q, config)
    inv = lambda t: 0.0 if math.isinf(t) else 1.0 / t  # noqa: E731
    upper = tensor.size ** (inv(p) - inv(q))
    return InequalityReport(
        "pq_sandwich",
        {"dims": list(tensor.dims), "p": p, "q": q},
        1.0,
        upper,
        est_p.value,
        est_q.value,
        caveat=True,
    )


def _get_landscape(tensor, config, land):
    return land if land is not None else landscape(tensor, 2, config)


def audit_monotonicity(
    tensor: Tensor, config: AscentConfig | None = None, land: dict | None = None
) -> list[InequalityReport]:
    """One report per cover edge plus the two global extrema checks."""
    land = _get_landscape(tensor, config, land)
    k = tensor.order
    reports = []
    for fine, coarse in cover_edges(k):
        a, b = land[fine], land[coarse]
        reports.append(
            InequalityReport(
                "monotonicity.edge",
                {"finer": str(fine), "coarser": str(coarse)},
                1.0,
                None,
                a.value,
                b.value,
                caveat=_both_estimated(a, b),
            )
        )
    bottom, top = land[Partition.bottom(k)], land[Partition.top(k)]
    smallest = min(land.values(), key=lambda e: e.value)
    reports.append(
        InequalityReport(
            "monotonicity.min",
            {"partition": str(Partition.bottom(k))},
            1.0,
            None,
            bottom.value,
            smallest.value,
            caveat=not bottom.is_exact,
        )
    )
    reports.append(
        InequalityReport(
            "monotonicity.max",
            {"partition": str(Partition.top(k))},
            1.0,
            1.0,
            frobenius(tensor),
            top.value,
        )
    )
    reports.append(
        InequalityReport(
            "monotonicity.max_global",
            {"partition": str(Partition.top(k))},
            None,
            1.0,
            top.value,
            max(e.value for e in land.values()),
        )
    )
    return reports


def audit_one_step(
    tensor: Tensor,
    part: Partition,
    i: int,
    j: int,
    config: AscentConfig | None = None,
    land: dict | None = None,
) -> InequalityReport:
    """Check ``min(d_i, d_j)**-0.5 ||C|| <= ||B|| <= ||C||`` for merging blocks i, j.

    ``i`` and ``j`` are 1-based block indices of ``part``; ``B`` is the
    unfolding along ``part`` and ``C`` the unfolding with the two blocks merged.
    """
    if part.k != tensor.order:
        raise MismatchError("partition order does not match the tensor")
    if i == j or not (1 <= i <= part.level and 1 <= j <= part.level):
        raise RangeError(f"invalid block pair ({i}, {j}) for {part}")
    merged = part.merge(i - 1, j - 1)
    land = _get_landscape(tensor, config, land)
    sizes = unfolded_dims(tensor.dims, part)
    b, c = land[part], land[merged]
    return InequalityReport(
        "one_step",
        {"partition": str(part), "merged": str(merged), "blocks": [i, j]},
        min(sizes[i - 1], sizes[j - 1]) ** -0.5,
        1.0,
        c.value,
        b.value,
        caveat=_both_estimated(b, c),
    )


def audit_main_theorem(
    tensor: Tensor,
    p1: Partition,
    p2: Partition,
    config: AscentConfig | None = None,
    land: dict | None = None,
) -> InequalityReport:
    """Check the two-partition spectral norm inequality for any pair."""
    if p1.k != tensor.order or p2.k != tensor.order:
        raise MismatchError("partition order does not match the tensor")
    land = _get_landscape(tensor, config, land)
    lower, upper = main_theorem_factors(tensor.dims, p1, p2)
    a, b = land[p1], land[p2]
    return InequalityReport(
        "main_theorem",
        {"pi1": str(p1), "pi2": str(p2), "meet": str(meet(p1, p2))},
        lower,
        upper,
        a.value,
        b.value,
        caveat=_both_estimated(a, b),
    )


def audit_lp_theorem(
    tensor: Tensor, p1: Partition, p2: Partition, p: float, config: AscentConfig | None = None, land=None
) -> InequalityReport:
    """Two-partition inequality for general p, composed from the p/2 sandwich."""
    land = land if land is not None else landscape(tensor, p, config)
    lower, upper = lp_theorem_factors(tensor.dims, p1, p2, p)
    a, b = land[p1], land[p2]
    return InequalityReport(
        "lp_theorem",
        {"pi1": str(p1), "pi2": str(p2), "p": check_p(p)},
        lower,
        upper,
        a.value,
        b.value,
        caveat=_both_estimated(a, b),
    )


def equal_dimension(dims: Sequence[int]) -> int:
    if len(set(dims)) != 1:
        raise DimsError(f"statement requires equal dimensions, got {tuple(dims)}")
    return dims[0]


def audit_frobenius_ratio(tensor: Tensor, config=None, land=None) -> InequalityReport:
    """``||A||_F <= (dim(A) / max d_n)**0.5 ||A||_sigma`` (no equal-dims requirement)."""
    land = _get_landscape(tensor, config, land)
    sigma = land[Partition.bottom(tensor.order)]
    return InequalityReport(
        "frobenius_ratio",
        {"dims": list(tensor.dims)},
        1.0,
        (tensor.size / max(tensor.dims)) ** 0.5,
        sigma.value,
        frobenius(tensor),
        caveat=not sigma.is_exact,
    )


def audit_corollaries(
    tensor: Tensor, config: AscentConfig | None = None, land: dict | None = None
) -> list[InequalityReport]:
    """Frobenius-ratio, bottom-up, top-down and ceil(k/l) level bounds.

    Raises :class:`DimsError` unless all dimensions are equal.
    """
    d = equal_dimension(tensor.dims)
    land = _get_landscape(tensor, config, land)
    k = tensor.order
    fro = frobenius(tensor)
    sigma = land[Partition.bottom(k)]
    reports = [audit_frobenius_ratio(tensor, land=land)]
    for level in range(1, k + 1):
        members = enumerate_level(k, level)
        ests = [land[q] for q in members]
        hi = max(ests, key=lambda e: e.value)
        lo = min(ests, key=lambda e: e.value)
        reports.append(
            InequalityReport(
                "bottom_up.max",
                {"level": level},
                None,
                d ** ((k - level) / 2),
                sigma.value,
                hi.value,
                caveat=_both_estimated(sigma, hi),
            )
        )
        reports.append(
            InequalityReport(
                "bottom_up.min",
                {"level": level},
                1.0,
                None,
                sigma.value,
                lo.value,
                caveat=_both_estimated(sigma, lo),
            )
        )
        reports.append(
            InequalityReport(
                "ceil_level",
                {"level": level},
                d ** (-(k - math.ceil(k / level)) / 2),
                None,
                fro,
                lo.value,
                caveat=False,
            )
        )
        for q in members:
            biggest = max(len(b) for b in q.blocks)
            reports.append(
                InequalityReport(
                    "top_down",
                    {"partition": str(q)},
                    d ** (-(k - biggest) / 2),
                    1.0,
                    fro,
                    land[q].value,
                )
            )
    return reports
