"""Partition-orthogonally decomposable (pi-OD) tensors.

A tensor ``A = sum_n lambda_n a_1^(n) ⊗ ... ⊗ a_k^(n)`` is pi-OD when, for
every block B of pi, the Kronecker vectors ``⊗_{i in B} a_i^(n)`` are
orthonormal across terms n. For pi-OD tensors the spectral norm of every
unfolding in the upper cone of pi equals ``lambda_1``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .bounds import InequalityReport
from .errors import MismatchError, RangeError, RankError, ShapeError, TopPartitionError
from .norms import AscentConfig, estimate_unfolding, norm_order1
from .partitions import Partition, upper_cone
from .tensor import Tensor, unfold

CONE_TOLERANCE = 1e-6
BUILT_TOLERANCE = 1e-10
LOADED_TOLERANCE = 1e-6


@dataclass(frozen=True, eq=False)
class OdecoFactors:
    """Weights and per-mode factor matrices of a weighted rank-1 expansion.

    ``factors[i]`` has shape ``(d_i, r)``; column n is ``a_{i+1}^(n)``.
    """

    dims: tuple[int, ...]
    partition: Partition
    lambdas: tuple[float, ...]
    factors: tuple[np.ndarray, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        lambdas = tuple(float(v) for v in self.lambdas)
        r = len(lambdas)
        if r < 1:
            raise RankError("need at least one term")
        if any(v < 0 for v in lambdas) or any(a < b for a, b in zip(lambdas, lambdas[1:])):
            raise RangeError(f"lambdas must be nonnegative and nonincreasing, got {lambdas}")
        if self.partition.k != len(dims):
            raise MismatchError("partition order does not match dims")
        if len(self.factors) != len(dims):
            raise ShapeError(f"need {len(dims)} factor matrices, got {len(self.factors)}")
        mats = []
        for i, (f, d) in enumerate(zip(self.factors, dims), start=1):
            f = np.array(f, dtype=np.float64)
            if f.shape != (d, r):
                raise ShapeError(f"factor matrix of mode {i} has shape {f.shape}, expected {(d, r)}")
            f.setflags(write=False)
            mats.append(f)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "lambdas", lambdas)
        object.__setattr__(self, "factors", tuple(mats))

    @property
    def rank(self) -> int:
        return len(self.lambdas)

    def to_json(self) -> dict:
        return {
            "dims": list(self.dims),
            "partition": str(self.partition),
            "lambdas": list(self.lambdas),
            # mode-major: one list of r vectors per mode
            "factors": [[col.tolist() for col in f.T] for f in self.factors],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "OdecoFactors":
        try:
            dims = obj["dims"]
            part = Partition.parse(obj["partition"], len(dims))
            factors = [np.array(vs, dtype=np.float64).T for vs in obj["factors"]]
            return cls(tuple(dims), part, tuple(obj["lambdas"]), tuple(factors))
        except KeyError as exc:
            raise ShapeError(f"factors JSON is missing {exc}") from None


def load_factors(path: str | Path) -> OdecoFactors:
    with open(path) as fh:
        return OdecoFactors.from_json(json.load(fh))


def save_factors(f: OdecoFactors, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(f.to_json(), fh)
        fh.write("\n")


def compose(f: OdecoFactors) -> Tensor:
    """The tensor ``sum_n lambda_n a_1^(n) ⊗ ... ⊗ a_k^(n)``."""
    letters = "abcdefghijkl"[: len(f.dims)]
    subscripts = ",".join(f"{c}z" for c in letters) + f",z->{letters}"
    return Tensor(np.einsum(subscripts, *f.factors, np.asarray(f.lambdas)))


def block_gram(f: OdecoFactors, block: Sequence[int]) -> np.ndarray:
    """Gram matrix of the Kronecker vectors of ``block`` across terms.

    Uses ``<⊗x_i, ⊗y_i> = prod <x_i, y_i>`` instead of forming Kronecker vectors.
    """
    gram = np.ones((f.rank, f.rank))
    for m in block:
        a = f.factors[m - 1]
        gram = gram * (a.T @ a)
    return gram


def verify_pi_od(f: OdecoFactors, part: Partition | None = None, tol: float = BUILT_TOLERANCE) -> bool:
    """True iff every block Gram matrix is within ``tol`` (max-abs) of the identity."""
    part = f.partition if part is None else part
    if part.k != len(f.dims):
        raise MismatchError("partition order does not match the factors")
    eye = np.eye(f.rank)
    return all(np.max(np.abs(block_gram(f, b) - eye)) <= tol for b in part.blocks)


def generate_pi_od(
    dims: Sequence[int],
    part: Partition,
    r: int,
    lambdas: Sequence[float] | None = None,
    seed: int = 0,
) -> OdecoFactors:
    """Random pi-OD factors.

    In each block the largest mode (lowest index on ties) carries ``r``
    orthonormal columns of a seeded Gaussian QR factor; every other mode of
    the block repeats one random unit vector across all terms.
    """
    dims = tuple(int(d) for d in dims)
    if part.k != len(dims):
        raise MismatchError("partition order does not match dims")
    if r < 1:
        raise RangeError("rank must be positive")
    lambdas = tuple(range(r, 0, -1)) if lambdas is None else tuple(lambdas)
    if len(lambdas) != r:
        raise RangeError(f"{len(lambdas)} lambdas for rank {r}")
    rng = np.random.default_rng(seed)
    factors: list[np.ndarray | None] = [None] * len(dims)
    for block in part.blocks:
        lead = max(block, key=lambda m: (dims[m - 1], -m))
        d = dims[lead - 1]
        if r > d:
            raise RankError(f"rank {r} exceeds the largest dimension {d} of block {block}")
        for m in block:
            if m == lead:
                q, _ = np.linalg.qr(rng.standard_normal((d, r)))
                factors[m - 1] = q
            else:
                v = rng.standard_normal(dims[m - 1])
                factors[m - 1] = np.repeat((v / np.linalg.norm(v))[:, None], r, axis=1)
    return OdecoFactors(dims, part, lambdas, tuple(factors))


def leading_certificate(f: OdecoFactors, part: Partition) -> list[np.ndarray]:
    """Per block, the vectorized Kronecker product of the first term's factors."""
    out = []
    for block in part.blocks:
        v = np.ones(1)
        for m in reversed(block):
            # earliest mode fastest in the unfolding layout
            v = np.kron(v, f.factors[m - 1][:, 0])
        out.append(v)
    return out


def _require_od(f: OdecoFactors, part: Partition, tol: float) -> None:
    if not verify_pi_od(f, part, tol):
        raise RangeError(f"factors are not {part}-orthogonal decomposable within {tol}")


def _cone_estimate(f, tensor, part, config):
    start = leading_certificate(f, part)
    return estimate_unfolding(tensor, part, 2, config, [start])


def check_spectral_is_lambda1(
    f: OdecoFactors,
    part: Partition | None = None,
    config: AscentConfig | None = None,
    tol: float = BUILT_TOLERANCE,
) -> InequalityReport:
    """Compare the spectral norm of the unfolding along ``part`` with ``lambda_1``."""
    part = f.partition if part is None else part
    if part.is_top:
        raise TopPartitionError("the norm equals lambda_1 only below the single-block partition")
    _require_od(f, part, tol)
    tensor = compose(f)
    est = _cone_estimate(f, tensor, part, config)
    return InequalityReport(
        "odeco.lambda1",
        {"partition": str(part), "factors_partition": str(f.partition)},
        1.0,
        1.0,
        f.lambdas[0],
        est.value,
        tolerance=CONE_TOLERANCE,
    )


def check_upper_cone_equality(
    f: OdecoFactors,
    part: Partition | None = None,
    config: AscentConfig | None = None,
    tol: float = BUILT_TOLERANCE,
) -> list[InequalityReport]:
    """Norm equality with ``lambda_1`` across the upper cone, plus pairwise equalities.

    Also reports the vectorization (single-block) norm against
    ``sqrt(sum lambda_n^2)``, which is where the equality stops holding.
    """
    part = f.partition if part is None else part
    _require_od(f, part, tol)
    tensor = compose(f)
    cone = upper_cone(part)
    ests = {t: _cone_estimate(f, tensor, t, config) for t in cone}
    reports = [
        InequalityReport(
            "odeco.cone",
            {"partition": str(t), "base": str(part)},
            1.0,
            1.0,
            f.lambdas[0],
            ests[t].value,
            tolerance=CONE_TOLERANCE,
        )
        for t in cone
    ]
    for n, t1 in enumerate(cone):
        for t2 in cone[n + 1 :]:
            reports.append(
                InequalityReport(
                    "odeco.meet_pair",
                    {"pi1": str(t1), "pi2": str(t2), "base": str(part)},
                    1.0,
                    1.0,
                    ests[t1].value,
                    ests[t2].value,
                    caveat=not (ests[t1].is_exact and ests[t2].is_exact),
                    tolerance=CONE_TOLERANCE,
                )
            )
    top = Partition.top(len(f.dims))
    vec = norm_order1(unfold(tensor, top), 2)
    reports.append(
        InequalityReport(
            "odeco.vectorization",
            {"partition": str(top)},
            1.0,
            1.0,
            float(np.sqrt(np.sum(np.square(f.lambdas)))),
            vec.value,
            tolerance=1e-12,
        )
    )
    return reports
