"""Operator l^p norms of tensors and of their unfoldings.

The l^p norm of an order-k tensor is the supremum of the multilinear form
``A(x_1, ..., x_k)`` over vectors with ``||x_n||_p = 1``. It is computed
exactly for vectors (a dual norm) and for matrices at p = 2 (largest singular
value); every other case is estimated by multi-start alternating ascent. Each
estimate carries the unit vectors that attain its value, so every reported
value is a certified lower bound on the true norm.
"""

from __future__ import annotations

import math
import string
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import DimsError, OrderError, RangeError
from .partitions import (
    Partition,
    cover_edges,
    enumerate_partitions,
    is_refinement,
    merged_blocks,
)
from .tensor import Tensor, contract, unfold

EXACT_VECTOR = "exact-vector"
EXACT_MATRIX = "exact-matrix-spectral"
ASCENT = "alternating-ascent"
WARM = "warm-started"
EXACT_METHODS = frozenset({EXACT_VECTOR, EXACT_MATRIX})

AUDIT_RESTARTS = 512


@dataclass(frozen=True)
class AscentConfig:
    restarts: int = 64
    max_iterations: int = 500
    tolerance: float = 1e-10
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1 or self.max_iterations < 1:
            raise RangeError("restarts and max_iterations must be positive")
        if not self.tolerance > 0:
            raise RangeError("tolerance must be positive")
        if self.seed < 0:
            raise RangeError("seed must be nonnegative")

    def audit(self) -> "AscentConfig":
        """Same settings with the restart count raised for audit runs."""
        return replace(self, restarts=max(self.restarts, AUDIT_RESTARTS))


@dataclass(frozen=True, eq=False)
class NormEstimate:
    """A norm value with the unit vectors that attain it."""

    value: float
    p: float
    certificate: tuple[np.ndarray, ...]
    method: str
    restarts: int = 0
    converged: bool = True
    iterations: int = 0
    trace: tuple = field(default=(), repr=False)

    @property
    def is_exact(self) -> bool:
        return self.method in EXACT_METHODS


def check_p(p: float) -> float:
    p = float(p)
    if not (p >= 1):  # also rejects nan
        raise RangeError(f"p must lie in [1, inf], got {p}")
    return p


def dual_exponent(p: float) -> float:
    """Hölder conjugate q with 1/p + 1/q = 1."""
    p = check_p(p)
    if p == 1:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1)


def pnorm(x: np.ndarray, p: float) -> float:
    x = np.asarray(x, dtype=np.float64).ravel()
    if p == 2:
        return float(np.linalg.norm(x))
    return float(np.linalg.norm(x, p))


def _holder(c: np.ndarray, p: float) -> np.ndarray:
    """Row-wise maximizers of <c, x> over ||x||_p = 1.

    Ties (p = 1) go to the lowest index; zero entries get sign +1 at p = inf.
    Zero rows map to the first basis vector.
    """
    c = np.atleast_2d(c)
    rows = np.arange(c.shape[0])
    zero = ~np.any(c != 0, axis=1)
    if p == 1:
        j = np.argmax(np.abs(c), axis=1)
        x = np.zeros_like(c)
        x[rows, j] = np.where(c[rows, j] < 0, -1.0, 1.0)
        return x
    if math.isinf(p):
        return np.where(c < 0, -1.0, 1.0)
    if p == 2:
        x = c.copy()
    else:
        q = p / (p - 1)
        x = np.sign(c) * np.abs(c) ** (q - 1)
    x[zero] = 0.0
    x[zero, 0] = 1.0
    norms = np.linalg.norm(x, axis=1) if p == 2 else np.linalg.norm(x, p, axis=1)
    return x / norms[:, None]


def normalize(x: np.ndarray, p: float) -> np.ndarray:
    """Scale ``x`` to unit p-norm (zero vectors become the first basis vector)."""
    x = np.asarray(x, dtype=np.float64).ravel().copy()
    n = pnorm(x, p)
    if n == 0:
        x[0] = 1.0
        return x
    return x / n


def renormalize(cert: Sequence[np.ndarray], p: float) -> list[np.ndarray]:
    return [normalize(x, p) for x in cert]


def evaluate(tensor: Tensor, cert: Sequence[np.ndarray]) -> float:
    return float(contract(tensor.data, [np.asarray(x, dtype=np.float64) for x in cert]))


def norm_order1(a, p: float = 2) -> NormEstimate:
    """Exact norm of a vector viewed as a linear functional: the dual q-norm."""
    p = check_p(p)
    vec = np.asarray(a.values if isinstance(a, Tensor) else a, dtype=np.float64).ravel()
    q = dual_exponent(p)
    x = _holder(vec[None, :], p)[0]
    return NormEstimate(pnorm(vec, q), p, (x,), EXACT_VECTOR)


def matrix_spectral_exact(matrix: Tensor) -> NormEstimate:
    """Largest singular value with its singular vector pair."""
    mat = matrix.data if isinstance(matrix, Tensor) else np.asarray(matrix, dtype=np.float64)
    if mat.ndim != 2:
        raise OrderError(f"expected an order-2 tensor, got order {mat.ndim}")
    u, _, vt = np.linalg.svd(mat)
    x, y = u[:, 0].copy(), vt[0].copy()
    value = float(x @ mat @ y)
    if value < 0:
        x = -x
        value = -value
    return NormEstimate(value, 2.0, (x, y), EXACT_MATRIX)


@lru_cache(maxsize=None)
def _subscripts(k: int) -> tuple[str, ...]:
    letters = string.ascii_lowercase[:k]
    out = []
    for n in range(k):
        ops = ",".join("z" + letters[m] for m in range(k) if m != n)
        out.append(f"{letters},{ops}->z{letters[n]}" if ops else f"{letters}->z{letters[n]}")
    return tuple(out)


def _coefficients(data: np.ndarray, xs: list[np.ndarray], n: int) -> np.ndarray:
    k = data.ndim
    if k == 1:
        return np.broadcast_to(data, (xs[0].shape[0], data.shape[0]))
    others = [xs[m] for m in range(k) if m != n]
    return np.einsum(_subscripts(k)[n], data, *others)


def _dual_norms(c: np.ndarray, p: float) -> np.ndarray:
    q = dual_exponent(p)
    return np.linalg.norm(c, axis=1) if q == 2 else np.linalg.norm(c, q, axis=1)


def _ascend(data, p, starts, max_iterations, tolerance, trace=False):
    """Batched alternating ascent from the given starts.

    ``starts`` is a list of k arrays of shape (R, d_n). Returns the final
    iterates, their objective values, per-start iteration counts, a converged
    mask and (optionally) the per-update objective history.
    """
    k = data.ndim
    xs = [np.array(s, dtype=np.float64) for s in starts]
    R = xs[0].shape[0]
    values = np.einsum(_subscripts(k)[0], data, *xs[1:]) if k > 1 else np.tile(data, (R, 1))
    values = np.einsum("zi,zi->z", values, xs[0])
    iterations = np.zeros(R, dtype=int)
    converged = np.zeros(R, dtype=bool)
    active = np.arange(R)
    history = [values.copy()] if trace else None
    for _ in range(max_iterations):
        if active.size == 0:
            break
        sub = [x[active] for x in xs]
        before = values[active]
        current = before
        for n in range(k):
            c = _coefficients(data, sub, n)
            sub[n] = _holder(c, p)
            updated = _dual_norms(c, p)
            # each update maximizes over one block, so the objective cannot drop
            slack = 1e-12 * np.maximum(1.0, np.abs(current))
            if np.any(updated < current - slack):
                raise AssertionError("alternating ascent decreased the objective")
            current = updated
            if trace:
                step = values.copy()
                step[active] = current
                history.append(step)
        for n in range(k):
            xs[n][active] = sub[n]
        values[active] = current
        iterations[active] += 1
        done = (current - before) <= tolerance * np.maximum(np.abs(current), 1e-300)
        converged[active[done]] = True
        active = active[~done]
    return xs, values, iterations, converged, history


def _pnormalize_rows(x: np.ndarray, p: float) -> np.ndarray:
    norms = np.linalg.norm(x, axis=1) if p == 2 else np.linalg.norm(x, p, axis=1)
    return x / norms[:, None]


def _stack_starts(dims, starts: Iterable[Sequence[np.ndarray]], p: float) -> list[np.ndarray]:
    cols = [[] for _ in dims]
    for cert in starts:
        if len(cert) != len(dims):
            raise DimsError(f"warm start has {len(cert)} vectors for order {len(dims)}")
        for n, (x, d) in enumerate(zip(cert, dims)):
            x = np.asarray(x, dtype=np.float64).ravel()
            if x.size != d:
                raise DimsError(f"warm start vector {n + 1} has length {x.size}, expected {d}")
            cols[n].append(normalize(x, p))
    return [np.array(c).reshape(len(c), d) for c, d in zip(cols, dims)]


def alternating_ascent(
    tensor: Tensor,
    p: float = 2,
    config: AscentConfig | None = None,
    starts: Iterable[Sequence[np.ndarray]] = (),
    stream: int = 0,
    random_starts: bool = True,
    trace: bool = False,
) -> NormEstimate:
    """Multi-start alternating ascent for the l^p norm of ``tensor``.

    Each mode update solves the one-mode subproblem exactly (the Hölder
    maximizer of the contracted coefficient vector), so the objective is
    nondecreasing along every start. Random starts are standard normal,
    p-normalized, drawn from ``default_rng([config.seed, stream])``; extra
    ``starts`` (warm starts) are appended to the batch. The best start wins.
    """
    p = check_p(p)
    config = config or AscentConfig()
    starts = list(starts)
    dims = tensor.dims
    if not np.any(tensor.data != 0):
        cert = tuple(np.eye(d)[0] for d in dims)
        return NormEstimate(0.0, p, cert, ASCENT, 0, True, 0)
    blocks = []
    count = config.restarts if random_starts else 0
    if count:
        rng = np.random.default_rng([config.seed, stream])
        blocks.append([_pnormalize_rows(rng.standard_normal((count, d)), p) for d in dims])
    if starts:
        blocks.append(_stack_starts(dims, starts, p))
    if not blocks:
        raise RangeError("alternating ascent needs at least one start")
    init = [np.concatenate([b[n] for b in blocks]) for n in range(len(dims))]
    xs, values, iterations, converged, history = _ascend(
        tensor.data, p, init, config.max_iterations, config.tolerance, trace
    )
    best = int(np.argmax(values))
    cert = [x[best].copy() for x in xs]
    value = evaluate(tensor, cert)
    if value < 0:
        cert[0] = -cert[0]
        value = -value
    method = WARM if count == 0 or best >= count else ASCENT
    return NormEstimate(
        value,
        p,
        tuple(cert),
        method,
        len(values),
        bool(converged[best]),
        int(iterations[best]),
        tuple(history) if trace else (),
    )


def _block_dims(dims, block) -> list[int]:
    return [dims[m - 1] for m in block]


def warm_start_lift(cert, fine: Partition, coarse: Partition, dims) -> list[np.ndarray]:
    """Lift a certificate for ``unfold(A, fine)`` to one for ``unfold(A, coarse)``.

    Every coarse block receives the vectorized tensor product of the fine
    block vectors it merges, laid out with the unfolding's index convention,
    so the multilinear value is unchanged and p-norms multiply.
    """
    if not is_refinement(fine, coarse):
        raise OrderError(f"{fine} is not a refinement of {coarse}")
    out = []
    for cblock in coarse.blocks:
        members = [j for j, b in enumerate(fine.blocks) if b[0] in cblock]
        arr = np.ones(())
        modes: list[int] = []
        for j in members:
            piece = np.asarray(cert[j], dtype=np.float64).reshape(
                _block_dims(dims, fine.blocks[j]), order="F"
            )
            arr = np.multiply.outer(arr, piece)
            modes.extend(fine.blocks[j])
        out.append(arr.transpose(np.argsort(modes)).ravel(order="F"))
    return out


def split_certificate(tensor: Tensor, cert, fine: Partition, coarse: Partition) -> list[np.ndarray]:
    """Refine a p = 2 certificate of ``unfold(A, coarse)`` across a cover edge.

    The merged block's contracted coefficient vector is reshaped to a
    (fine block i) x (fine block j) matrix; its leading singular pair
    replaces the merged vector. The new value is at least
    ``min(d_i, d_j) ** -0.5`` times the old one.
    """
    i, j = merged_blocks(fine, coarse)
    dims = tensor.dims
    c = coarse.block_of(fine.blocks[i][0])
    folded = unfold(tensor, coarse)
    coeff = contract(folded.data, [np.asarray(x, dtype=np.float64) for x in cert], skip=c)
    merged = sorted(coarse.blocks[c])
    arr = coeff.reshape(_block_dims(dims, merged), order="F")
    axes = [merged.index(m) for m in fine.blocks[i] + fine.blocks[j]]
    di = math.prod(_block_dims(dims, fine.blocks[i]))
    dj = math.prod(_block_dims(dims, fine.blocks[j]))
    mat = arr.transpose(axes).reshape((di, dj), order="F")
    u, _, vt = np.linalg.svd(mat)
    out = []
    for b, block in enumerate(fine.blocks):
        if b == i:
            out.append(u[:, 0].copy())
        elif b == j:
            out.append(vt[0].copy())
        else:
            out.append(np.asarray(cert[coarse.block_of(block[0])], dtype=np.float64).copy())
    return out


def estimate_unfolding(
    tensor: Tensor,
    part: Partition,
    p: float = 2,
    config: AscentConfig | None = None,
    starts: Iterable[Sequence[np.ndarray]] = (),
    stream: int = 0,
    random_starts: bool = True,
) -> NormEstimate:
    """Norm of ``unfold(tensor, part)``, exact where a closed form exists."""
    p = check_p(p)
    folded = unfold(tensor, part)
    if folded.order == 1:
        return norm_order1(folded, p)
    if folded.order == 2 and p == 2:
        return matrix_spectral_exact(folded)
    return alternating_ascent(folded, p, config, starts, stream, random_starts)


def polish(tensor: Tensor, part: Partition, p: float, config: AscentConfig, cert) -> NormEstimate:
    """Ascent on ``unfold(tensor, part)`` from a single warm start."""
    return alternating_ascent(unfold(tensor, part), p, config, [cert], random_starts=False)


def _better(candidate: NormEstimate, current: NormEstimate) -> bool:
    return candidate.value > current.value + 1e-14 * max(1.0, abs(current.value))


def landscape(
    tensor: Tensor,
    p: float = 2,
    config: AscentConfig | None = None,
    max_sweeps: int = 20,
) -> dict[Partition, NormEstimate]:
    """Norm estimates of every unfolding of ``tensor``, keyed by partition.

    Partitions are processed finest level first. Each one runs its own random
    restarts plus warm starts lifted from every finer cover neighbour, so the
    estimates never decrease along a cover edge. At p = 2 the result is then
    swept to a fixed point: certificates are split down each cover edge
    (singular pair of the merged block) and lifted back up, which also makes
    the one-step lower bound hold between the stored estimates.
    """
    p = check_p(p)
    config = config or AscentConfig()
    k = tensor.order
    parts = enumerate_partitions(k)
    stream = {part: n for n, part in enumerate(parts)}
    ordered = sorted(parts, key=lambda q: (-q.level, q.rgs))
    finer: dict[Partition, list[Partition]] = {q: [] for q in parts}
    coarser: dict[Partition, list[Partition]] = {q: [] for q in parts}
    for f, c in cover_edges(k):
        finer[c].append(f)
        coarser[f].append(c)
    dims = tensor.dims

    est: dict[Partition, NormEstimate] = {}
    for part in ordered:
        lifts = [warm_start_lift(est[f].certificate, f, part, dims) for f in finer[part]]
        est[part] = estimate_unfolding(tensor, part, p, config, lifts, stream[part])

    if p != 2:
        return {q: est[q] for q in parts}

    for _ in range(max_sweeps):
        changed = False
        for part in reversed(ordered):
            if est[part].is_exact:
                continue
            for c in coarser[part]:
                cand = polish(tensor, part, p, config, split_certificate(tensor, est[c].certificate, part, c))
                if _better(cand, est[part]):
                    est[part], changed = cand, True
        for part in ordered:
            if est[part].is_exact:
                continue
            for f in finer[part]:
                cand = polish(tensor, part, p, config, warm_start_lift(est[f].certificate, f, part, dims))
                if _better(cand, est[part]):
                    est[part], changed = cand, True
        if not changed:
            break
    return {q: est[q] for q in parts}


def cross_estimates(
    tensor: Tensor, p: float, q: float, config: AscentConfig | None = None, rounds: int = 10
) -> tuple[NormEstimate, NormEstimate]:
    """Estimates of the p- and q-norms, each warm-started from the other's certificate.

    Alternates until neither side improves, so the returned pair satisfies
    both sides of the p/q sandwich between themselves.
    """
    p, q = check_p(p), check_p(q)
    config = config or AscentConfig()
    est_p = alternating_ascent(tensor, p, config, stream=0)
    if p == q:
        return est_p, est_p
    est_q = alternating_ascent(tensor, q, config, [renormalize(est_p.certificate, q)], stream=1)
    for _ in range(rounds):
        cand_p = alternating_ascent(
            tensor, p, config, [renormalize(est_q.certificate, p)], random_starts=False
        )
        improved = _better(cand_p, est_p)
        if improved:
            est_p = cand_p
        cand_q = alternating_ascent(
            tensor, q, config, [renormalize(est_p.certificate, q)], random_starts=False
        )
        if _better(cand_q, est_q):
            est_q, improved = cand_q, True
        if not improved:
            break
    return est_p, est_q

