"""Dense real tensors with a mode-1-fastest layout and partition unfoldings.

The linear offset of the 1-based index ``(i_1, ..., i_k)`` is
``sum_r (i_r - 1) * prod_{l<r} d_l``, i.e. Fortran order. An unfolding along a
partition merges the modes of every block into one mode using the same rule
restricted to the block (earliest mode fastest), so vectorization is the
identity on the flat storage.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import MismatchError, NonFiniteError, RangeError, ShapeError
from .partitions import Partition


@dataclass(frozen=True, eq=False)
class Tensor:
    """Immutable order-k hypermatrix.

    ``data`` is a read-only ndarray of shape ``dims``; indexing it with
    0-based indices gives the entry ``a_{i_1 ... i_k}``.
    """

    data: np.ndarray

    def __post_init__(self):
        arr = np.array(self.data, dtype=np.float64, order="F")
        if arr.ndim < 1:
            raise ShapeError("a tensor needs order k >= 1")
        if any(d < 1 for d in arr.shape):
            raise ShapeError(f"every dimension must be positive, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise NonFiniteError("tensor entries must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(self.data.shape)

    @property
    def order(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        """Total dimension ``prod(dims)``."""
        return int(self.data.size)

    @property
    def values(self) -> np.ndarray:
        """Flat entries in the mode-1-fastest linear layout."""
        return self.data.ravel(order="F")

    def __mul__(self, c: float) -> "Tensor":
        return Tensor(self.data * float(c))

    __rmul__ = __mul__

    def __add__(self, other: "Tensor") -> "Tensor":
        _same_dims(self, other)
        return Tensor(self.data + other.data)

    def __repr__(self) -> str:
        return f"Tensor(dims={self.dims})"

    def to_json(self) -> dict:
        return {"dims": list(self.dims), "data": [float(v) for v in self.values]}

    @classmethod
    def from_json(cls, obj: dict) -> "Tensor":
        try:
            dims, data = obj["dims"], obj["data"]
        except (KeyError, TypeError):
            raise ShapeError("tensor JSON needs 'dims' and 'data'") from None
        return make_tensor(dims, data)


def make_tensor(dims: Sequence[int], values: Sequence[float]) -> Tensor:
    """Build a tensor from its dimensions and flat mode-1-fastest values."""
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 1 for d in dims):
        raise ShapeError(f"invalid dimension vector {dims}")
    flat = np.asarray(values, dtype=np.float64).ravel()
    if flat.size != math.prod(dims):
        raise ShapeError(f"{flat.size} values for dims {dims} (need {math.prod(dims)})")
    if not np.all(np.isfinite(flat)):
        raise NonFiniteError("tensor entries must be finite")
    return Tensor(flat.reshape(dims, order="F"))


def load_tensor(path: str | Path) -> Tensor:
    with open(path) as fh:
        return Tensor.from_json(json.load(fh))


def save_tensor(tensor: Tensor, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(tensor.to_json(), fh)
        fh.write("\n")


def _same_dims(a: Tensor, b: Tensor) -> None:
    if a.dims != b.dims:
        raise MismatchError(f"dimension mismatch {a.dims} vs {b.dims}")


def _check_partition(part: Partition, order: int) -> None:
    if part.k != order:
        raise MismatchError(f"partition of {part.k} modes applied to an order-{order} tensor")


def unfolded_dims(dims: Sequence[int], part: Partition) -> tuple[int, ...]:
    _check_partition(part, len(dims))
    return tuple(math.prod(dims[m - 1] for m in block) for block in part.blocks)


def unfold_index(part: Partition, dims: Sequence[int], idx: Sequence[int]) -> tuple[int, ...]:
    """Map a 1-based tensor index to its 1-based index in the unfolding."""
    _check_partition(part, len(dims))
    if len(idx) != len(dims):
        raise RangeError(f"index {tuple(idx)} has wrong length for dims {tuple(dims)}")
    for i, d in zip(idx, dims):
        if not 1 <= i <= d:
            raise RangeError(f"index {tuple(idx)} out of range for dims {tuple(dims)}")
    out = []
    for block in part.blocks:
        m, stride = 1, 1
        for r in block:
            m += (idx[r - 1] - 1) * stride
            stride *= dims[r - 1]
        out.append(m)
    return tuple(out)


def _mode_order(part: Partition) -> list[int]:
    return [m - 1 for block in part.blocks for m in block]


def unfold(tensor: Tensor, part: Partition) -> Tensor:
    """Order-``level`` unfolding of ``tensor`` induced by ``part``."""
    _check_partition(part, tensor.order)
    shape = unfolded_dims(tensor.dims, part)
    moved = tensor.data.transpose(_mode_order(part))
    return Tensor(moved.reshape(shape, order="F"))


def refold(unfolded: Tensor, part: Partition, dims: Sequence[int]) -> Tensor:
    """Inverse of :func:`unfold` for a tensor of dimensions ``dims``."""
    dims = tuple(int(d) for d in dims)
    if part.k != len(dims):
        raise ShapeError(f"partition of {part.k} modes does not fit dims {dims}")
    if unfolded.dims != unfolded_dims(dims, part):
        raise ShapeError(f"unfolded dims {unfolded.dims} inconsistent with {dims} under {part}")
    order = _mode_order(part)
    moved = unfolded.data.reshape([dims[m] for m in order], order="F")
    return Tensor(moved.transpose(np.argsort(order)))


def inner_product(a: Tensor, b: Tensor) -> float:
    _same_dims(a, b)
    return float(np.dot(a.values, b.values))


def frobenius(tensor: Tensor) -> float:
    return float(np.linalg.norm(tensor.values))


def outer_rank1(*vectors: Sequence[float]) -> Tensor:
    """The rank-1 tensor ``x_1 ⊗ ... ⊗ x_k``."""
    if not vectors:
        raise ShapeError("need at least one vector")
    out = np.asarray(vectors[0], dtype=np.float64)
    for v in vectors[1:]:
        out = np.multiply.outer(out, np.asarray(v, dtype=np.float64))
    return Tensor(out)


def _check_vectors(tensor: Tensor, vectors: Sequence) -> list[np.ndarray]:
    if len(vectors) != tensor.order:
        raise MismatchError(f"need {tensor.order} vectors, got {len(vectors)}")
    out = []
    for n, (v, d) in enumerate(zip(vectors, tensor.dims), start=1):
        v = np.asarray(v, dtype=np.float64).ravel()
        if v.size != d:
            raise MismatchError(f"vector for mode {n} has length {v.size}, expected {d}")
        out.append(v)
    return out


def contract(data: np.ndarray, vectors: Sequence[np.ndarray], skip: int | None = None):
    """Contract every mode of ``data`` except ``skip`` with the given vectors."""
    out = data
    for m in reversed(range(data.ndim)):
        if m != skip:
            out = np.tensordot(out, vectors[m], axes=([m], [0]))
    return out


def multilinear_apply(tensor: Tensor, *vectors: Sequence[float]) -> float:
    """Evaluate the multilinear form ``A(x_1, ..., x_k) = <A, x_1 ⊗ ... ⊗ x_k>``."""
    return float(contract(tensor.data, _check_vectors(tensor, vectors)))


def multilinear_matrix_mult(tensor: Tensor, *matrices) -> Tensor:
    """Covariant multiplication ``A(M_1, ..., M_k)``; mode n is contracted with the rows of M_n."""
    if len(matrices) != tensor.order:
        raise MismatchError(f"need {tensor.order} matrices, got {len(matrices)}")
    out = tensor.data
    for n, (mat, d) in enumerate(zip(matrices, tensor.dims)):
        mat = np.asarray(mat, dtype=np.float64)
        if mat.ndim == 1:
            mat = mat[:, None]
        if mat.ndim != 2 or mat.shape[0] != d:
            raise MismatchError(f"matrix for mode {n + 1} must have {d} rows, got {mat.shape}")
        # tensordot appends the new axis last; move it back into place
        out = np.moveaxis(np.tensordot(out, mat, axes=([n], [0])), -1, n)
    return Tensor(out)
