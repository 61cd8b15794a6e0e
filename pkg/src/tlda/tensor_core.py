"""Dense order-n tensors: unfolding, folding and the basic products.

Tensors are plain :class:`numpy.ndarray` objects. Mode indices follow the
mathematical convention and are 1-based (``k = 1`` is the row mode). Index
arithmetic is generalized column-major: the mode-1 index varies fastest, so
``unfold(A, 1)`` is a reinterpretation of the Fortran-ordered buffer.
"""

import numpy as np

from .errors import DimensionError, ModeIndexError

__all__ = [
    "as_tensor",
    "unfold",
    "fold",
    "mode_product",
    "facewise_product",
    "frobenius_norm",
    "lateral_slice",
    "stack_lateral",
    "trailing_dims",
    "to_slices",
    "from_slices",
]


def as_tensor(A, dtype=None):
    """Return ``A`` as an ndarray of order >= 2 (vectors become columns)."""
    A = np.asarray(A, dtype=dtype)
    if A.ndim == 0:
        A = A.reshape(1, 1)
    elif A.ndim == 1:
        A = A[:, None]
    return A


def _check_mode(A, k):
    if not 1 <= k <= A.ndim:
        raise ModeIndexError(f"mode {k} out of range for an order-{A.ndim} tensor")


def unfold(A, k):
    """Mode-``k`` unfolding of ``A``.

    Parameters
    ----------
    A : ndarray
        Order-n tensor.
    k : int
        Mode, 1-based.

    Returns
    -------
    ndarray of shape ``(A.shape[k-1], prod(other dims))``
        Column ``j`` is a mode-k fiber. Remaining modes are enumerated in
        ascending order with the earliest one varying fastest.
    """
    A = np.asarray(A)
    _check_mode(A, k)
    moved = np.moveaxis(A, k - 1, 0)
    return moved.reshape(A.shape[k - 1], -1, order="F")


def fold(M, k, dims):
    """Inverse of :func:`unfold`: rebuild a tensor of shape ``dims``."""
    M = np.asarray(M)
    dims = tuple(int(d) for d in dims)
    if not 1 <= k <= len(dims):
        raise ModeIndexError(f"mode {k} out of range for an order-{len(dims)} tensor")
    rest = dims[: k - 1] + dims[k:]
    if M.ndim != 2 or M.shape[0] != dims[k - 1] or M.shape[1] != int(np.prod(rest, dtype=np.int64)):
        raise DimensionError(f"matrix of shape {M.shape} cannot fold to {dims} along mode {k}")
    moved = M.reshape((dims[k - 1],) + rest, order="F")
    return np.moveaxis(moved, 0, k - 1)


def mode_product(A, B, k):
    """Mode-``k`` product ``A x_k B`` for a ``d x m_k`` matrix ``B``."""
    A = np.asarray(A)
    B = np.asarray(B)
    _check_mode(A, k)
    if B.ndim != 2 or B.shape[1] != A.shape[k - 1]:
        raise DimensionError(
            f"matrix of shape {B.shape} does not conform to mode {k} of size {A.shape[k - 1]}"
        )
    # tensordot puts the new axis first; same values as fold(B @ unfold(A, k)).
    out = np.tensordot(B, A, axes=([1], [k - 1]))
    return np.moveaxis(out, 0, k - 1)


def trailing_dims(A):
    """Dimensions of modes 3..n (empty for matrices)."""
    return tuple(np.shape(A)[2:])


def to_slices(A):
    """View the frontal slices of ``A`` as a ``(S, m1, m2)`` stack.

    Slices are ordered by multi-index with mode 3 varying fastest.
    """
    A = np.asarray(A)
    m1, m2 = A.shape[:2]
    flat = A.reshape(m1, m2, int(np.prod(A.shape[2:])), order="F")
    return np.moveaxis(flat, 2, 0)


def from_slices(X, trailing):
    """Inverse of :func:`to_slices` for the given trailing dimensions."""
    X = np.asarray(X)
    _, m1, m2 = X.shape
    return np.moveaxis(X, 0, 2).reshape((m1, m2) + tuple(trailing), order="F")


def facewise_product(A, B):
    """Multiply corresponding frontal slices: ``C[:, :, i] = A[:, :, i] @ B[:, :, i]``."""
    A = np.asarray(A)
    B = np.asarray(B)
    if A.ndim != B.ndim or A.ndim < 2:
        raise DimensionError(f"orders differ: {A.shape} vs {B.shape}")
    if A.shape[1] != B.shape[0] or A.shape[2:] != B.shape[2:]:
        raise DimensionError(f"facewise product of {A.shape} and {B.shape} is not defined")
    C = np.matmul(to_slices(A), to_slices(B))
    return from_slices(C, A.shape[2:])


def frobenius_norm(A):
    """Square root of the sum of squared entry magnitudes (real or complex)."""
    return float(np.linalg.norm(np.ravel(A)))


def lateral_slice(A, j):
    """Lateral slice ``A(:, j, :, ..., :)`` keeping a singleton mode 2."""
    A = np.asarray(A)
    if not 0 <= j < A.shape[1]:
        raise IndexError(f"lateral slice {j} out of range for mode-2 size {A.shape[1]}")
    return A[:, j : j + 1, ...]


def stack_lateral(samples):
    """Stack equally shaped ``m1 x m2 x ... x mn`` samples as lateral slices.

    The result has shape ``(m1, len(samples), m2, ..., mn)``.
    """
    samples = [np.asarray(s) for s in samples]
    if not samples:
        raise DimensionError("cannot stack an empty sample list")
    shape = samples[0].shape
    for s in samples[1:]:
        if s.shape != shape:
            raise DimensionError(f"heterogeneous sample shapes {shape} and {s.shape}")
    if len(shape) == 0:
        raise DimensionError("samples must have at least one mode")
    return np.stack(samples, axis=1)
