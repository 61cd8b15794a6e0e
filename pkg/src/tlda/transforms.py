"""Invertible transforms applied along modes 3..n.

Four kinds are supported: unitary DFT, orthonormal type-II DCT, level-1 Haar
wavelet and the identity. Haar needs even mode lengths, so odd modes are
zero-padded by one hyperslice before transforming.
"""

import enum
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DimensionError, NonRealResultError, PaddingRequiredError
from .tensor_core import frobenius_norm, mode_product

__all__ = [
    "TransformKind",
    "TransformSpec",
    "TransformMatrixPair",
    "make_transform",
    "make_spec",
    "pad_for_transform",
    "to_transform_domain",
    "from_transform_domain",
    "IMAG_TOLERANCE",
]

IMAG_TOLERANCE = 1e-8


class TransformKind(str, enum.Enum):
    DFT = "dft"
    DCT = "dct"
    HAAR = "dwt"
    IDENTITY = "identity"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).lower()
        if key == "haar":
            key = "dwt"
        try:
            return cls(key)
        except ValueError:
            choices = ", ".join(k.value for k in cls)
            raise ValueError(f"unknown transform {value!r}; expected one of {choices}") from None


@dataclass(frozen=True)
class TransformMatrixPair:
    forward: np.ndarray
    inverse: np.ndarray


@dataclass(frozen=True)
class TransformSpec:
    """Which transform acts on which modes, plus Haar padding bookkeeping.

    ``original_dims`` and ``padded_dims`` are the trailing dimensions (modes
    3..n); modes 1 and 2 are never transformed.
    """

    kind: TransformKind
    original_dims: tuple
    padded_dims: tuple

    @property
    def transformed_modes(self):
        return tuple(range(3, 3 + len(self.padded_dims)))

    @property
    def n_slices(self):
        return int(np.prod(self.padded_dims, dtype=np.int64))

    @property
    def is_real(self):
        return self.kind is not TransformKind.DFT

    def matrices(self):
        return [make_transform(self.kind, m) for m in self.padded_dims]


def make_spec(kind, trailing):
    """Build a :class:`TransformSpec` for tensors with the given trailing dims."""
    kind = TransformKind.parse(kind)
    original = tuple(int(m) for m in trailing)
    if kind is TransformKind.HAAR:
        padded = tuple(m + (m % 2) for m in original)
    else:
        padded = original
    return TransformSpec(kind, original, padded)


def _dft_matrix(m):
    # Exponents reduced mod m keep w^0 exactly 1 and the matrix exactly symmetric.
    jk = np.outer(np.arange(m), np.arange(m)) % m
    return np.exp(-2j * np.pi * jk / m) / np.sqrt(m)


def _dct_matrix(m):
    k = np.arange(m)[:, None]
    n = np.arange(m)[None, :]
    C = np.cos(np.pi * (2 * n + 1) * k / (2 * m)) * np.sqrt(2.0 / m)
    C[0, :] = np.sqrt(1.0 / m)
    return C


def _haar_matrix(m):
    half = m // 2
    H = np.zeros((m, m))
    s = 1.0 / np.sqrt(2.0)
    for i in range(half):
        H[i, 2 * i] = H[i, 2 * i + 1] = s
        H[half + i, 2 * i] = s
        H[half + i, 2 * i + 1] = -s
    return H


@lru_cache(maxsize=None)
def _cached_pair(kind, m):
    if kind is TransformKind.DFT:
        F = _dft_matrix(m)
        return F, F.conj().T
    if kind is TransformKind.DCT:
        C = _dct_matrix(m)
    elif kind is TransformKind.HAAR:
        C = _haar_matrix(m)
    else:
        C = np.eye(m)
    return C, C.T.copy()


def make_transform(kind, m):
    """Forward/inverse matrices of size ``m x m`` for a transform kind."""
    kind = TransformKind.parse(kind)
    m = int(m)
    if m < 1:
        raise DimensionError(f"transform size must be positive, got {m}")
    if kind is TransformKind.HAAR and m % 2:
        raise PaddingRequiredError(f"level-1 Haar needs an even length, got {m}; pad first")
    forward, inverse = _cached_pair(kind, m)
    forward = forward.astype(complex)
    inverse = inverse.astype(complex)
    forward.flags.writeable = False
    inverse.flags.writeable = False
    return TransformMatrixPair(forward, inverse)


def pad_for_transform(A, spec):
    """Append zero hyperslices so trailing modes reach ``spec.padded_dims``.

    Returns ``A`` itself when no padding is needed.
    """
    A = np.asarray(A)
    trailing = A.shape[2:]
    if trailing == spec.padded_dims:
        return A
    if trailing != spec.original_dims:
        raise DimensionError(
            f"trailing dims {trailing} match neither {spec.original_dims} nor {spec.padded_dims}"
        )
    widths = [(0, 0), (0, 0)] + [(0, p - o) for o, p in zip(trailing, spec.padded_dims)]
    return np.pad(A, widths)


def _check_trailing(A, spec):
    if tuple(np.shape(A)[2:]) != spec.padded_dims:
        raise DimensionError(
            f"trailing dims {tuple(np.shape(A)[2:])} do not match transform dims {spec.padded_dims}"
        )


def to_transform_domain(A, spec):
    """Apply the forward matrix along every mode 3..n; the result is complex."""
    A = np.asarray(A)
    _check_trailing(A, spec)
    out = A.astype(complex)
    if spec.kind is TransformKind.IDENTITY:
        return out
    for mode, pair in zip(spec.transformed_modes, spec.matrices()):
        out = mode_product(out, pair.forward, mode)
    return out


def from_transform_domain(At, spec, truncate=False, check_real=True):
    """Apply the inverse matrices along modes n..3 and return real data.

    Parameters
    ----------
    At : ndarray
        Transform-domain tensor.
    spec : TransformSpec
    truncate : bool
        Drop Haar padding so the result has ``spec.original_dims``.
    check_real : bool
        When true, raise :class:`NonRealResultError` if the largest imaginary
        magnitude exceeds ``1e-8 * ||At||_F``; otherwise return complex data.
    """
    At = np.asarray(At)
    _check_trailing(At, spec)
    out = At.astype(complex)
    if spec.kind is not TransformKind.IDENTITY:
        pairs = spec.matrices()
        for mode, pair in reversed(list(zip(spec.transformed_modes, pairs))):
            out = mode_product(out, pair.inverse, mode)
    if truncate and spec.padded_dims != spec.original_dims:
        out = out[(slice(None), slice(None)) + tuple(slice(0, m) for m in spec.original_dims)]
    if not check_real:
        return out
    residual = float(np.max(np.abs(out.imag))) if out.size else 0.0
    scale = frobenius_norm(At)
    if residual > IMAG_TOLERANCE * scale:
        raise NonRealResultError(
            f"imaginary residual {residual:.3e} exceeds {IMAG_TOLERANCE:g} x norm {scale:.3e}"
        )
    return np.ascontiguousarray(out.real)
