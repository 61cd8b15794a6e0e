"""The ``*_L`` operator family, computed facewise in the transform domain."""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, NonDiagonalizableError, SingularSliceError
from .tensor_core import from_slices, to_slices
from .transforms import TransformKind, from_transform_domain, to_transform_domain

__all__ = [
    "TEigFactors",
    "SliceConditionReport",
    "tl_product",
    "tl_identity",
    "tl_transpose",
    "tl_inverse",
    "t_eig",
    "slice_condition_numbers",
    "slice_indices",
    "eig_slices",
    "inverse_slices",
    "kappa_slices",
    "EIGVEC_COND_LIMIT",
    "DEFAULT_KAPPA_THRESHOLD",
]

EIGVEC_COND_LIMIT = 1e10
DEFAULT_KAPPA_THRESHOLD = 1e5


def slice_indices(spec):
    """Zero-based multi-indices of the frontal slices, mode 3 fastest."""
    dims = spec.padded_dims
    if not dims:
        return [()]
    flat = np.arange(spec.n_slices)
    return list(zip(*(idx.tolist() for idx in np.unravel_index(flat, dims, order="F"))))


def _hat_slices(A, spec):
    return to_slices(to_transform_domain(A, spec))


def _spatial(slices, spec, check_real=True):
    return from_transform_domain(from_slices(slices, spec.padded_dims), spec, check_real=check_real)


def tl_product(A, B, spec):
    """``A *_L B``: facewise product in the transform domain, mapped back."""
    A = np.asarray(A)
    B = np.asarray(B)
    if A.ndim != B.ndim or A.shape[1] != B.shape[0] or A.shape[2:] != B.shape[2:]:
        raise DimensionError(f"tl-product of {A.shape} and {B.shape} is not defined")
    C = np.matmul(_hat_slices(A, spec), _hat_slices(B, spec))
    return _spatial(C, spec)


def tl_identity(m, spec):
    """Tensor whose transform-domain frontal slices are all ``I_m``."""
    eye = np.broadcast_to(np.eye(m, dtype=complex), (spec.n_slices, m, m))
    return _spatial(np.array(eye), spec)


def tl_transpose(A, spec, conjugate=True):
    """Transpose every transform-domain slice.

    ``conjugate=False`` gives the plain (non-conjugating) transpose; it only
    differs from the default under the DFT.
    """
    Ah = _hat_slices(A, spec)
    Bh = np.swapaxes(Ah, 1, 2)
    if conjugate:
        Bh = Bh.conj()
    return _spatial(Bh, spec, check_real=spec.kind is not TransformKind.DFT or conjugate)


def inverse_slices(slices, spec):
    """Invert each slice; singular ones raise with their multi-index."""
    out = np.empty_like(slices)
    indices = None
    for s, M in enumerate(slices):
        m = M.shape[0]
        sv = np.linalg.svd(M, compute_uv=False)
        if sv[0] == 0 or sv[-1] <= sv[0] * m * np.finfo(float).eps:
            indices = indices or slice_indices(spec)
            raise SingularSliceError("frontal slice is singular to machine precision", indices[s])
        out[s] = np.linalg.inv(M)
    return out


def tl_inverse(A, spec):
    """Tensor inverse: invert each transform-domain frontal slice."""
    A = np.asarray(A)
    if A.shape[0] != A.shape[1]:
        raise DimensionError(f"frontal slices of shape {A.shape[:2]} are not square")
    return _spatial(inverse_slices(_hat_slices(A, spec), spec), spec)


def _sort_order(values):
    # lexsort: last key is primary.
    idx = np.arange(values.size)
    return np.lexsort((idx, -values.imag, -values.real, -np.abs(values)))


def _fix_phase(V):
    """Unit columns with the first significant entry made real positive."""
    V = V / np.linalg.norm(V, axis=0, keepdims=True)
    mags = np.abs(V)
    for j in range(V.shape[1]):
        col = mags[:, j]
        lead = int(np.argmax(col > 1e-10 * col.max()))
        phase = V[lead, j] / col[lead]
        V[:, j] = V[:, j] / phase
        V[lead, j] = col[lead]
    return V


def _conjugate_partners(spec):
    """For each DFT slice, the flat index of its complex-conjugate partner."""
    dims = spec.padded_dims
    if not dims:
        return np.zeros(1, dtype=int)
    multi = np.unravel_index(np.arange(spec.n_slices), dims, order="F")
    neg = tuple((-i) % m for i, m in zip(multi, dims))
    return np.ravel_multi_index(neg, dims, order="F")


def eig_slices(slices, spec, enforce_conjugate_pairs=True, n_check=None):
    """Eigendecomposition of every slice, sorted by descending modulus.

    Returns ``(values, vectors)`` with shapes ``(S, m)`` and ``(S, m, m)``.
    Under the DFT, slices of a real spatial tensor come in conjugate pairs;
    with ``enforce_conjugate_pairs`` only one member of each pair is solved
    and the other is set to its conjugate, which keeps the spatial factors
    real. ``n_check`` limits the diagonalizability check to the leading
    eigenvectors (callers that keep only those need nothing more).
    """
    S, m, _ = slices.shape
    values = np.empty((S, m), dtype=complex)
    vectors = np.empty((S, m, m), dtype=complex)
    partners = None
    if enforce_conjugate_pairs and spec.kind is TransformKind.DFT:
        partners = _conjugate_partners(spec)
    indices = None
    for s in range(S):
        if partners is not None and partners[s] < s:
            values[s] = values[partners[s]].conj()
            vectors[s] = vectors[partners[s]].conj()
            continue
        w, V = np.linalg.eig(slices[s])
        order = _sort_order(w)
        w, V = w[order], _fix_phase(V[:, order])
        if np.linalg.cond(V[:, :n_check]) > EIGVEC_COND_LIMIT:
            indices = indices or slice_indices(spec)
            raise NonDiagonalizableError(
                f"eigenvector condition exceeds {EIGVEC_COND_LIMIT:g}", indices[s]
            )
        values[s] = w
        vectors[s] = V
    return values, vectors


@dataclass(frozen=True)
class TEigFactors:
    """Result of :func:`t_eig`.

    ``Q_hat`` and ``S_hat`` hold the transform-domain slices as
    ``(S, m, m)`` stacks; ``Q`` and ``S`` map them back to the spatial domain.
    """

    Q_hat: np.ndarray
    S_hat: np.ndarray
    spec: object
    slice_eigs: np.ndarray

    @property
    def Q(self):
        return _spatial(self.Q_hat, self.spec)

    @property
    def S(self):
        return _spatial(self.S_hat, self.spec)

    def reconstruct(self):
        """``Q *_L S *_L inv_L(Q)``, mapped back to the spatial domain."""
        M = self.Q_hat @ self.S_hat @ np.linalg.inv(self.Q_hat)
        return _spatial(M, self.spec)


def t_eig(A, spec):
    """Transform-domain eigendecomposition ``A = Q *_L S *_L inv_L(Q)``."""
    A = np.asarray(A)
    if A.shape[0] != A.shape[1]:
        raise DimensionError(f"frontal slices of shape {A.shape[:2]} are not square")
    values, vectors = eig_slices(_hat_slices(A, spec), spec)
    m = A.shape[0]
    S_hat = np.zeros((values.shape[0], m, m), dtype=complex)
    S_hat[:, np.arange(m), np.arange(m)] = values
    return TEigFactors(vectors, S_hat, spec, values)


@dataclass(frozen=True)
class SliceConditionReport:
    """Per-slice condition numbers ``||M||_F ||M^-1||_F`` and ill flags."""

    indices: list
    kappa: np.ndarray
    threshold: float

    @property
    def ill(self):
        return self.kappa >= self.threshold

    def __len__(self):
        return len(self.indices)


def _kappa(M, hermitian_tol=1e-12):
    norm = np.linalg.norm(M)
    if norm == 0:
        return np.inf
    if np.linalg.norm(M - M.conj().T) <= hermitian_tol * norm:
        lam = np.linalg.eigvalsh((M + M.conj().T) / 2)
        if np.any(lam == 0):
            return np.inf
        return float(np.sqrt(np.sum(lam**2)) * np.sqrt(np.sum(lam**-2.0)))
    sv = np.linalg.svd(M, compute_uv=False)
    if sv[-1] <= sv[0] * M.shape[0] * np.finfo(float).eps:
        return np.inf
    return float(norm * np.linalg.norm(np.linalg.inv(M)))


def kappa_slices(slices):
    """Frobenius condition number of each ``(m, m)`` slice in a stack."""
    return np.array([_kappa(M) for M in slices], dtype=float)


def slice_condition_numbers(A, spec, threshold=DEFAULT_KAPPA_THRESHOLD):
    """Condition report for the transform-domain frontal slices of ``A``."""
    A = np.asarray(A)
    if A.shape[0] != A.shape[1]:
        raise DimensionError(f"frontal slices of shape {A.shape[:2]} are not square")
    kappa = kappa_slices(_hat_slices(A, spec))
    return SliceConditionReport(slice_indices(spec), kappa, float(threshold))
