"""HOMLDA: discriminant analysis on lateral-slice data through ``*_L``.

Scatter tensors are accumulated directly in the transform domain: each
sample is transformed once and its centered slice contributes ``d d^H`` to
every frontal slice. This equals the spatial-domain sum of
``d *_L trans_L(d)`` by linearity of the transform.
"""

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionError,
    EmptyClassError,
    ParameterError,
    SingularSliceError,
)
from .tensor_core import from_slices, to_slices
from .tl_algebra import (
    SliceConditionReport,
    eig_slices,
    inverse_slices,
    kappa_slices,
    slice_indices,
)
from .transforms import (
    TransformKind,
    from_transform_domain,
    make_spec,
    pad_for_transform,
    to_transform_domain,
)

__all__ = [
    "Method",
    "LabeledTensorDataset",
    "DiscriminantModel",
    "class_means",
    "within_class_scatter",
    "between_class_scatter",
    "homlda_fit",
    "project",
    "scatter_slices",
    "matrix_lda_fit",
    "vectorize_samples",
]


class Method(str, enum.Enum):
    HOMLDA = "homlda"
    RHOMLDA = "rhomlda"
    MATRIX_LDA = "matrix-lda"


@dataclass(frozen=True)
class LabeledTensorDataset:
    """Samples stacked as lateral slices of ``data`` (``m1 x l x m3 x ... x mn``)."""

    data: np.ndarray
    labels: tuple

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float)
        if data.ndim < 2:
            raise DimensionError("data tensor needs at least two modes")
        labels = tuple(str(x) for x in self.labels)
        if len(labels) != data.shape[1]:
            raise DimensionError(
                f"{len(labels)} labels for {data.shape[1]} lateral slices"
            )
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "labels", labels)

    @property
    def n_samples(self):
        return self.data.shape[1]

    @property
    def sample_dims(self):
        return (self.data.shape[0],) + self.data.shape[2:]

    @property
    def classes(self):
        return tuple(sorted(set(self.labels)))

    @property
    def class_index(self):
        index = {c: [] for c in self.classes}
        for j, label in enumerate(self.labels):
            index[label].append(j)
        return index

    def subset(self, indices):
        indices = np.asarray(indices, dtype=int)
        return LabeledTensorDataset(
            self.data[:, indices, ...], tuple(self.labels[j] for j in indices)
        )


def _shifted_mean(X, axis):
    # Mean about the first entry: exact when all entries along ``axis`` agree.
    x0 = np.take(X, [0], axis=axis)
    return x0 + (X - x0).mean(axis=axis, keepdims=True)


def class_means(ds, classes=None):
    """Per-class and global mean lateral slices.

    Returns
    -------
    classes : tuple of str
        Class ids in lexicographic order.
    means : ndarray
        ``m1 x c x m3 x ... x mn``; lateral slice ``i`` is the mean of class ``i``.
    global_mean : ndarray
        ``m1 x 1 x m3 x ... x mn``.
    """
    index = ds.class_index
    classes = tuple(classes) if classes is not None else ds.classes
    means = []
    for c in classes:
        members = index.get(c, [])
        if not members:
            raise EmptyClassError(f"class {c!r} has no samples")
        means.append(_shifted_mean(ds.data[:, members, ...], 1)[:, 0])
    if ds.n_samples == 0:
        raise EmptyClassError("dataset is empty")
    return classes, np.stack(means, axis=1), _shifted_mean(ds.data, 1)


def _scatter_hats(data_hat, labels, classes):
    """Transform-domain within, between and total scatter slice stacks."""
    A = to_slices(data_hat)  # (S, m1, l)
    labels = np.asarray(labels)
    centered = np.empty_like(A)
    mean_all = _shifted_mean(A, 2)
    between = np.zeros((A.shape[0], A.shape[1], A.shape[1]), dtype=complex)
    for c in classes:
        cols = np.flatnonzero(labels == c)
        mean_c = _shifted_mean(A[:, :, cols], 2)
        centered[:, :, cols] = A[:, :, cols] - mean_c
        diff = mean_c - mean_all
        between += len(cols) * (diff @ np.swapaxes(diff, 1, 2).conj())
    within = centered @ np.swapaxes(centered, 1, 2).conj()
    return within, between


def _prepared(ds, spec):
    return to_transform_domain(pad_for_transform(ds.data, spec), spec)


def _default_spec(ds, spec):
    return spec if spec is not None else make_spec(TransformKind.IDENTITY, ds.data.shape[2:])


def scatter_slices(ds, spec):
    """Transform-domain within- and between-class slice stacks ``(S, m1, m1)``."""
    return _scatter_hats(_prepared(ds, spec), ds.labels, ds.classes)


def within_class_scatter(ds, spec=None):
    """Within-class scatter tensor ``m1 x m1 x m3 x ... x mn``."""
    spec = _default_spec(ds, spec)
    W, _ = _scatter_hats(_prepared(ds, spec), ds.labels, ds.classes)
    return from_transform_domain(from_slices(W, spec.padded_dims), spec)


def between_class_scatter(ds, spec=None):
    """Between-class scatter tensor ``m1 x m1 x m3 x ... x mn``."""
    spec = _default_spec(ds, spec)
    _, B = _scatter_hats(_prepared(ds, spec), ds.labels, ds.classes)
    return from_transform_domain(from_slices(B, spec.padded_dims), spec)


@dataclass
class DiscriminantModel:
    """A trained projection plus what nearest-neighbor scoring needs.

    For ``Method.MATRIX_LDA`` samples are vectorized first, so ``U_p`` has
    shape ``d x p x 1`` with ``d`` the sample size, under an identity transform.
    """

    U_p: np.ndarray
    p: int
    spec: object
    method: Method
    class_ids: tuple
    sample_dims: tuple
    conditioning: SliceConditionReport = None
    conditioning_post: SliceConditionReport = None
    params: object = None
    train_projections: np.ndarray = None
    train_labels: tuple = ()
    U_hat: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        self.U_p = np.ascontiguousarray(self.U_p, dtype=float)
        if self.train_projections is not None:
            self.train_projections = np.ascontiguousarray(self.train_projections, dtype=float)
        if self.U_hat is None:
            self.U_hat = to_slices(to_transform_domain(self.U_p, self.spec))


def vectorize_samples(data):
    """Column-major vectorization of each lateral slice: ``d x l x 1``."""
    data = np.asarray(data)
    moved = np.moveaxis(data, 1, -1)
    return moved.reshape(-1, data.shape[1], order="F")[:, :, None]


def project(model, X):
    """``trans_L(U_p) *_L X`` for samples ``X`` (``m1 x q x m3 x ... x mn``)."""
    X = np.asarray(X, dtype=float)
    dims = (X.shape[0],) + X.shape[2:] if X.ndim >= 2 else None
    if dims != tuple(model.sample_dims):
        raise DimensionError(
            f"samples of dims {dims} do not match model sample dims {tuple(model.sample_dims)}"
        )
    if model.method is Method.MATRIX_LDA:
        X = vectorize_samples(X)
    else:
        X = pad_for_transform(X, model.spec)
    Xh = to_slices(to_transform_domain(X, model.spec))
    T = np.swapaxes(model.U_hat, 1, 2).conj() @ Xh
    return from_transform_domain(from_slices(T, model.spec.padded_dims), model.spec)


def _check_p(p, n_classes, m1):
    limit = min(n_classes - 1, m1)
    if p is None:
        p = limit
    if limit < 1:
        raise ParameterError(f"need at least two classes for discriminant analysis, got {n_classes}")
    if not 1 <= p <= limit:
        raise ParameterError(
            f"p={p} out of range: at most c-1={n_classes - 1} informative directions"
            f" (and at most m1={m1})"
        )
    return int(p)


def _projection_from_scatters(W, B, spec, p):
    """Leading ``p`` eigenvectors of ``inv(W) B`` per slice, as a spatial tensor."""
    M = inverse_slices(W, spec) @ B
    _, vectors = eig_slices(M, spec, n_check=p)
    U_hat = vectors[:, :, :p]
    return from_transform_domain(from_slices(U_hat, spec.padded_dims), spec)


def _fit(ds, p, spec, method, W_transform=None, params=None):
    spec = _default_spec(ds, spec)
    if tuple(ds.data.shape[2:]) not in (spec.original_dims, spec.padded_dims):
        raise DimensionError(
            f"data trailing dims {ds.data.shape[2:]} do not match transform {spec.original_dims}"
        )
    classes = ds.classes
    p = _check_p(p, len(classes), ds.data.shape[0])
    W, B = _scatter_hats(_prepared(ds, spec), ds.labels, classes)
    pre = SliceConditionReport(
        slice_indices(spec),
        kappa_slices(W),
        params.kappa_threshold if params is not None else 1e5,
    )
    post = None
    if W_transform is not None:
        W, post = W_transform(W)
    try:
        U_p = _projection_from_scatters(W, B, spec, p)
    except SingularSliceError as exc:
        if method is Method.HOMLDA:
            raise SingularSliceError(
                "within-class scatter slice is singular; use RHOMLDA", exc.index
            ) from None
        raise
    model = DiscriminantModel(
        U_p=U_p,
        p=p,
        spec=spec,
        method=method,
        class_ids=classes,
        sample_dims=ds.sample_dims,
        conditioning=pre,
        conditioning_post=post,
        params=params,
        train_labels=ds.labels,
    )
    model.train_projections = project(model, ds.data)
    return model


def homlda_fit(ds, p=None, spec=None):
    """Fit HOMLDA by solving ``inv_L(W) *_L B`` with ``t_eig``.

    Parameters
    ----------
    ds : LabeledTensorDataset
    p : int, optional
        Retained eigentensors; defaults to ``c - 1``.
    spec : TransformSpec, optional
        Defaults to the identity transform.

    Raises
    ------
    SingularSliceError
        A transform-domain slice of the within-class scatter is singular.
    ParameterError
        ``p`` outside ``1..c-1``.
    """
    return _fit(ds, p, spec, Method.HOMLDA)


def _lda_scatter_matrices(X, labels):
    labels = np.asarray(labels)
    m = X.mean(axis=0)
    d = X.shape[1]
    S_W = np.zeros((d, d))
    S_B = np.zeros((d, d))
    for c in sorted(set(labels.tolist())):
        Xc = X[labels == c]
        m_c = Xc.mean(axis=0)
        D = Xc - m_c
        S_W += D.T @ D
        S_B += len(Xc) * np.outer(m_c - m, m_c - m)
    return S_W, S_B


def matrix_lda_fit(vectors, labels, p=None):
    """Classic LDA on row vectors; returns the ``d x p`` projection matrix.

    Directions are the leading eigenvectors of ``inv(S_W) S_B``, scaled to unit
    norm with the first significant component positive.
    """
    X = np.asarray(vectors, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    n_classes = len(set(labels))
    p = _check_p(p, n_classes, X.shape[1])
    S_W, S_B = _lda_scatter_matrices(X, labels)
    sv = np.linalg.svd(S_W, compute_uv=False)
    if sv[0] == 0 or sv[-1] <= sv[0] * S_W.shape[0] * np.finfo(float).eps:
        raise SingularSliceError("within-class scatter matrix is singular")
    w, V = np.linalg.eig(np.linalg.solve(S_W, S_B))
    order = np.lexsort((np.arange(w.size), -w.real, -np.abs(w)))
    V = V[:, order[:p]].real
    V /= np.linalg.norm(V, axis=0, keepdims=True)
    for j in range(p):
        col = np.abs(V[:, j])
        lead = int(np.argmax(col > 1e-10 * col.max()))
        if V[lead, j] < 0:
            V[:, j] = -V[:, j]
    return V


def _matrix_lda_model(ds, p=None):
    """Matrix LDA wrapped as a model over vectorized samples."""
    vec = vectorize_samples(ds.data)
    U = matrix_lda_fit(vec[:, :, 0].T, ds.labels, p)
    spec = make_spec(TransformKind.IDENTITY, (1,))
    model = DiscriminantModel(
        U_p=U[:, :, None],
        p=U.shape[1],
        spec=spec,
        method=Method.MATRIX_LDA,
        class_ids=ds.classes,
        sample_dims=ds.sample_dims,
        train_labels=ds.labels,
    )
    model.train_projections = project(model, ds.data)
    return model
