"""Nearest-neighbor classification and stratified k-fold cross-validation."""

import time
from dataclasses import dataclass, field

import numpy as np

from .discriminant import Method, _matrix_lda_model, homlda_fit, project, vectorize_samples
from .errors import ParameterError, StratificationError
from .robust import RobustParams, rhomlda_fit
from .transforms import TransformKind, make_spec

__all__ = [
    "CvReport",
    "fit_model",
    "nn_classify",
    "stratified_folds",
    "kfold_cv",
]


def fit_model(ds, method, p=None, kind="identity", params=None):
    """Train a model by method name (``homlda``, ``rhomlda`` or ``matrix-lda``)."""
    method = Method(method)
    if method is Method.MATRIX_LDA:
        return _matrix_lda_model(ds, p)
    spec = make_spec(kind, ds.data.shape[2:])
    if method is Method.HOMLDA:
        return homlda_fit(ds, p, spec)
    return rhomlda_fit(ds, p, spec, params if params is not None else RobustParams())


def nn_classify(model, X):
    """Label each lateral slice of ``X`` with its nearest training projection.

    Distances are Frobenius norms in the projected space; ties go to the
    lowest training index.
    """
    test = vectorize_samples(project(model, X))[:, :, 0]
    train = vectorize_samples(model.train_projections)[:, :, 0]
    labels = model.train_labels
    out = []
    for j in range(test.shape[1]):
        d2 = np.sum((train - test[:, j : j + 1]) ** 2, axis=0)
        out.append(labels[int(np.argmin(d2))])
    return out


def stratified_folds(labels, folds, seed):
    """Assign each sample a fold in ``0..folds-1``.

    Within each class (lexicographic order) the indices are shuffled with a
    seeded generator and dealt round-robin, continuing the deal across
    classes so fold sizes stay balanced.
    """
    if folds < 2:
        raise ParameterError(f"need at least 2 folds, got {folds}")
    labels = list(labels)
    rng = np.random.default_rng(seed)
    assignment = np.empty(len(labels), dtype=int)
    cursor = 0
    for c in sorted(set(labels)):
        members = np.array([j for j, x in enumerate(labels) if x == c])
        if len(members) < folds:
            raise StratificationError(
                f"class {c!r} has {len(members)} samples, fewer than {folds} folds"
            )
        members = rng.permutation(members)
        assignment[members] = (cursor + np.arange(len(members))) % folds
        cursor += len(members)
    return assignment


@dataclass
class CvReport:
    accuracies: list
    mean: float
    std: float
    confusions: list
    class_ids: tuple
    assignment: np.ndarray
    method: str
    transform: str
    p: object
    params: object
    seed: int
    predictions: list = field(default_factory=list)
    wall_times: list = field(default_factory=list, compare=False)

    def __eq__(self, other):
        if not isinstance(other, CvReport):
            return NotImplemented
        same_arrays = np.array_equal(self.assignment, other.assignment) and all(
            np.array_equal(a, b) for a, b in zip(self.confusions, other.confusions)
        )
        return (
            same_arrays
            and self.accuracies == other.accuracies
            and self.mean == other.mean
            and self.std == other.std
            and self.class_ids == other.class_ids
            and self.predictions == other.predictions
            and (self.method, self.transform, self.p, self.params, self.seed)
            == (other.method, other.transform, other.p, other.params, other.seed)
        )


def _confusion(truth, predicted, classes):
    pos = {c: i for i, c in enumerate(classes)}
    M = np.zeros((len(classes), len(classes)), dtype=int)
    for t, y in zip(truth, predicted):
        M[pos[t], pos[y]] += 1
    return M


def kfold_cv(ds, folds=5, method="homlda", p=None, kind="identity", params=None, seed=0):
    """Stratified k-fold cross-validation with nearest-neighbor scoring.

    Returns
    -------
    CvReport
        Per-fold accuracies, their mean and population standard deviation,
        confusion matrices (rows are true classes), the fold assignment and
        the out-of-fold prediction for every sample.
    """
    method = Method(method)
    if method is Method.RHOMLDA and params is None:
        params = RobustParams()
    assignment = stratified_folds(ds.labels, folds, seed)
    classes = ds.classes
    accuracies, confusions, times = [], [], []
    predictions = [None] * ds.n_samples
    for f in range(folds):
        start = time.perf_counter()
        train_idx = np.flatnonzero(assignment != f)
        test_idx = np.flatnonzero(assignment == f)
        model = fit_model(ds.subset(train_idx), method, p, kind, params)
        test = ds.subset(test_idx)
        predicted = nn_classify(model, test.data)
        for j, y in zip(test_idx, predicted):
            predictions[j] = y
        correct = sum(a == b for a, b in zip(predicted, test.labels))
        accuracies.append(correct / len(test_idx))
        confusions.append(_confusion(test.labels, predicted, classes))
        times.append(time.perf_counter() - start)
    acc = np.array(accuracies)
    return CvReport(
        accuracies=accuracies,
        mean=float(acc.mean()),
        std=float(acc.std()),
        confusions=confusions,
        class_ids=classes,
        assignment=assignment,
        method=method.value,
        transform=TransformKind.parse(kind).value if method is not Method.MATRIX_LDA else "identity",
        p=p,
        params=params,
        seed=seed,
        predictions=predictions,
        wall_times=times,
    )
