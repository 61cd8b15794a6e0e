"""RHOMLDA: re-estimate the weak tail of ill-conditioned within-class slices.

A transform-domain slice of the within-class scatter whose Frobenius
condition number reaches ``kappa_threshold`` is eigendecomposed; the
eigenvalues past the first ``k`` (the smallest count holding ``energy`` of
the spectrum) are replaced by their mean, and the slice is rebuilt as
``Q diag(...) Q^-1``. Well-conditioned slices are left untouched.
"""

from dataclasses import dataclass

import numpy as np

from .discriminant import Method, _default_spec, _fit
from .errors import ParameterError, ZeroSpectrumError
from .tensor_core import from_slices, to_slices
from .tl_algebra import (
    DEFAULT_KAPPA_THRESHOLD,
    SliceConditionReport,
    kappa_slices,
    slice_indices,
)
from .transforms import from_transform_domain, to_transform_domain

__all__ = [
    "RobustParams",
    "RobustScatterReport",
    "reestimate_eigs",
    "robust_within_scatter",
    "robust_scatter_slices",
    "rhomlda_fit",
]

DEFAULT_ENERGY = 0.98


@dataclass(frozen=True)
class RobustParams:
    """Thresholds for RHOMLDA.

    Attributes
    ----------
    kappa_threshold : float
        Slices with condition number at or above this are re-estimated.
    energy : float
        Fraction of spectral energy kept in the leading eigenvalues.
    lambda_floor_ratio : float or None
        Lower bound on the replacement eigenvalue, relative to the largest
        eigenvalue. ``None`` derives it from ``kappa_threshold`` so that a
        rebuilt slice ends up below the threshold.
    """

    kappa_threshold: float = DEFAULT_KAPPA_THRESHOLD
    energy: float = DEFAULT_ENERGY
    lambda_floor_ratio: float = None

    def __post_init__(self):
        if not 0 < self.energy <= 1:
            raise ParameterError(f"energy must lie in (0, 1], got {self.energy}")
        if not self.kappa_threshold >= 1:
            raise ParameterError(f"kappa threshold must be at least 1, got {self.kappa_threshold}")
        if self.lambda_floor_ratio is not None and not self.lambda_floor_ratio > 0:
            raise ParameterError("lambda_floor_ratio must be positive")

    def floor_ratio(self, size):
        if self.lambda_floor_ratio is not None:
            return self.lambda_floor_ratio
        # kappa <= size * lambda_1 / lambda_min, so this floor keeps kappa below
        # half the threshold.
        return 2.0 * size / self.kappa_threshold


def reestimate_eigs(lambdas, params=RobustParams()):
    """Replace the trailing eigenvalues by their (floored) mean.

    Parameters
    ----------
    lambdas : array_like
        Eigenvalues in descending order. Small negatives are clamped to 0.
    params : RobustParams

    Returns
    -------
    k : int
        Number of eigenvalues kept as reliable.
    corrected : ndarray
        The re-estimated spectrum.

    Raises
    ------
    ZeroSpectrumError
        Every eigenvalue is zero.
    """
    lam = np.clip(np.asarray(lambdas, dtype=float), 0.0, None)
    p = lam.size
    total = lam.sum()
    if p == 0 or total == 0:
        raise ZeroSpectrumError("spectrum carries no energy")
    if params.energy >= 1:
        return p, lam
    ratio = np.cumsum(lam) / total
    k = int(np.argmax(ratio >= params.energy)) + 1
    if k == p:
        return k, lam
    floor = min(params.floor_ratio(p) * lam[0], lam[k - 1])
    corrected = lam.copy()
    tail = lam[k:]
    # A constant tail is its own mean; skip the rounding of .mean().
    mean = tail[0] if tail.min() == tail.max() else tail.mean()
    corrected[k:] = max(mean, floor)
    return k, corrected


@dataclass(frozen=True)
class RobustScatterReport:
    pre: SliceConditionReport
    post: SliceConditionReport
    rebuilt: np.ndarray
    kept: np.ndarray


def _rebuild(M, params):
    w, Q = np.linalg.eig(M)
    lam = np.clip(w.real, 0.0, None)
    order = np.argsort(-lam, kind="stable")
    lam, Q = lam[order], Q[:, order]
    try:
        k, new = reestimate_eigs(lam, params)
    except ZeroSpectrumError:
        floor = params.lambda_floor_ratio or 1e-12
        return floor * np.eye(M.shape[0], dtype=M.dtype), 0
    return (Q * new) @ np.linalg.inv(Q), k


def robust_scatter_slices(W_slices, spec, params=RobustParams()):
    """Transform-domain version of :func:`robust_within_scatter`.

    Returns the new ``(S, m, m)`` slice stack and a :class:`RobustScatterReport`.
    """
    W_slices = np.asarray(W_slices)
    indices = slice_indices(spec)
    pre = kappa_slices(W_slices)
    out = W_slices.copy()
    rebuilt = pre >= params.kappa_threshold
    kept = np.full(len(pre), W_slices.shape[1])
    for s in np.flatnonzero(rebuilt):
        out[s], kept[s] = _rebuild(W_slices[s], params)
    post = pre.copy()
    if rebuilt.any():
        post[rebuilt] = kappa_slices(out[rebuilt])
    report = RobustScatterReport(
        SliceConditionReport(indices, pre, params.kappa_threshold),
        SliceConditionReport(indices, post, params.kappa_threshold),
        rebuilt,
        kept,
    )
    return out, report


def robust_within_scatter(W, spec, params=RobustParams(), return_report=False):
    """Re-estimate the ill-conditioned transform-domain slices of ``W``."""
    W_slices = to_slices(to_transform_domain(W, spec))
    out, report = robust_scatter_slices(W_slices, spec, params)
    W_hat = from_transform_domain(from_slices(out, spec.padded_dims), spec)
    if return_report:
        return W_hat, report
    return W_hat


def rhomlda_fit(ds, p=None, spec=None, params=RobustParams()):
    """HOMLDA with the within-class scatter replaced by its robust estimate.

    The model keeps pre- and post-repair condition numbers in
    ``conditioning`` and ``conditioning_post``.
    """

    def repair(W):
        W_new, report = robust_scatter_slices(W, spec_used, params)
        return W_new, report.post

    spec_used = _default_spec(ds, spec)
    return _fit(ds, p, spec_used, Method.RHOMLDA, W_transform=repair, params=params)
