import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import KINDS, rel_err
from tlda.classify import kfold_cv
from tlda.discriminant import LabeledTensorDataset, homlda_fit, scatter_slices, within_class_scatter
from tlda.errors import ParameterError, SingularSliceError, ZeroSpectrumError
from tlda.robust import (
    RobustParams,
    reestimate_eigs,
    rhomlda_fit,
    robust_scatter_slices,
    robust_within_scatter,
)
from tlda.synth import SynthSpec, synthesize
from tlda.tl_algebra import kappa_slices
from tlda.transforms import make_spec


def test_defaults():
    params = RobustParams()
    assert params.kappa_threshold == 1e5
    assert params.energy == 0.98


@pytest.mark.parametrize("kwargs", [{"energy": 0}, {"energy": 1.5}, {"kappa_threshold": 0.5},
                                    {"lambda_floor_ratio": 0}])
def test_param_validation(kwargs):
    with pytest.raises(ParameterError):
        RobustParams(**kwargs)


def test_reestimate_zero_tail_with_explicit_floor():
    k, lam = reestimate_eigs([1, 0, 0, 0], RobustParams(lambda_floor_ratio=1e-12))
    assert k == 1
    np.testing.assert_array_equal(lam, [1, 1e-12, 1e-12, 1e-12])


def test_reestimate_zero_tail_default_floor():
    k, lam = reestimate_eigs([1, 0, 0, 0])
    assert k == 1
    # Default floor keeps the rebuilt spectrum's condition below the threshold.
    assert lam[1] == lam[2] == lam[3] == pytest.approx(8e-5)
    assert np.sqrt(np.sum(lam**2) * np.sum(lam**-2.0)) < 1e5


def test_reestimate_flat_spectrum_unchanged():
    k, lam = reestimate_eigs([0.5, 0.5])
    assert k == 2
    np.testing.assert_array_equal(lam, [0.5, 0.5])


def test_reestimate_mean_of_tail():
    k, lam = reestimate_eigs([10, 5, 0.3, 0.1], RobustParams(energy=0.9))
    assert k == 2
    np.testing.assert_allclose(lam, [10, 5, 0.2, 0.2])


def test_reestimate_boundary_uses_weak_inequality():
    k, _ = reestimate_eigs([98, 1, 1], RobustParams(energy=0.98))
    assert k == 1


def test_reestimate_clamps_rounding_negatives():
    k, lam = reestimate_eigs([1, 1e-3, -1e-17], RobustParams(energy=0.5, lambda_floor_ratio=1e-12))
    assert k == 1
    assert lam.min() > 0


def test_reestimate_zero_spectrum():
    with pytest.raises(ZeroSpectrumError):
        reestimate_eigs([0, 0, 0])


def test_energy_one_keeps_spectrum():
    k, lam = reestimate_eigs([3, 1, 0], RobustParams(energy=1.0))
    assert k == 3
    np.testing.assert_array_equal(lam, [3, 1, 0])


spectra = st.lists(st.floats(0, 1e6), min_size=1, max_size=8).map(sorted).map(lambda x: x[::-1])


@settings(max_examples=200, deadline=None)
@given(spectra, st.floats(0.05, 1.0))
def test_reestimate_idempotent(lam, energy):
    if sum(lam) == 0:
        return
    params = RobustParams(energy=energy)
    _, once = reestimate_eigs(lam, params)
    _, twice = reestimate_eigs(once, params)
    np.testing.assert_array_equal(once, twice)


@settings(max_examples=100, deadline=None)
@given(spectra)
def test_reestimate_preserves_head_and_order(lam):
    if sum(lam) == 0:
        return
    k, out = reestimate_eigs(lam)
    np.testing.assert_array_equal(out[:k], lam[:k])
    assert np.all(np.diff(out) <= 0)


@pytest.mark.parametrize("kind", KINDS)
def test_pass_through_bitwise(kind, rng):
    ds = synthesize(SynthSpec(3, 10, (3, 3, 2), seed=4))
    spec = make_spec(kind, (3, 2))
    W, _ = scatter_slices(ds, spec)
    out, report = robust_scatter_slices(W, spec)
    assert not report.rebuilt.any()
    assert np.array_equal(out, W)
    W_sp = within_class_scatter(ds, spec)
    assert rel_err(robust_within_scatter(W_sp, spec), W_sp) < 1e-10


def test_rebuild_lowers_kappa():
    spec = make_spec("identity", (1,))
    W = np.diag([1.0, 1e-9]).astype(complex)[None]
    out, report = robust_scatter_slices(W, spec)
    assert report.rebuilt[0]
    assert report.post.kappa[0] < report.pre.kappa[0]
    assert report.post.kappa[0] < 1e5
    assert kappa_slices(out)[0] == report.post.kappa[0]


@pytest.mark.parametrize("kind", KINDS)
def test_rebuilt_slices_psd_and_spectrum_preserved(kind):
    ds = synthesize(SynthSpec(2, 8, (4, 3, 2), seed=2), force_singular=True)
    spec = make_spec(kind, ds.data.shape[2:])
    W, _ = scatter_slices(ds, spec)
    out, report = robust_scatter_slices(W, spec)
    assert report.rebuilt.all()
    assert np.all(report.post.kappa < 1e5)
    assert np.all(report.post.kappa <= report.pre.kappa)
    for M, N, k in zip(W, out, report.kept):
        H = (N + N.conj().T) / 2
        assert np.linalg.norm(N - H) <= 1e-10 * np.linalg.norm(N)
        mu = np.linalg.eigvalsh(H)
        assert mu.min() >= -1e-10 * mu.max()
        lam, V = np.linalg.eigh(M)
        lam, V = lam[::-1], V[:, ::-1]
        for j in range(k):
            # Leading eigenpairs of the original survive the rebuild.
            assert np.linalg.norm(N @ V[:, j] - lam[j] * V[:, j]) < 1e-10 * lam[0]


def test_zero_slice_becomes_scaled_identity():
    spec = make_spec("identity", (1,))
    out, report = robust_scatter_slices(np.zeros((1, 3, 3), dtype=complex), spec)
    np.testing.assert_array_equal(out[0], 1e-12 * np.eye(3))
    assert report.kept[0] == 0


@pytest.mark.parametrize("kind", KINDS)
def test_rhomlda_on_singular_data(kind):
    ds = synthesize(SynthSpec(2, 30, (4, 3, 2), seed=7), force_singular=True)
    spec = make_spec(kind, (3, 2))
    with pytest.raises(SingularSliceError):
        homlda_fit(ds, spec=spec)
    model = rhomlda_fit(ds, spec=spec)
    assert model.conditioning.ill.all()
    assert np.all(model.conditioning_post.kappa < 1e5)
    report = kfold_cv(ds, 5, "rhomlda", kind=kind, seed=0)
    assert report.mean >= 0.95


def test_rhomlda_matches_homlda_when_well_conditioned():
    ds = synthesize(SynthSpec(3, 15, (3, 4, 2), seed=5))
    a = kfold_cv(ds, 5, "homlda", kind="dct", seed=1)
    b = kfold_cv(ds, 5, "rhomlda", kind="dct", seed=1)
    assert a.accuracies == b.accuracies
    assert a.predictions == b.predictions
    ma = homlda_fit(ds, spec=make_spec("dct", (4, 2)))
    mb = rhomlda_fit(ds, spec=make_spec("dct", (4, 2)))
    assert np.array_equal(ma.U_p, mb.U_p)
