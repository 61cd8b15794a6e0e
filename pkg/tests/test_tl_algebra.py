import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import KINDS, rel_err
from tlda.errors import DimensionError, NonDiagonalizableError, SingularSliceError
from tlda.tl_algebra import (
    slice_condition_numbers,
    t_eig,
    tl_identity,
    tl_inverse,
    tl_product,
    tl_transpose,
)
from tlda.transforms import make_spec, to_transform_domain


def spec_for(kind, trailing):
    spec = make_spec(kind, trailing)
    return spec, spec.padded_dims


def naive_dft_product(A, B):
    """Reference product: numpy FFT along each trailing mode, explicit slice loops."""
    axes = tuple(range(2, A.ndim))
    Ah = np.fft.fftn(A, axes=axes, norm="ortho")
    Bh = np.fft.fftn(B, axes=axes, norm="ortho")
    Ch = np.zeros((A.shape[0], B.shape[1]) + A.shape[2:], dtype=complex)
    for idx in itertools.product(*(range(m) for m in A.shape[2:])):
        sl = (slice(None), slice(None)) + idx
        Ch[sl] = Ah[sl] @ Bh[sl]
    return np.fft.ifftn(Ch, axes=axes, norm="ortho").real


def random_pair(rng, kind):
    spec, trailing = spec_for(kind, (4, 2) if kind != "dwt" else (4, 3))
    A = rng.standard_normal((2, 3) + trailing)
    B = rng.standard_normal((3, 2) + trailing)
    return spec, A, B


@pytest.mark.parametrize("kind", KINDS)
def test_identity_law(kind, rng):
    spec, trailing = spec_for(kind, (3, 2))
    A = rng.standard_normal((3, 3) + trailing)
    I = tl_identity(3, spec)
    assert rel_err(tl_product(A, I, spec), A) < 1e-10
    assert rel_err(tl_product(I, A, spec), A) < 1e-10


def test_degenerate_reduction_matrix_product(rng):
    spec = make_spec("identity", (1, 1))
    A = rng.standard_normal((2, 3, 1, 1))
    B = rng.standard_normal((3, 4, 1, 1))
    np.testing.assert_allclose(tl_product(A, B, spec)[:, :, 0, 0], A[:, :, 0, 0] @ B[:, :, 0, 0], rtol=1e-14)


def test_dft_product_against_naive_algorithm(rng):
    spec = make_spec("dft", (4, 2))
    A = rng.standard_normal((2, 3, 4, 2))
    B = rng.standard_normal((3, 2, 4, 2))
    assert rel_err(tl_product(A, B, spec), naive_dft_product(A, B)) < 1e-10


def test_product_shape_errors(rng):
    spec = make_spec("dct", (2,))
    with pytest.raises(DimensionError):
        tl_product(rng.standard_normal((2, 3, 2)), rng.standard_normal((2, 2, 2)), spec)
    with pytest.raises(DimensionError):
        tl_product(rng.standard_normal((2, 3, 3)), rng.standard_normal((3, 2, 3)), spec)


def test_identity_spatial_forms():
    I = tl_identity(3, make_spec("identity", (2, 2)))
    for i, j in itertools.product(range(2), range(2)):
        np.testing.assert_array_equal(I[:, :, i, j], np.eye(3))
    # Inverse unitary DFT of a constant sequence: sqrt(m) * delta in each mode.
    I = tl_identity(2, make_spec("dft", (4, 3)))
    expected = np.zeros((2, 2, 4, 3))
    expected[:, :, 0, 0] = np.eye(2) * np.sqrt(4 * 3)
    np.testing.assert_allclose(I, expected, atol=1e-13)


@pytest.mark.parametrize("kind", KINDS)
def test_transpose_involution_and_reverse_order(kind, rng):
    spec, A, B = random_pair(rng, kind)
    assert rel_err(tl_transpose(tl_transpose(A, spec), spec), A) < 1e-10
    left = tl_transpose(tl_product(A, B, spec), spec)
    right = tl_product(tl_transpose(B, spec), tl_transpose(A, spec), spec)
    assert rel_err(left, right) < 1e-10


def test_transpose_symmetric_slices_unchanged(rng):
    M = rng.standard_normal((3, 3, 2, 2))
    S = M + np.swapaxes(M, 0, 1)
    np.testing.assert_allclose(tl_transpose(S, make_spec("identity", (2, 2))), S, atol=0)


def test_transpose_identity_spec_is_plain_transpose(rng):
    A = rng.standard_normal((2, 4, 3))
    np.testing.assert_array_equal(tl_transpose(A, make_spec("identity", (3,))), np.swapaxes(A, 0, 1))


def test_plain_transpose_option_differs_under_dft(rng):
    spec = make_spec("dft", (4,))
    A = rng.standard_normal((2, 3, 4))
    conj = tl_transpose(A, spec)
    plain = tl_transpose(A, spec, conjugate=False)
    assert plain.shape == conj.shape == (3, 2, 4)
    assert np.iscomplexobj(plain)
    assert rel_err(plain.real, conj) > 1e-3


def test_inverse_of_identity():
    spec = make_spec("dft", (3, 2))
    I = tl_identity(3, spec)
    assert rel_err(tl_inverse(I, spec), I) < 1e-12


def test_inverse_diagonal_twos():
    A = np.zeros((3, 3, 2))
    for i in range(3):
        A[i, i, :] = 2.0
    inv = tl_inverse(A, make_spec("identity", (2,)))
    np.testing.assert_allclose(inv, A / 4.0, atol=1e-15)


@pytest.mark.parametrize("kind", KINDS)
def test_inverse_residual(kind, rng):
    spec, trailing = spec_for(kind, (3, 2))
    A = rng.standard_normal((4, 4) + trailing) + 4 * np.eye(4)[:, :, None, None]
    I = tl_identity(4, spec)
    inv = tl_inverse(A, spec)
    assert rel_err(tl_product(A, inv, spec), I) < 1e-8
    assert rel_err(tl_product(inv, A, spec), I) < 1e-8


def test_inverse_singular_slice_reports_index():
    spec = make_spec("identity", (2, 3))
    A = np.broadcast_to(np.eye(2)[:, :, None, None], (2, 2, 2, 3)).copy()
    A[:, :, 1, 2] = [[1, 2], [2, 4]]
    with pytest.raises(SingularSliceError) as exc:
        tl_inverse(A, spec)
    assert exc.value.index == (1, 2)


def test_t_eig_diagonal_input():
    A = np.zeros((3, 3, 2))
    A[:, :, 0] = np.diag([1.0, 3.0, 2.0])
    A[:, :, 1] = np.diag([5.0, 4.0, 6.0])
    f = t_eig(A, make_spec("identity", (2,)))
    np.testing.assert_allclose(np.diagonal(f.S, axis1=0, axis2=1), [[3, 2, 1], [6, 5, 4]], atol=1e-14)
    Q = f.Q
    for s in range(2):
        P = np.abs(Q[:, :, s])
        np.testing.assert_allclose(P.sum(axis=0), 1, atol=1e-14)
        np.testing.assert_allclose(np.sort(P.ravel())[-3:], 1, atol=1e-14)


def test_t_eig_scalar_case(rng):
    spec = make_spec("dft", (4,))
    A = rng.standard_normal((1, 1, 4))
    f = t_eig(A, spec)
    np.testing.assert_allclose(f.S, A, atol=1e-13)
    np.testing.assert_allclose(f.Q, tl_identity(1, spec), atol=1e-13)


@pytest.mark.parametrize("kind", KINDS)
def test_t_eig_hermitian_slices(kind, rng):
    spec, trailing = spec_for(kind, (3, 2))
    X = rng.standard_normal((4, 6) + trailing)
    A = tl_product(X, tl_transpose(X, spec), spec)
    f = t_eig(A, spec)
    assert np.max(np.abs(f.slice_eigs.imag)) < 1e-10
    assert rel_err(f.reconstruct(), A) < 1e-8
    assert rel_err(tl_product(tl_product(f.Q, f.S, spec), tl_inverse(f.Q, spec), spec), A) < 1e-8
    # descending modulus inside every slice
    mods = np.abs(f.slice_eigs)
    assert np.all(np.diff(mods, axis=1) <= 1e-12)


def test_t_eig_dft_conjugate_pairs(rng):
    spec = make_spec("dft", (5, 2))
    A = rng.standard_normal((3, 3, 5, 2))
    f = t_eig(A, spec)
    eigs = f.slice_eigs.reshape(5, 2, 3, order="F")
    for i, j in itertools.product(range(5), range(2)):
        partner = eigs[(-i) % 5, (-j) % 2]
        if (i, j) == ((-i) % 5, (-j) % 2):
            np.testing.assert_allclose(np.sort_complex(partner), np.sort_complex(eigs[i, j].conj()), atol=1e-12)
        else:
            np.testing.assert_allclose(partner, eigs[i, j].conj(), atol=1e-12)
    assert rel_err(f.reconstruct(), A) < 1e-8


def test_t_eig_defective_slice():
    A = np.zeros((2, 2, 1))
    A[:, :, 0] = [[1.0, 1.0], [0.0, 1.0]]
    with pytest.raises(NonDiagonalizableError) as exc:
        t_eig(A, make_spec("identity", (1,)))
    assert exc.value.index == (0,)


def test_t_eig_unit_vectors_with_positive_lead(rng):
    spec = make_spec("dct", (3,))
    X = rng.standard_normal((3, 5, 3))
    A = tl_product(X, tl_transpose(X, spec), spec)
    f = t_eig(A, spec)
    norms = np.linalg.norm(f.Q_hat, axis=1)
    np.testing.assert_allclose(norms, 1, atol=1e-12)
    for s in range(f.Q_hat.shape[0]):
        for j in range(3):
            col = f.Q_hat[s, :, j]
            lead = col[np.argmax(np.abs(col) > 1e-10 * np.abs(col).max())]
            assert lead.real > 0 and lead.imag == 0


def test_condition_numbers():
    spec = make_spec("identity", (2,))
    A = np.zeros((3, 3, 2))
    A[:, :, 0] = np.eye(3)
    A[:, :, 1] = np.diag([1.0, 1.0, 1e-9])
    r = slice_condition_numbers(A, spec)
    assert r.threshold == 1e5
    assert r.kappa[0] == pytest.approx(3.0, rel=1e-14)
    assert r.kappa[1] == pytest.approx(np.sqrt(2 + 1e-18) * np.sqrt(2 + 1e18), rel=1e-12)
    assert list(r.ill) == [False, True]


def test_condition_singular_and_nonsymmetric(rng):
    spec = make_spec("identity", (2,))
    A = np.zeros((2, 2, 2))
    A[:, :, 0] = [[1.0, 2.0], [0.0, 1.0]]
    r = slice_condition_numbers(A, spec)
    M = A[:, :, 0]
    assert r.kappa[0] == pytest.approx(np.linalg.norm(M) * np.linalg.norm(np.linalg.inv(M)), rel=1e-13)
    assert r.kappa[1] == np.inf and r.ill[1]


def test_condition_numbers_in_transform_domain(rng):
    spec = make_spec("dft", (4,))
    X = rng.standard_normal((3, 6, 4))
    A = tl_product(X, tl_transpose(X, spec), spec)
    r = slice_condition_numbers(A, spec, threshold=10.0)
    Ah = to_transform_domain(A, spec)
    for s in range(4):
        M = Ah[:, :, s]
        assert r.kappa[s] == pytest.approx(np.linalg.norm(M) * np.linalg.norm(np.linalg.inv(M)), rel=1e-8)
    assert np.array_equal(r.ill, r.kappa >= 10.0)


@given(st.sampled_from(KINDS), st.integers(1, 3), st.integers(1, 3), st.integers(0, 2**31))
@settings(max_examples=40, deadline=None)
def test_associativity(kind, m3, m4, seed):
    rng = np.random.default_rng(seed)
    spec, trailing = spec_for(kind, (m3, m4))
    A = rng.standard_normal((2, 3) + trailing)
    B = rng.standard_normal((3, 4) + trailing)
    C = rng.standard_normal((4, 2) + trailing)
    left = tl_product(tl_product(A, B, spec), C, spec)
    right = tl_product(A, tl_product(B, C, spec), spec)
    assert rel_err(left, right) < 1e-9


def test_degenerate_ops_match_matrices(rng):
    spec = make_spec("identity", (1,))
    M = rng.standard_normal((4, 4)) + 4 * np.eye(4)
    A = M[:, :, None]
    np.testing.assert_allclose(tl_inverse(A, spec)[:, :, 0], np.linalg.inv(M), rtol=1e-13)
    np.testing.assert_array_equal(tl_transpose(A, spec)[:, :, 0], M.T)
    S = M + M.T
    f = t_eig(S[:, :, None], spec)
    w = np.linalg.eigvalsh(S)
    np.testing.assert_allclose(np.sort(f.slice_eigs[0].real), w, atol=1e-12)
