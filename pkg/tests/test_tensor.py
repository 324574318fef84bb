"""Tests for the dense tensor kernels."""

import numpy as np
import pytest

from tnfid.errors import (
    DimensionError,
    NotPositiveSemidefiniteError,
    ValidationError,
)
from tnfid.tensor import (
    NO_TRUNCATION,
    TruncationSpec,
    contract,
    hermitian_decompose,
    inner_core,
    optimal_isometry,
    psd_factor,
    random_isometry,
    svd_truncate,
    trace_norm,
)


def random_complex(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def test_contract_identity():
    v = np.array([1.5, -2.0 + 1.0j])
    out = contract(np.eye(2), v, [(1, 0)])
    assert np.allclose(out, v)


def test_contract_nilpotent_matrix():
    m = np.array([[0.0, 1.0], [0.0, 0.0]])
    out = contract(m, m.conj().T, [(1, 0)])
    assert np.allclose(out, [[1.0, 0.0], [0.0, 0.0]])


def test_contract_matches_nested_loop_reference():
    rng = np.random.default_rng(7)
    a = random_complex(rng, (3, 4, 5))
    b = random_complex(rng, (5, 4))
    out = contract(a, b, [(2, 0), (1, 1)])
    ref = np.zeros(3, dtype=complex)
    for i in range(3):
        for j in range(4):
            for k in range(5):
                ref[i] += a[i, j, k] * b[k, j]
    assert np.max(np.abs(out - ref)) <= 1e-13


def test_contract_result_axis_order():
    rng = np.random.default_rng(8)
    a = random_complex(rng, (2, 3, 4))
    b = random_complex(rng, (4, 5, 2))
    out = contract(a, b, [(2, 0)])
    assert out.shape == (2, 3, 5, 2)


def test_contract_errors():
    a = np.zeros((2, 3))
    with pytest.raises(DimensionError):
        contract(a, np.zeros((4, 2)), [(1, 0)])
    with pytest.raises(ValidationError):
        contract(a, np.zeros((3, 3)), [(1, 0), (1, 1)])


def test_svd_truncate_plain_diagonal():
    res = svd_truncate(np.diag([3.0, 4.0]))
    assert np.allclose(res.s, [4.0, 3.0])
    assert res.discarded_weight == 0.0


def test_svd_truncate_weight_cutoff():
    res = svd_truncate(np.diag([1.0, 1e-9]), TruncationSpec(weight_cutoff=1e-12))
    assert res.rank == 1
    assert res.discarded_weight == pytest.approx(1e-18)


def test_svd_truncate_eckart_young():
    rng = np.random.default_rng(11)
    m = random_complex(rng, (8, 8))
    full = svd_truncate(m)
    res = svd_truncate(m, TruncationSpec(max_rank=4))
    recon = res.u @ np.diag(res.s) @ res.v.conj().T
    err_sq = np.linalg.norm(m - recon) ** 2
    assert err_sq == pytest.approx(np.sum(full.s[4:] ** 2), rel=1e-10)
    assert res.discarded_weight == pytest.approx(np.sum(full.s[4:] ** 2), rel=1e-12)


def test_svd_truncate_unbounded_reconstructs():
    rng = np.random.default_rng(12)
    for shape in [(5, 9), (9, 5), (6, 6)]:
        m = random_complex(rng, shape)
        res = svd_truncate(m, NO_TRUNCATION)
        recon = res.u @ np.diag(res.s) @ res.v.conj().T
        assert np.max(np.abs(m - recon)) <= 1e-12 * np.max(np.abs(m))
        assert np.max(np.abs(res.u.conj().T @ res.u - np.eye(res.rank))) <= 1e-12
        assert np.max(np.abs(res.v.conj().T @ res.v - np.eye(res.rank))) <= 1e-12
        assert np.all(np.diff(res.s) <= 0)


def test_svd_truncate_rejects_non_matrix():
    with pytest.raises(ValidationError):
        svd_truncate(np.zeros((2, 2, 2)))


def test_trace_norm_basics():
    assert trace_norm(np.eye(2)) == pytest.approx(2.0)
    assert trace_norm(np.diag([3.0, -4.0])) == pytest.approx(7.0)


def test_trace_norm_matches_eigenvalue_oracle():
    rng = np.random.default_rng(13)
    m = random_complex(rng, (6, 9))
    gram = m.conj().T @ m
    lam = np.linalg.eigvalsh(gram)
    lam = np.where(lam > 1e-13 * lam.max(), lam, 0.0)  # rank-6 gram: zero the tail
    ref = np.sum(np.sqrt(lam))
    assert abs(trace_norm(m) - ref) <= 1e-12 * ref


def test_trace_norm_adjoint_and_unitary_invariance():
    rng = np.random.default_rng(14)
    for _ in range(20):
        m = random_complex(rng, (5, 5))
        tn = trace_norm(m)
        assert abs(tn - trace_norm(m.conj().T)) <= 1e-12 * tn
        u = random_isometry(5, 5, rng)
        v = random_isometry(5, 5, rng)
        assert abs(trace_norm(u @ m @ v) - tn) <= 1e-11 * tn


def test_hermitian_decompose_diagonal():
    w, v = hermitian_decompose(np.diag([0.7, 0.3]))
    assert np.allclose(w, [0.7, 0.3])
    recon = v @ np.diag(w) @ v.conj().T
    assert np.max(np.abs(recon - np.diag([0.7, 0.3]))) <= 1e-12


def test_hermitian_decompose_projector():
    plus = np.array([1.0, 1.0]) / np.sqrt(2)
    w, _ = hermitian_decompose(np.outer(plus, plus))
    assert np.allclose(w, [1.0, 0.0], atol=1e-14)


def test_hermitian_decompose_rejects_non_hermitian():
    with pytest.raises(ValidationError):
        hermitian_decompose(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_psd_factor_reconstructs_gram_matrices():
    rng = np.random.default_rng(15)
    for _ in range(20):
        g = random_complex(rng, (10, 6))
        m = g @ g.conj().T
        c = psd_factor(m)
        scale = np.max(np.abs(m))
        assert np.max(np.abs(c @ c.conj().T - m)) <= 1e-12 * scale


def test_psd_factor_eigen_roundtrip_clipped():
    rng = np.random.default_rng(16)
    g = random_complex(rng, (10, 10))
    m = g @ g.conj().T
    w, v = hermitian_decompose(m)
    c = (v * np.sqrt(np.clip(w, 0, None)))
    assert np.max(np.abs(c @ c.conj().T - m)) <= 1e-12 * np.max(np.abs(m))


def test_psd_factor_identity_and_zero():
    c = psd_factor(np.eye(3))
    assert c.shape == (3, 3)
    assert np.max(np.abs(c @ c.conj().T - np.eye(3))) <= 1e-12
    z = psd_factor(np.zeros((4, 4)))
    assert z.shape == (4, 0)


def test_psd_factor_rank_deficient_width():
    v = np.array([1.0, 2.0, 2.0]) / 3.0
    c = psd_factor(np.outer(v, v))
    assert c.shape == (3, 1)


def test_psd_factor_rejects_negative():
    with pytest.raises(NotPositiveSemidefiniteError):
        psd_factor(np.diag([1.0, -1e-6]))


def test_optimal_isometry_trivial_cases():
    w, value = optimal_isometry(np.eye(2))
    assert value == pytest.approx(2.0)
    assert abs(np.trace(w @ np.eye(2))) == pytest.approx(2.0)
    _, value = optimal_isometry(np.diag([3.0, -4.0]))
    assert value == pytest.approx(7.0)


def test_optimal_isometry_never_beaten_by_random_isometries():
    rng = np.random.default_rng(17)
    m = random_complex(rng, (4, 4))
    w, value = optimal_isometry(m)
    assert abs(np.trace(w @ m) - value) <= 1e-12 * value
    for _ in range(1000):
        w_rand = random_isometry(4, 4, rng)
        assert abs(np.trace(w_rand @ m)) <= value + 1e-12


def test_optimal_isometry_value_equals_trace_norm():
    rng = np.random.default_rng(18)
    for _ in range(200):
        r = int(rng.integers(1, 7))
        c = int(rng.integers(1, 7))
        m = random_complex(rng, (r, c))
        _, value = optimal_isometry(m)
        assert abs(value - trace_norm(m)) <= 1e-12 * max(value, 1.0)


def test_optimal_isometry_is_isometric_on_smaller_dimension():
    rng = np.random.default_rng(19)
    m = random_complex(rng, (3, 6))
    w, _ = optimal_isometry(m)
    assert w.shape == (6, 3)
    assert np.max(np.abs(w.conj().T @ w - np.eye(3))) <= 1e-12


def test_inner_core_matches_direct_product():
    rng = np.random.default_rng(20)
    xa = random_complex(rng, (4, 30))
    xb = random_complex(rng, (4, 30))
    direct = np.linalg.svd(xb.conj().T @ xa, compute_uv=False)
    compact = np.linalg.svd(inner_core(xa, xb), compute_uv=False)
    assert np.max(np.abs(direct[:4] - compact)) <= 1e-10
    assert np.max(np.abs(direct[4:])) <= 1e-10
