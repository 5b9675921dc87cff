import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from matvar.errors import NotPositiveDefinite, NotSymmetric
from matvar.matcore import (
    HpdMatrix,
    LowerTriangular,
    Partition,
    SpdMatrix,
    cholesky,
    hermitian_form,
    log_det,
    matrix_from_json,
    matrix_to_json,
    positive_definite,
    schur_complement,
    triangular_jacobian_log,
)

from conftest import random_spd

seeds = st.integers(0, 2**32 - 1)


class TestConstruction:
    def test_spd_accepts_and_is_read_only(self):
        X = SpdMatrix([[2.0, 1.0], [1.0, 2.0]])
        assert X.p == 2 and X.case == "real"
        with pytest.raises(ValueError):
            X.entries[0, 0] = 5.0

    def test_asymmetric_rejected(self):
        with pytest.raises(NotSymmetric) as info:
            SpdMatrix([[2.0, 1.0], [0.5, 2.0]])
        assert info.value.deviation > info.value.tol

    def test_tiny_asymmetry_is_symmetrized(self):
        X = SpdMatrix([[2.0, 1.0 + 1e-15], [1.0, 2.0]])
        assert X.entries[0, 1] == X.entries[1, 0]

    @pytest.mark.parametrize("M", [
        [[1.0, 2.0], [2.0, 1.0]],
        [[0.0, 0.0], [0.0, 1.0]],
        [[-1.0, 0.0], [0.0, 1.0]],
    ])
    def test_indefinite_rejected(self, M):
        with pytest.raises(NotPositiveDefinite):
            SpdMatrix(M)

    def test_near_singular_pivot_rejected(self):
        with pytest.raises(NotPositiveDefinite):
            SpdMatrix([[1.0, 1.0], [1.0, 1.0 + 1e-14]])

    def test_non_square_rejected(self):
        with pytest.raises(ValueError):
            SpdMatrix(np.ones((2, 3)))

    def test_hermitian(self):
        X = HpdMatrix([[2.0, 1 - 1j], [1 + 1j, 3.0]])
        assert X.case == "complex"
        assert np.all(np.imag(np.diag(X.entries)) == 0)
        with pytest.raises(NotSymmetric):
            HpdMatrix([[2.0, 1 - 1j], [1 - 1j, 3.0]])

    def test_positive_definite_dispatch(self, np_rng):
        assert isinstance(positive_definite(random_spd(np_rng, 3)), SpdMatrix)
        assert isinstance(positive_definite(random_spd(np_rng, 3, "complex")), HpdMatrix)
        with pytest.raises(ValueError):
            positive_definite(SpdMatrix(np.eye(2)), "complex")

    def test_lower_triangular_validation(self):
        with pytest.raises(ValueError):
            LowerTriangular(np.array([[1.0, 1.0], [0.0, 1.0]]))
        with pytest.raises(ValueError):
            LowerTriangular(np.array([[1.0, 0.0], [0.0, -1.0]]))
        with pytest.raises(ValueError):
            LowerTriangular(np.array([[1j, 0.0], [0.0, 1.0]]))


@given(seeds, st.integers(1, 6), st.sampled_from(["real", "complex"]))
def test_cholesky_reconstructs(seed, p, case):
    X = random_spd(np.random.default_rng(seed), p, case)
    T = cholesky(X)
    assert np.all(T.diagonal > 0)
    np.testing.assert_allclose(T.product(), X, atol=1e-12 * np.abs(X).max())


@given(seeds, st.integers(1, 6), st.sampled_from(["real", "complex"]))
def test_log_det_matches_slogdet(seed, p, case):
    X = random_spd(np.random.default_rng(seed), p, case)
    sign, ld = np.linalg.slogdet(X)
    assert log_det(X) == pytest.approx(ld, abs=1e-11)


@given(seeds, st.integers(2, 6), st.data(), st.sampled_from(["real", "complex"]))
def test_schur_determinant_and_inverse_identities(seed, p, data, case):
    X = random_spd(np.random.default_rng(seed), p, case)
    p1 = data.draw(st.integers(1, p - 1))
    part = Partition.of(X, p1)
    S = schur_complement(part)
    # |X| = |X11| |S| and (X^{-1})_{22} = S^{-1}
    assert log_det(X) == pytest.approx(log_det(part.X11) + log_det(S), abs=1e-10)
    np.testing.assert_allclose(np.linalg.inv(X)[p1:, p1:], np.linalg.inv(S), atol=1e-10)
    S2 = schur_complement(part, "on_X22")
    np.testing.assert_allclose(np.linalg.inv(X)[:p1, :p1], np.linalg.inv(S2), atol=1e-10)


def test_partition_bounds():
    with pytest.raises(ValueError):
        Partition.of(np.eye(3), 0)
    with pytest.raises(ValueError):
        Partition.of(np.eye(3), 3)
    with pytest.raises(ValueError):
        schur_complement(Partition.of(np.eye(3), 1), "diagonal")


@given(seeds, st.integers(1, 5))
def test_hermitian_form_is_real_positive(seed, p):
    rng = np.random.default_rng(seed)
    M = random_spd(rng, p, "complex")
    row = rng.standard_normal(p) + 1j * rng.standard_normal(p)
    q = hermitian_form(row, M)
    direct = row @ np.linalg.solve(M, row.conj())
    assert abs(np.imag(q)) <= 1e-12 * abs(q)
    assert np.real(q) > 0
    assert np.real(q) == pytest.approx(np.real(direct), rel=1e-10)


def test_hermitian_form_real():
    M = np.array([[2.0, 0.5], [0.5, 1.0]])
    row = np.array([1.0, -1.0])
    assert hermitian_form(row, M) == pytest.approx(row @ np.linalg.solve(M, row), rel=1e-14)


def _numeric_log_jacobian(T, case):
    """Log |det| of d(free entries of TT*)/d(free entries of T) by central differences."""
    p = T.shape[0]
    rows, cols = np.tril_indices(p)

    def pack_t(t):
        v = t[rows, cols]
        if case == "real":
            return v.real
        off = rows != cols
        return np.concatenate([v.real, v.imag[off]])

    def unpack_t(v):
        t = np.zeros((p, p), dtype=complex if case == "complex" else float)
        n = rows.size
        t[rows, cols] = v[:n]
        if case == "complex":
            off = rows != cols
            t[rows[off], cols[off]] += 1j * v[n:]
        return t

    def f(v):
        t = unpack_t(v)
        X = t @ t.conj().T
        x = X[rows, cols]
        if case == "real":
            return x.real
        off = rows != cols
        return np.concatenate([x.real, x.imag[off]])

    v0 = pack_t(T)
    h = 1e-6
    J = np.empty((v0.size, v0.size))
    for k in range(v0.size):
        e = np.zeros(v0.size)
        e[k] = h
        J[:, k] = (f(v0 + e) - f(v0 - e)) / (2 * h)
    return np.linalg.slogdet(J)[1]


@pytest.mark.parametrize("p", [1, 2, 3, 4])
@pytest.mark.parametrize("case", ["real", "complex"])
def test_triangular_jacobian_against_finite_differences(p, case, np_rng):
    T = np.tril(np_rng.standard_normal((p, p)))
    if case == "complex":
        T = T + 1j * np.tril(np_rng.standard_normal((p, p)), -1)
    idx = np.arange(p)
    T[idx, idx] = np_rng.uniform(0.5, 2.0, size=p)
    expect = _numeric_log_jacobian(T, case)
    assert triangular_jacobian_log(T, case) == pytest.approx(expect, abs=1e-6)


def test_triangular_jacobian_closed_form():
    T = np.diag([2.0, 3.0])
    # real: 2^2 * 2^2 * 3^1
    assert triangular_jacobian_log(T, "real") == pytest.approx(math.log(4 * 4 * 3))
    # complex: 2^2 * 2^3 * 3^1
    assert triangular_jacobian_log(T, "complex") == pytest.approx(math.log(4 * 8 * 3))


@given(seeds, st.integers(1, 5), st.sampled_from(["real", "complex"]))
def test_json_round_trip_is_exact(seed, p, case):
    X = random_spd(np.random.default_rng(seed), p, case)
    obj = matrix_to_json(X)
    assert obj["p"] == p and obj["case"] == case
    Y = matrix_from_json(obj)
    assert Y.dtype == X.dtype
    assert np.array_equal(Y, X)


def test_json_shape_mismatch():
    with pytest.raises(ValueError):
        matrix_from_json({"p": 3, "case": "real", "entries": [[1.0]]})
    with pytest.raises(ValueError):
        matrix_from_json({"p": 1, "case": "imag", "entries": [[1.0]]})
