"""Dense/CSR matrix kernels against numpy oracles and spec'd edge cases."""

import numpy as np
import pytest

from parml import (
    DimError,
    LocalMatrix,
    SingularMatrixError,
    UnsupportedError,
)

from conftest import assert_csr_canonical, spd_matrix


def random_sparse(rng, rows, cols, density=0.3):
    dense = rng.standard_normal((rows, cols))
    dense[rng.random((rows, cols)) >= density] = 0.0
    return dense


class TestConstruction:
    def test_dims(self):
        assert LocalMatrix.zeros(0, 0).shape == (0, 0)
        assert LocalMatrix.dense([[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]]).shape == (3, 2)

    def test_csr_same_dims_as_dense(self):
        dense = LocalMatrix.dense([[1.0, 0.0], [0.0, 2.0], [0.0, 0.0]])
        assert dense.to_csr().shape == dense.shape

    def test_one_dim_input_is_row_vector(self):
        assert LocalMatrix.dense([1.0, 2.0, 3.0]).shape == (1, 3)

    def test_from_triplets_rejects_duplicates(self):
        with pytest.raises(ValueError):
            LocalMatrix.from_triplets([0, 0], [1, 1], [1.0, 2.0], (2, 2))

    def test_from_triplets_drops_zeros(self):
        m = LocalMatrix.from_triplets([0, 1], [0, 1], [0.0, 5.0], (2, 2))
        assert m.nnz == 1

    def test_csr_validates_canonical_form(self):
        with pytest.raises(ValueError):
            LocalMatrix.csr([0, 2], [1, 0], [1.0, 2.0], (1, 2))  # decreasing indices
        with pytest.raises(ValueError):
            LocalMatrix.csr([0, 1], [0], [0.0], (1, 1))  # explicit zero

    def test_round_trip(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            dense = random_sparse(rng, int(rng.integers(1, 8)), int(rng.integers(1, 8)))
            m = LocalMatrix.dense(dense)
            assert m.to_csr().to_dense().equals(m)
            assert m.to_csr().nnz == np.count_nonzero(dense)
            assert_csr_canonical(m.to_csr())

    def test_to_csr_of_zero_matrix(self):
        assert LocalMatrix.zeros(3, 4).to_csr().nnz == 0


class TestStackAndConcat:
    def test_stack_rows_with_empty(self):
        a = LocalMatrix.dense([[1.0, 2.0]])
        out = a.stack_rows(LocalMatrix.zeros(0, 2))
        assert out.equals(a)

    def test_stack_rows_values(self):
        out = LocalMatrix.dense([[1.0]]).stack_rows(LocalMatrix.dense([[2.0]]))
        assert out.to_array().tolist() == [[1.0], [2.0]]

    def test_shapes_on_random_inputs(self):
        rng = np.random.default_rng(1)
        for _ in range(25):
            r, ca, cb = rng.integers(1, 6, size=3)
            a = LocalMatrix.dense(rng.standard_normal((r, ca)))
            b = LocalMatrix.dense(rng.standard_normal((r, cb)))
            assert a.concat_cols(b).shape == (r, ca + cb)

    def test_mismatch_raises(self):
        with pytest.raises(DimError):
            LocalMatrix.zeros(2, 3).stack_rows(LocalMatrix.zeros(2, 4))
        with pytest.raises(DimError):
            LocalMatrix.zeros(2, 3).concat_cols(LocalMatrix.zeros(3, 3))

    def test_csr_paths_stay_sparse_and_correct(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            a = random_sparse(rng, 4, 3)
            b = random_sparse(rng, 5, 3)
            c = random_sparse(rng, 4, 2)
            stacked = LocalMatrix.dense(a).to_csr().stack_rows(LocalMatrix.dense(b).to_csr())
            assert stacked.is_sparse
            assert_csr_canonical(stacked)
            np.testing.assert_array_equal(stacked.to_array(), np.vstack([a, b]))
            joined = LocalMatrix.dense(a).to_csr().concat_cols(LocalMatrix.dense(c).to_csr())
            assert joined.is_sparse
            assert_csr_canonical(joined)
            np.testing.assert_array_equal(joined.to_array(), np.hstack([a, c]))


class TestSliceAndUpdate:
    def test_full_slice_is_identity(self):
        a = LocalMatrix.dense([[1.0, 2.0], [3.0, 4.0]])
        assert a[:, :].equals(a)

    def test_two_indices_give_scalar(self):
        assert LocalMatrix.dense([[1.0, 2.0], [3.0, 4.0]])[1, 0] == 3.0

    def test_random_slices_match_copy_oracle(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            arr = rng.standard_normal((6, 5))
            m = LocalMatrix.dense(arr)
            rows = list(rng.integers(0, 6, size=rng.integers(1, 4)))
            cols = list(rng.integers(0, 5, size=rng.integers(1, 4)))
            expected = [[arr[i, j] for j in cols] for i in rows]
            np.testing.assert_array_equal(m[rows, cols].to_array(), expected)
            # CSR representation must agree cell for cell
            sp = m.to_csr()
            for i in rows:
                for j in cols:
                    assert sp[i, j] == arr[i, j]

    def test_out_of_range(self):
        m = LocalMatrix.zeros(2, 2)
        with pytest.raises(IndexError):
            m[2, 0]
        with pytest.raises(IndexError):
            m[0, [0, 5]]

    def test_update_write_read_back(self):
        m = LocalMatrix.zeros(3, 3)
        m[1, 2] = 7.5
        assert m[1, 2] == 7.5

    def test_overwrite_with_self_is_identity(self):
        rng = np.random.default_rng(4)
        arr = rng.standard_normal((4, 4))
        m = LocalMatrix.dense(arr)
        m[:, :] = LocalMatrix.dense(arr)
        np.testing.assert_array_equal(m.to_array(), arr)

    def test_random_region_writes_match_oracle(self):
        rng = np.random.default_rng(5)
        for _ in range(30):
            arr = rng.standard_normal((5, 6))
            m = LocalMatrix.dense(arr)
            rows = list(dict.fromkeys(rng.integers(0, 5, size=3).tolist()))
            cols = list(dict.fromkeys(rng.integers(0, 6, size=3).tolist()))
            block = rng.standard_normal((len(rows), len(cols)))
            expected = arr.copy()
            for bi, i in enumerate(rows):
                for bj, j in enumerate(cols):
                    expected[i, j] = block[bi, bj]
            m[rows, cols] = block
            np.testing.assert_array_equal(m.to_array(), expected)

    def test_update_on_csr_unsupported(self):
        m = LocalMatrix.dense([[1.0]]).to_csr()
        with pytest.raises(UnsupportedError):
            m[0, 0] = 2.0

    def test_update_shape_mismatch(self):
        m = LocalMatrix.zeros(3, 3)
        with pytest.raises(DimError):
            m[[0, 1], [0, 1]] = np.zeros((3, 3))


class TestNonZeroIndices:
    def test_zero_row(self):
        assert LocalMatrix.zeros(2, 4).non_zero_indices(1).tolist() == []

    def test_pattern(self):
        m = LocalMatrix.dense([[0.0, 5.0, 0.0, 2.0]])
        assert m.non_zero_indices(0).tolist() == [1, 3]

    def test_dense_and_csr_agree(self):
        rng = np.random.default_rng(6)
        for _ in range(25):
            arr = random_sparse(rng, 6, 8)
            dense = LocalMatrix.dense(arr)
            sp = dense.to_csr()
            for i in range(6):
                np.testing.assert_array_equal(dense.non_zero_indices(i),
                                              sp.non_zero_indices(i))
                di, dv = dense.sparse_row(i)
                si, sv = sp.sparse_row(i)
                np.testing.assert_array_equal(di, si)
                np.testing.assert_array_equal(dv, sv)

    def test_row_out_of_range(self):
        with pytest.raises(IndexError):
            LocalMatrix.zeros(2, 2).non_zero_indices(2)


class TestElementwise:
    def test_add_zero_identity(self):
        rng = np.random.default_rng(7)
        a = LocalMatrix.dense(rng.standard_normal((3, 3)))
        assert (a + LocalMatrix.zeros(3, 3)).equals(a)

    def test_scalar_multiply(self):
        assert (LocalMatrix.dense([[1.0, 2.0]]) * 2).to_array().tolist() == [[2.0, 4.0]]

    def test_round_trip_within_tolerance(self):
        rng = np.random.default_rng(8)
        for _ in range(50):
            a = rng.standard_normal((4, 5))
            b = rng.standard_normal((4, 5))
            out = (LocalMatrix.dense(a) - LocalMatrix.dense(b)) + LocalMatrix.dense(b)
            np.testing.assert_allclose(out.to_array(), a, atol=1e-12)

    def test_division_by_zero_is_ieee(self):
        out = LocalMatrix.dense([[1.0, 0.0, -1.0]]) / LocalMatrix.zeros(1, 3)
        vals = out.to_array().ravel()
        assert np.isposinf(vals[0]) and np.isnan(vals[1]) and np.isneginf(vals[2])

    def test_dim_mismatch(self):
        with pytest.raises(DimError):
            LocalMatrix.zeros(2, 2) + LocalMatrix.zeros(2, 3)

    def test_sparse_plus_sparse_stays_sparse(self):
        rng = np.random.default_rng(9)
        for _ in range(20):
            a = random_sparse(rng, 5, 5)
            b = random_sparse(rng, 5, 5)
            sa, sb = LocalMatrix.dense(a).to_csr(), LocalMatrix.dense(b).to_csr()
            for op, oracle in ((sa + sb, a + b), (sa - sb, a - b), (sa * 3.0, a * 3.0)):
                assert op.is_sparse
                assert_csr_canonical(op)
                np.testing.assert_allclose(op.to_array(), oracle, atol=1e-15)

    def test_sparse_dense_mix_densifies(self):
        s = LocalMatrix.dense([[1.0, 0.0]]).to_csr()
        assert not (s + LocalMatrix.dense([[1.0, 1.0]])).is_sparse

    def test_scalar_ops_reflected(self):
        a = LocalMatrix.dense([[2.0, 4.0]])
        np.testing.assert_array_equal((1.0 - a).to_array(), [[-1.0, -3.0]])
        np.testing.assert_array_equal((8.0 / a).to_array(), [[4.0, 2.0]])


class TestProducts:
    def test_times_identity(self):
        rng = np.random.default_rng(10)
        a = LocalMatrix.dense(rng.standard_normal((3, 4)))
        assert a.times(LocalMatrix.identity(4)).equals(a)

    def test_dot(self):
        assert LocalMatrix.dense([1.0, 2.0, 3.0]).dot(LocalMatrix.dense([1.0, 1.0, 1.0])) == 6.0

    def test_csr_times_dense_matches_dense_product(self):
        rng = np.random.default_rng(11)
        for _ in range(30):
            a = random_sparse(rng, int(rng.integers(1, 9)), int(rng.integers(1, 9)))
            b = rng.standard_normal((a.shape[1], int(rng.integers(1, 6))))
            got = LocalMatrix.dense(a).to_csr().times(LocalMatrix.dense(b))
            np.testing.assert_allclose(got.to_array(), a @ b, atol=1e-10)

    def test_matmul_associative_within_tolerance(self):
        rng = np.random.default_rng(12)
        for _ in range(20):
            dims = rng.integers(1, 17, size=4)
            a = LocalMatrix.dense(rng.standard_normal((dims[0], dims[1])))
            b = LocalMatrix.dense(rng.standard_normal((dims[1], dims[2])))
            c = LocalMatrix.dense(rng.standard_normal((dims[2], dims[3])))
            left = (a @ b) @ c
            right = a @ (b @ c)
            scale = max(1.0, np.abs(left.to_array()).max())
            np.testing.assert_allclose(left.to_array() / scale,
                                       right.to_array() / scale, atol=1e-9)

    def test_inner_dim_mismatch(self):
        with pytest.raises(DimError):
            LocalMatrix.zeros(2, 3).times(LocalMatrix.zeros(2, 3))
        with pytest.raises(DimError):
            LocalMatrix.dense([1.0, 2.0]).dot(LocalMatrix.dense([1.0]))


class TestTranspose:
    def test_involution_exact(self):
        rng = np.random.default_rng(13)
        a = LocalMatrix.dense(rng.standard_normal((4, 7)))
        assert a.transpose().transpose().equals(a)

    def test_shape(self):
        assert LocalMatrix.dense([[1.0, 2.0, 3.0]]).T.shape == (3, 1)

    def test_csr_transpose_matches_dense(self):
        rng = np.random.default_rng(14)
        for _ in range(30):
            arr = random_sparse(rng, int(rng.integers(1, 10)), int(rng.integers(1, 10)))
            sp_t = LocalMatrix.dense(arr).to_csr().transpose()
            assert sp_t.is_sparse
            assert_csr_canonical(sp_t)
            np.testing.assert_array_equal(sp_t.to_array(), arr.T)


class TestSolve:
    def test_identity_returns_rhs(self):
        b = [3.0, 4.0]
        x = LocalMatrix.identity(2).solve(b)
        np.testing.assert_array_equal(x.to_array().ravel(), b)

    def test_diagonal(self):
        x = LocalMatrix.dense([[2.0, 0.0], [0.0, 4.0]]).solve([2.0, 4.0])
        np.testing.assert_allclose(x.to_array().ravel(), [1.0, 1.0])

    def test_residual_on_random_spd_systems(self):
        """100 random SPD 20x20 systems, multiply-back residual bound."""
        rng = np.random.default_rng(15)
        for _ in range(100):
            a = spd_matrix(rng, 20)
            b = rng.standard_normal(20)
            x = LocalMatrix.dense(a).solve(b).to_array().ravel()
            assert np.max(np.abs(a @ x - b)) <= 1e-8 * np.max(np.abs(b))

    def test_singular_raises(self):
        with pytest.raises(SingularMatrixError):
            LocalMatrix.dense([[1.0, 1.0], [1.0, 1.0]]).solve([1.0, 2.0])

    def test_non_square_raises(self):
        with pytest.raises(DimError):
            LocalMatrix.zeros(2, 3).solve([1.0, 2.0])

    def test_matrix_rhs(self):
        rng = np.random.default_rng(16)
        a = spd_matrix(rng, 5)
        b = rng.standard_normal((5, 3))
        x = LocalMatrix.dense(a).solve(LocalMatrix.dense(b)).to_array()
        np.testing.assert_allclose(a @ x, b, atol=1e-9)


class TestSvdEigenRank:
    def test_svd_of_diagonal(self):
        out = LocalMatrix.dense([[3.0, 0.0], [0.0, 1.0]]).svd()
        np.testing.assert_allclose(out.singular_values, [3.0, 1.0])

    def test_svd_reconstruction_and_orthonormality(self):
        """100 random matrices up to 32x32, including rank-deficient ones."""
        rng = np.random.default_rng(17)
        for trial in range(100):
            m = int(rng.integers(1, 33))
            n = int(rng.integers(1, 33))
            if trial % 3 == 0:
                r = int(rng.integers(1, min(m, n) + 1))
                a = rng.standard_normal((m, r)) @ rng.standard_normal((r, n))
            else:
                a = rng.standard_normal((m, n))
            out = LocalMatrix.dense(a).svd()
            s = out.singular_values
            assert np.all(np.diff(s) <= 0) and np.all(s >= 0)
            norm = np.linalg.norm(a)
            err = np.linalg.norm(out.reconstruct() - a)
            assert err <= 1e-8 * max(norm, 1.0)
            u = out.u.to_array()
            v = out.v.to_array()
            k = min(m, n)
            assert np.linalg.norm(u.T @ u - np.eye(k)) < 1e-8
            assert np.linalg.norm(v.T @ v - np.eye(k)) < 1e-8

    def test_eigen_reconstructs_action(self):
        rng = np.random.default_rng(18)
        for _ in range(30):
            n = int(rng.integers(1, 17))
            base = rng.standard_normal((n, n))
            a = (base + base.T) / 2
            values, vectors = LocalMatrix.dense(a).eigen()
            vec = vectors.to_array()
            scale = max(1.0, np.abs(values).max())
            np.testing.assert_allclose(a @ vec, vec * values, atol=1e-8 * scale)
            assert np.all(np.diff(values) <= 1e-12)

    def test_eigen_rejects_asymmetric(self):
        with pytest.raises(UnsupportedError):
            LocalMatrix.dense([[0.0, 1.0], [0.0, 0.0]]).eigen()

    def test_rank_edges(self):
        assert LocalMatrix.zeros(4, 4).rank() == 0
        assert LocalMatrix.identity(5).rank() == 5

    def test_rank_one_outer_products(self):
        rng = np.random.default_rng(19)
        for _ in range(20):
            u = rng.standard_normal(6)
            v = rng.standard_normal(4)
            while not u.any() or not v.any():
                u, v = rng.standard_normal(6), rng.standard_normal(4)
            assert LocalMatrix.dense(np.outer(u, v)).rank() == 1


class TestDenseCsrAgreement:
    def test_kernels_agree_across_storage(self):
        """Every kernel gives the same values for both encodings."""
        rng = np.random.default_rng(20)
        for _ in range(20):
            arr = random_sparse(rng, 6, 6)
            dense = LocalMatrix.dense(arr)
            sp = dense.to_csr()
            other = rng.standard_normal((6, 3))
            np.testing.assert_allclose(
                dense.times(LocalMatrix.dense(other)).to_array(),
                sp.times(LocalMatrix.dense(other)).to_array(), atol=1e-12)
            np.testing.assert_allclose(dense.transpose().to_array(),
                                       sp.transpose().to_array(), atol=1e-12)
            np.testing.assert_allclose((dense * 2.5).to_array(),
                                       (sp * 2.5).to_array(), atol=1e-12)
            np.testing.assert_allclose(dense.svd().singular_values,
                                       sp.svd().singular_values, atol=1e-12)
            assert dense.rank() == sp.rank()
