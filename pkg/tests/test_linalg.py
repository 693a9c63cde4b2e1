import numpy as np
import pytest

from mcmrep import linalg


def test_rref_identity():
    m, piv = linalg.rref(np.eye(3, dtype=np.int64), 7)
    assert np.array_equal(m, np.eye(3, dtype=np.int64))
    assert piv == [0, 1, 2]


def test_rref_zero():
    m, piv = linalg.rref(np.zeros((2, 4), dtype=np.int64), 7)
    assert not m.any()
    assert piv == []


def test_rref_dependent_rows_mod5():
    m, piv = linalg.rref([[1, 2], [2, 4]], 5)
    assert m.tolist() == [[1, 2], [0, 0]]
    assert piv == [0]


def test_kernel_identity_empty():
    assert linalg.kernel_basis(np.eye(4, dtype=np.int64), 7).shape == (4, 0)


def test_kernel_zero_matrix_full():
    k = linalg.kernel_basis(np.zeros((2, 3), dtype=np.int64), 7)
    assert k.shape == (3, 3)
    assert np.array_equal(k % 7, np.eye(3, dtype=np.int64))


def test_kernel_line_mod7():
    k = linalg.kernel_basis([[1, 1]], 7)
    assert k.shape == (1, 2)[::-1]
    v = k[:, 0]
    assert (v[0] + v[1]) % 7 == 0 and v.any()


def test_solve_identity():
    b = np.array([3, 5, 1], dtype=np.int64)
    x = linalg.solve(np.eye(3, dtype=np.int64), b, 7)
    assert np.array_equal(x, b % 7)


def test_solve_inconsistent():
    assert linalg.solve(np.zeros((2, 2), dtype=np.int64), [1, 0], 7) is None


def test_image_basis_rank_one():
    img = linalg.image_basis([[1, 2], [2, 4]], 5)
    assert img.shape == (2, 1)
    assert img[:, 0].tolist() == [1, 2]


def test_inverse_roundtrip(rng):
    p = 32003
    for n in (1, 3, 6):
        while True:
            a = rng.integers(0, p, size=(n, n), dtype=np.int64)
            inv = linalg.inv(a, p)
            if inv is not None:
                break
        assert np.array_equal(linalg.matmul(a, inv, p), np.eye(n, dtype=np.int64))


def test_singular_inverse_none():
    assert linalg.inv([[1, 2], [2, 4]], 5) is None


@pytest.mark.parametrize("p", [2, 5, 32003])
def test_rank_nullity_property(rng, p):
    for _ in range(25):
        rows = int(rng.integers(1, 9))
        cols = int(rng.integers(1, 9))
        m = rng.integers(0, p, size=(rows, cols), dtype=np.int64)
        r = linalg.rank(m, p)
        k = linalg.kernel_basis(m, p)
        assert r + k.shape[1] == cols
        if k.shape[1]:
            assert not linalg.matmul(m, k, p).any()


def test_rref_idempotent_property(rng):
    p = 97
    for _ in range(25):
        m = rng.integers(0, p, size=(5, 7), dtype=np.int64)
        r1, piv1 = linalg.rref(m, p)
        r2, piv2 = linalg.rref(r1, p)
        assert np.array_equal(r1, r2)
        assert piv1 == piv2


def test_solve_consistent_property(rng):
    p = 32003
    for _ in range(25):
        rows = int(rng.integers(1, 8))
        cols = int(rng.integers(1, 8))
        m = rng.integers(0, p, size=(rows, cols), dtype=np.int64)
        x = rng.integers(0, p, size=cols, dtype=np.int64)
        b = linalg.matmul(m, x.reshape(-1, 1), p).ravel()
        sol = linalg.solve(m, b, p)
        assert sol is not None
        assert np.array_equal(linalg.matmul(m, sol.reshape(-1, 1), p).ravel(), b)


def test_check_prime():
    assert linalg.check_prime(32003) == 32003
    with pytest.raises(ValueError):
        linalg.check_prime(32001)  # 3 * 10667
    with pytest.raises(ValueError):
        linalg.check_prime(1 << 26)


def test_inputs_not_mutated():
    m = np.array([[1, 2], [3, 4]], dtype=np.int64)
    before = m.copy()
    linalg.rref(m, 5)
    linalg.kernel_basis(m, 5)
    linalg.rank(m, 5)
    linalg.image_basis(m, 5)
    assert np.array_equal(m, before)
