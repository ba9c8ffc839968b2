import numpy as np
import pytest

from pcoh.linalg import Solver, kernel_basis, rank, rref, solve


def naive_rref(a, p):
    """Reference implementation: unblocked Gauss-Jordan, same pivot rule."""
    r = np.array(a, dtype=np.int64) % p
    m, n = r.shape
    piv = []
    row = 0
    for col in range(n):
        if row >= m:
            break
        nz = [i for i in range(row, m) if r[i, col]]
        if not nz:
            continue
        i = nz[0]
        r[[row, i]] = r[[i, row]]
        r[row] = r[row] * pow(int(r[row, col]), p - 2, p) % p
        for k in range(m):
            if k != row and r[k, col]:
                r[k] = (r[k] - r[k, col] * r[row]) % p
        piv.append(col)
        row += 1
    return r, len(piv), piv


def test_rref_identity():
    r, rk, piv = rref(np.eye(3, dtype=int), 3)
    assert rk == 3
    assert piv == [0, 1, 2]
    assert (r == np.eye(3, dtype=int)).all()


def test_rref_zero_matrix():
    r, rk, piv = rref(np.zeros((4, 5), dtype=int), 5)
    assert rk == 0
    assert piv == []


def test_rref_rank_one_mod5():
    # second row is twice the first mod 5
    r, rk, piv = rref([[1, 2], [2, 4]], 5)
    assert rk == 1


@pytest.mark.parametrize("p", [3, 5])
@pytest.mark.parametrize("shape", [(1, 1), (4, 7), (7, 4), (20, 20), (90, 130), (300, 170)])
def test_rref_matches_naive(p, shape):
    rng = np.random.default_rng(shape[0] * 1000 + shape[1] + p)
    a = rng.integers(0, p, shape)
    got = rref(a, p)
    want = naive_rref(a, p)
    assert got[1] == want[1]
    assert got[2] == want[2]
    assert (got[0] == want[0]).all()


def test_rref_many_panels():
    # wide enough to exercise several column panels
    rng = np.random.default_rng(7)
    a = rng.integers(0, 3, (200, 400))
    got = rref(a, 3)
    want = naive_rref(a, 3)
    assert (got[0] == want[0]).all()


def test_kernel_identity_empty():
    k = kernel_basis(np.eye(4, dtype=int), 3)
    assert k.shape == (4, 0)


def test_kernel_zero_matrix():
    k = kernel_basis(np.zeros((2, 3), dtype=int), 3)
    assert k.shape == (3, 3)


def test_kernel_row_of_ones_mod3():
    a = np.array([[1, 1, 1]])
    k = kernel_basis(a, 3)
    assert k.shape == (3, 2)
    assert (a @ k % 3 == 0).all()


@pytest.mark.parametrize("p", [3, 5])
def test_rank_nullity(p):
    rng = np.random.default_rng(41 + p)
    for _ in range(10):
        m, n = rng.integers(1, 40, 2)
        a = rng.integers(0, p, (m, n))
        k = kernel_basis(a, p)
        assert rank(a, p) + k.shape[1] == n
        if k.shape[1]:
            assert (a @ k % p == 0).all()
            assert rank(k, p) == k.shape[1]


def test_solve_identity():
    b = np.array([2, 0, 1])
    assert (solve(np.eye(3, dtype=int), b, 3) == b).all()


def test_solve_zero_matrix_inconsistent():
    assert solve(np.zeros((2, 2), dtype=int), [1, 0], 3) is None


def test_solve_back_substitution_example():
    a = np.array([[1, 1], [0, 1]])
    x = solve(a, [2, 1], 3)
    assert (x == [1, 1]).all()
    assert (a @ x % 3 == [2, 1]).all()


@pytest.mark.parametrize("p", [3, 5])
def test_solve_random_consistency(p):
    rng = np.random.default_rng(99 + p)
    for _ in range(15):
        m, n = rng.integers(1, 30, 2)
        a = rng.integers(0, p, (m, n))
        x0 = rng.integers(0, p, n)
        b = a @ x0 % p
        x = solve(a, b, p)
        assert x is not None
        assert (a @ x % p == b).all()
        b2 = rng.integers(0, p, m)
        got = solve(a, b2, p)
        aug_jump = rank(np.concatenate([a, b2[:, None]], axis=1), p) > rank(a, p)
        assert (got is None) == aug_jump
        if got is not None:
            assert (a @ got % p == b2).all()


def test_solver_many_right_hand_sides():
    p = 5
    rng = np.random.default_rng(3)
    a = rng.integers(0, p, (40, 60))
    s = Solver(a, p)
    x0 = rng.integers(0, p, (60, 7))
    b = a @ x0 % p
    x = s.solve_many(b)
    assert (a @ x % p == b).all()
    assert s.in_image(b[:, 0])
