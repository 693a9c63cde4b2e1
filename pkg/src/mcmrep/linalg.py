"""Exact dense linear algebra over the prime field F_p.

Matrices are 2-D numpy int64 arrays with entries reduced into [0, p).  All
functions are pure: inputs are never mutated, so concurrent use is safe.
The default prime is 32003; any prime below 2**25 is accepted, which keeps
products and the accumulations inside matmul well inside int64 range.
"""

import numpy as np

from ._kernels import rref_mod

DEFAULT_PRIME = 32003
MAX_PRIME = 1 << 25

__all__ = [
    "DEFAULT_PRIME",
    "as_matrix",
    "check_prime",
    "eye",
    "image_basis",
    "inv",
    "kernel_basis",
    "matmul",
    "rank",
    "rref",
    "solve",
]


def check_prime(p: int) -> int:
    """Validate the session prime: prime and small enough for safe int64 math."""
    if p < 2 or p >= MAX_PRIME:
        raise ValueError(f"prime must lie in [2, {MAX_PRIME}), got {p}")
    d = 2
    while d * d <= p:
        if p % d == 0:
            raise ValueError(f"{p} is not prime (divisible by {d})")
        d += 1
    return p


def as_matrix(data, p: int) -> np.ndarray:
    """Copy arbitrary integer data into a canonical mod-p matrix."""
    a = np.asarray(data, dtype=np.int64)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D array, got shape {a.shape}")
    return np.ascontiguousarray(a % p)


def eye(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)


def matmul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    return (a @ b) % p


def rref(m: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns.  rank == len(pivots)."""
    a = as_matrix(m, p)
    piv = rref_mod(a, p)
    return a, [int(c) for c in piv]


def rank(m: np.ndarray, p: int) -> int:
    a = as_matrix(m, p)
    return int(rref_mod(a, p).size)


def kernel_basis(m: np.ndarray, p: int) -> np.ndarray:
    """Basis of the right null space, one vector per column; shape (cols, nullity)."""
    a = as_matrix(m, p)
    n = a.shape[1]
    piv = rref_mod(a, p)
    pivset = set(int(c) for c in piv)
    free = [c for c in range(n) if c not in pivset]
    basis = np.zeros((n, len(free)), dtype=np.int64)
    for k, c in enumerate(free):
        basis[c, k] = 1
        for r, pc in enumerate(piv):
            basis[pc, k] = (-a[r, c]) % p
    return basis


def image_basis(m: np.ndarray, p: int) -> np.ndarray:
    """Columns of m at its pivot positions: a basis of the column space."""
    a = as_matrix(m, p)
    work = a.copy()
    piv = rref_mod(work, p)
    return a[:, [int(c) for c in piv]]


def solve(m: np.ndarray, b: np.ndarray, p: int):
    """One particular solution of m x = b, or None when b is not in the image."""
    a = as_matrix(m, p)
    rows, cols = a.shape
    bv = np.asarray(b, dtype=np.int64).reshape(rows) % p
    aug = np.concatenate([a, bv[:, None]], axis=1)
    piv = rref_mod(aug, p)
    if piv.size and int(piv[-1]) == cols:
        return None
    x = np.zeros(cols, dtype=np.int64)
    for r, c in enumerate(piv):
        x[int(c)] = aug[r, cols]
    return x


def inv(m: np.ndarray, p: int):
    """Matrix inverse, or None when m is singular."""
    a = as_matrix(m, p)
    n = a.shape[0]
    if a.shape[1] != n:
        raise ValueError("inverse needs a square matrix")
    aug = np.concatenate([a, eye(n)], axis=1)
    piv = rref_mod(aug, p)
    if piv.size != n or (piv >= n).any():
        return None
    return np.ascontiguousarray(aug[:, n:])
