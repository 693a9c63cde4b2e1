"""Row-reduction kernels over a prime field.

Every rank / kernel / solve / image computation in the package funnels into
`rref_mod`, so this is the one genuinely hot loop.  Two interchangeable
implementations are provided:

* a numba ``@njit`` kernel (default), and
* a pure-numpy fallback, selected by setting ``MCMREP_NO_NUMBA=1`` in the
  environment before import (also used automatically when numba is absent).

Both operate in place on C-contiguous int64 arrays with entries in [0, p)
and return the pivot columns.  `benchmarks/bench_kernels.py` compares them.
"""

import os

import numpy as np

__all__ = ["BACKEND", "rref_mod", "rref_mod_numpy"]


def rref_mod_numpy(a: np.ndarray, p: int) -> np.ndarray:
    """In-place reduced row echelon form mod p; returns pivot columns.

    Pivoting is deterministic: first nonzero entry in column order, scanning
    rows top-down, so downstream bases are reproducible.
    """
    m, n = a.shape
    piv = np.empty(min(m, n), dtype=np.int64)
    npiv = 0
    r = 0
    for c in range(n):
        if r >= m:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        inv = pow(int(a[r, c]), p - 2, p)
        a[r, c:] = (a[r, c:] * inv) % p
        rows = np.nonzero(a[:, c])[0]
        rows = rows[rows != r]
        if rows.size:
            a[rows, c:] = (a[rows, c:] - np.outer(a[rows, c], a[r, c:])) % p
        piv[npiv] = c
        npiv += 1
        r += 1
    return piv[:npiv].copy()


_want_numba = os.environ.get("MCMREP_NO_NUMBA", "") not in ("1", "true", "yes")

if _want_numba:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - exercised via the env flag instead
        _want_numba = False

if _want_numba:

    @njit(cache=True)
    def _pow_mod(base, exp, p):
        result = 1
        b = base % p
        e = exp
        while e > 0:
            if e & 1:
                result = (result * b) % p
            b = (b * b) % p
            e >>= 1
        return result

    @njit(cache=True)
    def _rref_mod_numba(a, p):
        m, n = a.shape
        piv = np.empty(min(m, n), dtype=np.int64)
        npiv = 0
        r = 0
        for c in range(n):
            if r >= m:
                break
            pr = -1
            for i in range(r, m):
                if a[i, c] != 0:
                    pr = i
                    break
            if pr < 0:
                continue
            if pr != r:
                for j in range(c, n):
                    tmp = a[r, j]
                    a[r, j] = a[pr, j]
                    a[pr, j] = tmp
            inv = _pow_mod(a[r, c], p - 2, p)
            for j in range(c, n):
                a[r, j] = (a[r, j] * inv) % p
            for i in range(m):
                if i != r and a[i, c] != 0:
                    f = a[i, c]
                    for j in range(c, n):
                        a[i, j] = (a[i, j] - f * a[r, j]) % p
            piv[npiv] = c
            npiv += 1
            r += 1
        return piv[:npiv].copy()

    def rref_mod(a: np.ndarray, p: int) -> np.ndarray:
        return _rref_mod_numba(a, p)

    BACKEND = "numba"
else:
    rref_mod = rref_mod_numpy
    BACKEND = "numpy"
