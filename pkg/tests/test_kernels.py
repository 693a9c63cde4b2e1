"""Backend parity: the numba kernel and the numpy fallback must agree bit for
bit, and the env flag must select the fallback."""

import os
import subprocess
import sys

import numpy as np

from mcmrep import _kernels


def test_backends_agree(rng):
    p = 32003
    for _ in range(30):
        rows = int(rng.integers(1, 12))
        cols = int(rng.integers(1, 12))
        m = rng.integers(0, p, size=(rows, cols), dtype=np.int64)
        a1, a2 = m.copy(), m.copy()
        piv_np = _kernels.rref_mod_numpy(a1, p)
        piv_sel = _kernels.rref_mod(a2, p)
        assert np.array_equal(a1, a2)
        assert np.array_equal(piv_np, piv_sel)


def test_env_flag_selects_numpy_backend():
    code = (
        "from mcmrep import _kernels; "
        "assert _kernels.BACKEND == 'numpy', _kernels.BACKEND; "
        "assert _kernels.rref_mod is _kernels.rref_mod_numpy"
    )
    env = dict(os.environ, MCMREP_NO_NUMBA="1")
    subprocess.run([sys.executable, "-c", code], check=True, env=env)


def test_default_backend_reports_name():
    assert _kernels.BACKEND in ("numba", "numpy")
