"""The numba and numpy kernels must agree, and the env flag must pick numpy."""
import os
import subprocess
import sys

import numpy as np
import pytest

from bocse import kernels, random_network
from bocse.info import joint_codes, make_cells, xlog2x

NP, NB = kernels.BACKENDS["numpy"], kernels.BACKENDS["numba"]


def _setup(seed, T=300, J=5, ax=3):
    rng = np.random.default_rng(seed)
    xs = rng.integers(0, ax, size=(T, J)).astype(np.uint8)
    y = rng.integers(0, 2, T)
    z = rng.integers(0, 3, size=(T, 2))
    cells = make_cells(y, joint_codes(z, (3, 3)))
    return rng, xs, cells


@pytest.mark.parametrize("seed", range(5))
def test_contingency_and_cmi_agree(seed):
    rng, xs, cells = _setup(seed)
    a = NP["contingency"](xs, cells.cell, 3, cells.ncell)
    b = NB["contingency"](xs, cells.cell, 3, cells.ncell)
    assert np.array_equal(a, b)
    L = xlog2x(cells.T)
    ca = NP["cmi_from_counts"](a, cells.starts, L, float(cells.T))
    cb = NB["cmi_from_counts"](b, cells.starts, L, float(cells.T))
    np.testing.assert_allclose(ca, cb, rtol=0, atol=1e-12)


@pytest.mark.parametrize("seed", range(3))
def test_permuted_contingency_agree(seed):
    rng, xs, cells = _setup(seed)
    perms = np.stack([rng.permutation(cells.T) for _ in range(20)])
    a = NP["permuted_contingency"](xs[:, 0].copy(), perms, cells.cell, 3, cells.ncell)
    b = NB["permuted_contingency"](xs[:, 0].copy(), perms, cells.cell, 3, cells.ncell)
    assert np.array_equal(a, b)
    # each permuted table keeps both margins
    assert (a.sum(axis=2) == np.bincount(xs[:, 0], minlength=3)).all()


def test_simulate_agree():
    net = random_network(12, 3, np.random.default_rng(0)).with_noise(0.1)
    parents, arity, tables = net._packed()
    flips = (np.random.default_rng(1).random((40, 12)) < 0.1).astype(np.uint8)
    init = np.zeros(12, np.uint8)
    sa, ta = NP["simulate"](parents, arity, tables, flips, init)
    sb, tb = NB["simulate"](parents, arity, tables, flips, init)
    assert ta == tb == -1
    assert np.array_equal(sa, sb)


def test_env_flag_selects_numpy():
    code = "import bocse; print(bocse.backend_name())"
    env = dict(os.environ, BOCSE_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.stdout.strip() == "numpy"


def test_xlog2x_table():
    L = kernels.xlog2x_table(4)
    np.testing.assert_allclose(L, [0, 0, 2, 3 * np.log2(3), 8])
