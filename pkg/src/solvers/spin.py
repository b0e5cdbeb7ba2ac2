"""Collective spin matrices in the |j, m> basis, m ascending from -j."""

from typing import NamedTuple

import numpy as np
from scipy import sparse


class SpinMatrices(NamedTuple):
    jz: sparse.csr_matrix
    jp: sparse.csr_matrix
    jm: sparse.csr_matrix

    @property
    def jx(self) -> sparse.csr_matrix:
        return ((self.jp + self.jm) * 0.5).tocsr()

    @property
    def jy(self) -> sparse.csr_matrix:
        return ((self.jp - self.jm) * (-0.5j)).tocsr()


def magnetic_numbers(j: float) -> np.ndarray:
    return -j + np.arange(int(round(2 * j)) + 1)


def spin_matrices(j: float) -> SpinMatrices:
    """Sparse Jz, J+ and J- for spin j."""
    m = magnetic_numbers(j)
    ladder = np.sqrt(np.maximum(j * (j + 1) - m[:-1] * (m[:-1] + 1), 0.0))
    jz = sparse.diags(m, 0, format="csr")
    # J+ |m> lands one row below in ascending order.
    jp = sparse.diags(ladder, -1, format="csr")
    jm = sparse.diags(ladder, 1, format="csr")
    return SpinMatrices(jz=jz, jp=jp, jm=jm)


def half_bandwidth(matrix: sparse.spmatrix) -> int:
    coo = sparse.coo_matrix(matrix)
    mask = coo.data != 0
    if not np.any(mask):
        return 0
    return int(np.max(np.abs(coo.row[mask] - coo.col[mask])))
