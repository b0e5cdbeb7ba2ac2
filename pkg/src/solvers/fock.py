"""Matrix elements <k| D(beta) |k'> of the real displacement operator.

D(beta) = exp(beta (a^dag - a)); both the scalar closed form and the
matrix recurrence keep their prefactors in the log domain.
"""

import math
from functools import lru_cache

import numpy as np
from scipy.special import eval_genlaguerre, gammaln


def displaced_fock_overlap(k: int, k_prime: int, beta_shift: float) -> float:
    """<k| D(beta) |k'> via the associated-Laguerre closed form."""
    if k < 0 or k_prime < 0:
        raise ValueError("Fock indices must be nonnegative")
    if beta_shift == 0.0:
        return 1.0 if k == k_prime else 0.0

    lo, hi = min(k, k_prime), max(k, k_prime)
    # <k|D(b)|k'> = <k'|D(-b)|k>, so a lower row index flips the shift.
    shift = beta_shift if k >= k_prime else -beta_shift
    gap = hi - lo
    x = shift * shift

    log_prefactor = 0.5 * (gammaln(lo + 1) - gammaln(hi + 1)) - x / 2
    if gap:
        log_prefactor += gap * math.log(abs(shift))
    sign = -1.0 if (shift < 0 and gap % 2) else 1.0
    return float(sign * math.exp(log_prefactor) * eval_genlaguerre(lo, gap, x))


def displaced_fock_matrix(beta_shift: float, size: int) -> np.ndarray:
    """Truncated matrix M[k, k'] = <k| D(beta) |k'> for k, k' < size.

    Row 0 is the coherent-state amplitude of |-beta>; the remaining rows
    follow from a D = D (a + beta):

        sqrt(k + 1) M[k+1, k'] = sqrt(k') M[k, k'-1] + beta M[k, k'].
    """
    return _displaced_fock_matrix(float(beta_shift), int(size)).copy()


@lru_cache(maxsize=64)
def _displaced_fock_matrix(beta_shift: float, size: int) -> np.ndarray:
    if size < 1:
        raise ValueError("size must be positive")
    if beta_shift == 0.0:
        return np.eye(size)

    cols = np.arange(size)
    log_row = -0.5 * beta_shift**2 + cols * math.log(abs(beta_shift)) - 0.5 * gammaln(cols + 1)
    signs = np.where((beta_shift > 0) & (cols % 2 == 1), -1.0, 1.0)

    matrix = np.zeros((size, size))
    matrix[0] = signs * np.exp(log_row)
    root = np.sqrt(cols)
    for k in range(size - 1):
        shifted = np.zeros(size)
        shifted[1:] = root[1:] * matrix[k, :-1]
        matrix[k + 1] = (shifted + beta_shift * matrix[k]) / math.sqrt(k + 1)
    matrix.setflags(write=False)
    return matrix
