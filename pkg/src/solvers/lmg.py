"""Finite-N LMG model in the collective Jz basis.

    H = -lambda Jz - (1/N) [Jx^2 + gamma Jy^2 - N (1 + gamma) / 4]

with Jx^2 + gamma Jy^2 = (1 - gamma)/4 (J+^2 + J-^2) + (1 + gamma)/2 (J^2 - Jz^2),
so H only couples m to m and m +- 2 and splits into two spin-flip parity
blocks, each of them tridiagonal.
"""

import numpy as np
from scipy import sparse
from scipy.linalg import eigh_tridiagonal, eigvalsh_tridiagonal

from ..correlations.reduction import collective_expectations
from ..errors import NumericalError
from ..models import CollectiveExpectations, GroundStateSolution, LmgParams
from .base import BaseSolver, Eigenpair
from .spin import half_bandwidth, spin_matrices


class LmgSolver(BaseSolver):
    """Ground state of the LMG model by exact diagonalization."""

    MODEL_NAME = "lmg"
    BANDED_LIMIT = 4096
    SHIFT_OFFSET = 1e-8

    def hamiltonian(self, params: LmgParams) -> sparse.csr_matrix:
        n = params.n_atoms
        gamma = params.gamma
        ops = spin_matrices(params.j)
        identity = sparse.identity(n + 1, format="csr")
        casimir = params.j * (params.j + 1)

        interaction = (1 - gamma) / 4 * (ops.jp @ ops.jp + ops.jm @ ops.jm) + (1 + gamma) / 2 * (
            casimir * identity - ops.jz @ ops.jz
        )
        matrix = -params.field * ops.jz - (interaction - n * (1 + gamma) / 4 * identity) / n
        matrix = sparse.csr_matrix(matrix)
        matrix.eliminate_zeros()

        bandwidth = half_bandwidth(matrix)
        if bandwidth > 2:
            raise NumericalError("LMG Hamiltonian is not pentadiagonal", bandwidth=bandwidth)
        return matrix

    def _block_eigenpair(self, block: sparse.csr_matrix, iterative: bool) -> Eigenpair:
        size = block.shape[0]
        diagonal = block.diagonal()
        if size == 1:
            vector = np.ones(1)
            return Eigenpair(float(diagonal[0]), vector, 0.0, "banded")
        off_diagonal = block.diagonal(1)
        if iterative:
            # Bisection on the tridiagonal block places the shift just below the spectrum.
            lowest = float(
                eigvalsh_tridiagonal(diagonal, off_diagonal, select="i", select_range=(0, 0))[0]
            )
            sigma = lowest - self.SHIFT_OFFSET * max(1.0, abs(lowest))
            return self.lowest_eigenpair(block, dense_limit=0, sigma=sigma)
        values, vectors = eigh_tridiagonal(
            diagonal, off_diagonal, select="i", select_range=(0, 0)
        )
        vector = vectors[:, 0] / np.linalg.norm(vectors[:, 0])
        residual = float(np.linalg.norm(block @ vector - values[0] * vector))
        return Eigenpair(float(values[0]), vector, residual, "banded")

    def solve_ground_state(self, params: LmgParams) -> GroundStateSolution:
        """Lower of the two parity-block minima; even index blocks have parity +1.

        Up to BANDED_LIMIT basis states the blocks go to the tridiagonal
        eigensolver, beyond it to shift-invert Lanczos.
        """
        matrix = self.hamiltonian(params)
        size = params.n_atoms + 1
        iterative = size > self.BANDED_LIMIT
        best: tuple[Eigenpair, int, np.ndarray] | None = None
        for parity, start in ((1, 0), (-1, 1)):
            indices = np.arange(start, size, 2)
            if indices.size == 0:
                continue
            block = matrix[indices][:, indices].tocsr()
            pair = self._block_eigenpair(block, iterative)
            if best is None or pair.energy < best[0].energy:
                best = (pair, parity, indices)
        assert best is not None
        pair, parity, indices = best

        vector = np.zeros(size)
        vector[indices] = pair.vector
        solution = GroundStateSolution(
            model="lmg",
            energy=pair.energy,
            coefficients=vector.reshape(size, 1),
            converged=self.is_converged(pair.energy, pair.residual),
            residual=pair.residual,
            parity=parity,  # type: ignore[arg-type]
            method=pair.method,  # type: ignore[arg-type]
        )
        self.logger.debug(
            "ground_state_solved",
            n_atoms=params.n_atoms,
            field=params.field,
            gamma=params.gamma,
            energy=solution.energy,
            parity=parity,
            method=solution.method,
        )
        return solution

    def expectations(
        self, solution: GroundStateSolution, params: LmgParams
    ) -> CollectiveExpectations:
        ops = spin_matrices(params.j)
        state = solution.coefficients[:, 0]

        def expect(operator: sparse.spmatrix) -> complex:
            return complex(state @ (operator @ state))

        exp = collective_expectations(params.n_atoms, ops.jz, ops.jp, expect)
        self.check_parity(exp)
        return exp
