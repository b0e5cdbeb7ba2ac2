"""Finite-N Dicke model in the extended coherent-state basis.

The Hamiltonian is assembled in the spin frame rotated so the boson
couples to the diagonal spin component:

    H' = omega a^dag a - delta Jx' + (2 lambda / sqrt(N)) (a + a^dag) Jz'

with Jx = Jz', Jy = Jy', Jz = -Jx'. Pseudospin sector n then carries
the displaced oscillator omega (A_n^dag A_n - g_n^2), A_n = a + g_n,
and the basis |n> (x) D(-g_n)|k>, k = 0..n_tr.
"""

from collections.abc import Callable

import numpy as np
from scipy import sparse

from ..correlations.reduction import collective_expectations
from ..models import CollectiveExpectations, DickeParams, GroundStateSolution
from .base import BaseSolver
from .fock import displaced_fock_matrix
from .spin import magnetic_numbers, spin_matrices


class DickeSolver(BaseSolver):
    """Ground state of the Dicke model by exact diagonalization."""

    MODEL_NAME = "dicke"

    def hamiltonian(self, params: DickeParams) -> sparse.csr_matrix:
        """Sparse H' over (pseudospin index, displaced Fock index)."""
        j = params.j
        n_values = magnetic_numbers(j)
        levels = params.n_tr + 1
        shift = params.displacement(1.0)
        g = shift * n_values

        spin_identity = sparse.identity(n_values.size, format="csr")
        boson_identity = sparse.identity(levels, format="csr")
        oscillator = sparse.kron(spin_identity, sparse.diags(params.omega * np.arange(levels)))
        offset = sparse.kron(sparse.diags(params.omega * g**2), boson_identity)

        # <n+1, k'| H' |n, k> = -(delta/2) sqrt(j(j+1) - n(n+1)) <k'|D(g_{n+1} - g_n)|k>
        ladder = np.sqrt(np.maximum(j * (j + 1) - n_values[:-1] * (n_values[:-1] + 1), 0.0))
        overlap = displaced_fock_matrix(shift, levels)
        hopping = sparse.kron(sparse.diags(ladder, -1), -0.5 * params.delta * overlap)

        return (oscillator - offset + hopping + hopping.T).tocsr()

    def parity_isometry(self, params: DickeParams, sign: int) -> sparse.csr_matrix:
        """Columns spanning the parity-``sign`` sector, P|n,k> = (-1)^k |-n,k>."""
        size = params.n_atoms + 1
        levels = params.n_tr + 1
        rows: list[int] = []
        cols: list[int] = []
        data: list[float] = []
        column = 0
        for i in range((size + 1) // 2):
            mirror = size - 1 - i
            for k in range(levels):
                phase = 1 if k % 2 == 0 else -1
                if i == mirror:
                    if phase != sign:
                        continue
                    rows.append(i * levels + k)
                    cols.append(column)
                    data.append(1.0)
                else:
                    rows.extend([i * levels + k, mirror * levels + k])
                    cols.extend([column, column])
                    data.extend([1 / np.sqrt(2), sign * phase / np.sqrt(2)])
                column += 1
        dim = size * levels
        return sparse.csr_matrix((data, (rows, cols)), shape=(dim, column))

    def solve_ground_state(self, params: DickeParams) -> GroundStateSolution:
        matrix = self.hamiltonian(params)
        pair = self.lowest_eigenpair(matrix)
        solution = self._solution(params, pair.energy, pair.vector, pair.residual, pair.method)

        if params.n_atoms >= 2:
            jp = self._rotated_expectation(solution, params, self._jp_original(params))
            if abs(jp) > self.tolerances.parity:
                self.logger.info("parity_resolve", n_atoms=params.n_atoms, jp=abs(jp))
                solution = self._solve_by_sector(params, matrix)

        self.logger.debug(
            "ground_state_solved",
            n_atoms=params.n_atoms,
            coupling=params.coupling,
            n_tr=params.n_tr,
            energy=solution.energy,
            method=solution.method,
        )
        return solution

    def _solve_by_sector(
        self, params: DickeParams, matrix: sparse.csr_matrix
    ) -> GroundStateSolution:
        best: GroundStateSolution | None = None
        for sign in (1, -1):
            isometry = self.parity_isometry(params, sign)
            if isometry.shape[1] == 0:
                continue
            block = (isometry.T @ matrix @ isometry).tocsr()
            pair = self.lowest_eigenpair(block)
            vector = isometry @ pair.vector
            residual = float(np.linalg.norm(matrix @ vector - pair.energy * vector))
            candidate = self._solution(
                params, pair.energy, vector, residual, pair.method, parity=sign
            )
            if best is None or candidate.energy < best.energy:
                best = candidate
        assert best is not None
        return best

    def _solution(
        self,
        params: DickeParams,
        energy: float,
        vector: np.ndarray,
        residual: float,
        method: str,
        parity: int | None = None,
    ) -> GroundStateSolution:
        return GroundStateSolution(
            model="dicke",
            energy=energy,
            coefficients=vector.reshape(params.n_atoms + 1, params.n_tr + 1),
            converged=self.is_converged(energy, residual),
            residual=residual,
            n_tr=params.n_tr,
            parity=parity,  # type: ignore[arg-type]
            method=method,  # type: ignore[arg-type]
        )

    def spin_density(self, solution: GroundStateSolution, params: DickeParams) -> sparse.csr_matrix:
        """Banded R[n, n'] = sum_{k,k'} c_{n,k} <k|D(g_n - g_n')|k'> c_{n',k'}.

        Only |n - n'| <= 2 is needed for the operators of the reduction.
        """
        coefficients = solution.coefficients
        levels = coefficients.shape[1]
        shift = params.displacement(1.0)
        diagonals = [np.einsum("ik,ik->i", coefficients, coefficients)]
        offsets = [0]
        for d in (1, 2):
            if d >= coefficients.shape[0]:
                break
            overlap = displaced_fock_matrix(-d * shift, levels)
            band = np.einsum("ik,kl,il->i", coefficients[:-d], overlap, coefficients[d:])
            # R is symmetric, so each band appears above and below the diagonal.
            diagonals.extend([band, band])
            offsets.extend([d, -d])
        return sparse.diags(diagonals, offsets, format="csr")

    def _jp_original(self, params: DickeParams) -> sparse.csr_matrix:
        rotated = spin_matrices(params.j)
        # J+ = Jz' + i Jy' = Jz' + (J+' - J-') / 2
        return (rotated.jz + 0.5 * (rotated.jp - rotated.jm)).tocsr()

    def _rotated_expectation(
        self, solution: GroundStateSolution, params: DickeParams, operator: sparse.spmatrix
    ) -> complex:
        density = self.spin_density(solution, params)
        return complex(sparse.csr_matrix(operator).multiply(density).sum())

    def expectations(
        self, solution: GroundStateSolution, params: DickeParams
    ) -> CollectiveExpectations:
        """Collective expectations mapped back to the frame of the Dicke Hamiltonian."""
        rotated = spin_matrices(params.j)
        jz = (-0.5 * (rotated.jp + rotated.jm)).tocsr()
        jp = self._jp_original(params)
        density = self.spin_density(solution, params)

        def expect(operator: sparse.spmatrix) -> complex:
            return complex(sparse.csr_matrix(operator).multiply(density).sum())

        exp = collective_expectations(params.n_atoms, jz, jp, expect)
        self.check_parity(exp)
        return exp

    def converge(
        self,
        params: DickeParams,
        observe: Callable[[GroundStateSolution], float] | None = None,
    ) -> GroundStateSolution:
        """Grow n_tr until energy and the observed quantity both settle.

        ``observe`` is typically the pairwise discord of the solution.
        """
        tol = self.tolerances
        n_tr = tol.n_tr_start
        previous = self.solve_ground_state(params.model_copy(update={"n_tr": n_tr}))
        previous_value = observe(previous) if observe else 0.0
        while n_tr + tol.n_tr_step <= tol.n_tr_max:
            n_tr += tol.n_tr_step
            current = self.solve_ground_state(params.model_copy(update={"n_tr": n_tr}))
            value = observe(current) if observe else 0.0
            settled = (
                abs(current.energy - previous.energy) < tol.n_tr_convergence
                and abs(value - previous_value) < tol.n_tr_convergence
            )
            previous, previous_value = current, value
            if settled:
                return current

        self.logger.warning(
            "n_tr_not_converged",
            n_atoms=params.n_atoms,
            coupling=params.coupling,
            n_tr=n_tr,
        )
        return previous.model_copy(update={"converged": False})
