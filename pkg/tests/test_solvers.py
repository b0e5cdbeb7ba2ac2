"""Tests for the finite-N ground-state solvers."""

import numpy as np
import pytest
from scipy import sparse
from scipy.sparse.linalg import ArpackNoConvergence

from src.correlations import (
    reduce_pairwise,
    scaled_concurrence,
    wootters_scaled_concurrence,
)
from src.errors import ConvergenceError, ParityViolationError
from src.models import CollectiveExpectations, DickeParams, LmgParams, Tolerances
from src.solvers import (
    DickeSolver,
    LmgSolver,
    displaced_fock_matrix,
    displaced_fock_overlap,
    half_bandwidth,
    magnetic_numbers,
    spin_matrices,
)

from .oracles import (
    dicke_fock_ground_state,
    displacement_expm,
    lmg_full_hamiltonian,
    pairwise_from_symmetric,
    spin_expectations,
    symmetric_isometry,
)


class TestSpinMatrices:
    """Tests for collective spin operators."""

    def test_commutators(self):
        """Test [J+, J-] = 2 Jz and [Jz, J+] = J+."""
        ops = spin_matrices(2.5)
        jz, jp, jm = ops.jz.toarray(), ops.jp.toarray(), ops.jm.toarray()
        assert np.allclose(jp @ jm - jm @ jp, 2 * jz)
        assert np.allclose(jz @ jp - jp @ jz, jp)

    def test_casimir(self):
        """Test Jx^2 + Jy^2 + Jz^2 = j(j + 1)."""
        ops = spin_matrices(3)
        total = ops.jx @ ops.jx + ops.jy @ ops.jy + ops.jz @ ops.jz
        assert np.allclose(total.toarray(), 12 * np.eye(7))

    def test_ascending_order(self):
        """Test magnetic numbers run from -j to j."""
        assert list(magnetic_numbers(1.5)) == [-1.5, -0.5, 0.5, 1.5]


class TestDisplacedFock:
    """Tests for displaced Fock overlaps."""

    def test_matches_expm(self):
        """Test the closed form against a dense matrix exponential."""
        dense = displacement_expm(0.7)
        assert displaced_fock_overlap(3, 5, 0.7) == pytest.approx(dense[3, 5], abs=1e-10)
        for k, k_prime, shift in [(0, 0, 0.7), (5, 3, 0.7), (4, 4, -1.3), (0, 7, -1.3)]:
            dense = displacement_expm(shift)
            assert displaced_fock_overlap(k, k_prime, shift) == pytest.approx(
                dense[k, k_prime], abs=1e-10
            )

    def test_matrix_recurrence(self):
        """Test the recurrence matrix against the closed form."""
        for shift in (0.45, -2.0):
            matrix = displaced_fock_matrix(shift, 12)
            closed = np.array(
                [[displaced_fock_overlap(k, q, shift) for q in range(12)] for k in range(12)]
            )
            assert np.allclose(matrix, closed, atol=1e-12)

    def test_zero_shift(self):
        """Test D(0) is the identity."""
        assert np.array_equal(displaced_fock_matrix(0.0, 4), np.eye(4))
        assert displaced_fock_overlap(2, 3, 0.0) == 0.0

    def test_cached_matrix_is_a_copy(self):
        """Test callers may modify the returned matrix."""
        first = displaced_fock_matrix(0.3, 5)
        first[0, 0] = 42.0
        assert displaced_fock_matrix(0.3, 5)[0, 0] != 42.0

    def test_negative_index(self):
        """Test negative Fock indices are refused."""
        with pytest.raises(ValueError):
            displaced_fock_overlap(-1, 0, 0.5)


class TestDickeSolver:
    """Tests for the Dicke model solver."""

    @pytest.mark.parametrize("coupling", [0.1, 0.3, 0.45, 0.6])
    def test_matches_fock_basis(self, coupling):
        """Test energy and expectations against plain Fock-basis diagonalization."""
        params = DickeParams(n_atoms=2, coupling=coupling, n_tr=30)
        solver = DickeSolver()
        solution = solver.solve_ground_state(params)
        exp = solver.expectations(solution, params)

        energy, spin_rho = dicke_fock_ground_state(2, coupling, cutoff=80)
        expected = spin_expectations(spin_rho, 2)
        assert solution.energy == pytest.approx(energy, abs=1e-8)
        assert exp.jz == pytest.approx(expected["jz"].real, abs=1e-8)
        assert exp.jz2 == pytest.approx(expected["jz2"].real, abs=1e-8)
        assert exp.jp2 == pytest.approx(expected["jp2"], abs=1e-8)
        assert exp.jy2 == pytest.approx(expected["jy2"].real, abs=1e-8)
        assert abs(exp.jp) < 1e-8
        assert abs(exp.anticomm) < 1e-8

    def test_pairwise_state_matches_partial_trace(self):
        """Test the reduced state of N = 4 against the traced Fock-basis ground state."""
        params = DickeParams(n_atoms=4, coupling=0.4, n_tr=30)
        solver = DickeSolver()
        exp = solver.expectations(solver.solve_ground_state(params), params)
        rho, _, _ = reduce_pairwise(exp)

        _, spin_rho = dicke_fock_ground_state(4, 0.4, cutoff=60)
        expected = pairwise_from_symmetric(spin_rho, 4)
        assert np.allclose(rho.to_matrix(), expected, atol=1e-8, rtol=0)

    def test_normal_phase_is_nearly_polarised(self):
        """Test weak coupling leaves almost every spin down."""
        params = DickeParams(n_atoms=8, coupling=0.05, n_tr=10)
        solver = DickeSolver()
        exp = solver.expectations(solver.solve_ground_state(params), params)
        assert exp.jz == pytest.approx(-4.0, abs=0.05)

    def test_parity_sectors(self):
        """Test the parity isometries are orthonormal and decouple H."""
        params = DickeParams(n_atoms=3, coupling=0.8, n_tr=6)
        solver = DickeSolver()
        matrix = solver.hamiltonian(params)
        even = solver.parity_isometry(params, 1)
        odd = solver.parity_isometry(params, -1)

        assert even.shape[1] + odd.shape[1] == matrix.shape[0]
        assert np.allclose((even.T @ even).toarray(), np.eye(even.shape[1]))
        assert np.allclose((odd.T @ odd).toarray(), np.eye(odd.shape[1]))
        assert np.allclose((even.T @ matrix @ odd).toarray(), 0.0, atol=1e-12)

    def test_hamiltonian_is_symmetric(self):
        """Test the sparse assembly is Hermitian."""
        matrix = DickeSolver().hamiltonian(DickeParams(n_atoms=6, coupling=0.7, n_tr=8))
        assert abs(matrix - matrix.T).max() < 1e-14

    @pytest.mark.parametrize("coupling", [0.3, 0.5, 0.9])
    def test_energy_decreases_with_truncation(self, coupling):
        """Test enlarging the displaced-Fock basis never raises the energy."""
        solver = DickeSolver()
        energies = [
            solver.solve_ground_state(DickeParams(n_atoms=8, coupling=coupling, n_tr=n)).energy
            for n in range(4, 29, 4)
        ]
        for smaller, larger in zip(energies, energies[1:]):
            assert larger <= smaller + 1e-12

    @pytest.mark.parametrize("n_atoms", [2, 5, 16])
    def test_zero_coupling_energy(self, n_atoms):
        """Test the uncoupled ground state has E = -N delta / 2."""
        params = DickeParams(n_atoms=n_atoms, delta=1.5, coupling=0.0, n_tr=4)
        solution = DickeSolver().solve_ground_state(params)
        assert solution.energy == pytest.approx(-n_atoms * 1.5 / 2, abs=1e-12)

    def test_converge_grows_truncation(self):
        """Test the adaptive truncation settles and tracks the exact energy."""
        params = DickeParams(n_atoms=4, coupling=0.6)
        solution = DickeSolver().converge(params)
        energy, _ = dicke_fock_ground_state(4, 0.6, cutoff=60)

        assert solution.converged
        assert solution.n_tr >= 12
        assert solution.energy == pytest.approx(energy, abs=1e-7)

    def test_converge_reports_failure(self):
        """Test hitting n_tr_max marks the solution as not converged."""
        tolerances = Tolerances(
            n_tr_start=1, n_tr_step=1, n_tr_max=2, n_tr_convergence=1e-15
        )
        solution = DickeSolver(tolerances).converge(DickeParams(n_atoms=4, coupling=0.6))
        assert not solution.converged
        assert solution.n_tr == 2

    def test_concurrence_routes_agree_at_critical_point(self):
        """Test 1 - 4<Jy^2>/N equals (N - 1) times the Wootters concurrence."""
        params = DickeParams(n_atoms=32, coupling=0.5, n_tr=30)
        solver = DickeSolver()
        exp = solver.expectations(solver.solve_ground_state(params), params)
        rho, _, _ = reduce_pairwise(exp)
        assert wootters_scaled_concurrence(rho, 32) == pytest.approx(
            scaled_concurrence(exp), abs=1e-8
        )


class TestLmgSolver:
    """Tests for the LMG model solver."""

    def test_matches_tensor_space(self):
        """Test the Jz-basis matrix equals the projected 2^N Hamiltonian."""
        params = LmgParams(n_atoms=4, field=0.7, gamma=0.3)
        matrix = LmgSolver().hamiltonian(params).toarray()
        iso = symmetric_isometry(4)
        projected = iso.T @ lmg_full_hamiltonian(4, 0.7, 0.3) @ iso
        assert np.allclose(matrix, projected, atol=1e-12)

    def test_pentadiagonal(self):
        """Test only m -> m, m +- 2 couplings survive."""
        matrix = LmgSolver().hamiltonian(LmgParams(n_atoms=20, field=0.4, gamma=0.5))
        assert half_bandwidth(matrix) == 2
        assert matrix.diagonal(1).size == 0 or np.allclose(matrix.diagonal(1), 0.0)

    def test_two_spins(self):
        """Test N = 2 against the 3 x 3 j = 1 problem."""
        solution = LmgSolver().solve_ground_state(LmgParams(n_atoms=2, field=0.5))
        jz = np.diag([-1.0, 0.0, 1.0])
        jp = np.diag([np.sqrt(2), np.sqrt(2)], -1)
        jx = (jp + jp.T) / 2
        expected = np.linalg.eigvalsh(-0.5 * jz - jx @ jx / 2 + np.eye(3) / 4)[0]
        assert solution.energy == pytest.approx(expected, abs=1e-12)

    def test_expectations_match_tensor_space(self):
        """Test all expectations against the symmetric-sector oracle."""
        rng = np.random.default_rng(3)
        for field in rng.uniform(0.1, 1.5, size=3):
            params = LmgParams(n_atoms=4, field=field, gamma=0.2)
            solver = LmgSolver()
            exp = solver.expectations(solver.solve_ground_state(params), params)

            iso = symmetric_isometry(4)
            values, vectors = np.linalg.eigh(iso.T @ lmg_full_hamiltonian(4, field, 0.2) @ iso)
            state = vectors[:, 0]
            expected = spin_expectations(np.outer(state, state.conj()), 4)
            assert exp.jz == pytest.approx(expected["jz"].real, abs=1e-10)
            assert exp.jz2 == pytest.approx(expected["jz2"].real, abs=1e-10)
            assert exp.jp2 == pytest.approx(expected["jp2"], abs=1e-10)
            assert exp.jy2 == pytest.approx(expected["jy2"].real, abs=1e-10)

    def test_mean_field_magnetisation(self):
        """Test <Jz>/N approaches lambda / 2 below the transition."""
        params = LmgParams(n_atoms=256, field=0.5)
        solver = LmgSolver()
        exp = solver.expectations(solver.solve_ground_state(params), params)
        assert exp.jz / 256 == pytest.approx(0.25, abs=0.01)

    def test_parity_is_definite(self):
        """Test the chosen block leaves <J+> at zero."""
        params = LmgParams(n_atoms=31, field=0.3, gamma=0.1)
        solver = LmgSolver()
        solution = solver.solve_ground_state(params)
        exp = solver.expectations(solution, params)
        assert solution.parity in (1, -1)
        assert exp.jp == 0

    def test_lanczos_agrees_with_banded(self):
        """Test the large-block path against the tridiagonal solver."""

        class SmallBlocks(LmgSolver):
            BANDED_LIMIT = 0

        params = LmgParams(n_atoms=40, field=0.8, gamma=0.1)
        banded = LmgSolver().solve_ground_state(params)
        lanczos = SmallBlocks().solve_ground_state(params)
        assert lanczos.method == "lanczos"
        assert lanczos.energy == pytest.approx(banded.energy, abs=1e-9)

    def test_banded_limit_counts_full_dimension(self):
        """Test N + 1 above BANDED_LIMIT switches to Lanczos with a matching energy."""

        class WideBanded(LmgSolver):
            BANDED_LIMIT = 10**6

        below = LmgSolver().solve_ground_state(LmgParams(n_atoms=4094, field=1.0))
        params = LmgParams(n_atoms=4096, field=1.0)
        above = LmgSolver().solve_ground_state(params)
        reference = WideBanded().solve_ground_state(params)
        assert below.method == "banded"
        assert above.method == "lanczos"
        assert reference.method == "banded"
        assert above.converged
        assert above.parity == reference.parity
        assert above.energy == pytest.approx(reference.energy, abs=1e-8)


class TestBaseSolver:
    """Tests for shared solver behaviour."""

    def test_arpack_failure_raises(self, monkeypatch):
        """Test exhausted ARPACK retries surface as a convergence error."""
        calls = []

        def failing_eigsh(*args, **kwargs):
            calls.append(kwargs["ncv"])
            raise ArpackNoConvergence("no convergence", np.array([]), np.array([]))

        monkeypatch.setattr("src.solvers.base.eigsh", failing_eigsh)
        matrix = sparse.diags(np.arange(50.0), format="csr")
        with pytest.raises(ConvergenceError, match="ARPACK"):
            LmgSolver().lowest_eigenpair(matrix, dense_limit=0)
        assert len(calls) == LmgSolver.ARPACK_ATTEMPTS
        assert calls == sorted(calls)

    def test_parity_violation(self):
        """Test a non-zero <J+> is reported."""
        exp = CollectiveExpectations(n_atoms=2, jz=0.0, jz2=0.5, jp=0.1, jxy2=1.5, jy2=0.75)
        with pytest.raises(ParityViolationError):
            DickeSolver().check_parity(exp)

    def test_dense_path_residual(self):
        """Test the dense path returns a tiny residual and a unit vector."""
        matrix = sparse.diags([np.arange(5.0), np.ones(4), np.ones(4)], [0, 1, -1], format="csr")
        pair = LmgSolver().lowest_eigenpair(matrix)
        assert pair.method == "dense"
        assert np.linalg.norm(pair.vector) == pytest.approx(1.0)
        assert pair.residual < 1e-12
