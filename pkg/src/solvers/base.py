"""Base solver with eigensolver dispatch and common functionality."""

from abc import ABC, abstractmethod
from typing import Any, NamedTuple

import numpy as np
import structlog
from scipy import linalg, sparse
from scipy.sparse.linalg import ArpackNoConvergence, eigsh
from tenacity import RetryCallState, Retrying, retry_if_exception_type, stop_after_attempt

from ..errors import ConvergenceError, ParityViolationError
from ..models import CollectiveExpectations, GroundStateSolution, Tolerances

logger = structlog.get_logger()


class Eigenpair(NamedTuple):
    energy: float
    vector: np.ndarray
    residual: float
    method: str


class BaseSolver(ABC):
    """Abstract base class for the finite-N ground-state solvers."""

    # Override in subclasses
    MODEL_NAME: str = "base"
    DENSE_LIMIT: int = 2000
    ARPACK_ATTEMPTS: int = 3
    RESIDUAL_SLACK: float = 100.0
    SEED: int = 20130

    def __init__(self, tolerances: Tolerances | None = None):
        self.tolerances = tolerances or Tolerances()
        self.logger = logger.bind(solver=self.MODEL_NAME)

    def _start_vector(self, dim: int) -> np.ndarray:
        """Seeded Lanczos start so repeated runs agree bit for bit."""
        return np.random.default_rng(self.SEED).standard_normal(dim)

    def _log_retry(self, state: RetryCallState) -> None:
        self.logger.warning("eigensolver_retry", attempt=state.attempt_number)

    def _lanczos(
        self, matrix: sparse.spmatrix, sigma: float | None = None
    ) -> tuple[float, np.ndarray]:
        """Lowest eigenpair by ARPACK, enlarging the Krylov space on retries.

        With ``sigma`` set below the spectrum ARPACK runs in shift-invert mode
        and the eigenvalue nearest sigma is the lowest one.
        """
        dim = matrix.shape[0]
        v0 = self._start_vector(dim)
        retrying = Retrying(
            stop=stop_after_attempt(self.ARPACK_ATTEMPTS),
            retry=retry_if_exception_type(ArpackNoConvergence),
            before_sleep=self._log_retry,
            reraise=True,
        )
        try:
            for attempt in retrying:
                with attempt:
                    scale = attempt.retry_state.attempt_number
                    values, vectors = eigsh(
                        matrix,
                        k=1,
                        sigma=sigma,
                        which="SA" if sigma is None else "LM",
                        v0=v0,
                        ncv=min(dim - 1, 20 * scale + 1),
                        maxiter=dim * 10 * scale,
                        tol=self.tolerances.eigensolver * 1e-2,
                    )
        except ArpackNoConvergence as exc:
            raise ConvergenceError(
                "ARPACK did not converge", solver=self.MODEL_NAME, dimension=dim
            ) from exc
        return float(values[0]), vectors[:, 0]

    def lowest_eigenpair(
        self,
        matrix: sparse.spmatrix,
        dense_limit: int | None = None,
        sigma: float | None = None,
    ) -> Eigenpair:
        """Dense eigh for small matrices, Lanczos otherwise."""
        dim = matrix.shape[0]
        limit = self.DENSE_LIMIT if dense_limit is None else dense_limit
        if dim <= limit or dim < 3:
            dense = matrix.toarray() if sparse.issparse(matrix) else np.asarray(matrix)
            values, vectors = linalg.eigh(dense, subset_by_index=[0, 0])
            energy, vector, method = float(values[0]), vectors[:, 0], "dense"
        else:
            energy, vector = self._lanczos(matrix, sigma)
            method = "lanczos"

        vector = np.real_if_close(vector).astype(float)
        vector /= np.linalg.norm(vector)
        residual = float(np.linalg.norm(matrix @ vector - energy * vector))
        return Eigenpair(energy=energy, vector=vector, residual=residual, method=method)

    def is_converged(self, energy: float, residual: float) -> bool:
        bound = self.RESIDUAL_SLACK * self.tolerances.eigensolver * max(1.0, abs(energy))
        return residual <= bound

    def check_parity(self, exp: CollectiveExpectations) -> None:
        """Definite-parity ground states have <J+> = 0."""
        if abs(exp.jp) > self.tolerances.parity:
            raise ParityViolationError(
                "ground state mixes parity sectors",
                solver=self.MODEL_NAME,
                n_atoms=exp.n_atoms,
                jp=exp.jp,
            )

    @abstractmethod
    def solve_ground_state(self, params: Any) -> GroundStateSolution:
        """Lowest eigenpair of the model Hamiltonian."""
        ...

    @abstractmethod
    def expectations(self, solution: GroundStateSolution, params: Any) -> CollectiveExpectations:
        """Collective expectations in the frame of the model Hamiltonian."""
        ...
