"""
Trace Solver Service
Damped Newton iteration for systems of squared-trace equations over the
parameters of a group family, with a central finite-difference Jacobian.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np

import config
from services.group_service import FAMILY_EXPLICIT, GroupRep
from utils.errors import GeometryError, NoConvergence, SingularJacobian
from utils.words import Word

logger = logging.getLogger(__name__)


@dataclass
class TraceSystem:
    """
    Equations tr^2(word) = target over the free parameters of a family.

    Attributes:
        base: Family group supplying the fixed parameters and the branch
        constraints: (word, target) pairs
        free_params: Names of the complex parameters to solve for
        overdetermined: Must be set when there are more equations than
            unknowns; the least-squares step is used and the residual at
            the end must still vanish
    """
    base: GroupRep
    constraints: List[Tuple[Word, complex]]
    free_params: List[str]
    overdetermined: bool = False

    def __post_init__(self):
        if self.base.family == FAMILY_EXPLICIT:
            raise GeometryError("Explicit groups have no parameters to solve for")
        if not self.constraints or not self.free_params:
            raise GeometryError("A trace system needs constraints and free parameters")
        for name in self.free_params:
            if name not in self.base.params or name == "branch":
                raise GeometryError(f"'{name}' is not a parameter of family {self.base.family}")
        # each squared trace is one complex (two real) constraint
        n_eq, n_var = len(self.constraints), len(self.free_params)
        if n_eq < n_var:
            raise GeometryError(f"Underdetermined system: {n_eq} equations, {n_var} unknowns")
        if n_eq > n_var and not self.overdetermined:
            raise GeometryError(
                f"{n_eq} equations for {n_var} unknowns; set overdetermined=True to allow this"
            )

    def group_at(self, values: Dict[str, complex]) -> GroupRep:
        return self.base.with_params(**values)

    def residual(self, values: Dict[str, complex]) -> np.ndarray:
        """Real vector (Re, Im) of tr^2(w_i) - target_i."""
        group = self.group_at(values)
        out = []
        for word, target in self.constraints:
            r = group.trace_squared(word) - target
            out.extend([r.real, r.imag])
        return np.array(out)


@dataclass
class SolveResult:
    values: Dict[str, complex]
    iterations: int
    residual_norm: float
    history: List[float] = field(default_factory=list)


def _to_real(values: Dict[str, complex], names: List[str]) -> np.ndarray:
    return np.array([part for n in names for part in (values[n].real, values[n].imag)])


def _to_complex(x: np.ndarray, names: List[str]) -> Dict[str, complex]:
    return {n: complex(x[2 * i], x[2 * i + 1]) for i, n in enumerate(names)}


class TraceSolver:
    """
    Damped Newton solver. Instances hold per-solve scratch state and must
    not be shared between threads mid-solve.
    """

    def __init__(
        self,
        max_iterations: int = None,
        tolerance: float = None,
        fd_step: float = None,
        max_halvings: int = None,
        verify_tolerance: float = None,
    ):
        self.max_iterations = max_iterations or config.NEWTON_MAX_ITERATIONS
        self.tolerance = tolerance or config.NEWTON_TOLERANCE
        self.fd_step = fd_step or config.NEWTON_FD_STEP
        self.max_halvings = max_halvings or config.NEWTON_MAX_HALVINGS
        self.verify_tolerance = verify_tolerance or config.NEWTON_VERIFY_TOLERANCE

    def _jacobian(self, system: TraceSystem, x: np.ndarray) -> np.ndarray:
        names = system.free_params
        columns = []
        for j in range(len(x)):
            step = np.zeros_like(x)
            step[j] = self.fd_step
            plus = system.residual(_to_complex(x + step, names))
            minus = system.residual(_to_complex(x - step, names))
            columns.append((plus - minus) / (2 * self.fd_step))
        return np.column_stack(columns)

    def _newton_step(self, system: TraceSystem, jac: np.ndarray, f: np.ndarray) -> np.ndarray:
        s = np.linalg.svd(jac, compute_uv=False)
        if s[-1] <= 1e-14 * max(1.0, s[0]):
            raise SingularJacobian(f"Jacobian is singular (singular values {s})")
        if system.overdetermined:
            step, *_ = np.linalg.lstsq(jac, -f, rcond=None)
            return step
        return np.linalg.solve(jac, -f)

    def solve(self, system: TraceSystem, seed: Dict[str, complex]) -> SolveResult:
        """
        Solve from a seed.

        Args:
            system: The trace system
            seed: Starting values of the free parameters

        Returns:
            SolveResult with the converged parameter values

        Raises:
            NoConvergence: On iteration limit, step collapse, or a residual
                that fails the post hoc check
            SingularJacobian: If the Jacobian loses rank
        """
        names = system.free_params
        missing = [n for n in names if n not in seed]
        if missing:
            raise GeometryError(f"Seed is missing {missing}")
        x = _to_real({n: complex(seed[n]) for n in names}, names)
        f = system.residual(_to_complex(x, names))
        norm = float(np.linalg.norm(f))
        history = [norm]
        logger.info(f"[SOLVER] Starting Newton on {len(system.constraints)} equations, ||F|| = {norm:.3e}")

        iteration = 0
        while norm > self.tolerance:
            if iteration >= self.max_iterations:
                raise NoConvergence(
                    f"No convergence after {self.max_iterations} iterations (||F|| = {norm:.3e})"
                )
            iteration += 1
            step = self._newton_step(system, self._jacobian(system, x), f)
            scale = 1.0
            for _ in range(self.max_halvings + 1):
                trial = x + scale * step
                f_trial = system.residual(_to_complex(trial, names))
                trial_norm = float(np.linalg.norm(f_trial))
                if trial_norm < norm:
                    break
                scale /= 2
            else:
                # rounding floor: no descent left but already verified-small
                if norm <= self.verify_tolerance:
                    break
                raise NoConvergence(f"Step collapse at iteration {iteration} (||F|| = {norm:.3e})")
            x, f, norm = trial, f_trial, trial_norm
            history.append(norm)
            logger.debug(f"[SOLVER] iteration {iteration}: ||F|| = {norm:.3e}, damping {scale:g}")

        values = _to_complex(x, names)
        final = float(np.linalg.norm(system.residual(values)))
        if final > self.verify_tolerance:
            logger.error(f"[SOLVER] ✗ Post hoc check failed: ||F|| = {final:.3e}")
            raise NoConvergence(f"Solution fails verification: ||F|| = {final:.3e}")
        logger.info(f"[SOLVER] ✓ Converged in {iteration} iterations, ||F|| = {final:.3e}")
        return SolveResult(values, iteration, final, history)


def solve_trace_system(system: TraceSystem, seed: Dict[str, complex]) -> Dict[str, complex]:
    """Solve with default settings and return the parameter values."""
    return TraceSolver().solve(system, seed).values
