"""Lindblad generator assembly, steady-state solve, and RK4 propagation.

Vectorization is column-stacking throughout: ``vec(rho) = rho.reshape(-1,
order="F")``, so ``vec(A rho B) = (B.T kron A) vec(rho)``.  The steady state
is obtained from the vectorized generator by replacing one row (the one
belonging to the rho[0,0] component) with the trace functional and solving
the resulting linear system; the explicit RK4 integrator is kept free of the
vectorized path so it can serve as an independent cross-check of the solver.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.linalg import get_lapack_funcs
from scipy.sparse.linalg import splu

from .errors import (
    CapacityError,
    DegenerateSteadyStateError,
    IntegrationInstabilityError,
    NearDegeneracyWarning,
    SteadyStateConvergenceError,
)
from .hilbert import DensityMatrix, HilbertSpace, OperatorMatrix

SUPEROP_DIM_CAP = 20000
DEFAULT_TOL = 1e-9
TRACE_DRIFT_LIMIT = 1e-6

# Liouville dimensions up to this use a dense LU; larger ones use sparse LU.
_DENSE_SOLVE_LIMIT = 2048
# Conditioning of the balanced trace-replaced system: healthy solves sit
# around 1e4..1e6 here; values beyond _COND_WARN signal a near-degenerate
# generator (second steady state opening up), beyond _SINGULAR_COND an
# actually multiple steady state.
_COND_WARN = 1e9
_SINGULAR_COND = 1e14


@dataclass(frozen=True, eq=False)
class LindbladModel:
    """Hamiltonian plus sqrt(rate)-scaled collapse operators on one space.

    The Hamiltonian is in angular units (rad/us) and must be Hermitian to
    1e-9; collapse operators carry units rad^(1/2)/us^(1/2).
    """

    space: HilbertSpace
    hamiltonian: OperatorMatrix
    collapse_ops: tuple[OperatorMatrix, ...]

    def __post_init__(self):
        object.__setattr__(self, "collapse_ops", tuple(self.collapse_ops))
        if self.hamiltonian.space != self.space:
            raise ValueError("Hamiltonian does not act on the model space")
        herm = np.max(np.abs(self.hamiltonian.matrix - self.hamiltonian.matrix.conj().T))
        if herm > 1e-9:
            raise ValueError(f"Hamiltonian not Hermitian: max |H - H^+| = {herm:.3e}")
        for op in self.collapse_ops:
            if op.space != self.space:
                raise ValueError("collapse operator does not act on the model space")


@dataclass(frozen=True)
class SolverDiagnostics:
    """Conditioning and method metadata for one steady-state solve."""

    method: str
    dimension: int
    condition_estimate: float
    near_degenerate: bool


@dataclass(frozen=True, eq=False)
class SteadyStateSolution:
    rho: DensityMatrix
    residual_norm: float
    diagnostics: SolverDiagnostics


def vectorize(mat: np.ndarray) -> np.ndarray:
    """Column-stacking vec()."""
    return np.asarray(mat).reshape(-1, order="F")


def unvectorize(vec: np.ndarray, dim: int) -> np.ndarray:
    return np.asarray(vec).reshape((dim, dim), order="F")


# Above this Hilbert dimension the L(rho) closure works with sparse operator
# factors; the atomic operators have O(dim) nonzeros, so sparse products are
# several times faster once the matrices stop being tiny.
_SPARSE_APPLY_DIM = 48


def _apply_factory(model: LindbladModel):
    """Closure evaluating L(rho) by direct matrix products (no vectorization)."""
    ham = model.hamiltonian.matrix
    dim = ham.shape[0]
    if dim >= _SPARSE_APPLY_DIM:
        ham_sp = sp.csr_array(ham)
        cs = [sp.csr_array(c.matrix) for c in model.collapse_ops]
        cds = [c.conj().T.tocsr() for c in cs]
        anticomm = sum(
            (cd @ c for cd, c in zip(cds, cs)),
            start=sp.csr_array((dim, dim), dtype=complex),
        )

        def apply(rho: np.ndarray) -> np.ndarray:
            out = -1j * (ham_sp @ rho - rho @ ham_sp)
            for c, cd in zip(cs, cds):
                out += (c @ rho) @ cd
            if model.collapse_ops:
                out -= 0.5 * (anticomm @ rho + rho @ anticomm)
            return out

        return apply

    if model.collapse_ops:
        stack = np.stack([c.matrix for c in model.collapse_ops])
        stack_dag = stack.conj().transpose(0, 2, 1)
        anticomm_d = (stack_dag @ stack).sum(axis=0)
    else:
        stack = stack_dag = anticomm_d = None

    def apply_dense(rho: np.ndarray) -> np.ndarray:
        out = -1j * (ham @ rho - rho @ ham)
        if stack is not None:
            out += (stack @ rho @ stack_dag).sum(axis=0)
            out -= 0.5 * (anticomm_d @ rho + rho @ anticomm_d)
        return out

    return apply_dense


def liouvillian_apply(model: LindbladModel, rho) -> np.ndarray:
    """L(rho) = -i[H, rho] + sum_c (c rho c^+ - (c^+c rho + rho c^+c)/2)."""
    mat = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    dim = model.space.total_dim
    if mat.shape != (dim, dim):
        raise ValueError(f"state shape {mat.shape} does not match dimension {dim}")
    return _apply_factory(model)(mat)


def build_superoperator(model: LindbladModel, *, cap: int = SUPEROP_DIM_CAP) -> sp.csr_matrix:
    """Sparse matrix L with L vec(rho) = vec(L(rho)) under column stacking."""
    dim = model.space.total_dim
    size = dim * dim
    if size > cap:
        raise CapacityError(
            f"vectorized generator dimension {size} exceeds the cap {cap}; "
            f"reduce the Hilbert space (total dimension {dim})"
        )
    ident = sp.identity(dim, format="csr", dtype=complex)
    ham = sp.csr_matrix(model.hamiltonian.matrix)
    liou = -1j * (sp.kron(ident, ham, format="csr") - sp.kron(ham.T, ident, format="csr"))
    for op in model.collapse_ops:
        c = sp.csr_matrix(op.matrix)
        cdc = (c.conj().T @ c).tocsr()
        liou = (
            liou
            + sp.kron(c.conj(), c, format="csr")
            - 0.5 * sp.kron(ident, cdc, format="csr")
            - 0.5 * sp.kron(cdc.T, ident, format="csr")
        )
    return liou.tocsr()


def _solve_dense(liou: sp.csr_matrix, dim: int):
    size = dim * dim
    dense = liou.toarray()
    scale = max(1.0, float(np.abs(dense).max()))
    dense[0, :] = 0.0
    dense[0, (dim + 1) * np.arange(dim)] = scale
    rhs = np.zeros(size, dtype=complex)
    rhs[0] = scale
    with warnings.catch_warnings():
        # exactly singular input is reported through the condition estimate
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(dense)
    gecon = get_lapack_funcs(("gecon",), (dense,))[0]
    anorm = np.abs(dense).sum(axis=0).max()
    rcond, _ = gecon(lu, anorm, norm="1")
    cond = 1.0 / max(float(rcond), 1e-300)
    vec = scipy.linalg.lu_solve((lu, piv), rhs)
    return vec, cond


def _solve_sparse(liou: sp.csr_matrix, dim: int):
    size = dim * dim
    scale = max(1.0, float(np.abs(liou.data).max()) if liou.nnz else 1.0)
    system = liou.tolil(copy=True)
    system[0, :] = 0.0
    for k in range(dim):
        system[0, (dim + 1) * k] = scale
    system = system.tocsc()
    rhs = np.zeros(size, dtype=complex)
    rhs[0] = scale
    try:
        # the generator's pattern is near-symmetric, which this ordering exploits
        lu = splu(system, permc_spec="MMD_AT_PLUS_A")
    except RuntimeError as exc:
        raise DegenerateSteadyStateError(
            f"sparse factorization failed, generator is singular: {exc}"
        ) from exc
    vec = lu.solve(rhs)
    # Deterministic lower-bound estimate of ||A^-1||_1 from a few fixed probes.
    anorm = float(np.max(np.abs(system).sum(axis=0)))
    inv_norm = 0.0
    for idx in {0, size // 2, size - 1}:
        probe = np.zeros(size, dtype=complex)
        probe[idx] = 1.0
        inv_norm = max(inv_norm, float(np.abs(lu.solve(probe)).sum()))
    cond = anorm * inv_norm
    return vec, cond


def steady_state(
    model: LindbladModel,
    tol: float = DEFAULT_TOL,
    *,
    method: str = "auto",
    cap: int = SUPEROP_DIM_CAP,
) -> SteadyStateSolution:
    """Solve L vec(rho) = 0 with trace(rho) = 1 by trace-row replacement.

    Raises DegenerateSteadyStateError when the null space is not
    one-dimensional, and SteadyStateConvergenceError (carrying the partial
    solution) when the residual max|L(rho)| exceeds ``tol``.
    """
    dim = model.space.total_dim
    size = dim * dim
    liou = build_superoperator(model, cap=cap)
    if method == "auto":
        method = "dense" if size <= _DENSE_SOLVE_LIMIT else "sparse"
    if method == "dense":
        vec, cond = _solve_dense(liou, dim)
    elif method == "sparse":
        vec, cond = _solve_sparse(liou, dim)
    else:
        raise ValueError(f"unknown method {method!r}")

    if not np.all(np.isfinite(vec)) or cond > _SINGULAR_COND:
        raise DegenerateSteadyStateError(
            f"steady-state system is numerically singular (condition ~ {cond:.3e}); "
            "the generator has multiple steady states",
            condition_estimate=cond,
        )
    near = cond > _COND_WARN
    if near:
        warnings.warn(
            f"generator is close to degenerate (condition ~ {cond:.3e}); "
            "the steady state may be poorly determined",
            NearDegeneracyWarning,
            stacklevel=2,
        )

    rho = unvectorize(vec, dim)
    rho = 0.5 * (rho + rho.conj().T)
    rho = rho / np.trace(rho).real
    residual = float(np.max(np.abs(liouvillian_apply(model, rho))))
    diagnostics = SolverDiagnostics(
        method=method,
        dimension=size,
        condition_estimate=float(cond),
        near_degenerate=near,
    )
    try:
        state = DensityMatrix(model.space, rho)
    except ValueError as exc:
        raise SteadyStateConvergenceError(
            f"solution violates state invariants: {exc}"
        ) from exc
    solution = SteadyStateSolution(rho=state, residual_norm=residual, diagnostics=diagnostics)
    if residual > tol:
        raise SteadyStateConvergenceError(
            f"steady-state residual {residual:.3e} exceeds tolerance {tol:.3e}",
            solution=solution,
        )
    return solution


def stable_timestep(model: LindbladModel) -> float:
    """Conservative RK4-stable step from a spectral bound on the generator."""
    bound = 2.0 * np.linalg.norm(model.hamiltonian.matrix, 2)
    for op in model.collapse_ops:
        bound += 2.0 * np.linalg.norm(op.matrix, 2) ** 2
    if bound <= 0.0:
        return math.inf
    return 2.0 / bound


def evolve(
    model: LindbladModel,
    rho0: DensityMatrix,
    t_final: float,
    dt: float | None = None,
) -> DensityMatrix:
    """Fixed-step classical RK4 integration of drho/dt = L(rho).

    The state is re-Hermitized and trace-renormalized after every step; a
    per-step trace drift beyond 1e-6 (or a non-finite state) aborts with an
    instability error suggesting a smaller step.  This integrator exists as
    a verification oracle for the steady-state solver and deliberately
    avoids the vectorized-generator code path.
    """
    if rho0.space != model.space:
        raise ValueError("initial state does not act on the model space")
    if t_final < 0:
        raise ValueError("t_final must be nonnegative")
    if t_final == 0:
        return rho0
    if dt is None:
        dt = min(stable_timestep(model), t_final)
    if dt <= 0:
        raise ValueError("dt must be positive")
    steps = max(1, math.ceil(t_final / dt))
    step = t_final / steps
    apply = _apply_factory(model)
    rho = np.array(rho0.matrix, dtype=complex)
    for _ in range(steps):
        k1 = apply(rho)
        k2 = apply(rho + 0.5 * step * k1)
        k3 = apply(rho + 0.5 * step * k2)
        k4 = apply(rho + step * k3)
        rho = rho + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        rho = 0.5 * (rho + rho.conj().T)
        trace = np.trace(rho)
        drift = abs(trace - 1.0)
        if not np.isfinite(drift) or drift > TRACE_DRIFT_LIMIT:
            raise IntegrationInstabilityError(
                f"trace drift {drift:.3e} in one step of size {step:.3e}; "
                "reduce dt"
            )
        rho = rho / trace.real
    return DensityMatrix(model.space, rho)


def trace_distance(state_a, state_b) -> float:
    """(1/2) ||rho_a - rho_b||_1 for Hermitian inputs."""
    mat_a = state_a.matrix if isinstance(state_a, DensityMatrix) else np.asarray(state_a)
    mat_b = state_b.matrix if isinstance(state_b, DensityMatrix) else np.asarray(state_b)
    eigs = np.linalg.eigvalsh(mat_a - mat_b)
    return 0.5 * float(np.abs(eigs).sum())
