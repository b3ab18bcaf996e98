"""Equality-constrained l1 minimization on top of a dense two-phase simplex.

The solver is deliberately a textbook primal simplex over the standard form
min c.x s.t. Ax = b, x >= 0, with Bland's anti-cycling rule (lowest index
among eligible entering and leaving variables), so identical inputs always
walk identical vertex paths. Basis pursuit splits b = u - v with u, v >= 0
and minimizes sum(u + v); a basis can never contain both halves of a
column pair (they are linearly dependent), so the optimum satisfies
min(u_i, v_i) = 0 and the objective equals |beta|_1 exactly.

The experiment harness draws sparse vectors on a fixed support, solves the
basis pursuit problem for y = X beta, and classifies each trial as success,
failure, or `ambiguous` when the final basis certifies alternative optima
(a zero reduced cost on a nonbasic column with a strictly positive step),
which is exactly the non-unique-minimizer situation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .design import DesignMatrix, SupportSet
from .errors import ShapeError, ValidationError
from .rng import SplitMix64, derive_seed

_RC_TOL = 1e-9
_PIVOT_TOL = 1e-9
_PHASE1_TOL = 1e-9


@dataclass(frozen=True)
class LpProblem:
    """min objective . x subject to equality @ x = rhs, x >= 0."""

    objective: np.ndarray
    equality: np.ndarray
    rhs: np.ndarray


def lp_problem(objective, equality, rhs) -> LpProblem:
    a = linalg.as_matrix(equality)
    c = linalg.as_vector(objective, a.shape[1])
    b = linalg.as_vector(rhs, a.shape[0])
    return LpProblem(objective=c, equality=a, rhs=b)


@dataclass(frozen=True)
class LpSolution:
    x: np.ndarray | None
    status: str  # optimal | infeasible | unbounded | iteration-limit
    objective: float | None
    duality_gap: float | None
    basis: tuple[int, ...] | None
    alternative_optima: bool
    iterations: int


def _eliminate_redundant_rows(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray, bool]:
    """Select a maximal independent subset of rows of [A | b].

    Returns (A_kept, b_kept, consistent); `consistent` is False when a
    dependent row carries an incompatible right-hand side. The pivot
    threshold comes from the numerical rank of A (singular values above
    RANK_RTOL * sigma_max).
    """
    m, n = a.shape
    sigma_max = float(linalg.singular_values(a)[0]) if a.size else 0.0
    tol = max(linalg.RANK_RTOL * sigma_max, 1e-300)
    work = np.hstack([a, b.reshape(-1, 1)]).astype(float)
    ids = list(range(m))
    kept = np.zeros(m, dtype=bool)
    row = 0
    for col in range(n):
        if row >= m:
            break
        pivot = row + int(np.argmax(np.abs(work[row:, col])))
        if abs(work[pivot, col]) <= tol:
            continue
        work[[row, pivot]] = work[[pivot, row]]
        ids[row], ids[pivot] = ids[pivot], ids[row]
        kept[ids[row]] = True
        for i in range(row + 1, m):
            if work[i, col] != 0.0:
                work[i] -= (work[i, col] / work[row, col]) * work[row]
        row += 1
    b_tol = _PHASE1_TOL * max(1.0, float(np.max(np.abs(b))) if b.size else 1.0)
    for i in range(row, m):
        if abs(work[i, -1]) > b_tol:
            return a[:0], b[:0], False
    if kept.all():
        return a, b, True
    return a[kept], b[kept], True


def _bland_entering(cost_row: np.ndarray, limit: int) -> int:
    for j in range(limit):
        if cost_row[j] < -_RC_TOL:
            return j
    return -1


def _bland_leaving(tab: np.ndarray, basis: list[int], col: int) -> int:
    best = math.inf
    for i in range(len(basis)):
        if tab[i, col] > _PIVOT_TOL:
            best = min(best, tab[i, -1] / tab[i, col])
    if best is math.inf:
        return -1
    leave = -1
    for i in range(len(basis)):
        if tab[i, col] > _PIVOT_TOL and tab[i, -1] / tab[i, col] <= best + 1e-12:
            if leave < 0 or basis[i] < basis[leave]:
                leave = i
    return leave


def _pivot(tab: np.ndarray, basis: list[int], row: int, col: int) -> None:
    tab[row] /= tab[row, col]
    for i in range(tab.shape[0]):
        if i != row and tab[i, col] != 0.0:
            tab[i] -= tab[i, col] * tab[row]
    basis[row] = col


def _run_simplex(tab: np.ndarray, basis: list[int], limit_cols: int, max_iter: int) -> tuple[str, int]:
    it = 0
    while True:
        enter = _bland_entering(tab[-1], limit_cols)
        if enter < 0:
            return "optimal", it
        leave = _bland_leaving(tab[:-1], basis, enter)
        if leave < 0:
            return "unbounded", it
        _pivot(tab, basis, leave, enter)
        it += 1
        if it >= max_iter:
            return "iteration-limit", it


def _solve_square(a: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Gaussian elimination with partial pivoting for the dual system."""
    m = a.astype(float).copy()
    b = rhs.astype(float).copy()
    n = m.shape[0]
    for col in range(n):
        pivot = col + int(np.argmax(np.abs(m[col:, col])))
        if m[pivot, col] == 0.0:
            raise ValidationError("singular basis matrix")
        if pivot != col:
            m[[col, pivot]] = m[[pivot, col]]
            b[[col, pivot]] = b[[pivot, col]]
        for i in range(col + 1, n):
            f = m[i, col] / m[col, col]
            if f != 0.0:
                m[i, col:] -= f * m[col, col:]
                b[i] -= f * b[col]
    x = np.zeros(n)
    for i in range(n - 1, -1, -1):
        x[i] = (b[i] - m[i, i + 1:] @ x[i + 1:]) / m[i, i]
    return x


def _has_alternative_optima(tab: np.ndarray, basis: list[int], n: int) -> bool:
    """A nonbasic column with zero reduced cost and strictly positive step
    certifies a different optimal solution."""
    basic = set(basis)
    for j in range(n):
        if j in basic or abs(tab[-1, j]) > _RC_TOL:
            continue
        col = tab[:-1, j]
        step = math.inf
        for i in range(len(basis)):
            if col[i] > _PIVOT_TOL:
                step = min(step, tab[i, -1] / col[i])
        if step > _RC_TOL:
            return True
    return False


def lp_solve(prob: LpProblem) -> LpSolution:
    """Two-phase primal simplex with Bland's rule.

    Iteration budget is 50 * (rows + cols) per phase. On success the dual
    vector is solved from the final basis columns and the duality gap
    |c.x - b.y| is reported for verification.
    """
    a, b, consistent = _eliminate_redundant_rows(prob.equality, prob.rhs)
    if not consistent:
        return LpSolution(x=None, status="infeasible", objective=None, duality_gap=None,
                          basis=None, alternative_optima=False, iterations=0)
    c = prob.objective
    m, n = a.shape
    if m == 0:
        if np.any(c < -_RC_TOL):
            return LpSolution(x=None, status="unbounded", objective=None, duality_gap=None,
                              basis=None, alternative_optima=False, iterations=0)
        x = np.zeros(n)
        return LpSolution(x=x, status="optimal", objective=0.0, duality_gap=0.0,
                          basis=(), alternative_optima=bool(np.any(np.abs(c) <= _RC_TOL)),
                          iterations=0)

    a = a.copy()
    b = b.copy()
    flip = b < 0.0
    a[flip] *= -1.0
    b[flip] *= -1.0

    max_iter = 50 * (m + n + m)
    tab = np.zeros((m + 1, n + m + 1))
    tab[:m, :n] = a
    tab[:m, n:n + m] = np.eye(m)
    tab[:m, -1] = b
    basis = list(range(n, n + m))
    # Phase-1 reduced costs: artificials cost 1, so subtract every row.
    tab[-1, :n] = -np.sum(tab[:m, :n], axis=0)
    tab[-1, -1] = -float(np.sum(b))

    status, it1 = _run_simplex(tab, basis, n + m, max_iter)
    if status == "iteration-limit":
        return LpSolution(x=None, status=status, objective=None, duality_gap=None,
                          basis=None, alternative_optima=False, iterations=it1)
    phase1_obj = float(sum(tab[i, -1] for i in range(m) if basis[i] >= n))
    if phase1_obj > _PHASE1_TOL:
        return LpSolution(x=None, status="infeasible", objective=None, duality_gap=None,
                          basis=None, alternative_optima=False, iterations=it1)
    # Pivot zero-level artificials out of the basis where possible.
    for i in range(m):
        if basis[i] >= n:
            j = int(np.argmax(np.abs(tab[i, :n])))
            if abs(tab[i, j]) > 1e-10:
                _pivot(tab, basis, i, j)

    keep = [i for i in range(m) if basis[i] < n]
    k = len(keep)
    tab2 = np.zeros((k + 1, n + 1))
    tab2[:k, :n] = tab[keep, :n]
    tab2[:k, -1] = tab[keep, -1]
    basis2 = [basis[i] for i in keep]
    tab2[-1, :n] = c
    for i, var in enumerate(basis2):
        if c[var] != 0.0:
            tab2[-1] -= c[var] * tab2[i]

    status, it2 = _run_simplex(tab2, basis2, n, max_iter)
    iterations = it1 + it2
    if status != "optimal":
        return LpSolution(x=None, status=status, objective=None, duality_gap=None,
                          basis=None, alternative_optima=False, iterations=iterations)

    x = np.zeros(n)
    for i, var in enumerate(basis2):
        x[var] = tab2[i, -1]
    objective = float(c @ x)
    # Dual on the standardized rows actually spanning the final basis.
    a_rows = a[keep, :]
    b_rows = b[keep]
    dual = _solve_square(a_rows[:, basis2].T, c[basis2])
    gap = abs(objective - float(b_rows @ dual))
    alternative = _has_alternative_optima(tab2, basis2, n)
    return LpSolution(x=x, status="optimal", objective=objective, duality_gap=gap,
                      basis=tuple(basis2), alternative_optima=alternative,
                      iterations=iterations)


@dataclass(frozen=True)
class RecoveryResult:
    beta_hat: np.ndarray | None
    objective_value: float | None
    status: str
    residual_norm: float | None
    alternative_optima: bool


def basis_pursuit(x: DesignMatrix, y) -> RecoveryResult:
    """min |b|_1 subject to X b = y, via the split b = u - v, u, v >= 0."""
    rhs = linalg.as_vector(y)
    if rhs.shape[0] != x.n:
        raise ShapeError(f"y has length {rhs.shape[0]}, expected {x.n}")
    p = x.p
    a = np.hstack([x.data, -x.data])
    sol = lp_solve(lp_problem(np.ones(2 * p), a, rhs))
    if sol.status != "optimal":
        return RecoveryResult(beta_hat=None, objective_value=None, status=sol.status,
                              residual_norm=None, alternative_optima=False)
    beta = sol.x[:p] - sol.x[p:]
    residual = float(np.sqrt(np.sum((x.data @ beta - rhs) ** 2)))
    if residual > 1e-8 * max(1.0, float(np.sqrt(np.sum(rhs ** 2)))):
        raise ValidationError(f"optimal basis violates X b = y (residual {residual:.3e})")
    return RecoveryResult(beta_hat=beta, objective_value=float(np.sum(sol.x)),
                          status="optimal", residual_norm=residual,
                          alternative_optima=sol.alternative_optima)


RECOVERY_TOL = 1e-6


@dataclass(frozen=True)
class RecoveryExperiment:
    success_rate: float
    max_linf_error: float
    trials: int
    successes: int
    ambiguous: int
    failures: int
    statuses: tuple[str, ...]
    errors: tuple[float, ...]


def recovery_experiment(x: DesignMatrix, t0: SupportSet, trials: int, seed: int) -> RecoveryExperiment:
    """Draw standard-normal coefficients on T0, solve basis pursuit on
    y = X beta, and score exact recovery at l-infinity tolerance 1e-6.

    Trials whose optimal basis admits alternative optima are marked
    `ambiguous` instead of success or failure: recovery may have happened,
    but it was not forced by the geometry.
    """
    if len(t0) > x.n:
        raise ValidationError("support larger than the number of rows")
    if trials < 1:
        raise ValidationError("trials must be at least 1")
    statuses: list[str] = []
    errors: list[float] = []
    successes = ambiguous = failures = 0
    for i in range(trials):
        rng = SplitMix64(derive_seed(seed, i))
        beta = np.zeros(x.p)
        beta[t0.zero_based()] = rng.normals(len(t0))
        y = x.data @ beta
        res = basis_pursuit(x, y)
        if res.status != "optimal":
            statuses.append("failed")
            errors.append(math.inf)
            failures += 1
            continue
        err = float(np.max(np.abs(res.beta_hat - beta)))
        errors.append(err)
        recovered = err <= RECOVERY_TOL * max(1.0, float(np.max(np.abs(beta))))
        if res.alternative_optima:
            statuses.append("ambiguous")
            ambiguous += 1
        elif recovered:
            statuses.append("success")
            successes += 1
        else:
            statuses.append("failed")
            failures += 1
    finite = [e for e in errors if math.isfinite(e)]
    return RecoveryExperiment(
        success_rate=successes / trials,
        max_linf_error=max(finite) if finite else math.inf,
        trials=trials, successes=successes, ambiguous=ambiguous, failures=failures,
        statuses=tuple(statuses), errors=tuple(errors),
    )
