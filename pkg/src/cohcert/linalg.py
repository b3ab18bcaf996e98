"""Dense linear-algebra kernel: symmetric eigendecomposition, singular values,
kernel bases, rank-one updates, and the secular function of Cauchy interlacing.

Everything here is self-contained (no LAPACK): eigenvalues come from cyclic
Jacobi rotations, singular values and null spaces from one-sided Jacobi
orthogonalization, and rank-one update spectra can be cross-checked against
the roots of the secular function

    f(x) = 1 - sum_i w_i / (x - lam_i),   w_i = <v, u_i>^2,

whose roots are the eigenvalues of A + v v^t when (lam_i, u_i) is the
eigensystem of A. Sizes of interest are at most a few hundred, where Jacobi
methods are accurate to machine precision and plenty fast.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateInputError,
    PoleEvaluationError,
    ShapeError,
    ValidationError,
)

# Convergence of the cyclic Jacobi sweep: off-diagonal Frobenius mass
# relative to the Frobenius norm of the input.
_JACOBI_TOL = 1e-12
_JACOBI_MAX_SWEEPS = 60

# One-sided Jacobi: column pair (i, j) counts as orthogonal when
# |<b_i, b_j>| <= tol * |b_i| |b_j|.
_ONE_SIDED_TOL = 1e-14
_ONE_SIDED_MAX_SWEEPS = 60

# Numerical-rank cutoff: singular values above this fraction of sigma_max
# count toward the rank.
RANK_RTOL = 1e-10

# Secular-function housekeeping: weights below this are treated as exactly
# zero, poles closer than this (relative) are merged.
WEIGHT_ZERO_TOL = 1e-14
_POLE_MERGE_RTOL = 1e-12


def as_matrix(a) -> np.ndarray:
    """Validate and return a finite 2-d float array (shared entry point)."""
    m = np.asarray(a, dtype=float)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ShapeError(f"expected a 2-d matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValidationError("matrix contains non-finite entries")
    return m


def as_vector(v, dim: int | None = None) -> np.ndarray:
    w = np.asarray(v, dtype=float).ravel()
    if dim is not None and w.shape[0] != dim:
        raise ShapeError(f"expected a vector of length {dim}, got {w.shape[0]}")
    if not np.all(np.isfinite(w)):
        raise ValidationError("vector contains non-finite entries")
    return w


@dataclass(frozen=True)
class SymEig:
    """Full symmetric eigendecomposition, eigenvalues sorted descending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # orthonormal columns, same order as eigenvalues


def _check_symmetric(a: np.ndarray) -> np.ndarray:
    if a.shape[0] != a.shape[1]:
        raise ShapeError(f"matrix is not square: shape {a.shape}")
    scale = float(np.max(np.abs(a))) if a.size else 0.0
    if scale > 0.0 and float(np.max(np.abs(a - a.T))) > 1e-12 * scale:
        raise ShapeError("matrix is not symmetric to 1e-12 relative tolerance")
    return 0.5 * (a + a.T)


def sym_eig(a) -> SymEig:
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns eigenvalues in descending order with matching orthonormal
    eigenvector columns. The result is self-validated: orthogonality to
    1e-10 and reconstruction of A to 1e-8 * |A| are enforced before
    returning.
    """
    a = _check_symmetric(as_matrix(a))
    n = a.shape[0]
    work = a.copy()
    vecs = np.eye(n)
    norm_f = float(np.sqrt(np.sum(work * work)))
    if norm_f > 0.0:
        target = _JACOBI_TOL * norm_f
        skip_tol = 1e-18 * norm_f
        for _ in range(_JACOBI_MAX_SWEEPS):
            # Off-diagonal Frobenius mass, summed directly (the difference
            # trace-based formula cancels catastrophically near convergence).
            off = math.sqrt(2.0 * float(np.sum(np.triu(work, 1) ** 2)))
            if off <= target:
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = work[p, q]
                    if abs(apq) <= skip_tol:
                        continue
                    theta = (work[q, q] - work[p, p]) / (2.0 * apq)
                    if abs(theta) > 1e154:
                        t = 1.0 / (2.0 * theta)
                    else:
                        t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                    c = 1.0 / math.sqrt(t * t + 1.0)
                    s = t * c
                    col_p = work[:, p].copy()
                    col_q = work[:, q].copy()
                    work[:, p] = c * col_p - s * col_q
                    work[:, q] = s * col_p + c * col_q
                    row_p = work[p, :].copy()
                    row_q = work[q, :].copy()
                    work[p, :] = c * row_p - s * row_q
                    work[q, :] = s * row_p + c * row_q
                    work[p, q] = 0.0
                    work[q, p] = 0.0
                    vec_p = vecs[:, p].copy()
                    vec_q = vecs[:, q].copy()
                    vecs[:, p] = c * vec_p - s * vec_q
                    vecs[:, q] = s * vec_p + c * vec_q
        else:
            raise ValidationError("Jacobi eigensolver failed to converge")
    lam = np.diag(work).copy()
    order = np.argsort(-lam, kind="stable")
    lam = lam[order]
    vecs = vecs[:, order]
    _validate_sym_eig(a, lam, vecs)
    return SymEig(eigenvalues=lam, eigenvectors=vecs)


def _validate_sym_eig(a: np.ndarray, lam: np.ndarray, q: np.ndarray) -> None:
    n = a.shape[0]
    ortho = float(np.max(np.abs(q.T @ q - np.eye(n))))
    if ortho > 1e-10:
        raise ValidationError(f"eigenvector orthogonality residual {ortho:.3e} exceeds 1e-10")
    op = float(np.max(np.abs(lam))) if n else 0.0
    recon = float(np.max(np.abs(a - (q * lam) @ q.T)))
    allowed = 1e-8 * op if op > 0.0 else 1e-12
    if recon > allowed:
        raise ValidationError(f"eigendecomposition residual {recon:.3e} exceeds {allowed:.3e}")


def _one_sided_jacobi(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Orthogonalize the columns of `a` by plane rotations.

    Returns (b, v) with b = a @ v, v orthogonal, and the columns of b
    pairwise orthogonal. Column norms of b are the singular values of `a`;
    columns of v matching (numerically) zero norms span the kernel.
    """
    b = as_matrix(a).copy()
    p = b.shape[1]
    v = np.eye(p)
    frob = math.sqrt(float(np.sum(b * b)))
    if frob == 0.0:
        return b, v
    # Columns this small are numerically zero; rotating them only churns
    # rounding noise, so they are deflated out of the sweep.
    floor2 = (1e-15 * frob) ** 2
    for _ in range(_ONE_SIDED_MAX_SWEEPS):
        gram = b.T @ b
        norms2 = np.diag(gram).copy()
        active = norms2 > floor2
        bound = _ONE_SIDED_TOL * np.sqrt(np.outer(norms2, norms2))
        mask = (np.abs(gram) > bound) & np.outer(active, active)
        np.fill_diagonal(mask, False)
        if not mask.any():
            break
        for i in range(p - 1):
            for j in range(i + 1, p):
                g = gram[i, j]
                alpha = gram[i, i]
                beta = gram[j, j]
                if alpha <= floor2 or beta <= floor2:
                    continue
                if abs(g) <= _ONE_SIDED_TOL * math.sqrt(max(alpha * beta, 0.0)):
                    continue
                tau = (beta - alpha) / (2.0 * g)
                if abs(tau) > 1e154:
                    t = 1.0 / (2.0 * tau)
                else:
                    t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(tau * tau + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                for m in (b, v):
                    col_i = m[:, i].copy()
                    col_j = m[:, j].copy()
                    m[:, i] = c * col_i - s * col_j
                    m[:, j] = s * col_i + c * col_j
                # Rotate the cached Gram on both sides to stay in sync.
                gcol_i = gram[:, i].copy()
                gcol_j = gram[:, j].copy()
                gram[:, i] = c * gcol_i - s * gcol_j
                gram[:, j] = s * gcol_i + c * gcol_j
                grow_i = gram[i, :].copy()
                grow_j = gram[j, :].copy()
                gram[i, :] = c * grow_i - s * grow_j
                gram[j, :] = s * grow_i + c * grow_j
                gram[i, j] = 0.0
                gram[j, i] = 0.0
    else:
        raise ValidationError("one-sided Jacobi failed to converge")
    return b, v


def singular_values(a) -> np.ndarray:
    """All singular values of `a`, descending. Works on the thinner side."""
    m = as_matrix(a)
    if m.shape[1] > m.shape[0]:
        m = m.T
    b, _ = _one_sided_jacobi(m)
    sigma = np.sqrt(np.sum(b * b, axis=0))
    sigma.sort()
    return sigma[::-1].copy()


def op_norm(a) -> float:
    """Spectral norm (largest singular value)."""
    return float(singular_values(a)[0])


def kernel_basis(x) -> np.ndarray:
    """Orthonormal basis of {h : Xh = 0} as columns of a p x d matrix.

    Rank is decided by singular values above RANK_RTOL * sigma_max; an empty
    (p x 0) basis is returned for full column rank.
    """
    m = as_matrix(x)
    b, v = _one_sided_jacobi(m)
    sigma = np.sqrt(np.sum(b * b, axis=0))
    sigma_max = float(sigma.max())
    in_kernel = sigma <= RANK_RTOL * sigma_max
    order = np.argsort(sigma[in_kernel], kind="stable")
    return v[:, in_kernel][:, order].copy()


def rank_one_update_eig(a, v) -> np.ndarray:
    """Spectrum of A + v v^t, descending (the oracle side of interlacing)."""
    a = _check_symmetric(as_matrix(a))
    w = as_vector(v, a.shape[0])
    updated = a + np.outer(w, w)
    return sym_eig(0.5 * (updated + updated.T)).eigenvalues


@dataclass(frozen=True)
class SecularFunction:
    """Rational function 1 - sum_i weights[i] / (x - poles[i]).

    Poles are stored distinct and strictly decreasing; duplicate input poles
    are merged with their weights summed, and `copies[i]` counts the merged
    duplicates that survive as eigenvalues of the updated matrix. Weights
    below WEIGHT_ZERO_TOL are snapped to exactly zero.
    """

    poles: np.ndarray
    weights: np.ndarray
    copies: np.ndarray

    @property
    def total_weight(self) -> float:
        return float(np.sum(self.weights))


def secular_function(poles, weights) -> SecularFunction:
    lam = as_vector(poles)
    w = as_vector(weights, lam.shape[0])
    if lam.size == 0:
        raise ShapeError("secular function needs at least one pole")
    if np.any(w < -1e-10):
        raise ValidationError("secular weights must be nonnegative")
    w = np.where(w < WEIGHT_ZERO_TOL, 0.0, w)
    order = np.argsort(-lam, kind="stable")
    lam = lam[order]
    w = w[order]
    merge_tol = _POLE_MERGE_RTOL * max(1.0, float(np.max(np.abs(lam))))
    poles_out: list[float] = []
    weights_out: list[float] = []
    copies_out: list[int] = []
    for value, weight in zip(lam, w):
        if poles_out and poles_out[-1] - value <= merge_tol:
            weights_out[-1] += weight
            copies_out[-1] += 1
        else:
            poles_out.append(float(value))
            weights_out.append(float(weight))
            copies_out.append(0)
    return SecularFunction(
        poles=np.array(poles_out),
        weights=np.where(np.array(weights_out) < WEIGHT_ZERO_TOL, 0.0, np.array(weights_out)),
        copies=np.array(copies_out, dtype=int),
    )


def secular_from_update(eig: SymEig, v) -> SecularFunction:
    """Secular function of A + v v^t given the eigensystem of A."""
    w = as_vector(v, eig.eigenvectors.shape[0])
    coeffs = eig.eigenvectors.T @ w
    return secular_function(eig.eigenvalues, coeffs * coeffs)


def secular_eval(f: SecularFunction, x: float) -> float:
    """Value of the secular function at x (x must stay off every pole)."""
    if float(np.min(np.abs(f.poles - x))) < 1e-14:
        raise PoleEvaluationError(f"x = {x!r} is within 1e-14 of a pole")
    active = f.weights > 0.0
    return 1.0 - float(np.sum(f.weights[active] / (x - f.poles[active])))


def _eval_active(poles: np.ndarray, weights: np.ndarray, x: float) -> float:
    return 1.0 - float(np.sum(weights / (x - poles)))


def _bisect_root(poles, weights, lo, hi) -> float:
    """Bisect 1 - sum w/(x - lam) on (lo, hi), where it increases -inf -> +inf."""
    a, b = lo, hi
    for _ in range(300):
        mid = 0.5 * (a + b)
        if not (a < mid < b):
            break
        val = _eval_active(poles, weights, mid)
        width_tol = 1e-13 * max(1.0, abs(mid))
        if abs(val) <= 1e-10 and (b - a) <= width_tol:
            return mid
        if val < 0.0:
            a = mid
        else:
            b = mid
    return 0.5 * (a + b)


def _bracket_above(poles, weights, pole, upper) -> tuple[float, float]:
    """Shrink toward `pole` until the function is negative just above it."""
    delta = 0.25 * (upper - pole)
    for _ in range(240):
        a = pole + delta
        if a <= pole or a == pole:
            break
        if _eval_active(poles, weights, a) < 0.0:
            return a, upper
        delta *= 0.25
    return pole + delta, upper


def _bracket_below(poles, weights, pole, lower) -> tuple[float, float]:
    """Shrink toward `pole` until the function is positive just below it."""
    delta = 0.25 * (pole - lower)
    for _ in range(240):
        b = pole - delta
        if b >= pole or b == pole:
            break
        if _eval_active(poles, weights, b) > 0.0:
            return lower, b
        delta *= 0.25
    return lower, pole - delta


def secular_roots(f: SecularFunction) -> np.ndarray:
    """Full spectrum of the rank-one update encoded by `f`, descending.

    True roots (one per gap between consecutive positive-weight poles, one
    above the largest) are found by bracketed bisection; zero-weight poles
    and merged duplicates are carried through unchanged as eigenvalues.
    """
    active = f.weights > 0.0
    if not active.any():
        raise DegenerateInputError("all secular weights are zero")
    poles = f.poles[active]
    weights = f.weights[active]
    total = float(np.sum(weights))
    roots: list[float] = []

    top = float(poles[0])
    upper = top + total + max(1.0, 1e-3 * abs(top))
    lo, hi = _bracket_above(poles, weights, top, upper)
    roots.append(_bisect_root(poles, weights, lo, hi))

    for k in range(poles.shape[0] - 1):
        hi_pole = float(poles[k])
        lo_pole = float(poles[k + 1])
        a, _ = _bracket_above(poles, weights, lo_pole, hi_pole)
        _, b = _bracket_below(poles, weights, hi_pole, lo_pole)
        if a >= b:  # poles essentially adjacent at float resolution
            roots.append(0.5 * (lo_pole + hi_pole))
            continue
        roots.append(_bisect_root(poles, weights, a, b))

    carried: list[float] = []
    for pole, weight, extra in zip(f.poles, f.weights, f.copies):
        if weight == 0.0:
            carried.append(float(pole))
        carried.extend([float(pole)] * int(extra))

    out = np.array(sorted(roots + carried, reverse=True))
    return out
