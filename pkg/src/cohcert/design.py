"""Design matrices with unit-norm columns: coherence, Gram submatrices, the
Gershgorin disc bound, uniform support sampling, and seeded generators.

Supports are 1-based index subsets of {1, ..., p} in every external format
(reports, CSV, CLI); conversion to 0-based numpy indexing happens only at
call boundaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import (
    DegenerateInputError,
    NormalizationError,
    ShapeError,
    ValidationError,
)
from .rng import SplitMix64

COLUMN_NORM_TOL = 1e-8
GENERATOR_KINDS = ("gaussian", "sphere", "identity-augmented")


@dataclass(frozen=True)
class SupportSet:
    """Sorted, duplicate-free index subset of {1, ..., p} (1-based)."""

    indices: tuple[int, ...]
    p: int

    def __len__(self) -> int:
        return len(self.indices)

    def zero_based(self) -> np.ndarray:
        return np.array(self.indices, dtype=int) - 1

    def complement_zero_based(self) -> np.ndarray:
        mask = np.ones(self.p, dtype=bool)
        mask[self.zero_based()] = False
        return np.nonzero(mask)[0]


def support_set(indices, p: int) -> SupportSet:
    idx = sorted(int(i) for i in indices)
    if any(i < 1 or i > p for i in idx):
        raise ValidationError(f"support indices must lie in [1, {p}]")
    if len(set(idx)) != len(idx):
        raise ValidationError("support indices contain duplicates")
    return SupportSet(indices=tuple(idx), p=int(p))


@dataclass(frozen=True)
class DesignMatrix:
    """n x p matrix with unit l2-norm columns plus cached coherence and norm.

    `mu` is None only in the degenerate p = 1 case, where no column pair
    exists and coherence is deliberately undefined.
    """

    data: np.ndarray
    mu: float | None
    opnorm: float

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def p(self) -> int:
        return self.data.shape[1]

    def columns(self, support: SupportSet) -> np.ndarray:
        return self.data[:, support.zero_based()]


def from_raw(m, normalize: bool = False) -> DesignMatrix:
    """Build a DesignMatrix, optionally rescaling columns to unit norm."""
    data = linalg.as_matrix(m).copy()
    norms = np.sqrt(np.sum(data * data, axis=0))
    if normalize:
        if np.any(norms == 0.0):
            raise NormalizationError("cannot normalize a zero column")
        data /= norms
    else:
        worst = float(np.max(np.abs(norms - 1.0)))
        if worst > COLUMN_NORM_TOL:
            raise ValidationError(
                f"columns are not unit norm (worst deviation {worst:.3e}); "
                "pass normalize=True to rescale"
            )
    p = data.shape[1]
    mu = None
    if p >= 2:
        g = data.T @ data
        np.fill_diagonal(g, 0.0)
        mu = min(float(np.max(np.abs(g))), 1.0)
    return DesignMatrix(data=data, mu=mu, opnorm=linalg.op_norm(data))


def coherence(x: DesignMatrix) -> float:
    """Largest |<X_k, X_l>| over distinct column pairs."""
    if x.p < 2:
        raise DegenerateInputError("coherence is undefined for a single column")
    return float(x.mu)


def gram(x: DesignMatrix, support: SupportSet) -> np.ndarray:
    """X_T^t X_T for the given support (symmetric, unit diagonal)."""
    if len(support) == 0:
        raise ValidationError("gram requires a nonempty support")
    if support.p != x.p:
        raise ShapeError("support ambient dimension does not match the design")
    cols = x.columns(support)
    g = cols.T @ cols
    return 0.5 * (g + g.T)


def gershgorin_bound(mu: float, s: int) -> float:
    """Disc bound mu * (s - 1) on |X_T^t X_T - I| for |T| = s."""
    if s < 1:
        raise ValidationError("support size must be at least 1")
    if not 0.0 <= mu <= 1.0:
        raise ValidationError("coherence must lie in [0, 1]")
    return mu * (s - 1)


@dataclass(frozen=True)
class GershgorinCheck:
    exact: float
    bound: float
    holds: bool


def gershgorin_check(x: DesignMatrix, support: SupportSet) -> GershgorinCheck:
    """Exact |Gram - I| (eigensolver) against the disc bound; holds always."""
    g = gram(x, support)
    lam = linalg.sym_eig(g).eigenvalues
    exact = float(np.max(np.abs(lam - 1.0)))
    bound = gershgorin_bound(x.mu if x.mu is not None else 0.0, len(support))
    return GershgorinCheck(exact=exact, bound=bound, holds=exact <= bound + 1e-10)


def sample_support(p: int, s: int, rng_seed: int) -> SupportSet:
    """Uniform size-s subset of {1, ..., p} via partial Fisher-Yates."""
    if not 1 <= s <= p:
        raise ValidationError(f"need 1 <= s <= p, got s={s}, p={p}")
    rng = SplitMix64(rng_seed)
    pool = list(range(1, p + 1))
    for i in range(s):
        j = i + rng.randbelow(p - i)
        pool[i], pool[j] = pool[j], pool[i]
    return support_set(pool[:s], p)


def generate(kind: str, n: int, p: int, rng_seed: int) -> DesignMatrix:
    """Seeded test designs: gaussian / sphere columns or [I | gaussian block].

    Entries are drawn column by column from SplitMix64(seed); gaussian and
    sphere coincide after column normalization (a normalized i.i.d. normal
    vector is uniform on the sphere).
    """
    if kind not in GENERATOR_KINDS:
        raise ValidationError(f"unknown generator kind {kind!r}")
    if n < 1 or p < 1:
        raise ValidationError("generator needs n >= 1 and p >= 1")
    rng = SplitMix64(rng_seed)
    if kind in ("gaussian", "sphere"):
        data = np.empty((n, p))
        for j in range(p):
            data[:, j] = rng.normals(n)
        return from_raw(data, normalize=True)
    data = np.zeros((n, p))
    k = min(n, p)
    data[np.arange(k), np.arange(k)] = 1.0
    for j in range(n, p):
        col = np.array(rng.normals(n))
        norm = math.sqrt(float(col @ col))
        if norm == 0.0:
            raise NormalizationError("degenerate zero column drawn")
        data[:, j] = col / norm
    return from_raw(data, normalize=False)


def write_matrix_csv(m, path) -> None:
    """Plain CSV: one matrix row per line, full round-trip precision, no header."""
    mat = linalg.as_matrix(m)
    with open(path, "w", encoding="utf-8") as fh:
        for row in mat:
            fh.write(",".join(repr(float(v)) for v in row))
            fh.write("\n")


def read_matrix_csv(path) -> np.ndarray:
    rows: list[list[float]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rows.append([float(tok) for tok in line.split(",")])
            except ValueError as exc:
                raise ValidationError(f"bad float on line {line_no}: {exc}") from exc
    if not rows:
        raise ValidationError("empty matrix file")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ValidationError("ragged rows in matrix file")
    return linalg.as_matrix(np.array(rows))
