"""Weak-RIP and weak-NSP certification of a design matrix.

Three layers live here:

* admissibility and the probability bound for singular-value concentration
  of random column submatrices (`weak_rip_conditions`, `weak_rip_estimate`),
* the closed-form weak-NSP constants driven by coherence, with every
  formula variant reported side by side (`weak_nsp_constants`,
  `coherence_scaling_constants`, `rip_to_nsp_constant`),
* direct verification of the null-space property on concrete supports:
  the block decomposition of a kernel vector, the block l2/l1 inequality,
  and the worst-case ratio R(T0) = max { |h_T0|_2 : h in Ker X,
  |h_T0c|_1 = 1 } computed exactly by vertex enumeration over the kernel
  polytope, or bounded from below by sampling.

The exact verifier parametrizes h = K z over an orthonormal kernel basis;
the feasible set {z : |(Kz)_T0c|_1 <= 1} is the unit ball of a piecewise
linear norm, so the convex objective attains its maximum at a vertex, and
every vertex annihilates d-1 independent rows of K restricted to T0c.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .design import DesignMatrix, SupportSet, gram, sample_support, support_set
from .errors import CapacityError, RegimeError, ValidationError
from .rng import SplitMix64, derive_seed

PROBABILITY_CONSTANT = 1944.0
SPECTRAL_WINDOW = (0.75, 1.25)
EXHAUSTIVE_LIMIT = 100_000


@dataclass(frozen=True)
class WeakRipConditions:
    mu_ok: bool
    s0_ok: bool
    bound: float
    vacuous: bool
    mu_threshold: float
    s0_threshold: float


def probability_bound(p: int, alpha: float) -> tuple[float, bool]:
    """min(1, 1944 / p^alpha) and whether the raw value was vacuous (>= 1)."""
    raw = PROBABILITY_CONSTANT / p ** alpha
    return min(1.0, raw), raw >= 1.0


def weak_rip_conditions(x: DesignMatrix, s0: int, r: float, alpha: float) -> WeakRipConditions:
    """Admissibility of (mu, s0) for the singular-value concentration bound
    P(|X_T0^t X_T0 - I| >= r) <= 1944 / p^alpha over uniform supports."""
    p = x.p
    if p < 2:
        raise ValidationError("need p >= 2 (log p must be positive)")
    if not 0.0 < r < 1.0:
        raise ValidationError("r must lie in (0, 1)")
    if alpha < 1.0:
        raise ValidationError("alpha must be at least 1")
    if not 1 <= s0 <= p:
        raise ValidationError("need 1 <= s0 <= p")
    logp = math.log(p)
    mu_threshold = r / ((1.0 + alpha) * logp)
    s0_threshold = r * r / ((1.0 + alpha) * math.e ** 2) * p / (x.opnorm ** 2 * logp)
    mu = x.mu if x.mu is not None else 0.0
    bound, vacuous = probability_bound(p, alpha)
    return WeakRipConditions(
        mu_ok=mu <= mu_threshold,
        s0_ok=s0 <= s0_threshold,
        bound=bound,
        vacuous=vacuous,
        mu_threshold=mu_threshold,
        s0_threshold=s0_threshold,
    )


@dataclass(frozen=True)
class WeakRipReport:
    s0: int
    r: float
    alpha: float
    trials: int
    failures: int
    empirical_failure_rate: float
    theoretical_bound: float
    mu_condition_ok: bool
    s0_condition_ok: bool
    vacuous: bool
    seed: int
    exhaustive: bool
    deviations: tuple[float, ...]  # per-trial |Gram - I|, in trial order


def _gram_deviation(x: DesignMatrix, t0: SupportSet) -> float:
    lam = linalg.sym_eig(gram(x, t0)).eigenvalues
    return float(np.max(np.abs(lam - 1.0)))


def weak_rip_estimate(x: DesignMatrix, s0: int, r: float, alpha: float,
                      trials: int, seed: int, exhaustive: bool = False) -> WeakRipReport:
    """Monte-Carlo (or exhaustive) failure proportion of |Gram - I| >= r over
    uniform size-s0 supports, with trial i seeded by seed XOR i."""
    conds = weak_rip_conditions(x, s0, r, alpha)
    deviations: list[float] = []
    failures = 0
    if exhaustive:
        total = math.comb(x.p, s0)
        if total > EXHAUSTIVE_LIMIT:
            raise CapacityError(
                f"{total} supports exceed the exhaustive limit {EXHAUSTIVE_LIMIT}")
        for combo in itertools.combinations(range(1, x.p + 1), s0):
            dev = _gram_deviation(x, support_set(combo, x.p))
            deviations.append(dev)
            failures += dev >= r
        n_trials = total
    else:
        if trials < 1:
            raise ValidationError("trials must be at least 1")
        for i in range(trials):
            t0 = sample_support(x.p, s0, derive_seed(seed, i))
            dev = _gram_deviation(x, t0)
            deviations.append(dev)
            failures += dev >= r
        n_trials = trials
    return WeakRipReport(
        s0=s0, r=r, alpha=alpha, trials=n_trials, failures=failures,
        empirical_failure_rate=failures / n_trials,
        theoretical_bound=conds.bound,
        mu_condition_ok=conds.mu_ok, s0_condition_ok=conds.s0_ok,
        vacuous=conds.vacuous, seed=seed, exhaustive=exhaustive,
        deviations=tuple(deviations),
    )


def rip_to_nsp_constant(delta: float) -> float:
    """Null-space constant sqrt(2) (1 + delta) / (1 - delta) implied by a
    restricted isometry constant delta on supports of twice the size."""
    if not 0.0 <= delta < 1.0:
        raise ValidationError("delta must lie in [0, 1)")
    return math.sqrt(2.0) * (1.0 + delta) / (1.0 - delta)


@dataclass(frozen=True)
class WeakNspConstants:
    """Coherence-driven weak-NSP constants, all formula variants included.

    eps_min / eps_max are the primary forms; eps_min_alt carries the
    growth-bound denominator (2 - 4 s0 mu^2) and eps_max_alt the s0^4
    variant. C_stated evaluates (1 + 3 s0 (eps_max+eps_min)) /
    (lam1 - 3 s0 eps_min) at the conservative window edge lam1 = 3/4
    (C_stated_upper at 5/4); C_proof evaluates the proof-shaped constant at
    the worst window pair (lam1, lam_s0) = (5/4, 3/4).
    """

    s0: int
    alpha: float
    p: int
    mu: float
    opnorm: float
    eps_min: float
    eps_max: float
    eps_min_alt: float
    eps_max_alt: float
    C_stated: float
    C_stated_upper: float
    C_proof: float
    pi: float
    vacuous: bool
    mu_admissible: bool
    s0_admissible: bool
    mu_thresholds: tuple[float, float, float]
    s0_threshold: float
    spectral_window: tuple[float, float] = SPECTRAL_WINDOW


def weak_nsp_constants_from_params(p: int, mu: float, opnorm: float,
                                   s0: int, alpha: float) -> WeakNspConstants:
    if p < 2:
        raise ValidationError("need p >= 2")
    if s0 < 1:
        raise ValidationError("need s0 >= 1")
    if alpha <= 0.0:
        raise ValidationError("alpha must be positive")
    if not 0.0 <= mu <= 1.0:
        raise ValidationError("mu must lie in [0, 1]")
    logp = math.log(p)
    denom = 3.0 - 4.0 * s0 * mu * mu
    if denom <= 1e-12:
        raise RegimeError("denominator 3 - 4 s0 mu^2 is not positive",
                          conditions=[("4 s0 mu^2 < 3", 4.0 * s0 * mu * mu, "<", 3.0)])
    num = 0.25 * s0 ** 3 * mu ** 2 + s0 ** 1.5 * mu
    eps_min = num / denom
    denom_alt = 2.0 - 4.0 * s0 * mu * mu
    eps_min_alt = num / denom_alt if denom_alt > 1e-12 else math.inf
    eps_max = 144.0 * s0 ** 3 * mu ** 2 + 72.0 * s0 ** 1.5 * mu
    eps_max_alt = 144.0 * s0 ** 4 * mu ** 2 + 72.0 * s0 ** 1.5 * mu

    lam_lo, lam_hi = SPECTRAL_WINDOW
    c_denom = lam_lo - 3.0 * s0 * eps_min
    if c_denom <= 1e-12:
        raise RegimeError("window denominator lam - 3 s0 eps_min is not positive",
                          conditions=[("3 s0 eps_min < 3/4", 3.0 * s0 * eps_min, "<", lam_lo)])
    spread = 3.0 * s0 * (eps_max + eps_min)
    c_stated = (1.0 + spread) / c_denom
    c_stated_upper = (1.0 + spread) / (lam_hi - 3.0 * s0 * eps_min)
    c_proof = (lam_hi - lam_lo + spread) / c_denom

    from .perturbation import mu_admissibility_thresholds

    t1, t2 = mu_admissibility_thresholds(s0)
    t3 = 1.0 / (4.0 * (1.0 + alpha) * logp)
    s0_threshold = p / (16.0 * (1.0 + alpha) * math.e ** 2 * opnorm ** 2 * logp)
    bound, vacuous = probability_bound(p, alpha)
    return WeakNspConstants(
        s0=s0, alpha=alpha, p=p, mu=mu, opnorm=opnorm,
        eps_min=eps_min, eps_max=eps_max,
        eps_min_alt=eps_min_alt, eps_max_alt=eps_max_alt,
        C_stated=c_stated, C_stated_upper=c_stated_upper, C_proof=c_proof,
        pi=max(0.0, 1.0 - PROBABILITY_CONSTANT / p ** alpha),
        vacuous=vacuous,
        mu_admissible=mu <= min(t1, t2, t3),
        s0_admissible=s0 <= s0_threshold,
        mu_thresholds=(t1, t2, t3),
        s0_threshold=s0_threshold,
    )


def weak_nsp_constants(x: DesignMatrix, s0: int, alpha: float) -> WeakNspConstants:
    mu = x.mu if x.mu is not None else 0.0
    return weak_nsp_constants_from_params(x.p, mu, x.opnorm, s0, alpha)


@dataclass(frozen=True)
class CoherenceScalingConstants:
    """Constants under the scaling mu <= c0 / s0^(5/2), kept verbatim in
    their c0-parametrized form. Experimental: for side-by-side comparison
    only, not used by any certification path."""

    s0: int
    c0: float
    lam1: float
    eps_min: float
    eps_max: float
    C: float
    experimental: bool = True


def coherence_scaling_constants(s0: int, c0: float, lam1: float) -> CoherenceScalingConstants:
    if s0 < 1 or c0 <= 0.0:
        raise ValidationError("need s0 >= 1 and c0 > 0")
    denom_lam = lam1 - 1.0
    if denom_lam <= 1e-12:
        raise RegimeError("need lam1 > 1", conditions=[("lam1 > 1", 1.0, "<", lam1)])
    half_minus = 0.5 - c0 ** 2 / s0 ** 4
    if half_minus <= 1e-12:
        raise RegimeError("need c0^2 < s0^4 / 2",
                          conditions=[("c0^2/s0^4 < 1/2", c0 ** 2 / s0 ** 4, "<", 0.5)])
    eps_min = 0.25 * (c0 ** 2 / s0 ** 2 / 4.0 + c0 / s0) / half_minus
    eps_max = 0.25 * (144.0 * c0 ** 2 / s0 + 72.0 * c0 / s0 ** 2) / denom_lam
    min_term = (c0 ** 2 / s0 / 4.0 + c0) / half_minus
    c_denom = 1.0 - 0.75 * min_term
    if c_denom <= 1e-12:
        raise RegimeError("c0 scaling constant denominator is not positive",
                          conditions=[("(3/4)(c0^2/(4 s0) + c0)/(1/2 - c0^2 s0^-4) < 1",
                                       0.75 * min_term, "<", 1.0)])
    c_value = (1.0 + 0.75 * (min_term + (144.0 * c0 ** 2 + 72.0 * c0 / s0) / denom_lam)) / c_denom
    return CoherenceScalingConstants(s0=s0, c0=c0, lam1=lam1,
                                     eps_min=eps_min, eps_max=eps_max, C=c_value)


def block_decompose(h, t0: SupportSet, s0: int) -> list[SupportSet]:
    """Partition T0^c into blocks of the s0 largest remaining |h| entries.

    Ties break toward the lower index; the final block may be short. Blocks
    are returned in decreasing-magnitude order as 1-based supports.
    """
    vec = linalg.as_vector(h, t0.p)
    if s0 < 1:
        raise ValidationError("s0 must be at least 1")
    if len(t0) < 1:
        raise ValidationError("T0 must be nonempty")
    comp = t0.complement_zero_based()
    order = comp[np.argsort(-np.abs(vec[comp]), kind="stable")]
    blocks = []
    for start in range(0, order.shape[0], s0):
        chunk = order[start:start + s0]
        blocks.append(support_set((chunk + 1).tolist(), t0.p))
    return blocks


@dataclass(frozen=True)
class BlockNormCheck:
    lhs: float
    rhs: float
    holds: bool


def block_norm_inequality(h, t0: SupportSet, s0: int) -> BlockNormCheck:
    """Check sum_{j>=2} |h_Tj|_2 <= |h_T0c|_1 / sqrt(s0) on the block
    decomposition (holds identically; the flag exists for verification)."""
    vec = linalg.as_vector(h, t0.p)
    blocks = block_decompose(vec, t0, s0)
    lhs = float(sum(math.sqrt(float(np.sum(vec[b.zero_based()] ** 2))) for b in blocks[1:]))
    comp = t0.complement_zero_based()
    rhs = float(np.sum(np.abs(vec[comp]))) / math.sqrt(s0)
    return BlockNormCheck(lhs=lhs, rhs=rhs, holds=lhs <= rhs + 1e-12)


_VERTEX_DEDUP_DECIMALS = 8
_FEASIBILITY_TOL = 1e-9


def _kernel_and_restriction(x: DesignMatrix, t0: SupportSet):
    kernel = linalg.kernel_basis(x.data)
    comp = t0.complement_zero_based()
    return kernel, kernel[comp, :], kernel[t0.zero_based(), :]


def nsp_worst_ratio_exact(x: DesignMatrix, t0: SupportSet, d_max: int = 5) -> float:
    """Exact R(T0) = max |h_T0|_2 over kernel vectors with |h_T0c|_1 = 1.

    Enumerates the vertices of {z : |(Kz)_T0c|_1 <= 1}: each vertex kills
    d-1 independent rows of K_T0c, so candidates come from the null
    directions of all (d-1)-row subsets, scaled onto the unit sphere of the
    l1 seminorm. Returns +inf when some kernel vector vanishes on T0c
    (seminorm degenerate, ratio unbounded), 0 for a trivial kernel.
    """
    kernel, a_comp, a_t0 = _kernel_and_restriction(x, t0)
    d = kernel.shape[1]
    if d == 0:
        return 0.0
    if d > d_max:
        raise CapacityError(
            f"kernel dimension {d} exceeds d_max={d_max}; use the sampled method")
    m = a_comp.shape[0]
    if m < d:
        return math.inf
    sigma = linalg.singular_values(a_comp)
    if sigma[0] == 0.0 or sigma[d - 1] <= linalg.RANK_RTOL * sigma[0]:
        return math.inf

    best = 0.0
    seen: set[tuple] = set()
    if d == 1:
        directions = [np.ones(1)]
    else:
        directions = []
        for rows in itertools.combinations(range(m), d - 1):
            sub = a_comp[list(rows), :]
            null = linalg.kernel_basis(sub)
            if null.shape[1] != 1:
                continue
            directions.append(null[:, 0])
    for z in directions:
        if z[np.argmax(np.abs(z))] < 0.0:
            z = -z
        t = float(np.sum(np.abs(a_comp @ z)))
        if t <= 1e-14:
            return math.inf
        vertex = z / t
        key = tuple(np.round(vertex, _VERTEX_DEDUP_DECIMALS))
        if key in seen:
            continue
        seen.add(key)
        best = max(best, math.sqrt(float(np.sum((a_t0 @ vertex) ** 2))))
    return best


def nsp_worst_ratio_sampled(x: DesignMatrix, t0: SupportSet, samples: int, seed: int) -> float:
    """Lower bound on R(T0) from random kernel directions plus the basis
    directions; never exceeds the exact ratio."""
    kernel, a_comp, a_t0 = _kernel_and_restriction(x, t0)
    d = kernel.shape[1]
    if d == 0:
        return 0.0
    rng = SplitMix64(seed)
    best = 0.0
    directions = [np.eye(d)[:, i] for i in range(d)]
    for _ in range(samples):
        directions.append(np.array(rng.normals(d)))
    for z in directions:
        num = math.sqrt(float(np.sum((a_t0 @ z) ** 2)))
        den = float(np.sum(np.abs(a_comp @ z)))
        if den <= 1e-14 * max(1.0, num):
            return math.inf
        best = max(best, num / den)
    return best


@dataclass(frozen=True)
class NspCertificate:
    t0: SupportSet
    worst_ratio: float
    threshold: float
    holds: bool
    method: str
    samples: int | None
    lower_bound_only: bool


@dataclass(frozen=True)
class NspCertifyResult:
    pass_rate: float
    certificates: tuple[NspCertificate, ...]
    s0: int
    C: float
    method: str
    seed: int
    exhaustive: bool


def weak_nsp_certify(x: DesignMatrix, s0: int, C: float, trials: int, seed: int,
                     method: str = "exact", samples: int = 2048, d_max: int = 5,
                     exhaustive: bool = False) -> NspCertifyResult:
    """Certify |h_T0|_2 <= C |h_T0c|_1 / sqrt(s0) over sampled (or all)
    size-s0 supports. Sampled-method passes are lower-confidence claims and
    are flagged as such on each certificate."""
    if method not in ("exact", "sampled"):
        raise ValidationError("method must be 'exact' or 'sampled'")
    if not 1 <= s0 <= x.p:
        raise ValidationError("need 1 <= s0 <= p")
    if C <= 0.0:
        raise ValidationError("C must be positive")
    threshold = C / math.sqrt(s0)
    supports: list[SupportSet]
    if exhaustive:
        total = math.comb(x.p, s0)
        if total > EXHAUSTIVE_LIMIT:
            raise CapacityError(
                f"{total} supports exceed the exhaustive limit {EXHAUSTIVE_LIMIT}")
        supports = [support_set(c, x.p)
                    for c in itertools.combinations(range(1, x.p + 1), s0)]
    else:
        if trials < 1:
            raise ValidationError("trials must be at least 1")
        supports = [sample_support(x.p, s0, derive_seed(seed, i)) for i in range(trials)]
    certificates = []
    held = 0
    for i, t0 in enumerate(supports):
        if method == "exact":
            ratio = nsp_worst_ratio_exact(x, t0, d_max=d_max)
            cert = NspCertificate(t0=t0, worst_ratio=ratio, threshold=threshold,
                                  holds=ratio <= threshold, method="exact",
                                  samples=None, lower_bound_only=False)
        else:
            ratio = nsp_worst_ratio_sampled(x, t0, samples, derive_seed(seed, i) ^ 0xA5A5)
            cert = NspCertificate(t0=t0, worst_ratio=ratio, threshold=threshold,
                                  holds=ratio <= threshold, method="sampled",
                                  samples=samples, lower_bound_only=True)
        held += cert.holds
        certificates.append(cert)
    return NspCertifyResult(pass_rate=held / len(supports),
                            certificates=tuple(certificates),
                            s0=s0, C=C, method=method, seed=seed,
                            exhaustive=exhaustive)
