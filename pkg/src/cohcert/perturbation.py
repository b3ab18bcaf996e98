"""Eigenvalue bounds for Gram matrices grown column by column.

Appending a column X_j to a submatrix X_T turns X_T X_T^t into the rank-one
update X_T X_T^t + X_j X_j^t, so the spectrum after the append is controlled
by the secular function of Cauchy interlacing. This module implements the
closed-form consequences:

* the exact quadratic root bounds for the smallest nonzero and the largest
  eigenvalue after one append (`rho_min_quadratic`, `rho_max_quadratic`),
* their first-order simplifications eps_min / eps_max (`eps_min_append`,
  `eps_max_append`), which are provably looser than the quadratic roots,
* the successive-append bounds for growing a support by s1 columns inside a
  spectral safety window (`successive_bounds`), and their standard
  parametrization eta = 1/2, s1 = 3*s0 (`standard_growth_bounds`),
* the scalar-product bound coupling two disjoint blocks of columns,
* an empirical verification path (`verify_append_bounds`) that checks the
  whole chain exact >= quadratic >= simplified against the eigensolver.

Every formula denominator is guarded: within 1e-12 of zero the bound blows
up and a RegimeError is raised instead of returning garbage.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import linalg
from .design import DesignMatrix, SupportSet, gram, sample_support
from .errors import AdmissibilityError, RegimeError, ValidationError
from .rng import SplitMix64, derive_seed

DENOM_GUARD = 1e-12


@dataclass(frozen=True)
class Condition:
    """One evaluated precondition, kept for reporting."""

    name: str
    lhs: float
    relation: str
    rhs: float
    ok: bool

    def as_tuple(self) -> tuple:
        return (self.name, self.lhs, self.relation, self.rhs)


def _cond(name: str, lhs: float, relation: str, rhs: float) -> Condition:
    if relation == "<":
        ok = lhs < rhs
    elif relation == "<=":
        ok = lhs <= rhs
    else:
        raise ValueError(f"unsupported relation {relation!r}")
    return Condition(name=name, lhs=float(lhs), relation=relation, rhs=float(rhs), ok=ok)


@dataclass(frozen=True)
class SpectralWindow:
    """Certified envelope (lam1_tilde >= lam_1, lam_s0_tilde <= lam_s0) of a
    size-s0 Gram spectrum, with the coherence and submatrix norm it came from."""

    lam1_tilde: float
    lam_s0_tilde: float
    s0: int
    mu: float
    norm_xt0: float

    def __post_init__(self):
        if not (self.lam1_tilde >= self.lam_s0_tilde >= 0.0):
            raise ValidationError("window must satisfy lam1_tilde >= lam_s0_tilde >= 0")
        if not 0.0 <= self.mu <= 1.0:
            raise ValidationError("coherence must lie in [0, 1]")
        if self.norm_xt0 < 1.0:
            raise ValidationError("submatrix operator norm is at least 1 for unit columns")
        if self.s0 < 1:
            raise ValidationError("s0 must be at least 1")


@dataclass(frozen=True)
class PerturbationBounds:
    """eps_min/eps_max bundle for growing a support by s1 columns.

    `lower` bounds the (s0+s1)-th eigenvalue from below and `upper` the
    largest eigenvalue from above; both are None when the s1 budget
    condition fails (the epsilons are still reported). `eps_max_general` is
    eps_max with (s0+s1) = 4*s0 substituted directly into the general
    formula, kept alongside the fixed constant of the standard
    parametrization because the two genuinely differ.
    """

    eps_min: float
    eps_max: float
    eta: float
    s1: int
    lower: float | None
    upper: float | None
    conditions: tuple[Condition, ...]
    eps_max_general: float | None = None
    mu_thresholds: tuple[float, float] | None = None

    @property
    def preconditions_ok(self) -> bool:
        return all(c.ok for c in self.conditions)


def gamma_bound(s0: int, mu: float, norm_xt0: float, *, squared: bool = False) -> float:
    """Bound sqrt(s0) * mu * |X_T| on |<X_j, u_i>| for eigenvectors u_i of
    X_T X_T^t. The `squared` variant returns its square (sensitivity knob)."""
    if s0 < 1 or mu < 0.0 or norm_xt0 <= 0.0:
        raise ValidationError("gamma_bound needs s0 >= 1, mu >= 0, norm > 0")
    g = math.sqrt(s0) * mu * norm_xt0
    return g * g if squared else g


def _require_min_regime(s0: int, mu: float, lam_s0_tilde: float) -> float:
    denom = 1.0 - s0 * mu * mu - lam_s0_tilde
    if denom <= DENOM_GUARD:
        raise RegimeError(
            "smallest-eigenvalue bound requires lam_s0_tilde < 1 - s0*mu^2",
            conditions=[(
                "lam_s0_tilde < 1 - s0*mu^2",
                lam_s0_tilde,
                "<",
                1.0 - s0 * mu * mu,
            )],
        )
    return denom


def _require_max_regime(lam1_tilde: float) -> float:
    denom = lam1_tilde - 1.0
    if denom <= DENOM_GUARD:
        raise RegimeError(
            "largest-eigenvalue bound requires lam1_tilde > 1",
            conditions=[("lam1_tilde > 1", 1.0, "<", lam1_tilde)],
        )
    return denom


def rho_min_quadratic(s0: int, mu: float, gamma: float, lam_s0_tilde: float) -> float:
    """Smallest positive root of the two-pole comparison function

        1 - s0*gamma/(x - lam_s0_tilde) - (1 - s0*mu^2)/x,

    a lower bound for the smallest nonzero eigenvalue after one append."""
    _require_min_regime(s0, mu, lam_s0_tilde)
    d = 1.0 - s0 * mu * mu - lam_s0_tilde
    radicand = (
        (s0 * gamma) ** 2
        + 2.0 * s0 * gamma * (lam_s0_tilde + 1.0 - s0 * mu * mu)
        + d * d
    )
    return 0.5 * (s0 * (gamma - mu * mu) + lam_s0_tilde + 1.0 - math.sqrt(radicand))


def rho_max_quadratic(s0: int, gamma: float, lam1_tilde: float) -> float:
    """Largest root of 1 - s0*gamma/(x - lam1_tilde) - 1/x, an upper bound
    for the largest eigenvalue after one append."""
    _require_max_regime(lam1_tilde)
    radicand = (
        (s0 * gamma) ** 2
        + 2.0 * s0 * gamma * (lam1_tilde + 1.0)
        + (1.0 - lam1_tilde) ** 2
    )
    return 0.5 * (s0 * gamma + lam1_tilde + 1.0 + math.sqrt(radicand))


def eps_min_append(s0: int, mu: float, norm_xt0: float, lam_s0_tilde: float) -> float:
    """First-order drop of the smallest nonzero eigenvalue per appended column:

        eps = (s0^3 mu^2 |X_T|^2 + 4 s0^(3/2) mu |X_T| lam_s0_tilde)
              / (4 (1 - s0 mu^2 - lam_s0_tilde)).

    Guaranteed to satisfy lam_s0_tilde - eps <= rho_min_quadratic (checked)."""
    denom = _require_min_regime(s0, mu, lam_s0_tilde)
    num = (
        s0 ** 3 * mu ** 2 * norm_xt0 ** 2
        + 4.0 * s0 ** 1.5 * mu * norm_xt0 * lam_s0_tilde
    )
    eps = 0.5 * num / (2.0 * denom)
    quad = rho_min_quadratic(s0, mu, gamma_bound(s0, mu, norm_xt0) if mu > 0.0 else 0.0, lam_s0_tilde)
    if lam_s0_tilde - eps > quad + 1e-12:
        raise ValidationError("internal: simplified lower bound tighter than quadratic root")
    return eps


def eps_max_append(s0: int, mu: float, norm_xt0: float, lam1_tilde: float) -> float:
    """First-order rise of the largest eigenvalue per appended column:

        eps = (s0^3 mu^2 |X_T|^2 + 4 s0^(3/2) mu |X_T| lam1_tilde)
              / (4 (lam1_tilde - 1)).

    Guaranteed to satisfy lam1_tilde + eps >= rho_max_quadratic (checked)."""
    denom = _require_max_regime(lam1_tilde)
    num = (
        s0 ** 3 * mu ** 2 * norm_xt0 ** 2
        + 4.0 * s0 ** 1.5 * mu * norm_xt0 * lam1_tilde
    )
    eps = 0.5 * num / (2.0 * denom)
    quad = rho_max_quadratic(s0, gamma_bound(s0, mu, norm_xt0) if mu > 0.0 else 0.0, lam1_tilde)
    if lam1_tilde + eps < quad - 1e-12:
        raise ValidationError("internal: simplified upper bound tighter than quadratic root")
    return eps


def _structural_conditions(win: SpectralWindow, s1: int, eta: float) -> list[Condition]:
    return [
        _cond("lam_s0_tilde < 1 - (s0+s1)*mu", win.lam_s0_tilde, "<", 1.0 - (win.s0 + s1) * win.mu),
        _cond("eta < lam_s0_tilde", eta, "<", win.lam_s0_tilde),
        _cond("1 < lam1_tilde", 1.0, "<", win.lam1_tilde),
        _cond("lam1_tilde < 2 - eta", win.lam1_tilde, "<", 2.0 - eta),
    ]


def _budget_condition(s1: int, win: SpectralWindow, eta: float, eps_min: float, eps_max: float) -> Condition:
    budget_min = (win.lam_s0_tilde - eta) / eps_min if eps_min > 0.0 else math.inf
    budget_max = (2.0 - eta - win.lam1_tilde) / eps_max if eps_max > 0.0 else math.inf
    return _cond("s1 < min((lam_s0_tilde-eta)/eps_min, (2-eta-lam1_tilde)/eps_max)",
                 float(s1), "<", min(budget_min, budget_max))


def successive_bounds(win: SpectralWindow, s1: int, eta: float) -> PerturbationBounds:
    """Spectrum window after appending s1 columns one at a time.

    Inside the eta safety margin each append costs at most eps_min at the
    bottom of the spectrum and eps_max at the top, so after s1 appends

        lam_(s0+s1)(grown Gram) >= lam_s0_tilde - s1*eps_min,
        lam_1(grown Gram)       <= lam1_tilde  + s1*eps_max.

    Window-shape violations raise RegimeError; if only the s1 budget fails,
    the epsilons are still returned with lower/upper set to None.
    """
    if s1 < 1:
        raise ValidationError("s1 must be at least 1")
    if not 0.0 < eta < 1.0:
        raise ValidationError("eta must lie in (0, 1)")
    structural = _structural_conditions(win, s1, eta)
    failed = [c for c in structural if not c.ok]
    if failed:
        raise RegimeError(
            "successive-append window conditions violated",
            conditions=[c.as_tuple() for c in failed],
        )
    s0, mu = win.s0, win.mu
    denom_min = 1.0 - s0 * mu * mu - eta
    if denom_min <= DENOM_GUARD:
        raise RegimeError("denominator 1 - s0*mu^2 - eta is not positive",
                          conditions=[("eta < 1 - s0*mu^2", eta, "<", 1.0 - s0 * mu * mu)])
    denom_max = _require_max_regime(win.lam1_tilde)
    two_eta = 2.0 - eta
    eps_min = 0.25 * (s0 ** 3 * mu ** 2 * eta ** 2 + 4.0 * s0 ** 1.5 * mu * eta ** 2) / denom_min
    st = s0 + s1
    eps_max = 0.25 * (st ** 3 * mu ** 2 * two_eta ** 2 + 4.0 * st ** 1.5 * mu * two_eta ** 2) / denom_max
    budget = _budget_condition(s1, win, eta, eps_min, eps_max)
    conditions = tuple(structural + [budget])
    lower = upper = None
    if budget.ok:
        lower = win.lam_s0_tilde - s1 * eps_min
        upper = win.lam1_tilde + s1 * eps_max
    return PerturbationBounds(eps_min=eps_min, eps_max=eps_max, eta=eta, s1=s1,
                              lower=lower, upper=upper, conditions=conditions)


def mu_admissibility_thresholds(s0: int) -> tuple[float, float]:
    """The two coherence radicals every grown-window statement assumes."""
    t1 = 1.0 / math.sqrt(288.0 * s0 ** 2.5 * (2.0 * s0 ** 1.5 + 1.0))
    t2 = 1.0 / math.sqrt(1.5 * s0 ** 4 + 6.0 * s0 ** 2.5 + 2.0 * s0)
    return (t1, t2)


def standard_growth_bounds(s0: int, mu: float, lam1_tilde: float,
                           lam_s0_tilde: float) -> PerturbationBounds:
    """Successive-append bounds at the standard choice eta = 1/2, s1 = 3*s0.

    Uses the fixed constants of that parametrization,

        eps_min = (s0^3 mu^2 / 4 + s0^(3/2) mu) / (4 (1/2 - s0 mu^2)),
        eps_max = (144 s0^4 mu^2 + 72 s0^(3/2) mu) / (4 (lam1_tilde - 1)),

    and additionally reports eps_max_general, the general formula with
    (s0 + s1) = 4*s0 substituted (which carries s0^3 where the fixed
    constant carries s0^4); both are exposed because they genuinely differ.
    Raises AdmissibilityError when mu exceeds either coherence radical.
    """
    if s0 < 1:
        raise ValidationError("s0 must be at least 1")
    if mu < 0.0:
        raise ValidationError("mu must be nonnegative")
    t1, t2 = mu_admissibility_thresholds(s0)
    if mu > min(t1, t2):
        raise AdmissibilityError(
            "coherence exceeds the admissibility radicals",
            conditions=[("mu <= 1/sqrt(288 s0^(5/2) (2 s0^(3/2)+1))", mu, "<=", t1),
                        ("mu <= 1/sqrt(3/2 s0^4 + 6 s0^(5/2) + 2 s0)", mu, "<=", t2)],
        )
    eta = 0.5
    s1 = 3 * s0
    win = SpectralWindow(lam1_tilde=lam1_tilde, lam_s0_tilde=lam_s0_tilde,
                         s0=s0, mu=mu, norm_xt0=max(1.0, math.sqrt(max(lam1_tilde, 0.0))))
    structural = _structural_conditions(win, s1, eta)
    failed = [c for c in structural if not c.ok]
    if failed:
        raise RegimeError(
            "growth window conditions violated",
            conditions=[c.as_tuple() for c in failed],
        )
    denom_min = 1.0 - s0 * mu * mu - eta
    if denom_min <= DENOM_GUARD:
        raise RegimeError("denominator 1/2 - s0*mu^2 is not positive",
                          conditions=[("s0*mu^2 < 1/2", s0 * mu * mu, "<", 0.5)])
    denom_max = _require_max_regime(lam1_tilde)
    eps_min = 0.25 * (s0 ** 3 * mu ** 2 / 4.0 + s0 ** 1.5 * mu) / denom_min
    eps_max = 0.25 * (144.0 * s0 ** 4 * mu ** 2 + 72.0 * s0 ** 1.5 * mu) / denom_max
    eps_max_general = 0.25 * (144.0 * s0 ** 3 * mu ** 2 + 72.0 * s0 ** 1.5 * mu) / denom_max
    budget = _budget_condition(s1, win, eta, eps_min, eps_max)
    conditions = tuple(structural + [budget])
    lower = upper = None
    if budget.ok:
        lower = lam_s0_tilde - s1 * eps_min
        upper = lam1_tilde + s1 * eps_max
    return PerturbationBounds(eps_min=eps_min, eps_max=eps_max, eta=eta, s1=s1,
                              lower=lower, upper=upper, conditions=conditions,
                              eps_max_general=eps_max_general, mu_thresholds=(t1, t2))


SCALAR_VARIANTS = ("stated", "proof")


def scalar_product_bound(s0: int, lam1: float, lam_s0: float, eps_max: float,
                         eps_min: float, variant: str = "stated") -> float:
    """Coefficient bounding |<X_T g_T, X_T' h_T'>| per unit-norm g, h.

    Two variants are implemented side by side: the `stated` coefficient
    lam1 + 3*s0*eps_max and the `proof` coefficient derived through the
    parallelogram law, lam1 - lam_s0 + 3*s0*(eps_max + eps_min). Neither is
    silently preferred; callers pick.
    """
    if variant not in SCALAR_VARIANTS:
        raise ValidationError(f"variant must be one of {SCALAR_VARIANTS}")
    if min(lam1, lam_s0, eps_max, eps_min) < 0.0 or lam1 < lam_s0:
        raise ValidationError("need nonnegative inputs with lam1 >= lam_s0")
    if variant == "stated":
        return lam1 + 3.0 * s0 * eps_max
    return lam1 - lam_s0 + 3.0 * s0 * (eps_max + eps_min)


@dataclass(frozen=True)
class AppendVerification:
    """Outcome of checking the one-append bound chain on a concrete (T0, j).

    Each side is only checked when its regime condition holds with the
    tightest admissible window (lam_tilde = exact lambda); skipped sides
    record a reason and count as data, not failures.
    """

    support: SupportSet
    j: int
    mu: float
    norm_xt0: float
    lam1: float
    lam_s0: float
    exact_top: float
    exact_appended_min: float
    min_checked: bool
    min_ok: bool | None
    quad_min: float | None
    eps_min: float | None
    max_checked: bool
    max_ok: bool | None
    quad_max: float | None
    eps_max: float | None
    skip_reasons: tuple[str, ...]


CHAIN_TOL = 1e-9


def verify_append_bounds(x: DesignMatrix, t0: SupportSet, j: int) -> AppendVerification:
    """Check exact >= quadratic >= simplified (and the mirrored upper chain)
    for one support and one appended column, against the eigensolver."""
    if j in t0.indices:
        raise ValidationError(f"appended column {j} already belongs to the support")
    if not 1 <= j <= x.p:
        raise ValidationError(f"column index {j} out of range [1, {x.p}]")
    s0 = len(t0)
    small = linalg.sym_eig(gram(x, t0))
    lam1 = float(small.eigenvalues[0])
    lam_s0 = float(small.eigenvalues[-1])
    norm_xt0 = math.sqrt(max(lam1, 0.0))
    mu = x.mu if x.mu is not None else 0.0

    cols = x.columns(t0)
    frame = cols @ cols.T
    v = x.data[:, j - 1]
    updated = linalg.rank_one_update_eig(frame, v)
    exact_top = float(updated[0])
    skip: list[str] = []
    if s0 + 1 <= x.n:
        exact_appended_min = float(updated[s0])
    else:
        exact_appended_min = float(updated[-1])
        skip.append("support exhausts the ambient dimension")

    gamma = gamma_bound(s0, mu, norm_xt0) if mu > 0.0 and norm_xt0 > 0.0 else 0.0

    min_checked = False
    min_ok = None
    quad_min = eps_min = None
    if 1.0 - s0 * mu * mu - lam_s0 > DENOM_GUARD and s0 + 1 <= x.n:
        min_checked = True
        quad_min = rho_min_quadratic(s0, mu, gamma, lam_s0)
        eps_min = eps_min_append(s0, mu, norm_xt0, lam_s0)
        min_ok = (exact_appended_min >= quad_min - CHAIN_TOL
                  and quad_min >= lam_s0 - eps_min - 1e-12)
    else:
        skip.append("min side: lam_s0 >= 1 - s0*mu^2")

    max_checked = False
    max_ok = None
    quad_max = eps_max = None
    if lam1 - 1.0 > DENOM_GUARD:
        max_checked = True
        quad_max = rho_max_quadratic(s0, gamma, lam1)
        eps_max = eps_max_append(s0, mu, norm_xt0, lam1)
        max_ok = (exact_top <= quad_max + CHAIN_TOL
                  and quad_max <= lam1 + eps_max + 1e-12)
    else:
        skip.append("max side: lam1 <= 1")

    return AppendVerification(
        support=t0, j=j, mu=mu, norm_xt0=norm_xt0, lam1=lam1, lam_s0=lam_s0,
        exact_top=exact_top, exact_appended_min=exact_appended_min,
        min_checked=min_checked, min_ok=min_ok, quad_min=quad_min, eps_min=eps_min,
        max_checked=max_checked, max_ok=max_ok, quad_max=quad_max, eps_max=eps_max,
        skip_reasons=tuple(skip),
    )


@dataclass(frozen=True)
class AppendSweepSummary:
    trials: int
    min_checked: int
    min_violations: int
    max_checked: int
    max_violations: int
    skipped_min: int
    skipped_max: int
    records: tuple[AppendVerification, ...]


def append_bounds_sweep(x: DesignMatrix, s0_values, trials: int, seed: int,
                        keep_records: bool = False) -> AppendSweepSummary:
    """Run verify_append_bounds over random (T0, j) pairs with derived seeds."""
    s0_values = [int(s) for s in s0_values]
    if not s0_values or min(s0_values) < 1 or max(s0_values) >= x.p:
        raise ValidationError("s0 values must satisfy 1 <= s0 < p")
    min_checked = max_checked = 0
    min_viol = max_viol = 0
    kept: list[AppendVerification] = []
    for i in range(trials):
        trial_rng = SplitMix64(derive_seed(seed, i))
        s0 = s0_values[trial_rng.randbelow(len(s0_values))]
        t0 = sample_support(x.p, s0, derive_seed(seed, i) ^ 0x5EED)
        outside = [k for k in range(1, x.p + 1) if k not in t0.indices]
        j = outside[trial_rng.randbelow(len(outside))]
        rec = verify_append_bounds(x, t0, j)
        if rec.min_checked:
            min_checked += 1
            if rec.min_ok is False:
                min_viol += 1
        if rec.max_checked:
            max_checked += 1
            if rec.max_ok is False:
                max_viol += 1
        if keep_records:
            kept.append(rec)
    return AppendSweepSummary(
        trials=trials,
        min_checked=min_checked, min_violations=min_viol,
        max_checked=max_checked, max_violations=max_viol,
        skipped_min=trials - min_checked, skipped_max=trials - max_checked,
        records=tuple(kept),
    )
