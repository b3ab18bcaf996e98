"""Figure rendering for CLI reports.

Each function takes already-computed report data and writes one PNG next to
the delimited output. Matplotlib runs on the Agg backend: no display needed.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

_FIGSIZE = (6.4, 4.0)
_DPI = 150


def _finish(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def gram_deviation_histogram(deviations, r: float, bound: float, path) -> None:
    """Histogram of per-support |Gram - I| with the failure threshold r."""
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ax.hist(list(deviations), bins=40, color="steelblue", alpha=0.85)
    ax.axvline(r, color="crimson", linestyle="--", label=f"r = {r:g}")
    ax.set_xlabel("operator-norm deviation of the support Gram from I")
    ax.set_ylabel("supports")
    ax.set_title(f"submatrix concentration (failure bound {bound:.4g})")
    ax.legend()
    _finish(fig, path)


def failure_rate_curve(rs, rates, bound: float, path) -> None:
    """Empirical failure proportion against the deviation threshold r."""
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ax.plot(list(rs), list(rates), "o-", color="steelblue", label="empirical failure rate")
    ax.axhline(bound, color="crimson", linestyle="--", label=f"bound {bound:.4g}")
    ax.set_xlabel("threshold r")
    ax.set_ylabel("proportion of supports with |Gram - I| >= r")
    ax.set_title("submatrix concentration failure rates")
    ax.set_ylim(-0.02, 1.05)
    ax.legend()
    _finish(fig, path)


def gershgorin_curve(s_values, bounds, path, exact=None) -> None:
    """Disc bound mu (s - 1) against support size, optional exact values."""
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ax.plot(list(s_values), list(bounds), "o-", color="steelblue", label="mu (s - 1)")
    if exact is not None:
        ax.plot(list(s_values), list(exact), "s--", color="darkorange",
                label="worst sampled |Gram - I|")
    ax.set_xlabel("support size s")
    ax.set_ylabel("bound on |Gram - I|")
    ax.set_title("Gershgorin disc bound")
    ax.legend()
    _finish(fig, path)


def nsp_ratio_histogram(ratios, threshold: float, path) -> None:
    """Histogram of per-support worst kernel ratios with the pass threshold."""
    finite = [x for x in ratios if math.isfinite(x)]
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    if finite:
        ax.hist(finite, bins=40, color="steelblue", alpha=0.85)
    ax.axvline(threshold, color="crimson", linestyle="--",
               label=f"C / sqrt(s0) = {threshold:.4g}")
    infinite = len(list(ratios)) - len(finite)
    if infinite:
        ax.set_title(f"worst kernel ratios ({infinite} unbounded omitted)")
    else:
        ax.set_title("worst kernel ratios")
    ax.set_xlabel("max |h_T0|_2 / |h_T0c|_1 over the kernel")
    ax.set_ylabel("supports")
    ax.legend()
    _finish(fig, path)


def recovery_error_plot(errors, tol: float, path) -> None:
    """Per-trial l-infinity recovery error on a log scale."""
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    floor = 1e-17
    ys = [max(e, floor) if math.isfinite(e) else 1.0 for e in errors]
    ax.semilogy(range(len(ys)), ys, ".", color="steelblue")
    ax.axhline(tol, color="crimson", linestyle="--", label=f"tolerance {tol:g}")
    ax.set_xlabel("trial")
    ax.set_ylabel("recovery error (l-infinity)")
    ax.set_title("basis pursuit recovery errors")
    ax.legend()
    _finish(fig, path)


def append_bounds_scatter(records, path) -> None:
    """Exact post-append eigenvalues against their closed-form bounds."""
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    lo_exact = [r.exact_appended_min for r in records if r.min_checked]
    lo_bound = [r.quad_min for r in records if r.min_checked]
    hi_exact = [r.exact_top for r in records if r.max_checked]
    hi_bound = [r.quad_max for r in records if r.max_checked]
    if lo_exact:
        ax.plot(lo_bound, lo_exact, ".", color="steelblue", label="smallest (exact vs lower bound)")
    if hi_exact:
        ax.plot(hi_bound, hi_exact, ".", color="darkorange", label="largest (exact vs upper bound)")
    lim_vals = lo_exact + lo_bound + hi_exact + hi_bound
    if lim_vals:
        lo, hi = min(lim_vals), max(lim_vals)
        pad = 0.05 * (hi - lo or 1.0)
        ax.plot([lo - pad, hi + pad], [lo - pad, hi + pad], "-", color="gray", linewidth=0.8)
    ax.set_xlabel("quadratic bound")
    ax.set_ylabel("exact eigenvalue after append")
    ax.set_title("single-append eigenvalue bounds")
    ax.legend()
    _finish(fig, path)
