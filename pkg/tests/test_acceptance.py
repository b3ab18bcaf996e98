"""Acceptance suite: one test per certification criterion, each printing a
pass/fail line with its measured runtime (run with -s to see them inline).

Every tolerance is fixed here, not configurable: 1e-9 for eigenvalue
interlacing and the append-bound chain, 1e-8 for secular/eigen agreement,
1e-10 for Gershgorin dominance, 1e-12 for the block inequality and the
constants regression, 1e-6 for recovery and the dense-grid comparison.
"""

import itertools
import math
import time

import numpy as np
import pytest

from cohcert import certify, cli, design, linalg, perturbation, recovery

import oracles


def report(num, name, elapsed, budget, detail=""):
    extra = f" | {detail}" if detail else ""
    print(f"[criterion {num:2d}] PASS: {name} ({elapsed:.1f}s < {budget:.0f}s budget){extra}")


def test_criterion_01_interlacing_and_secular_equivalence():
    start = time.perf_counter()
    rng = np.random.default_rng(101)
    worst_interlace = 0.0
    worst_secular = 0.0
    for _ in range(1000):
        n = int(rng.integers(2, 11))
        m = rng.normal(size=(n, n))
        a = 0.5 * (m + m.T)
        v = rng.normal(size=n)
        eig = linalg.sym_eig(a)
        lam = eig.eigenvalues
        updated = linalg.rank_one_update_eig(a, v)
        worst_interlace = max(worst_interlace,
                              float(np.max(lam - updated)),
                              float(np.max(updated[1:] - lam[:-1])))
        roots = linalg.secular_roots(linalg.secular_from_update(eig, v))
        worst_secular = max(worst_secular, float(np.max(np.abs(roots - updated))))
    elapsed = time.perf_counter() - start
    assert worst_interlace <= 1e-9
    assert worst_secular <= 1e-8
    assert elapsed < 10.0
    report(1, "interlacing + secular equivalence over 1000 updates", elapsed, 10,
           f"worst interlacing excess {worst_interlace:.2e}, worst root deviation {worst_secular:.2e}")


def test_criterion_02_gershgorin_dominance():
    start = time.perf_counter()
    checked = 0
    # Exhaustive over every support of small designs.
    for n, p, seed in ((4, 8, 1), (6, 8, 2)):
        x = design.generate("gaussian", n, p, seed)
        for size in range(1, p + 1):
            for combo in itertools.combinations(range(1, p + 1), size):
                chk = design.gershgorin_check(x, design.support_set(combo, p))
                assert chk.exact <= chk.bound + 1e-10, (combo, chk)
                checked += 1
    # Random supports on a larger design.
    rng = np.random.default_rng(22)
    x = design.generate("gaussian", 32, 128, 6)
    for _ in range(1000):
        size = int(rng.integers(1, 11))
        t0 = design.sample_support(128, size, int(rng.integers(0, 2 ** 62)))
        chk = design.gershgorin_check(x, t0)
        assert chk.exact <= chk.bound + 1e-10
        checked += 1
    elapsed = time.perf_counter() - start
    assert elapsed < 30.0
    report(2, "Gershgorin disc bound dominance", elapsed, 30,
           f"{checked} supports, zero violations at 1e-10")


def _paired_design(n, g):
    """Disjoint correlated column pairs with coherence exactly g; supports
    holding a full pair have lam_min = 1 - g, which keeps the small-eigenvalue
    regime admissible (Gaussian designs at this size almost never do)."""
    cols = []
    for k in range(n // 2):
        e1 = np.zeros(n)
        e1[2 * k] = 1.0
        e2 = np.zeros(n)
        e2[2 * k] = g
        e2[2 * k + 1] = math.sqrt(1.0 - g * g)
        cols += [e1, e2]
    return design.from_raw(np.column_stack(cols))


def test_criterion_03_append_bound_chain():
    start = time.perf_counter()
    x = design.generate("gaussian", 32, 128, 40)
    summary = perturbation.append_bounds_sweep(x, [2, 3, 4, 5, 6], 1000, 17)
    assert summary.trials == 1000
    assert summary.min_violations == 0
    assert summary.max_violations == 0
    assert summary.max_checked > 0
    # Gaussian coherence at this size skips the small-eigenvalue side almost
    # everywhere; a paired-coherence design exercises it for real.
    paired = perturbation.append_bounds_sweep(_paired_design(32, 0.3), [2, 3], 200, 19)
    assert paired.min_checked > 0
    assert paired.min_violations == 0
    assert paired.max_violations == 0
    elapsed = time.perf_counter() - start
    assert elapsed < 120.0
    report(3, "append bound chain exact >= quadratic >= simplified", elapsed, 120,
           f"gaussian: min checked {summary.min_checked} (skipped {summary.skipped_min}), "
           f"max checked {summary.max_checked}; paired design: min checked {paired.min_checked}, "
           "zero violations")


def test_criterion_04_zero_coherence_collapse():
    start = time.perf_counter()
    x = design.from_raw(np.eye(16))
    assert x.mu == 0.0

    # Every epsilon is exactly zero at mu = 0.
    assert perturbation.eps_min_append(3, 0.0, 1.0, 0.8) == 0.0
    assert perturbation.eps_max_append(3, 0.0, 1.0, 1.25) == 0.0
    win = perturbation.SpectralWindow(lam1_tilde=1.25, lam_s0_tilde=0.75,
                                      s0=3, mu=0.0, norm_xt0=1.0)
    grown = perturbation.successive_bounds(win, s1=9, eta=0.5)
    assert grown.eps_min == 0.0 and grown.eps_max == 0.0
    assert grown.lower == 0.75 and grown.upper == 1.25
    std = perturbation.standard_growth_bounds(3, 0.0, 1.25, 0.75)
    assert std.eps_min == 0.0 and std.eps_max == 0.0 and std.eps_max_general == 0.0

    consts = certify.weak_nsp_constants(x, 3, 2.0)
    assert consts.eps_min == 0.0 and consts.eps_max == 0.0
    assert consts.eps_min_alt == 0.0 and consts.eps_max_alt == 0.0
    assert consts.C_proof == 2.0 / 3.0

    # No submatrix ever deviates, at any threshold.
    for r in (0.05, 0.3, 0.9):
        rep = certify.weak_rip_estimate(x, 4, r, 1.0, 100, 5)
        assert rep.failures == 0

    # Trivial kernel: worst ratio is exactly zero on every support.
    for t0 in (design.support_set([1], 16), design.support_set([2, 9, 16], 16)):
        assert certify.nsp_worst_ratio_exact(x, t0) == 0.0
    elapsed = time.perf_counter() - start
    report(4, "zero-coherence collapse (exact zeros, C_proof = 2/3)", elapsed, 30)


def _adversarial_vectors(rng, count):
    for i in range(count):
        p = int(rng.integers(4, 40))
        kind = i % 5
        if kind == 0:
            h = rng.normal(size=p)
        elif kind == 1:  # heavy ties
            h = np.round(rng.normal(size=p), 1)
        elif kind == 2:  # sparse
            h = rng.normal(size=p) * (rng.random(size=p) < 0.25)
        elif kind == 3:  # signed constant magnitude (all-tied)
            h = rng.choice([-1.0, 1.0], size=p)
        else:  # heavy-tailed
            h = rng.standard_cauchy(size=p)
        yield p, h


def test_criterion_05_block_norm_inequality():
    start = time.perf_counter()
    rng = np.random.default_rng(55)
    checked = 0
    for p, h in _adversarial_vectors(rng, 10000):
        s0 = int(rng.integers(1, 6))
        t0 = design.sample_support(p, int(rng.integers(1, p)), int(rng.integers(0, 2 ** 62)))
        chk = certify.block_norm_inequality(h, t0, s0)
        assert chk.lhs <= chk.rhs + 1e-12
        checked += 1
    elapsed = time.perf_counter() - start
    assert checked == 10000
    assert elapsed < 10.0
    report(5, "block l2/l1 inequality on adversarial vectors", elapsed, 10,
           "10000 vectors, zero violations at 1e-12")


def test_criterion_06_nsp_exact_vs_sampled_vs_grid():
    start = time.perf_counter()
    rng = np.random.default_rng(66)
    instances = 0
    grid_checked = 0
    while instances < 50:
        p = int(rng.integers(8, 13))
        d = int(rng.integers(1, 4))
        x = design.from_raw(rng.normal(size=(p - d, p)), normalize=True)
        t0 = design.sample_support(p, int(rng.integers(1, 4)), instances)
        exact = certify.nsp_worst_ratio_exact(x, t0)
        sampled = certify.nsp_worst_ratio_sampled(x, t0, 500, instances)
        if math.isinf(exact):
            continue
        assert sampled <= exact + 1e-9
        if d == 2:
            kernel = linalg.kernel_basis(x.data)
            theta = np.linspace(0.0, math.pi, 10 ** 6 + 1)[:-1]
            z = np.vstack([np.cos(theta), np.sin(theta)])
            best_grid = 0.0
            rows = t0.zero_based()
            comp = t0.complement_zero_based()
            for lo in range(0, theta.shape[0], 200000):
                h = kernel @ z[:, lo:lo + 200000]
                num = np.sqrt(np.sum(h[rows, :] ** 2, axis=0))
                den = np.sum(np.abs(h[comp, :]), axis=0)
                best_grid = max(best_grid, float(np.max(num / den)))
            assert exact >= best_grid - 1e-6
            grid_checked += 1
        instances += 1
    elapsed = time.perf_counter() - start
    assert elapsed < 120.0
    report(6, "kernel ratio: sampled <= exact, exact >= dense grid", elapsed, 120,
           f"50 instances, {grid_checked} dense-grid comparisons at 1e-6")


def test_criterion_07_nsp_implies_exact_recovery():
    start = time.perf_counter()
    rng = np.random.default_rng(77)
    certified = 0
    attempts = 0
    while certified < 20 and attempts < 200:
        attempts += 1
        p = int(rng.integers(9, 13))
        d = int(rng.integers(1, 4))
        x = design.from_raw(rng.normal(size=(p - d, p)), normalize=True)
        s0 = int(rng.integers(1, 3))
        t0 = design.sample_support(p, s0, attempts)
        ratio = certify.nsp_worst_ratio_exact(x, t0)
        if not ratio * math.sqrt(s0) < 1.0 - 1e-9:
            continue
        certified += 1
        exp = recovery.recovery_experiment(x, t0, 100, attempts)
        assert exp.success_rate == 1.0, (attempts, ratio, exp)
        assert exp.ambiguous == 0
        assert exp.max_linf_error <= 1e-6
    assert certified >= 20

    # The ratio-one instance must flag ambiguity, not guaranteed recovery.
    x_tie = design.from_raw(np.array([[1.0, 1.0]]))
    t_tie = design.support_set([1], 2)
    assert certify.nsp_worst_ratio_exact(x_tie, t_tie) == pytest.approx(1.0, abs=1e-12)
    tie_exp = recovery.recovery_experiment(x_tie, t_tie, 25, 5)
    assert tie_exp.ambiguous > 0
    assert tie_exp.success_rate < 1.0
    elapsed = time.perf_counter() - start
    assert elapsed < 120.0
    report(7, "strict NSP certificate forces exact recovery", elapsed, 120,
           f"{certified} certified supports x 100 trials, ambiguity flagged on the tied instance")


def test_criterion_08_weak_rip_bound_consistency():
    start = time.perf_counter()
    # Admissible desk-scale configuration: orthonormal columns at p = 2048.
    x = design.from_raw(np.eye(2048))
    s0, r, alpha, trials = 4, 0.5, 1.0, 5000
    conds = certify.weak_rip_conditions(x, s0, r, alpha)
    assert conds.mu_ok and conds.s0_ok
    assert conds.bound < 1.0 and not conds.vacuous
    rep = certify.weak_rip_estimate(x, s0, r, alpha, trials, 13)
    slack = 3.0 * math.sqrt(rep.theoretical_bound / trials)
    assert rep.empirical_failure_rate <= rep.theoretical_bound + slack

    # Regime detection: desk-scale Gaussian designs are inadmissible or vacuous.
    xg = design.generate("gaussian", 32, 128, 8)
    inadmissible = certify.weak_rip_conditions(xg, 4, 0.25, 2.0)
    assert not (inadmissible.mu_ok and inadmissible.s0_ok)
    vacuous = certify.weak_rip_conditions(xg, 4, 0.25, 1.0)
    assert vacuous.vacuous and vacuous.bound == 1.0
    elapsed = time.perf_counter() - start
    assert elapsed < 180.0
    report(8, "concentration bound consistency + regime detection", elapsed, 180,
           f"admissible: rate {rep.empirical_failure_rate:.4f} <= bound {rep.theoretical_bound:.4f} + {slack:.4f}")


def test_criterion_09_constants_regression_grid():
    start = time.perf_counter()
    p, opnorm = 256, 1.0
    grid = [(s0, mu, alpha)
            for s0 in (1, 2, 3, 4)
            for mu in (0.0, 1e-4, 1e-3)
            for alpha in (1.0, 2.0)]
    fields = ("eps_min", "eps_max", "eps_min_alt", "eps_max_alt",
              "C_stated", "C_stated_upper", "C_proof", "pi")
    for s0, mu, alpha in grid:
        consts = certify.weak_nsp_constants_from_params(p, mu, opnorm, s0, alpha)
        hp = oracles.hp_weak_nsp_constants(s0, mu, p, alpha, opnorm)
        for field in fields:
            assert oracles.rel_close(getattr(consts, field), hp[field]), (s0, mu, alpha, field)
        assert oracles.rel_close(consts.s0_threshold, hp["s0_threshold"])
        assert oracles.rel_close(consts.mu_thresholds[2], hp["mu_threshold_logp"])
        t1, t2 = oracles.hp_mu_thresholds(s0)
        assert oracles.rel_close(consts.mu_thresholds[0], t1)
        assert oracles.rel_close(consts.mu_thresholds[1], t2)
        # Growth-parametrization constants against the same oracle.
        if mu <= min(float(t1), float(t2)):
            growth = perturbation.standard_growth_bounds(s0, mu, 1.25, 0.75)
            gmin, gmax, gml = oracles.hp_growth_eps(s0, mu, 1.25)
            assert oracles.rel_close(growth.eps_min, gmin)
            assert oracles.rel_close(growth.eps_max, gmax)
            assert oracles.rel_close(growth.eps_max_general, gml)
            # Published-variant identity: the headline eps_max equals the
            # lemma-substituted growth value at the window edge 5/4.
            assert oracles.rel_close(consts.eps_max, growth.eps_max_general * 4.0 * 0.25)
            assert oracles.rel_close(consts.eps_max_alt, growth.eps_max * 4.0 * 0.25)
    elapsed = time.perf_counter() - start
    assert elapsed < 5.0
    report(9, "constants regression vs 60-digit re-evaluation", elapsed, 5,
           f"{len(grid)} grid points x {len(fields) + 7} quantities at 1e-12 relative")


def test_criterion_10_cli_determinism(tmp_path):
    import contextlib
    import io

    start = time.perf_counter()
    mat = tmp_path / "design.csv"
    with contextlib.redirect_stdout(io.StringIO()):
        assert cli.main(["generate", "gaussian:10:20:3", "--out", str(mat),
                         "--no-timestamp"]) == 0
        first = mat.read_bytes()
        assert cli.main(["generate", "gaussian:10:20:3", "--out", str(mat),
                         "--no-timestamp"]) == 0
    assert mat.read_bytes() == first

    commands = {
        "coherence": ["coherence", "--input", str(mat)],
        "weak-rip": ["weak-rip", "--input", str(mat), "--s0", "2", "--r", "0.5",
                     "--alpha", "1", "--trials", "30", "--seed", "4"],
        "constants": ["constants", "--s0", "2", "--mu", "0.001", "--alpha", "2",
                      "--p", "256", "--c0", "0.05", "--delta", "0.25"],
        "weak-nsp": ["weak-nsp", "--generate", "gaussian:8:10:2", "--s0", "2",
                     "--C", "0.9", "--trials", "6", "--seed", "3"],
        "perturb-verify": ["perturb-verify", "--input", str(mat), "--s0", "2,3",
                           "--trials", "15", "--seed", "6"],
        "recover-experiment": ["recover", "--input", str(mat), "--support", "1,7",
                               "--trials", "10", "--seed", "9"],
    }
    for name, argv in commands.items():
        out_a = tmp_path / f"{name}-a.json"
        out_b = tmp_path / f"{name}-b.json"
        assert cli.main(argv + ["--out", str(out_a), "--no-timestamp"]) == 0, name
        assert cli.main(argv + ["--out", str(out_b), "--no-timestamp"]) == 0, name
        bytes_a = out_a.read_bytes()
        bytes_b = out_b.read_bytes()
        # The reports echo their own output path; neutralize just that field.
        bytes_a = bytes_a.replace(str(out_a).encode(), b"OUT")
        bytes_b = bytes_b.replace(str(out_b).encode(), b"OUT")
        assert bytes_a == bytes_b, f"{name} report not reproducible"
    elapsed = time.perf_counter() - start
    assert elapsed < 60.0
    report(10, "CLI subcommands byte-reproducible under fixed seeds", elapsed, 60,
           f"{len(commands) + 1} commands run twice")
