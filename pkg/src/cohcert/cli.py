"""Command-line front door.

Subcommands: coherence, weak-rip, constants, weak-nsp, perturb-verify,
recover, generate. Every run emits a versioned JSON report (stdout or
--out); per-sample data goes to a CSV series via --series, and --plot
renders a matplotlib figure next to it. Reports are byte-reproducible for
a fixed seed once --no-timestamp suppresses the clock fields.

Exit codes: 0 success (a failed certificate is data, not an error),
2 validation errors, 3 regime/admissibility errors (the failed inequality
is printed), 4 capacity errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
import time
from datetime import datetime, timezone

import numpy as np

from . import __version__, certify, design, perturbation, recovery
from .errors import (
    AdmissibilityError,
    CapacityError,
    CohcertError,
    RegimeError,
    ValidationError,
)

SCHEMA_VERSION = 1


def _jsonable(obj):
    """Recursively convert report objects to JSON-serializable values."""
    if isinstance(obj, design.SupportSet):
        return list(obj.indices)
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {k: _jsonable(v) for k, v in dataclasses.asdict(obj).items()}
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    return obj


def emit_series(rows, fieldnames, path) -> None:
    """CSV with a header row; floats keep full round-trip precision."""
    def fmt(v):
        if isinstance(v, (float, np.floating)):
            return repr(float(v))
        if isinstance(v, (tuple, list)):
            return " ".join(str(i) for i in v)
        return str(v)

    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(fieldnames) + "\n")
        for row in rows:
            fh.write(",".join(fmt(row[name]) for name in fieldnames) + "\n")


def _load_design(args) -> design.DesignMatrix:
    if getattr(args, "input", None) and getattr(args, "gen", None):
        raise ValidationError("pass either --input or --generate, not both")
    if getattr(args, "input", None):
        m = design.read_matrix_csv(args.input)
        return design.from_raw(m, normalize=bool(getattr(args, "normalize", False)))
    if getattr(args, "gen", None):
        kind, n, p, seed = _parse_generator_spec(args.gen)
        return design.generate(kind, n, p, seed)
    raise ValidationError("a design matrix is required: --input FILE or --generate kind:n:p:seed")


def _parse_generator_spec(spec: str):
    parts = spec.split(":")
    if len(parts) != 4:
        raise ValidationError("generator spec must be kind:n:p:seed")
    kind = parts[0]
    try:
        n, p, seed = int(parts[1]), int(parts[2]), int(parts[3])
    except ValueError as exc:
        raise ValidationError(f"bad generator spec {spec!r}: {exc}") from exc
    return kind, n, p, seed


def _parse_support(text: str, p: int) -> design.SupportSet:
    try:
        indices = [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise ValidationError(f"bad support list {text!r}: {exc}") from exc
    if not indices:
        raise ValidationError("empty support list")
    return design.support_set(indices, p)


def _envelope(args, payload: dict, started: float) -> dict:
    config = {k: v for k, v in vars(args).items() if k not in ("func",) and v is not None}
    doc = {
        "schema_version": SCHEMA_VERSION,
        "tool": "cohcert",
        "version": __version__,
        "command": args.command,
        "config": _jsonable(config),
        "seed": getattr(args, "seed", None),
        "report": _jsonable(payload),
    }
    if not args.no_timestamp:
        doc["timestamp"] = datetime.now(timezone.utc).isoformat()
        doc["wall_time_s"] = time.perf_counter() - started
    return doc


def _write_report(doc: dict, out_path) -> None:
    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- commands


def _cmd_coherence(args):
    x = _load_design(args)
    mu = x.mu if x.mu is not None else 0.0
    s_max = min(x.p, args.s_max)
    table = [{"s": s, "bound": design.gershgorin_bound(mu, s)} for s in range(1, s_max + 1)]
    payload = {"n": x.n, "p": x.p, "mu": mu, "opnorm": x.opnorm, "gershgorin": table}
    series = (table, ["s", "bound"])
    plot = None
    if args.plot:
        from . import plots

        plot = lambda: plots.gershgorin_curve([r["s"] for r in table],
                                              [r["bound"] for r in table], args.plot)
    return payload, series, plot


def _cmd_weak_rip(args):
    x = _load_design(args)
    report = certify.weak_rip_estimate(x, args.s0, args.r, args.alpha,
                                       args.trials, args.seed,
                                       exhaustive=args.exhaustive)
    payload = {k: v for k, v in dataclasses.asdict(report).items() if k != "deviations"}
    payload["n"] = x.n
    payload["p"] = x.p
    payload["mu"] = x.mu
    payload["opnorm"] = x.opnorm
    if args.r_sweep:
        # The deviations do not depend on r: one pass serves every threshold.
        rs = sorted(float(tok) for tok in args.r_sweep.split(",") if tok.strip())
        if any(not 0.0 < r < 1.0 for r in rs):
            raise ValidationError("every swept r must lie in (0, 1)")
        n_trials = len(report.deviations)
        rows = []
        for r in rs:
            failures = sum(d >= r for d in report.deviations)
            rows.append({"r": r, "failures": failures,
                         "failure_rate": failures / n_trials})
        payload["r_sweep"] = rows
        series = (rows, ["r", "failures", "failure_rate"])
    else:
        rows = [{"trial": i, "gram_deviation": d, "failure": int(d >= args.r)}
                for i, d in enumerate(report.deviations)]
        series = (rows, ["trial", "gram_deviation", "failure"])
    plot = None
    if args.plot:
        from . import plots

        if args.r_sweep:
            plot = lambda: plots.failure_rate_curve(
                [row["r"] for row in rows], [row["failure_rate"] for row in rows],
                report.theoretical_bound, args.plot)
        else:
            plot = lambda: plots.gram_deviation_histogram(
                report.deviations, args.r, report.theoretical_bound, args.plot)
    return payload, series, plot


def _cmd_constants(args):
    if args.input or args.gen:
        x = _load_design(args)
        consts = certify.weak_nsp_constants(x, args.s0, args.alpha)
    else:
        if args.p is None or args.mu is None:
            raise ValidationError("constants needs a design (--input/--generate) or --mu with --p")
        consts = certify.weak_nsp_constants_from_params(args.p, args.mu, args.opnorm,
                                                        args.s0, args.alpha)
    payload = {"weak_nsp_constants": consts}
    try:
        growth = perturbation.standard_growth_bounds(consts.s0, consts.mu,
                                                     args.lam1_tilde, args.lams0_tilde)
        payload["growth_bounds"] = growth
    except (AdmissibilityError, RegimeError) as exc:
        payload["growth_bounds"] = {"not_evaluated": str(exc),
                                    "conditions": [list(c) for c in exc.conditions]}
    if args.c0 is not None:
        payload["coherence_scaling"] = certify.coherence_scaling_constants(
            args.s0, args.c0, args.lam1_tilde)
    if args.delta is not None:
        payload["rip_to_nsp_constant"] = certify.rip_to_nsp_constant(args.delta)
    return payload, None, None


def _cmd_weak_nsp(args):
    x = _load_design(args)
    result = certify.weak_nsp_certify(x, args.s0, args.C, args.trials, args.seed,
                                      method=args.method, samples=args.samples,
                                      d_max=args.d_max, exhaustive=args.exhaustive)
    payload = {
        "pass_rate": result.pass_rate,
        "s0": result.s0,
        "C": result.C,
        "threshold": result.C / math.sqrt(result.s0),
        "method": result.method,
        "exhaustive": result.exhaustive,
        "trials": len(result.certificates),
        "certificates": list(result.certificates),
    }
    rows = [{"trial": i, "support": c.t0.indices, "worst_ratio": c.worst_ratio,
             "holds": int(c.holds)} for i, c in enumerate(result.certificates)]
    series = (rows, ["trial", "support", "worst_ratio", "holds"])
    plot = None
    if args.plot:
        from . import plots

        ratios = [c.worst_ratio for c in result.certificates]
        threshold = result.C / math.sqrt(result.s0)
        plot = lambda: plots.nsp_ratio_histogram(ratios, threshold, args.plot)
    return payload, series, plot


def _cmd_perturb_verify(args):
    x = _load_design(args)
    s0_values = [int(tok) for tok in args.s0_list.split(",") if tok.strip()]
    summary = perturbation.append_bounds_sweep(x, s0_values, args.trials, args.seed,
                                               keep_records=True)
    payload = {
        "trials": summary.trials,
        "min_checked": summary.min_checked,
        "min_violations": summary.min_violations,
        "max_checked": summary.max_checked,
        "max_violations": summary.max_violations,
        "skipped_min": summary.skipped_min,
        "skipped_max": summary.skipped_max,
    }
    rows = [{
        "support": r.support.indices, "j": r.j,
        "lam1": r.lam1, "lam_s0": r.lam_s0,
        "exact_top": r.exact_top, "quad_max": r.quad_max if r.quad_max is not None else "",
        "exact_appended_min": r.exact_appended_min,
        "quad_min": r.quad_min if r.quad_min is not None else "",
        "min_checked": int(r.min_checked), "max_checked": int(r.max_checked),
        "min_ok": "" if r.min_ok is None else int(r.min_ok),
        "max_ok": "" if r.max_ok is None else int(r.max_ok),
    } for r in summary.records]
    series = (rows, ["support", "j", "lam1", "lam_s0", "exact_top", "quad_max",
                     "exact_appended_min", "quad_min", "min_checked", "max_checked",
                     "min_ok", "max_ok"])
    plot = None
    if args.plot:
        from . import plots

        plot = lambda: plots.append_bounds_scatter(summary.records, args.plot)
    return payload, series, plot


def _cmd_recover(args):
    x = _load_design(args)
    if args.support:
        t0 = _parse_support(args.support, x.p)
        exp = recovery.recovery_experiment(x, t0, args.trials, args.seed)
        payload = {
            "mode": "experiment",
            "support": t0,
            "success_rate": exp.success_rate,
            "max_linf_error": exp.max_linf_error,
            "trials": exp.trials,
            "successes": exp.successes,
            "ambiguous": exp.ambiguous,
            "failures": exp.failures,
        }
        rows = [{"trial": i, "status": s, "linf_error": e}
                for i, (s, e) in enumerate(zip(exp.statuses, exp.errors))]
        series = (rows, ["trial", "status", "linf_error"])
        plot = None
        if args.plot:
            from . import plots

            plot = lambda: plots.recovery_error_plot(exp.errors, recovery.RECOVERY_TOL, args.plot)
        return payload, series, plot
    if args.y:
        y = design.read_matrix_csv(args.y).ravel()
        res = recovery.basis_pursuit(x, y)
        payload = {
            "mode": "single",
            "status": res.status,
            "objective_value": res.objective_value,
            "residual_norm": res.residual_norm,
            "alternative_optima": res.alternative_optima,
            "beta_hat": res.beta_hat,
        }
        return payload, None, None
    raise ValidationError("recover needs --support (experiment) or --y (single solve)")


def _cmd_generate(args):
    kind, n, p, seed = _parse_generator_spec(args.spec)
    x = design.generate(kind, n, p, seed)
    if not args.out:
        raise ValidationError("generate requires --out for the matrix CSV")
    design.write_matrix_csv(x.data, args.out)
    payload = {"path": args.out, "kind": kind, "n": n, "p": p,
               "generator_seed": seed, "mu": x.mu, "opnorm": x.opnorm}
    return payload, None, None


# ----------------------------------------------------------------- parser


def _add_design_args(sp, required=True):
    sp.add_argument("--input", help="design matrix CSV (rows, comma separated)")
    sp.add_argument("--generate", dest="gen", metavar="KIND:N:P:SEED",
                    help="generate a design instead of reading one")
    sp.add_argument("--normalize", action="store_true",
                    help="rescale input columns to unit norm")


def _add_common_output(sp):
    sp.add_argument("--out", help="write the JSON report here instead of stdout")
    sp.add_argument("--series", help="write per-sample CSV series here")
    sp.add_argument("--plot", help="render a PNG figure here")
    sp.add_argument("--no-timestamp", action="store_true",
                    help="omit clock fields for byte-reproducible reports")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="cohcert",
        description="Certify coherence, weak-RIP, weak-NSP and basis-pursuit "
                    "recovery for a compressed-sensing design matrix.")
    ap.add_argument("--version", action="version", version=f"cohcert {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("coherence", help="coherence, operator norm, Gershgorin table")
    _add_design_args(sp)
    sp.add_argument("--s-max", type=int, default=10, help="largest support size in the table")
    sp.add_argument("--seed", type=int, default=0)
    _add_common_output(sp)
    sp.set_defaults(func=_cmd_coherence)

    sp = sub.add_parser("weak-rip", help="Monte-Carlo submatrix concentration report")
    _add_design_args(sp)
    sp.add_argument("--s0", type=int, required=True)
    sp.add_argument("--r", type=float, required=True)
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--exhaustive", action="store_true",
                    help="enumerate all supports when feasible")
    sp.add_argument("--r-sweep", metavar="R1,R2,...",
                    help="emit failure rates over several thresholds instead of per-trial rows")
    _add_common_output(sp)
    sp.set_defaults(func=_cmd_weak_rip)

    sp = sub.add_parser("constants", help="weak-NSP constants, all formula variants")
    _add_design_args(sp)
    sp.add_argument("--s0", type=int, required=True)
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--mu", type=float, help="coherence (parameter mode, with --p)")
    sp.add_argument("--p", type=int, help="number of columns (parameter mode)")
    sp.add_argument("--opnorm", type=float, default=1.0,
                    help="operator norm of the design (parameter mode)")
    sp.add_argument("--lam1-tilde", type=float, default=1.25)
    sp.add_argument("--lams0-tilde", type=float, default=0.75)
    sp.add_argument("--c0", type=float, help="also evaluate the c0-scaling variant")
    sp.add_argument("--delta", type=float, help="also evaluate sqrt(2)(1+d)/(1-d)")
    sp.add_argument("--seed", type=int, default=0)
    _add_common_output(sp)
    sp.set_defaults(func=_cmd_constants)

    sp = sub.add_parser("weak-nsp", help="null-space property certificates over supports")
    _add_design_args(sp)
    sp.add_argument("--s0", type=int, required=True)
    sp.add_argument("--C", type=float, required=True)
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--method", choices=("exact", "sampled"), default="exact")
    sp.add_argument("--samples", type=int, default=2048,
                    help="kernel directions per support (sampled method)")
    sp.add_argument("--d-max", type=int, default=5,
                    help="largest kernel dimension the exact method accepts")
    sp.add_argument("--exhaustive", action="store_true")
    _add_common_output(sp)
    sp.set_defaults(func=_cmd_weak_nsp)

    sp = sub.add_parser("perturb-verify", help="check append bounds against the eigensolver")
    _add_design_args(sp)
    sp.add_argument("--s0", dest="s0_list", default="2,3,4",
                    help="comma list of support sizes to draw from")
    sp.add_argument("--trials", type=int, default=200)
    sp.add_argument("--seed", type=int, default=0)
    _add_common_output(sp)
    sp.set_defaults(func=_cmd_perturb_verify)

    sp = sub.add_parser("recover", help="basis pursuit: single solve or recovery experiment")
    _add_design_args(sp)
    sp.add_argument("--support", help="1-based support indices, e.g. 1,4,7 (experiment mode)")
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--y", help="CSV file with the measurement vector (single-solve mode)")
    _add_common_output(sp)
    sp.set_defaults(func=_cmd_recover)

    sp = sub.add_parser("generate", help="write a seeded design matrix as CSV")
    sp.add_argument("spec", metavar="KIND:N:P:SEED",
                    help=f"kind is one of {', '.join(design.GENERATOR_KINDS)}")
    sp.add_argument("--seed", type=int, default=0, help="unused; generator seed lives in the spec")
    _add_common_output(sp)
    sp.set_defaults(func=_cmd_generate)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    started = time.perf_counter()
    try:
        payload, series, plot = args.func(args)
        if getattr(args, "series", None):
            if series is None:
                raise ValidationError(f"{args.command} has no per-sample series")
            rows, fieldnames = series
            emit_series(rows, fieldnames, args.series)
        if getattr(args, "plot", None):
            if plot is None:
                raise ValidationError(f"{args.command} has no figure")
            plot()
        doc = _envelope(args, payload, started)
        _write_report(doc, args.out if args.command != "generate" else None)
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return 4
    except (RegimeError, AdmissibilityError) as exc:
        print(f"regime error: {exc.detail()}", file=sys.stderr)
        return 3
    except (ValidationError, CohcertError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
