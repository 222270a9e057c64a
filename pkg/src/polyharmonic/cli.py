"""Command-line interface: ``polyharmonic <command> ...``.

Exit codes: 0 ok, 2 invalid parameters, 3 sweep agreement failure,
4 numeric failure (step underflow without blow-up).
"""
from __future__ import annotations

import argparse
import csv
import io as _stdio
import itertools
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import certificates, classifier, radial_calculus, shooting
from .core import ProblemSpec, singular_threshold, sobolev_exponent
from .io import dumps, write_profile_csv
from .profile import OutcomeKind

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DISAGREE = 3
EXIT_NUMERIC = 4

JOBS_ENV = "POLYHARMONIC_JOBS"


class UsageError(Exception):
    pass


def _parse_sign(text):
    t = str(text).strip()
    if t in ("+", "+1", "1", "plus"):
        return 1
    if t in ("-", "-1", "minus"):
        return -1
    raise argparse.ArgumentTypeError(f"sign must be + or -, got {text!r}")


def _spec_from(args):
    try:
        return ProblemSpec(args.n, args.m, args.alpha, args.sign)
    except (ValueError, TypeError) as exc:
        raise UsageError(str(exc)) from None


def _add_spec_args(p, sign_default=None, alpha_required=True):
    p.add_argument("--n", type=int, required=True, help="space dimension")
    p.add_argument("--m", type=int, required=True, help="polyharmonic order")
    p.add_argument("--alpha", required=alpha_required,
                   help='exponent; "p/q" or an integer is exact, decimals are flagged inexact')
    p.add_argument("--sign", type=_parse_sign, default=sign_default,
                   required=sign_default is None, help="+ or -")


def _emit(text, path=None):
    if path:
        Path(path).write_text(text + "\n", encoding="utf-8")
    print(text)


def _thresholds(n, m):
    return {"p_s": sobolev_exponent(n, m).to_json(),
            "singular_threshold": singular_threshold(m).to_json()}


# ---------------------------------------------------------------------------
# classify / table


def classify_payload(spec):
    pos = classifier.exists_positive(spec)
    out = {
        "spec": spec.to_json(),
        "region": classifier.region_label(spec),
        "exists_positive": pos.exists,
        "citation_positive": str(pos.citation),
        "condition_positive": pos.condition_text,
        "exists_nonneg": None,
        "citation_nonneg": None,
        "positivity_gap": None,
        "citation_gap": None,
        "thresholds": _thresholds(spec.n, spec.m),
    }
    if spec.alpha_value >= 0:
        nn = classifier.exists_nonneg_nontrivial(spec)
        gap = classifier.positivity_gap_verdict(spec)
        out.update(exists_nonneg=nn.exists, citation_nonneg=str(nn.citation),
                   positivity_gap=gap.exists, citation_gap=str(gap.citation))
    out["citations"] = [c for c in (out["citation_positive"], out["citation_nonneg"],
                                    out["citation_gap"]) if c]
    return out


def cmd_classify(args):
    spec = _spec_from(args)
    _emit(dumps(classify_payload(spec), "classify"), args.out)
    return EXIT_OK


def _yes_no(v):
    if v is None:
        return "-"
    return "YES" if v else "NO"


TABLE_COLUMNS = ["interval", "exists_positive", "citation_positive", "exists_nonneg",
                 "citation_nonneg", "positivity_gap"]


def render_table(m, n, sign):
    cells = classifier.existence_table(m, n, sign)
    op = "-" if sign < 0 else "+"
    th = _thresholds(n, m)
    lines = [f"Delta^{m} u = {op}u^alpha in R^{n}   p_s = {th['p_s']}   "
             f"-1/(m-1) = {th['singular_threshold']}"]
    rows = [("alpha in", "u > 0", "", "u >= 0, u != 0", "", "vanishing")]
    for c in cells:
        rows.append((c.interval(), _yes_no(c.positive.exists), str(c.positive.citation),
                     _yes_no(None if c.nonneg is None else c.nonneg.exists),
                     "" if c.nonneg is None else str(c.nonneg.citation), _yes_no(c.gap)))
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    for k, r in enumerate(rows):
        lines.append("  ".join(x.ljust(w) for x, w in zip(r, widths)).rstrip())
        if k == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines), cells


def table_csv(cells):
    buf = _stdio.StringIO()
    w = csv.writer(buf)
    w.writerow(TABLE_COLUMNS)
    for c in cells:
        d = c.to_json()
        w.writerow(["" if d[k] is None else d[k] for k in TABLE_COLUMNS])
    return buf.getvalue()


def cmd_table(args):
    if args.n < 1 or args.m < 1:
        raise UsageError("n and m must be positive")
    text, cells = render_table(args.m, args.n, args.sign)
    print(text)
    if args.csv:
        Path(args.csv).write_text(table_csv(cells), encoding="utf-8")
    return EXIT_OK


# ---------------------------------------------------------------------------
# shoot / search


def _init_values(args, m):
    init = list(args.init) if args.init else [1.0]
    if len(init) > m:
        raise UsageError(f"--init has {len(init)} values but m={m}")
    return init + [0.0] * (m - len(init))


def _options(args):
    return shooting.ShootOptions(tol=args.tol, blowup=args.blowup,
                                 continue_past_zero=getattr(args, "continue_past_zero", False))


def cmd_shoot(args):
    spec = _spec_from(args)
    init = _init_values(args, spec.m)
    try:
        profile, outcome = shooting.solve_ivp(spec, init, args.rmax, options=_options(args))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.out:
        write_profile_csv(args.out, profile)
    payload = {
        "spec": spec.to_json(),
        "init": init,
        "r_max": args.rmax,
        "outcome": outcome.to_json(),
        "nodes": int(profile.r.size),
        "profile_csv": args.out,
        "meta": profile.meta,
    }
    _emit(dumps(payload, "shoot"), args.json)
    return EXIT_NUMERIC if outcome.kind == OutcomeKind.STEP_UNDERFLOW else EXIT_OK


def cmd_search(args):
    spec = _spec_from(args)
    init = _init_values(args, spec.m)
    if not 0 <= args.vary < spec.m:
        raise UsageError(f"--vary must be in [0, {spec.m - 1}]")
    try:
        res = shooting.shoot_search(spec, init, args.vary, tuple(args.bracket), args.rtarget,
                                    resolution=args.resolution, tol=args.tol,
                                    options=_options(args))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    files = {}
    if args.out_prefix:
        files = {"lo": f"{args.out_prefix}_lo.csv", "hi": f"{args.out_prefix}_hi.csv"}
        write_profile_csv(files["lo"], res.profile_lo)
        write_profile_csv(files["hi"], res.profile_hi)
    payload = {"spec": spec.to_json(), "init_template": init, "vary_index": args.vary,
               "r_target": args.rtarget, **res.to_json(), "profile_csv": files}
    _emit(dumps(payload, "search"), args.json)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args):
    if args.alpha is None:
        if args.family == "power":
            raise UsageError("--alpha is required for the power family")
        if args.n < 1 or args.m < 1 or args.n <= 2 * args.m:
            raise UsageError("the bubble needs n > 2m")
        args.alpha = str(sobolev_exponent(args.n, args.m))
    if args.sign == 0:
        args.sign = 1 if args.family == "power" else (-1) ** args.m
    if args.threshold is None:
        args.threshold = 1e-10 if args.family == "power" else 1e-6
    spec = _spec_from(args)
    grid = np.linspace(args.rmin, args.rmax, args.points)
    if args.family == "power":
        try:
            form = radial_calculus.power_family(spec.n, spec.m, spec.alpha_value)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        rep = radial_calculus.residual(form, spec, grid)
        payload = {
            "family": "power",
            "spec": spec.to_json(),
            "params": form.params,
            "residual": rep.to_json(),
            "passed": rep.max_residual <= args.threshold,
        }
    else:
        try:
            form = radial_calculus.bubble_family(spec.n, spec.m, args.lam)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        er = radial_calculus.eigen_ratio(spec.n, spec.m, args.lam, grid)
        expected = radial_calculus.bubble_eigenvalue(spec.n, spec.m)
        payload = {
            "family": "bubble",
            "spec": spec.to_json(),
            "lambda": args.lam,
            "eigen_ratio_mean": er.mean,
            "eigen_ratio_spread": er.spread,
            "expected_constant": expected,
            "passed": er.spread < args.threshold,
        }
    payload["grid"] = {"rmin": args.rmin, "rmax": args.rmax, "points": args.points}
    _emit(dumps(payload, "verify"), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# certificates


def cmd_certificate(args):
    try:
        if args.which == "moser":
            sched = certificates.moser_schedule(args.n, args.m, args.alpha)
            checks = [certificates.sublinear_absorption_check(args.n, args.m, args.alpha, h)
                      for h in range(sched.j_star + 1)]
            payload = {**sched.to_json(), "absorption": [c.to_json() for c in checks]}
        else:
            payload = certificates.decay_certificate(args.n, args.m, args.alpha).to_json()
    except (ValueError, TypeError) as exc:
        raise UsageError(str(exc)) from None
    _emit(dumps(payload, "certificate"), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# sweep

SWEEP_COLUMNS = ["sign", "n", "m", "alpha", "alpha_exact", "region", "exists_positive",
                 "citation_positive", "exists_nonneg", "positivity_gap", "outcome", "r_star",
                 "evidence", "agreement"]


def _blowup_mandatory(spec, init):
    return spec.sign > 0 and spec.alpha > 1 and all(a >= 0 for a in init)


def agreement(spec, verdict_positive, init, outcome):
    """``"agree"``, ``"disagree"`` or ``"inconclusive"`` for one run.

    A run is at odds with the classifier when it survives the horizon
    although no positive solution exists, or survives in a regime where
    non-negative data must blow up.
    """
    survived = outcome.kind == OutcomeKind.SURVIVED
    mandatory = _blowup_mandatory(spec, init)
    if survived and (not verdict_positive or mandatory):
        return "disagree"
    if mandatory and outcome.kind == OutcomeKind.BLOW_UP:
        return "agree"
    if survived and verdict_positive:
        return "agree"
    if not verdict_positive and outcome.kind in (OutcomeKind.ZERO_TOUCH, OutcomeKind.BLOW_UP):
        return "agree"
    return "inconclusive"


def sweep_point(task):
    """One sweep row; a top-level function so worker processes can import it."""
    sign, n, m, alpha, init, shoot, rmax, tol = task
    spec = ProblemSpec(n, m, alpha, sign)
    info = classify_payload(spec)
    row = {
        "sign": "+" if sign > 0 else "-",
        "n": n,
        "m": m,
        "alpha": spec.alpha_display(),
        "alpha_exact": spec.is_exact,
        "region": info["region"],
        "exists_positive": info["exists_positive"],
        "citation_positive": info["citation_positive"],
        "exists_nonneg": info["exists_nonneg"],
        "positivity_gap": info["positivity_gap"],
        "outcome": "",
        "r_star": "",
        "evidence": "",
        "agreement": "",
    }
    if shoot:
        data = (list(init) + [0.0] * m)[:m]
        _, outcome = shooting.solve_ivp(spec, data, rmax, tol=tol)
        row.update(outcome=str(outcome.kind), r_star=f"{outcome.r_star:.10g}",
                   evidence=f"evidence: {outcome} from init {data}",
                   agreement=agreement(spec, info["exists_positive"], data, outcome))
    return row


def _default_jobs():
    env = os.environ.get(JOBS_ENV)
    if env:
        try:
            jobs = int(env)
        except ValueError:
            raise UsageError(f"{JOBS_ENV} must be an integer, got {env!r}") from None
        return max(1, jobs)
    return 1


def _csv_list(text, conv):
    return [conv(x) for x in str(text).split(",") if x.strip()]


def cmd_sweep(args):
    try:
        ns = _csv_list(args.ns, int)
        ms = _csv_list(args.ms, int)
        alphas = _csv_list(args.alphas, str.strip)
        signs = _csv_list(args.signs, _parse_sign)
        for n, m, a in itertools.product(ns, ms, alphas):
            ProblemSpec(n, m, a)
    except (ValueError, TypeError, argparse.ArgumentTypeError) as exc:
        raise UsageError(str(exc)) from None
    jobs = args.jobs if args.jobs is not None else _default_jobs()
    if jobs < 1:
        raise UsageError("--jobs must be positive")
    init = list(args.init) if args.init else [1.0]
    tasks = [(s, n, m, a, init, args.shoot, args.rmax, args.tol)
             for s, n, m, a in itertools.product(signs, ns, ms, alphas)]
    if jobs == 1 or len(tasks) < 2:
        rows = [sweep_point(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(sweep_point, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    buf = _stdio.StringIO()
    w = csv.DictWriter(buf, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: ("" if r[k] is None else r[k]) for k in SWEEP_COLUMNS})
    if args.out:
        Path(args.out).write_text(buf.getvalue(), encoding="utf-8")
    else:
        sys.stdout.write(buf.getvalue())
    disagree = sum(r["agreement"] == "disagree" for r in rows)
    underflow = sum(r["outcome"] == str(OutcomeKind.STEP_UNDERFLOW) for r in rows)
    print(f"sweep: {len(rows)} points, {disagree} disagreements, {underflow} step underflows",
          file=sys.stderr)
    if disagree:
        return EXIT_DISAGREE
    if underflow:
        return EXIT_NUMERIC
    return EXIT_OK


# ---------------------------------------------------------------------------


def _add_shoot_args(p):
    p.add_argument("--init", type=float, nargs="+",
                   help="a_0 .. a_{m-1}; missing trailing values are 0 (default a_0=1)")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--blowup", type=float, default=1e8, help="blow-up threshold on |u|")
    p.add_argument("--continue-past-zero", action="store_true",
                   help="integer alpha only: integrate through u = 0")


def build_parser():
    ap = argparse.ArgumentParser(prog="polyharmonic",
                                 description="Radial laboratory for Delta^m u = +-u^alpha.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="existence verdict as JSON")
    _add_spec_args(p)
    p.add_argument("--out", help="also write the JSON here")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("table", help="existence table along the alpha axis")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--sign", type=_parse_sign, required=True)
    p.add_argument("--csv", help="write the machine-readable table here")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("shoot", help="integrate the radial problem from origin data")
    _add_spec_args(p)
    _add_shoot_args(p)
    p.add_argument("--rmax", type=float, default=10.0)
    p.add_argument("--out", help="profile CSV")
    p.add_argument("--json", help="outcome JSON")
    p.set_defaults(func=cmd_shoot)

    p = sub.add_parser("search", help="bisect one initial value between outcome kinds")
    _add_spec_args(p)
    _add_shoot_args(p)
    p.add_argument("--vary", type=int, required=True, help="index i of the varied a_i")
    p.add_argument("--bracket", type=float, nargs=2, required=True, metavar=("LO", "HI"))
    p.add_argument("--rtarget", type=float, default=50.0)
    p.add_argument("--resolution", type=float, default=1e-10)
    p.add_argument("--out-prefix", help="write PREFIX_lo.csv and PREFIX_hi.csv")
    p.add_argument("--json", help="result JSON")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("verify", help="closed-form residual or bubble eigen-ratio report")
    p.add_argument("--family", choices=["power", "bubble"], required=True)
    # 0 means: +1 for power, (-1)^m for the bubble
    _add_spec_args(p, sign_default=0, alpha_required=False)
    p.add_argument("--lam", type=float, default=1.0, help="bubble scale")
    p.add_argument("--rmin", type=float, default=0.1)
    p.add_argument("--rmax", type=float, default=10.0)
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--threshold", type=float, default=None,
                   help="pass threshold on the residual (default 1e-10) "
                        "or the ratio spread (default 1e-6)")
    p.add_argument("--out", help="report JSON")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("certificate", help="exponent certificates")
    p.add_argument("which", choices=["moser", "decay"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--alpha", required=True)
    p.add_argument("--out", help="certificate JSON")
    p.set_defaults(func=cmd_certificate)

    p = sub.add_parser("sweep", help="classify (and optionally shoot) over a grid")
    p.add_argument("--ns", default="3", help="comma-separated dimensions")
    p.add_argument("--ms", default="1", help="comma-separated orders")
    p.add_argument("--alphas", required=True, help='comma-separated exponents, e.g. "-2,1/2,3"')
    p.add_argument("--signs", default="-,+")
    p.add_argument("--shoot", action="store_true", help="attach shooting evidence")
    p.add_argument("--init", type=float, nargs="+")
    p.add_argument("--rmax", type=float, default=30.0, help="evidence horizon")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--jobs", type=int, default=None,
                   help=f"worker processes (default ${JOBS_ENV} or 1)")
    p.add_argument("--out", help="CSV path (default standard output)")
    p.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"polyharmonic {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
