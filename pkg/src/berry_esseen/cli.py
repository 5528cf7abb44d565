"""Batch front end: ``berry-esseen <subcommand> [flags]``.

Exit status is 0 on success, 1 when a verification fails (a bound is
violated; the witness is written with the artifact) and 2 on usage or
configuration errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import re
import sys
import tempfile

import numpy as np

from . import constants, geometry, montecarlo, perimeter, stein

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def write_atomic(path, text):
    """Write ``text`` to ``path`` through a temporary file and a rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(args, text):
    if args.output:
        write_atomic(args.output, text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _csv(rows, columns):
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({k: ("" if r.get(k) is None else r.get(k)) for k in columns})
    return buf.getvalue()


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _set_from_args(args):
    if getattr(args, "set_file", None):
        return geometry.testset_from_json(_load_json(args.set_file))
    if getattr(args, "set", None):
        try:
            return geometry.testset_from_json(json.loads(args.set))
        except json.JSONDecodeError as exc:
            raise UsageError(f"--set is not valid JSON: {exc}") from exc
    return None


def _stochastic_banner(seed):
    print(f"seed: {seed}", file=sys.stderr)


# subcommands

TABLE_COLUMNS = ["d", "gamma_bar", "gamma_bar_up", "ratio", "ratio_up", "p_star", "r_star",
                 "published", "rounding_margin", "tight_rounding", "closed_form_bound"]


def cmd_perimeter_table(args):
    dims = args.dims or list(range(1, args.dmax + 1))
    if not dims or min(dims) < 1:
        raise UsageError("dimensions must be >= 1")
    rows = perimeter.table_rows(dims)
    failed = False
    for r in rows:
        r["closed_form_bound"] = float(perimeter.perimeter_upper_bound(r["d"]))
        if r["gamma_bar"] > r["closed_form_bound"] + 1e-9:
            failed = True
        if "published" in r and (r["gamma_bar_up"] != r["published"] or r["gamma_bar"] > r["published"]):
            failed = True
    text = json.dumps(rows, indent=2) if args.format == "json" else _csv(rows, TABLE_COLUMNS)
    _emit(args, text)
    return EXIT_FAIL if failed else EXIT_OK


def cmd_constant(args):
    if args.gamma_star < 0 or args.kappa < 0 or not 0 < args.beta_star < 1:
        raise UsageError("need gamma-star >= 0, kappa >= 0 and 0 < beta-star < 1")
    bundle = constants.constant_bundle(args.gamma_star, args.kappa, args.beta_star,
                                       affine=not args.general)
    payload = json.loads(bundle.to_json())
    certs = constants.coefficient_certificates(args.beta_star)
    payload["certificates"] = certs
    failed = not (certs["remainder_ok"] and certs["affine_ok"] and certs["general_ok"])
    failed |= bundle.k_value > bundle.rounded_value + 1e-12
    if args.format == "csv":
        flat = {k: v for k, v in payload.items() if not isinstance(v, dict)}
        flat.update({f"branch_{k}": v for k, v in payload["branches"].items()})
        text = _csv([flat], list(flat))
    else:
        text = json.dumps(payload, indent=2, sort_keys=True)
    _emit(args, text)
    return EXIT_FAIL if failed else EXIT_OK


def cmd_smoothing_audit(args):
    _stochastic_banner(args.seed)
    single = _set_from_args(args)
    family = [single] if single else geometry.random_family(args.family, args.count, args.seed, args.d)
    if args.trials < 1000 or args.samples < 1000:
        raise UsageError("--trials and --samples must be >= 1000")
    if args.epsilon is not None and args.epsilon <= 0:
        raise UsageError("--epsilon must be positive")
    audit = geometry.assumption_audit(family, args.trials, args.seed, args.kappa_override)
    rng = np.random.default_rng(args.seed)
    probes = []
    lip_ok = True
    for i, A in enumerate(family):
        eps = args.epsilon or float(rng.uniform(0.05, 1.0))
        for sign in ("outer", "inner"):
            prof = geometry.SmoothingProfile(A, eps, sign)
            m1, m2 = geometry.lipschitz_probe(prof, args.samples, args.seed + i)
            b1, b2 = prof.bounds
            ok = m1 <= b1 * (1 + 1e-3) and m2 <= b2 * (1 + 1e-2)
            lip_ok &= ok
            probes.append({"set": A.to_json(), "epsilon": eps, "sign": sign, "m1": m1, "m2": m2,
                           "m1_bound": b1, "m2_bound": b2, "ok": ok})
    payload = {"seed": args.seed, "audit": audit.to_dict(), "lipschitz": probes,
               "ok": bool(audit.ok and lip_ok)}
    if args.format == "csv":
        rows = [{"check": k, **v} for k, v in payload["audit"]["checks"].items()]
        for r in rows:
            r["witness"] = json.dumps(r["witness"], sort_keys=True) if r["witness"] else ""
        text = _csv(rows, ["check", "checked", "violations", "worst", "witness"])
    else:
        text = json.dumps(payload, indent=2, sort_keys=True)
    _emit(args, text)
    return EXIT_OK if payload["ok"] else EXIT_FAIL


FUNCTIONS = {
    "sin": stein.sine,
    "tanh_cubic": stein.tanh_cubic,
    "bump": stein.gaussian_bump,
}


def cmd_stein_check(args):
    f = FUNCTIONS[args.function](args.shift)
    payload = {"function": f.name}
    failed = False
    if args.pairing_order:
        u = args.u or [1.0]
        if len(u) != 1:
            raise UsageError("pairing check from the command line is one-dimensional")
        res = stein.derivative_pairing_check(f, args.pairing_order, u)
        payload["pairing"] = {"order": args.pairing_order, "u": u, "integral": res.integral,
                              "bound": res.bound, "ok": res.ok}
        failed |= not res.ok
    rows = []
    for n in args.n:
        if not 1 <= n <= 20:
            raise UsageError("--n values must lie in 1..20")
        res = stein.slepian_identity_check(f, stein.DiscreteSum(n), args.alpha_nodes)
        rows.append({"n": n, "lhs": res.lhs, "rhs": res.rhs, "gap": res.gap,
                     "alpha_nodes": res.alpha_nodes, "ok": res.gap <= args.tol})
        failed |= res.gap > args.tol
    payload["slepian"] = rows
    if args.format == "csv":
        text = _csv(rows, ["n", "lhs", "rhs", "gap", "alpha_nodes", "ok"])
    else:
        text = json.dumps(payload, indent=2, sort_keys=True)
    _emit(args, text)
    return EXIT_FAIL if failed else EXIT_OK


def _parse_sets(spec_text, d, seed):
    sets = []
    for part in re.split(r"[;,]", spec_text):
        name, _, arg = part.strip().partition(":")
        if arg and not arg.isdigit():
            raise UsageError(f"set count must be a positive integer, got {arg!r}")
        if name == "halflines":
            if d != 1:
                raise UsageError("halflines need --d 1")
            sets += montecarlo.halfline_grid()
        elif name == "halfspaces":
            sets += montecarlo.halfspace_grid(d, int(arg or 100), seed)
        elif name == "balls":
            sets += montecarlo.origin_ball_grid(d, np.linspace(0.25, 3.0, int(arg or 12)))
        elif name == "figure":
            sets.append(geometry.FIGURE_SET)
        else:
            raise UsageError(f"unknown set family {name!r}")
    return sets


def cmd_simulate(args):
    _stochastic_banner(args.seed)
    if args.config:
        try:
            config = montecarlo.SimulationConfig.from_json(_load_json(args.config))
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"bad simulation config: {exc}") from exc
        config = montecarlo.SimulationConfig(config.spec, config.sets, config.samples,
                                             args.seed, config.exact, config.chunk)
    else:
        try:
            spec = montecarlo.SummandSpec(args.kind, args.n, args.d, args.p)
            config = montecarlo.SimulationConfig(spec, _parse_sets(args.sets, args.d, args.seed),
                                                 args.samples, args.seed, args.exact)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    if args.save_config:
        write_atomic(args.save_config, config.to_json())
    report = montecarlo.run_simulation(config)
    text = report.to_csv() if args.format == "csv" else report.to_json()
    _emit(args, text)
    return EXIT_OK if report.verdict == "pass" else EXIT_FAIL


def cmd_annulus_check(args):
    _stochastic_banner(args.seed)
    A = _set_from_args(args) or geometry.FIGURE_SET
    mu = args.mu or [0.0] * A.dim
    if len(mu) != A.dim:
        raise UsageError("--mu length must match the set dimension")
    if not 0 < args.sigma <= 1:
        raise UsageError("--sigma must lie in (0, 1]")
    gamma = args.gamma_star
    if gamma is None:
        if isinstance(A, geometry.IntervalUnion):
            gamma = geometry.interval_union_perimeter_bound(A.delta)
        elif isinstance(A, geometry.HalfSpace):
            gamma = float(perimeter.halfspace_perimeter(0.0))
        else:
            gamma = perimeter.gamma_bar_d(A.dim).gamma_bar
    eps = args.eps or [2.0 ** -k for k in range(1, 13)]
    report = montecarlo.annulus_inequality_check(A, args.sigma, mu, eps, gamma, args.samples, args.seed)
    if args.format == "csv":
        text = _csv(report.rows, list(report.rows[0]))
    else:
        text = report.to_json()
    _emit(args, text)
    return EXIT_OK if report.ok else EXIT_FAIL


def build_parser():
    parser = argparse.ArgumentParser(prog="berry-esseen", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, formats=("csv", "json"), default="json"):
        p.add_argument("--format", choices=formats, default=default, help="output format")
        p.add_argument("--output", help="write the artifact here (atomically) instead of stdout")

    p = sub.add_parser("perimeter-table", help="perimeter bounds per dimension")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--dmax", type=int, default=10, help="tabulate d = 1..DMAX (default 10)")
    g.add_argument("--dims", type=_int_list, help="comma-separated dimensions")
    common(p, default="csv")
    p.set_defaults(func=cmd_perimeter_table)

    p = sub.add_parser("constant", help="Berry-Esseen constant for a set class")
    p.add_argument("--gamma-star", type=float, required=True, help="generalized perimeter bound")
    p.add_argument("--kappa", type=float, default=1.0, help="gradient-modulus constant (default 1)")
    p.add_argument("--beta-star", type=float, default=constants.BETA_STAR,
                   help="induction threshold (default 1/27)")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--affine", action="store_true",
                   help="class closed under symmetric linear maps (default)")
    g.add_argument("--general", action="store_true", help="class closed under translations/scalings")
    common(p)
    p.set_defaults(func=cmd_constant)

    p = sub.add_parser("smoothing-audit", help="assumption audit and Lipschitz probes")
    p.add_argument("--family", choices=["halfspace", "ball", "interval_union"], default="ball",
                   help="random family to audit")
    p.add_argument("--set", help="audit a single set given as inline JSON")
    p.add_argument("--set-file", help="audit a single set read from a JSON file")
    p.add_argument("--count", type=int, default=20, help="family size (default 20)")
    p.add_argument("--d", type=int, default=2, help="dimension for convex families (default 2)")
    p.add_argument("--epsilon", type=float, help="smoothing width (default: random per set)")
    p.add_argument("--trials", type=int, default=10_000, help="audit trials (default 10000)")
    p.add_argument("--samples", type=int, default=2000, help="Lipschitz probe samples (default 2000)")
    p.add_argument("--kappa-override", type=float, help="replace kappa in the gradient check")
    p.add_argument("--seed", type=int, required=True, help="master seed (required)")
    common(p)
    p.set_defaults(func=cmd_smoothing_audit)

    p = sub.add_parser("stein-check", help="interpolation identity and pairing bound at d = 1")
    p.add_argument("--function", choices=sorted(FUNCTIONS), default="sin", help="test function")
    p.add_argument("--shift", type=float, default=0.0, help="horizontal shift of the test function")
    p.add_argument("--n", type=_int_list, default=[4, 8, 12], help="summand counts (default 4,8,12)")
    p.add_argument("--alpha-nodes", type=int, default=64, help="initial Gauss-Legendre nodes")
    p.add_argument("--tol", type=float, default=1e-4, help="allowed identity gap (default 1e-4)")
    p.add_argument("--pairing-order", type=int, choices=[1, 2, 3], help="also run the pairing check")
    p.add_argument("--u", type=_float_list, help="pairing direction (default 1)")
    common(p)
    p.set_defaults(func=cmd_stein_check)

    p = sub.add_parser("simulate", help="Berry-Esseen simulation against the bound")
    p.add_argument("--config", help="SimulationConfig JSON file")
    p.add_argument("--kind", choices=montecarlo.KINDS, default="rademacher-axes", help="summand law")
    p.add_argument("--n", type=int, default=100, help="number of summands (default 100)")
    p.add_argument("--d", type=int, default=1, help="dimension (default 1)")
    p.add_argument("--p", type=float, default=0.5, help="two-point success probability")
    p.add_argument("--sets", default="halfspaces:100",
                   help="comma- or ';'-separated families: halflines, halfspaces:N, balls:N, figure")
    p.add_argument("--samples", type=int, default=100_000, help="Monte Carlo sample size")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--exact", dest="exact", action="store_true", default=None,
                   help="force lattice enumeration")
    g.add_argument("--no-exact", dest="exact", action="store_false", help="force Monte Carlo")
    p.add_argument("--save-config", help="also write the effective config as JSON")
    p.add_argument("--seed", type=int, required=True, help="master seed (required)")
    common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("annulus-check", help="annulus masses under shifted, scaled Gaussians")
    p.add_argument("--set", help="test set as inline JSON (default: the two-interval example)")
    p.add_argument("--set-file", help="test set JSON file")
    p.add_argument("--sigma", type=float, default=1.0, help="scale in (0, 1] (default 1)")
    p.add_argument("--mu", type=_float_list, help="mean vector, comma-separated (default 0)")
    p.add_argument("--eps", type=_float_list, help="epsilon grid (default 2^-1..2^-12)")
    p.add_argument("--gamma-star", type=float, help="perimeter bound (default: by set family)")
    p.add_argument("--samples", type=int, default=200_000, help="Monte Carlo size for balls")
    p.add_argument("--seed", type=int, required=True, help="master seed (required)")
    common(p)
    p.set_defaults(func=cmd_annulus_check)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
