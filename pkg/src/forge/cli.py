"""forge: run verification suites, export constructions, sample transforms.

Exit codes: 0 pass, 1 verification failure, 2 usage error, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from . import counterexamples as cx
from .atomic import BudgetExceeded, DEFAULT_ATOM_BUDGET, measure_from_dict, measure_to_dict
from .claims import ConstructionError
from .fourier import ft_any, write_ft_csv
from .suites import SUITES, Budgets, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3

CONSTRUCTIONS = ("ks-block", "nu", "omega", "discrete", "g", "g-n", "continuous")


class UsageError(Exception):
    pass


def _window(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("window must look like LO,HI") from None
    return lo, hi


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="forge", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", choices=sorted(SUITES) + ["all"])
    v.add_argument("--n-max", type=int, default=8)
    v.add_argument("--m-max", type=int, default=6)
    v.add_argument("--grid-step", type=float, default=0.01)
    v.add_argument("--window", type=float, default=1000.0, help="sup window length [0, W]")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--budget-atoms", type=int, default=DEFAULT_ATOM_BUDGET)
    v.add_argument("--report", help="write the JSON report here")
    v.add_argument("--timing", action="store_true", help="include runtimes in the JSON report")

    e = sub.add_parser("export", help="construct and serialize a measure or density")
    e.add_argument("construction", choices=CONSTRUCTIONS)
    e.add_argument("--a", type=float, default=0.5)
    e.add_argument("--b", type=float, default=0.75)
    e.add_argument("--n", type=int, default=1)
    e.add_argument("--m", type=int, default=1)
    e.add_argument("--M", type=int, default=3)
    e.add_argument("--A", type=float, default=10.0)
    e.add_argument("--N", type=int, default=2)
    e.add_argument("--samples", type=int, default=4096)
    e.add_argument("--format", choices=("json", "csv"), default=None)
    e.add_argument("--budget-atoms", type=int, default=DEFAULT_ATOM_BUDGET)
    e.add_argument("--report", help="write the factory report (JSON) here")
    e.add_argument("-o", "--output", required=True)

    s = sub.add_parser("sample-ft", help="write t,re,im,abs rows of a transform")
    s.add_argument("source", help="ks-block, nu, omega or a path to a measure JSON file")
    s.add_argument("--a", type=float, default=0.5)
    s.add_argument("--b", type=float, default=0.75)
    s.add_argument("--n", type=int, default=1)
    s.add_argument("--m", type=int, default=1)
    s.add_argument("--window", type=_window, default=(0.0, 10.0))
    s.add_argument("--step", type=float, default=0.01)
    s.add_argument("-o", "--output", required=True)
    return p


# ---------------------------------------------------------------------------


def cmd_verify(args) -> int:
    b = Budgets(n_max=args.n_max, m_max=args.m_max, grid_step=args.grid_step, window=args.window,
                seed=args.seed, budget_atoms=args.budget_atoms)
    rep = run_suite(args.suite, b)
    print(rep.summary())
    if args.report:
        rep.write(args.report, timing=args.timing)
    if rep.error:
        return EXIT_BUDGET
    return EXIT_OK if rep.passed else EXIT_FAIL


def _source(args):
    if args.source == "ks-block":
        return cx.ks_block(args.a, args.b)
    if args.source == "nu":
        return cx.make_nu(cx.q_independent_sample(args.n))
    if args.source == "omega":
        return cx.make_omega(args.m).measure
    try:
        with open(args.source) as fh:
            return measure_from_dict(json.load(fh))
    except FileNotFoundError:
        raise UsageError(f"unknown source {args.source!r}") from None


def cmd_sample_ft(args) -> int:
    lo, hi = args.window
    if args.step <= 0:
        raise UsageError("step must be positive")
    mu = _source(args)
    if hi < lo:
        t = np.empty(0)
    else:
        t = lo + args.step * np.arange(int(np.floor((hi - lo) / args.step + 1e-9)) + 1)
    vals = np.asarray(ft_any(mu, t)).reshape(-1) if t.size else np.empty(0, dtype=complex)
    write_ft_csv(args.output, t, vals)
    print(f"wrote {t.size} rows to {args.output}")
    return EXIT_OK


def _write_json(path, data) -> None:
    with open(path, "w") as fh:
        json.dump(data, fh, indent=1, sort_keys=True)
        fh.write("\n")


def _write_density(path, f, lo, hi, samples) -> None:
    x = np.linspace(lo, hi, samples)
    y = np.asarray(f(x), dtype=float)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "g(x)"])
        for xi, yi in zip(x, y):
            w.writerow([f"{xi:.17g}", f"{yi:.17g}"])


def _write_atoms_csv(path, mu) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "re", "im"])
        for x, wt in zip(mu.positions[:, 0], mu.weights):
            w.writerow([f"{x:.17g}", f"{wt.real:.17g}", f"{wt.imag:.17g}"])


def cmd_export(args) -> int:
    kind = args.construction
    fmt = args.format or ("csv" if kind in ("g", "g-n", "continuous") else "json")
    report = None
    if kind in ("ks-block", "nu", "omega", "discrete"):
        if kind == "ks-block":
            mu = cx.ks_block(args.a, args.b)
        elif kind == "nu":
            mu = cx.make_nu(cx.q_independent_sample(args.n)).enumerate(args.budget_atoms)
        elif kind == "omega":
            om = cx.make_omega(args.m)
            mu, report = om.measure, om.report()
        else:
            mu = cx.discrete_counterexample(args.M)
            report = {"blocks": [o.report() for o in cx.omega_blocks(args.M)]}
        if fmt == "json":
            _write_json(args.output, measure_to_dict(mu))
        else:
            if kind in ("omega", "discrete"):
                raise UsageError("csv export of lazy products would enumerate them; use json")
            _write_atoms_csv(args.output, mu)
    else:
        if kind == "g":
            g = cx.construct_g(args.A)
            f, lo, hi, report = g, -2.0, 2.0, g.report()
        elif kind == "g-n":
            g = cx.make_g_n(args.n)
            f, lo, hi, report = g, -g.support_radius, g.support_radius, g.report()
        else:
            mu = cx.continuous_counterexample(args.N)
            f = lambda x: _block_density(mu, x)
            lo, hi = -args.N - 0.5, -0.5
            report = {"blocks": measure_to_dict(mu)}
        if fmt == "json":
            _write_json(args.output, report)
        else:
            _write_density(args.output, f, lo, hi, args.samples)
    if args.report and report is not None:
        _write_json(args.report, report)
    print(f"wrote {kind} to {args.output}")
    return EXIT_OK


def _block_density(mu, x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    for s, p in mu.blocks:
        y = x - s[0]
        inside = np.abs(y) <= p.radius
        if inside.any():
            out[inside] += np.asarray(p.density(y[inside]))
    return out


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    handler = {"verify": cmd_verify, "export": cmd_export, "sample-ft": cmd_sample_ft}[args.command]
    try:
        return handler(args)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (UsageError, ValueError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConstructionError as exc:
        print(f"construction failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
