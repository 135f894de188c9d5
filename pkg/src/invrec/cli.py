"""Command-line front end.

Exit codes: 0 success, 1 usage or parse error, 2 failed precondition
(genericity, admissibility, invalid configuration), 3 reconstruction
inconsistency.
"""
from __future__ import annotations

import argparse
import collections
import math
import os
import sys

import numpy as np

from . import extraction, formats, hill
from .errors import AmbiguousSigns, FormatError, InvrecError, NonGeneric, SingularBasis
from .invariants import compute_invariants
from .lattice import check_admissible, default_basis
from .potential import check_genericity, random_generic
from .reconstruct import compare_mod_gauge, perturb_invariants, reconstruct

EXIT_OK, EXIT_USAGE, EXIT_PRECONDITION, EXIT_INCONSISTENT = 0, 1, 2, 3
DEFAULT_TOL = 1e-8
TOL_ENV = "INVREC_TOL_OVERRIDE"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_float(text):
    v = float(text)
    if not (math.isfinite(v) and v > 0):
        raise argparse.ArgumentTypeError(f"{text!r} is not a positive finite number")
    return v


def _nonneg_float(text):
    v = float(text)
    if not (math.isfinite(v) and v >= 0):
        raise argparse.ArgumentTypeError(f"{text!r} is not a non-negative finite number")
    return v


def _positive_int(text):
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError(f"{text!r} is not a positive integer")
    return v


def _rho_list(text):
    try:
        vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a comma-separated list of numbers") from None
    if len(vals) < 2 or any(not (math.isfinite(v) and v > 1) for v in vals):
        raise argparse.ArgumentTypeError("need at least two rho values, each > 1")
    return vals


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="invrec", description="Spectral invariants and reconstruction of 26-mode periodic potentials.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="write a random generic potential")
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--out", help="output file (default stdout)")

    i = sub.add_parser("invariants", help="compute the invariant set of a potential file")
    i.add_argument("--in", dest="inp", required=True)
    i.add_argument("--out")
    i.add_argument("--route", choices=("closed", "sum", "quad"), default="closed")
    i.add_argument("--check", action="store_true", help="compute all routes and report the largest discrepancy")

    r = sub.add_parser("roundtrip", help="seeded reconstruction round trips")
    r.add_argument("--seed", type=int, required=True)
    r.add_argument("--trials", type=_positive_int, default=200)
    r.add_argument("--eps", type=_nonneg_float, default=0.0)
    r.add_argument("--tol", type=_positive_float, default=None)
    r.add_argument("--route", choices=("closed", "sum", "quad"), default="closed")

    h = sub.add_parser("hill", help="gap report and perturbation check")
    h.add_argument("--mu", type=_positive_float, default=0.01)
    h.add_argument("--v", type=float, default=0.3)
    h.add_argument("--truncation", type=_positive_int, default=40)
    h.add_argument("--nmax", type=_positive_int, default=12)
    h.add_argument("--in", dest="inp", help="hill block; prints its lowest eigenvalues")
    h.add_argument("--out", help="gap report file (default stdout)")

    e = sub.add_parser("extract", help="rho sweep of the mu/J extraction system")
    e.add_argument("--rhos", type=_rho_list, default=[1e3, 1e4, 1e5, 1e6])
    e.add_argument("--noise", type=_nonneg_float, default=1.0)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--trials", type=_positive_int, default=16)
    e.add_argument("--m", type=_positive_int, default=2)
    e.add_argument("--j", type=_positive_int, default=3)
    e.add_argument("--v", type=float, default=0.3)
    e.add_argument("--in", dest="inp", help="potential file (default: generated from --seed)")
    e.add_argument("--out", help="per-rho report file")
    return p


def _read(path):
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _write(path, text):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _tolerance(arg):
    env = os.environ.get(TOL_ENV)
    if env:
        try:
            return float(env)
        except ValueError:
            raise UsageError(f"{TOL_ENV}={env!r} is not a number") from None
    return DEFAULT_TOL if arg is None else arg


def _require_generic(q):
    adm = check_admissible(q.basis)
    if not adm.admissible:
        raise NonGeneric(f"basis not admissible: {[t for t, _ in adm.violations]}")
    gen = check_genericity(q)
    if not gen.ok:
        raise NonGeneric(f"potential not generic: {[t for t, _ in gen.failed]}")


def cmd_gen(args):
    basis = default_basis()
    q = random_generic(basis, np.random.default_rng(args.seed))
    rep = check_genericity(q)
    _write(args.out, formats.format_potential(q))
    print(f"genericity: ok={rep.ok} conditions={len(rep.values)} failed={len(rep.failed)}", file=sys.stderr)
    return EXIT_OK


def cmd_invariants(args):
    q = formats.parse_potential(_read(args.inp))
    _require_generic(q)
    inv = compute_invariants(q, args.route)
    if args.check:
        routes = {r: compute_invariants(q, r) for r in ("closed", "sum", "quad")}
        worst = 0.0
        for a in routes:
            for b in routes:
                if a < b:
                    d = routes[a].max_rel_diff(routes[b])
                    worst = max(worst, d)
                    print(f"check {a} vs {b}: {d:.3e}", file=sys.stderr)
        print(f"check max discrepancy: {worst:.3e}", file=sys.stderr)
    _write(args.out, formats.format_invariants(inv))
    return EXIT_OK


def cmd_roundtrip(args):
    tol = _tolerance(args.tol)
    basis = default_basis()
    dists, triples, survivors = [], collections.Counter(), collections.Counter()
    failures = collections.Counter()
    for t in range(args.trials):
        seed = args.seed + t
        q = random_generic(basis, np.random.default_rng(seed))
        inv = compute_invariants(q, args.route)
        if args.eps > 0:
            inv = perturb_invariants(inv, args.eps, seed)
        try:
            res = reconstruct(inv, basis)
        except (AmbiguousSigns, InvrecError) as exc:
            failures[type(exc).__name__] += 1
            continue
        dists.append(compare_mod_gauge(q, res.q_hat))
        triples[res.sign_triple] += 1
        survivors[res.survivors] += 1
    print(f"trials {args.trials} eps {args.eps:g} tol {tol:g}")
    if dists:
        print(f"gauge distance max {max(dists):.3e} median {float(np.median(dists)):.3e}")
    for tr, n in sorted(triples.items()):
        print(f"sign triple {tr[0]:+d} {tr[1]:+d} {tr[2]:+d}: {n}")
    for s, n in sorted(survivors.items()):
        print(f"survivors {s}: {n}")
    for name, n in sorted(failures.items()):
        print(f"failed {name}: {n}")
    if failures or not dists or max(dists) > tol:
        return EXIT_INCONSISTENT
    return EXIT_OK


def cmd_hill(args):
    if not 0 <= args.v < 1:
        raise UsageError("--v must lie in [0, 1)")
    if args.inp:
        prob = formats.parse_hill(_read(args.inp))
        ev = hill.spectrum(prob).eigenvalues[:10]
        print("eigenvalues " + " ".join(formats.FLOAT % x for x in ev), file=sys.stderr)
    prob = hill.HillProblem(1.0, {1: args.mu}, args.v, args.truncation)
    bound = 5 * args.mu**4
    worst = 0.0
    for n in range(2, 6):
        d = abs(hill.level(prob, n) - hill.free_level(prob, n) - hill.second_order_shift(args.mu, n, args.v))
        worst = max(worst, d)
    verdict = "pass" if worst <= bound else "fail"
    print(f"perturbation check n=2..5: max deviation {worst:.3e} bound {bound:.3e} {verdict}", file=sys.stderr)
    report = hill.gap_lengths({1: args.mu}, args.nmax)
    _write(args.out, formats.format_gap_report(report))
    return EXIT_OK


def cmd_extract(args):
    basis = default_basis()
    if args.inp:
        q = formats.parse_potential(_read(args.inp))
        _require_generic(q)
        basis = q.basis
    else:
        q = random_generic(basis, np.random.default_rng(args.seed))
    if not 0 < args.v < 1 or args.v == 0.5:
        raise UsageError("--v must lie in (0, 1/2) or (1/2, 1)")
    delta = basis.gamma(1)
    seeds = range(args.seed, args.seed + args.trials)
    rep = extraction.rho_sweep(q, delta, args.rhos, m=args.m, j=args.j, v=args.v, noise_amp=args.noise, seeds=seeds)
    if args.out:
        _write(args.out, formats.format_sweep_rows(rep.rows))
    for row in rep.rows:
        print("rho %.3g mu_err %.3e J_err %.3e det %.3e" % row)
    if args.noise == 0:
        worst = max(max(r[1], r[2]) for r in rep.rows)
        print(f"zero-noise recovery max error {worst:.3e} {'pass' if worst <= 1e-9 else 'fail'}")
        return EXIT_OK
    for name, got, want, band in (
        ("mu", rep.slope_mu, rep.expected_mu, 0.15),
        ("J", rep.slope_J, rep.expected_J, 0.15),
        ("det", rep.slope_det, rep.expected_det, 0.10),
    ):
        ok = abs(got - want) <= band * abs(want)
        print(f"slope {name} {got:.4f} expected {want:.4f} +-{band:.0%} {'pass' if ok else 'fail'}")
    return EXIT_OK


COMMANDS = {
    "gen": cmd_gen,
    "invariants": cmd_invariants,
    "roundtrip": cmd_roundtrip,
    "hill": cmd_hill,
    "extract": cmd_extract,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"invrec: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FormatError as exc:
        print(f"invrec: parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NonGeneric, SingularBasis, InvrecError, ValueError) as exc:
        print(f"invrec: precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
