"""Command-line interface.

Subcommands:

* ``density``  -- evaluate a closed-form law on a grid, written as CSV
  (columns s, pdf, cdf, plus a final atom row for mixed laws),
* ``simulate`` -- stream conditioned trees as NDJSON or Newick,
* ``verify``   -- run the Monte Carlo verification suite, JSON report,
* ``expect``   -- print the table of closed-form expectations.

Rates are given either transformed (``--lam``/``--mu``, complete sampling)
or raw (``--lam-hat``/``--mu-hat``/``--f``); mixing both forms is an
error.  Every output embeds the parameter set and the seed.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import math
import os
import secrets
import sys
from typing import Optional

import numpy as np

from . import dists, mc, sim
from .kernel import Params, RawParams, transform_params
from .tree import to_newick

SEED_ENV = "RECONTREE_SEED"


def _default_seed() -> int:
    env = os.environ.get(SEED_ENV)
    if env is not None:
        return int(env)
    return secrets.randbits(48)


def _add_param_args(sub):
    sub.add_argument("--lam", "--lambda", dest="lam", type=float, default=None,
                     help="speciation rate (transformed / complete sampling)")
    sub.add_argument("--mu", type=float, default=None,
                     help="extinction rate (transformed; may be negative)")
    sub.add_argument("--lam-hat", "--lambda-hat", dest="lam_hat", type=float,
                     default=None, help="raw speciation rate")
    sub.add_argument("--mu-hat", type=float, default=None,
                     help="raw extinction rate")
    sub.add_argument("--f", type=float, default=None,
                     help="sampling probability in (0, 1]")


def _resolve_params(args) -> tuple[Params, Optional[RawParams]]:
    has_raw = any(v is not None for v in (args.lam_hat, args.mu_hat, args.f))
    has_trans = any(v is not None for v in (args.lam, args.mu))
    if has_raw and has_trans:
        raise SystemExit("supply either raw (--lam-hat/--mu-hat/--f) or "
                         "transformed (--lam/--mu) rates, not both")
    if has_raw:
        raw = RawParams(
            lambda_hat=args.lam_hat if args.lam_hat is not None else 1.0,
            mu_hat=args.mu_hat if args.mu_hat is not None else 0.0,
            f=args.f if args.f is not None else 1.0,
        )
        return transform_params(raw), raw
    lam = args.lam if args.lam is not None else 1.0
    mu = args.mu if args.mu is not None else 0.0
    return Params(lam=lam, mu=mu), None


def _parse_grid(spec: str):
    parts = spec.split(":")
    if len(parts) != 3:
        raise SystemExit(f"grid must be min:max:points, got {spec!r}")
    lo, hi, pts = float(parts[0]), float(parts[1]), int(parts[2])
    if pts < 2:
        raise SystemExit("grid needs at least 2 points")
    if not hi > lo >= 0:
        raise SystemExit("grid must satisfy 0 <= min < max")
    return np.linspace(lo, hi, pts)


def _open_out(path):
    """Context manager yielding the output stream; never closes stdout."""
    if path in (None, "-"):
        return contextlib.nullcontext(sys.stdout)
    return open(path, "w")


def _params_label(p: Params, raw: Optional[RawParams]) -> str:
    if raw is not None:
        return (f"lam_hat={raw.lambda_hat} mu_hat={raw.mu_hat} f={raw.f} "
                f"(transformed lam={p.lam} mu={p.mu})")
    return f"lam={p.lam} mu={p.mu}"


# ---------------------------------------------------------------------------
# density
# ---------------------------------------------------------------------------

def _density_law(args, p: Params):
    """Return (MixedDist, description) for the requested law/scenario."""
    law, scen = args.law, args.scenario
    if law == "pendant":
        if scen == "given-n":
            return dists.pendant_dist_given_n(p), "pendant | n"
        if scen == "given-n-age":
            _require(args.n, "--n")
            _require(args.x1, "--x1")
            return (dists.pendant_dist_given_n_age(args.n, args.x1, p),
                    f"pendant | n={args.n}, x1={args.x1}")
        if scen == "given-age":
            _require(args.x1, "--x1")
            return (dists.pendant_dist_given_age(args.x1, p),
                    f"pendant | x1={args.x1}")
    if law == "interior":
        if scen != "given-n":
            raise SystemExit("interior law is available for --scenario given-n")
        return dists.interior_dist_yule(p), "interior | n (pure birth)"
    if law == "root-edge":
        if scen == "given-n":
            _require(args.n, "--n")
            lam = dists._yule_rate(p)
            return dists.MixedDist(
                support_end=math.inf,
                pdf=lambda t: dists.root_edge_pdf_given_n(t, args.n, lam),
                cdf=lambda t: dists.root_edge_cdf_given_n(t, args.n, lam),
            ), f"root edge | n={args.n} (pure birth)"
        if scen == "given-age":
            _require(args.x1, "--x1")
            lam = dists._yule_rate(p)
            x1 = args.x1
            return dists.MixedDist(
                support_end=x1,
                pdf=lambda l: lam * np.exp(-lam * np.asarray(l, dtype=float)),
                cdf=lambda l: -np.expm1(-lam * np.asarray(l, dtype=float)),
                atom_weight=math.exp(-lam * x1),
            ), f"root edge | x1={x1} (pure birth)"
        raise SystemExit("root-edge law needs --scenario given-n or given-age")
    if law == "speciation-time":
        _require(args.n, "--n")
        _require(args.k, "--k")
        _require(args.x1, "--x1")
        n, k, x1 = args.n, args.k, args.x1
        return dists.MixedDist(
            support_end=x1,
            pdf=lambda s: dists.speciation_time_pdf(s, k, n, x1, p),
            cdf=lambda s: dists.speciation_time_cdf(s, k, n, x1, p),
        ), f"speciation time k={k} | n={n}, x1={x1}"
    if law == "hypoexp":
        _require(args.k, "--k")
        lam = dists._yule_rate(p)
        return dists.MixedDist(
            support_end=math.inf,
            pdf=lambda t: dists.hypoexp_pdf(t, args.k, lam),
            cdf=lambda t: dists.hypoexp_cdf(t, args.k, lam),
        ), f"hypoexponential k={args.k}"
    if law == "diversity":
        if scen != "given-n":
            raise SystemExit("diversity density is available for --scenario given-n")
        _require(args.n, "--n")
        lam = dists._yule_rate(p)
        return dists.MixedDist(
            support_end=math.inf,
            pdf=lambda d: dists.diversity_pdf_given_n(d, args.n, lam),
            cdf=lambda d: dists.diversity_cdf_given_n(d, args.n, lam),
        ), f"diversity | n={args.n} (pure birth)"
    raise SystemExit(f"unsupported law/scenario combination: {law}/{scen}")


def _require(value, flag):
    if value is None:
        raise SystemExit(f"{flag} is required for this law/scenario")


def cmd_density(args) -> int:
    p, raw = _resolve_params(args)
    try:
        law, desc = _density_law(args, p)
    except ValueError as exc:
        raise SystemExit(str(exc))
    grid = _parse_grid(args.grid)
    if math.isfinite(law.support_end):
        grid = grid[grid <= law.support_end]
    with _open_out(args.output) as out:
        out.write(f"# law: {desc}; {_params_label(p, raw)}\n")
        out.write("s,pdf,cdf\n")
        pdf = np.asarray(law.pdf(grid), dtype=float)
        cdf = np.asarray(law.cdf(grid), dtype=float)
        for s, d, c in zip(grid, pdf, cdf):
            out.write(f"{s:.12g},{d:.12g},{c:.12g}\n")
        if law.atom_weight > 0.0:
            out.write(f"{law.support_end:.12g},atom,{law.atom_weight:.12g}\n")
    return 0


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

def cmd_simulate(args) -> int:
    p, raw = _resolve_params(args)
    seed = args.seed if args.seed is not None else _default_seed()
    stream = sim.RngStream(seed, args.stream_id)
    rng = stream.generator()
    scen = args.scenario

    if scen == "given-n":
        _require(args.n, "--n")
        if not p.is_yule:
            raise SystemExit("given-n simulation requires mu = 0 "
                             "(the fixed-n sampler is pure birth)")
        draw = lambda r: sim.sample_yule_given_n(args.n, p.lam, r)
    elif scen == "given-n-age":
        _require(args.n, "--n")
        _require(args.x1, "--x1")
        draw = lambda r: sim.sample_given_n_age(args.n, args.x1, p, r)
    elif scen == "given-age":
        _require(args.x1, "--x1")
        draw = lambda r: sim.sample_given_age(args.x1, p, r)
    elif scen == "rejection-given-age":
        _require(args.x1, "--x1")
        if raw is None:
            raw = RawParams(lambda_hat=p.lam, mu_hat=max(p.mu, 0.0), f=1.0)
            if p.mu < 0:
                raise SystemExit("rejection simulation needs raw parameters")
        draw = lambda r: sim.sample_rejection_given_age(args.x1, raw, r)
    else:
        raise SystemExit(f"unknown scenario {scen!r}")

    manifest = {
        "params": {"lam": p.lam, "mu": p.mu},
        "scenario": scen,
        "seed": seed,
        "stream_id": args.stream_id,
        "count": args.reps,
    }
    if raw is not None:
        manifest["raw_params"] = {
            "lambda_hat": raw.lambda_hat, "mu_hat": raw.mu_hat, "f": raw.f,
        }
    with _open_out(args.output) as out:
        if args.format == "ndjson":
            out.write(json.dumps({"manifest": manifest}) + "\n")
            for i in range(args.reps):
                t = draw(rng)
                rec = {
                    "id": i,
                    "newick": to_newick(t),
                    "n": t.n,
                    "x1": t.mrca_age,
                    "seed": seed,
                    "stream_id": args.stream_id,
                }
                out.write(json.dumps(rec) + "\n")
        else:  # newick
            out.write(f"[{json.dumps(manifest)}]\n")
            for _ in range(args.reps):
                out.write(to_newick(draw(rng)) + "\n")
    return 0


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def cmd_verify(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    checks = tuple(args.check) if args.check else ()
    cfg = mc.VerifyConfig(checks=checks, reps=args.reps, seed=seed)
    try:
        reports = mc.verify_suite(cfg)
    except KeyError as exc:
        print(exc.args[0], file=sys.stderr)
        return 2
    payload = {
        "seed": seed,
        "reps": args.reps,
        "reports": [r.to_dict() for r in reports],
        "pass": all(r.passed for r in reports),
    }
    with _open_out(args.output) as out:
        json.dump(payload, out, indent=2)
        out.write("\n")
    for r in reports:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status} {r.check}", file=sys.stderr)
    return 0 if payload["pass"] else 1


# ---------------------------------------------------------------------------
# expect
# ---------------------------------------------------------------------------

def cmd_expect(args) -> int:
    p, raw = _resolve_params(args)
    n = args.n if args.n is not None else 10
    x1 = args.x1 if args.x1 is not None else 1.0
    rows = []
    rows.append(("E[pendant | n]", dists.pendant_mean_given_n(p)))
    rows.append((f"E[pendant | n={n}, x1={x1}]",
                 dists.pendant_mean_given_n_age(n, x1, p)))
    if p.is_yule:
        lam = p.lam
        rows.append((f"E[root edge | n={n}]", dists.root_edge_mean_given_n(n, lam)))
        rows.append((f"E[root edge | x1={x1}]",
                     dists.root_edge_mean_given_age(x1, lam)))
        rows.append((f"E[diversity | n={n}]", dists.diversity_mean_given_n(n, lam)))
        rows.append((f"E[diversity | n={n}, x1={x1}]",
                     dists.diversity_mean_given_n_age(n, x1, lam)))
        rows.append((f"E[diversity | x1={x1}]",
                     dists.diversity_mean_given_age(x1, lam)))
    rows.append(("root-edge limit constant c", dists.root_edge_limit_constant()))
    with _open_out(args.output) as out:
        if args.format == "json":
            json.dump({
                "params": {"lam": p.lam, "mu": p.mu}, "n": n, "x1": x1,
                "values": {k: v for k, v in rows},
            }, out, indent=2)
            out.write("\n")
        else:
            out.write(f"# {_params_label(p, raw)}; n={n}, x1={x1}\n")
            width = max(len(k) for k, _ in rows)
            for k, v in rows:
                out.write(f"{k:<{width}}  {v:.10g}\n")
    return 0


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="recontree",
        description="Branch-length and diversity laws for reconstructed "
                    "birth-death trees, with conditioned samplers.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    d = subs.add_parser("density", help="evaluate a law on a grid (CSV)")
    _add_param_args(d)
    d.add_argument("--law", required=True,
                   choices=["pendant", "interior", "root-edge",
                            "speciation-time", "hypoexp", "diversity"])
    d.add_argument("--scenario", default="given-n",
                   choices=["given-n", "given-n-age", "given-age"])
    d.add_argument("--n", type=int, default=None)
    d.add_argument("--k", type=int, default=None)
    d.add_argument("--x1", type=float, default=None)
    d.add_argument("--grid", required=True, help="min:max:points")
    d.add_argument("-o", "--output", default=None)
    d.set_defaults(func=cmd_density)

    s = subs.add_parser("simulate", help="sample conditioned trees")
    _add_param_args(s)
    s.add_argument("--scenario", required=True,
                   choices=["given-n", "given-n-age", "given-age",
                            "rejection-given-age"])
    s.add_argument("--n", type=int, default=None)
    s.add_argument("--x1", type=float, default=None)
    s.add_argument("--reps", type=int, default=1)
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--stream-id", type=int, default=0)
    s.add_argument("--format", default="ndjson", choices=["ndjson", "newick"])
    s.add_argument("-o", "--output", default=None)
    s.set_defaults(func=cmd_simulate)

    v = subs.add_parser("verify", help="run the Monte Carlo verification suite")
    v.add_argument("--suite", default="full", choices=["full"])
    v.add_argument("--check", action="append", default=None,
                   help="run a single named check (repeatable)")
    v.add_argument("--reps", type=int, default=100_000)
    v.add_argument("--seed", type=int, default=None)
    v.add_argument("-o", "--output", default=None)
    v.set_defaults(func=cmd_verify)

    e = subs.add_parser("expect", help="print closed-form expectations")
    _add_param_args(e)
    e.add_argument("--n", type=int, default=None)
    e.add_argument("--x1", type=float, default=None)
    e.add_argument("--format", default="text", choices=["text", "json"])
    e.add_argument("-o", "--output", default=None)
    e.set_defaults(func=cmd_expect)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
