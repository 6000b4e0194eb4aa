"""Command-line surface: each subcommand maps 1:1 to a library operation.

Outputs are machine-readable (JSON to stdout or --out; CSV for sample
streams and average experiments) and deterministic for a fixed seed; a
manifest echoing the resolved configuration (the only place a timestamp
appears) is written next to --out.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time

import numpy as np

from . import __version__
from .errors import BohrLabError
from .laurent import LaurentPoly, parse, divides, kronecker_factor
from . import spectra, mgood, homoclinic, riesz, dynamics

SCHEMA = 1


def _threads(args):
    if args.threads is not None:
        return args.threads
    return int(os.environ.get("BOHR_LAB_THREADS", "1"))


def _poly(text, dim=None):
    return parse(text, dim=dim)


def _arg_poly(args):
    return parse(args.poly, dim=getattr(args, "dim", None))


def _emit(args, payload, csv_rows=None, csv_header=None):
    payload = {"schema": SCHEMA, **payload}
    blob = json.dumps(payload, sort_keys=True, indent=2)
    if args.out:
        base = args.out
        if csv_rows is not None:
            with open(base, "w", newline="") as fh:
                wr = csv.writer(fh)
                wr.writerow(csv_header)
                wr.writerows(csv_rows)
            json_path = base + ".json"
        else:
            json_path = base if base.endswith(".json") else base + ".json"
        with open(json_path, "w") as fh:
            fh.write(blob + "\n")
        manifest = {
            "schema": SCHEMA,
            "version": __version__,
            "command": args.command,
            "config": {k: v for k, v in vars(args).items()
                       if k not in ("func",) and v is not None},
            "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        }
        with open(base + ".manifest.json", "w") as fh:
            json.dump(manifest, fh, sort_keys=True, indent=2)
            fh.write("\n")
    else:
        # without --out only the JSON summary is printed; CSV needs a path
        print(blob)
    return 0


def _fmt_complex(z):
    return [float(np.real(z)), float(np.imag(z))]


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_mahler(args):
    f = _arg_poly(args)
    res = spectra.mahler_measure(f, method=args.method, grid=args.grid)
    return _emit(args, {"poly": f.to_json(), **res.to_json()})


def cmd_roots(args):
    f = _arg_poly(args)
    data = spectra.complex_roots(f)
    return _emit(args, {"poly": f.to_json(), **data.to_json()})


def cmd_padic(args):
    f = _arg_poly(args)
    esc = spectra.padic_escape(f)
    payload = {"poly": f.to_json(),
               "escape": esc.to_json() if esc else None}
    return _emit(args, payload)


def cmd_expansive(args):
    f = _arg_poly(args)
    cert = spectra.expansivity_check(f, grid=args.grid)
    return _emit(args, {"poly": f.to_json(),
                        "certified": cert is not None,
                        "certificate": cert.to_json() if cert else None})


def cmd_kronecker(args):
    f = _arg_poly(args)
    kf = kronecker_factor(f)
    return _emit(args, {"poly": f.to_json(),
                        "zero_entropy": kf is not None,
                        "kronecker": kf.to_json() if kf else None})


def _certify(args, f):
    route = args.route
    if f.dim >= 2:
        from .laurent import univariate_part

        if route in ("auto", "lift") and univariate_part(f, axis=0) is not None:
            inner = _certify_univariate(univariate_part(f, axis=0), "auto")
            return mgood.lift_univariate(inner, f)
        if route in ("auto", "gap"):
            if args.B is None:
                raise BohrLabError("gap route needs --B (homoclinic box radius)")
            w = homoclinic.fundamental_homoclinic(f, B=args.B, grid=args.grid_b)
            return mgood.certify_gap(f, w, H=args.H,
                                     irreducible=args.assume_irreducible)
        raise BohrLabError(f"route {route!r} not applicable in dim {f.dim}")
    return _certify_univariate(f, route)


def _certify_univariate(f, route):
    if route in ("auto", "archimedean"):
        try:
            return mgood.certify_archimedean(f)
        except BohrLabError:
            if route == "archimedean":
                raise
    cert = mgood.certify_padic(f)
    if cert is None:
        raise BohrLabError("no certification route applies: no root escapes "
                           "the unit circle archimedeanly or p-adically")
    return cert


def cmd_certify(args):
    f = _arg_poly(args)
    cert = _certify(args, f)
    if args.confirm_D is not None:
        cert = mgood.confirm_certificate(cert, args.confirm_D)
    return _emit(args, mgood.certificate_to_json(cert))


def cmd_verify_certificate(args):
    with open(args.cert) as fh:
        obj = json.load(fh)
    cert = mgood.certificate_from_json(obj)
    lines = mgood.verify_certificate(cert)
    return _emit(args, {"valid": True, "m": cert.m, "route": cert.route,
                        "checks": lines})


def cmd_falsify(args):
    f = _arg_poly(args)
    ce = mgood.falsify(f, args.m, args.D, args.condition)
    payload = {"poly": f.to_json(), "m": args.m, "D": args.D,
               "condition": args.condition,
               "counterexample": None}
    if ce is not None:
        payload["counterexample"] = {
            "witness": ce.witness.to_json(),
            "witness_text": ce.witness.render(),
            "quotient": ce.quotient.to_json(),
            "epsilon": list(ce.epsilon),
            "delta": list(ce.delta),
            "k": ce.k,
        }
    return _emit(args, payload)


def cmd_homoclinic(args):
    f = _arg_poly(args)
    w = homoclinic.fundamental_homoclinic(f, B=args.B, grid=args.grid)
    residual = homoclinic.verify_homoclinic(f, w)
    rows = [[*(n), v] for n, v in w.items()] if args.out else None
    header = [f"n{i+1}" for i in range(f.dim)] + ["value"] if rows else None
    return _emit(args, {"poly": f.to_json(), **w.to_json(),
                        "residual": residual, "l1_norm": w.l1_norm()},
                 csv_rows=rows, csv_header=header)


def cmd_gap(args):
    f = _arg_poly(args)
    w = homoclinic.fundamental_homoclinic(f, B=args.B, grid=args.grid_b)
    R = homoclinic.gap_radius(f, w, args.H)
    return _emit(args, {"poly": f.to_json(), "H": args.H, "R": R,
                        "m": 6 * R,
                        "threshold": 1.0 / (2 * args.H * f.l1_norm()),
                        "certified_tail_at_R": w.certified_l1_tail(R)})


def _riesz_spec(args, f):
    count = args.trunc + 1
    if args.weights:
        w = dynamics.weight(args.weights, seed=args.seed)
        coeffs = riesz.weights_to_coeffs(w, args.m, count)
    elif args.coeffs:
        vals = []
        for part in args.coeffs.split(";"):
            re_s, im_s = part.split(",")
            vals.append(complex(float(re_s), float(im_s)))
        coeffs = tuple(vals)
    else:
        coeffs = (1.0 + 0j,) * count
    return riesz.RieszSpec(f=f, m=args.m, N=args.trunc, coeffs=coeffs)


def cmd_riesz_coeff(args):
    f = _arg_poly(args)
    spec = _riesz_spec(args, f)
    h = _poly(args.h, dim=f.dim)
    val = riesz.riesz_fourier_coeff(spec, h)
    return _emit(args, {"poly": f.to_json(), "m": args.m, "trunc": args.trunc,
                        "h": h.to_json(), "coefficient": _fmt_complex(val)})


def cmd_riesz_expand(args):
    f = _arg_poly(args)
    spec = _riesz_spec(args, f)
    table = riesz.dissociate_expand(spec)
    rows = [[",".join(str(e) for e in pat.eps), rep.render()]
            for pat, rep in table]
    return _emit(args, {"poly": f.to_json(), "m": args.m, "trunc": args.trunc,
                        "patterns": len(table), "dissociate": True},
                 csv_rows=rows, csv_header=["epsilon", "representative"])


def cmd_sample(args):
    f = _arg_poly(args)
    spec = _riesz_spec(args, f)
    model = dynamics.ToralModel.build(f)
    res = riesz.sample(spec, model, chains=args.chains, steps=args.steps,
                       seed=args.seed, burnin=args.burnin, width=args.width,
                       thin=args.thin)
    rows = []
    for c in range(res.states.shape[0]):
        for t in range(res.states.shape[1]):
            rows.append([c, t] + [repr(float(v)) for v in res.states[c, t]])
    header = ["chain", "step"] + [f"x{i}" for i in range(res.states.shape[2])]
    return _emit(args, {"poly": f.to_json(), "chains": args.chains,
                        "steps": args.steps, "burnin": args.burnin,
                        "thin": args.thin, "seed": args.seed,
                        "acceptance": [float(a) for a in res.acceptance],
                        "samples": int(res.states.shape[0] * res.states.shape[1])},
                 csv_rows=rows, csv_header=header)


def _initial_points(args, f, spec, model):
    if args.x0 == "haar":
        rng = np.random.Generator(np.random.Philox(key=[args.seed, 0xA11]))
        return rng.random((args.K, model.r))
    if args.x0 == "riesz":
        res = riesz.sample(spec, model, chains=args.chains, steps=args.steps,
                           seed=args.seed, burnin=args.burnin,
                           width=args.width, thin=args.thin)
        pts = res.flat()
        if len(pts) < args.K:
            raise BohrLabError(f"only {len(pts)} post-burn-in samples for K={args.K}")
        stride = len(pts) // args.K
        return pts[::stride][:args.K]
    vals = [float(v) for v in args.x0.split(",")]
    if len(vals) != model.r:
        raise BohrLabError(f"x0 needs {model.r} coordinates")
    return np.array([vals])


def cmd_average(args):
    f = _arg_poly(args)
    model = dynamics.ToralModel.build(f)
    spec = _riesz_spec(args, f) if args.x0 == "riesz" else None
    pts = _initial_points(args, f, spec, model)
    w = dynamics.weight(args.weights, seed=args.seed)
    vals = np.atleast_1d(dynamics.weighted_average(model, pts, w, args.N))
    rows = [[i] + _fmt_complex(v) + [abs(v)] for i, v in enumerate(vals)]
    return _emit(args, {"poly": f.to_json(), "N": args.N, "weights": args.weights,
                        "seed": args.seed, "x0": args.x0, "K": len(vals),
                        "median_abs": float(np.median(np.abs(vals)))},
                 csv_rows=rows, csv_header=["index", "value_re", "value_im", "abs"])


def cmd_split(args):
    f = _arg_poly(args)
    model = dynamics.ToralModel.build(f)
    spec = _riesz_spec(args, f) if args.x0 == "riesz" else None
    pts = _initial_points(args, f, spec, model)
    w = dynamics.weight(args.weights, seed=args.seed)
    out = dynamics.split_averages(model, pts, w, args.m, args.N)
    buckets = np.atleast_2d(out["buckets"])
    rows = []
    for i in range(buckets.shape[0]):
        tot = np.atleast_1d(out["total"])[i]
        rows.append([i, "all"] + _fmt_complex(tot) + [out["reference"]])
        for k in range(args.m):
            rows.append([i, k] + _fmt_complex(buckets[i, k]) + [out["reference"]])
    return _emit(args, {"poly": f.to_json(), "N": args.N, "m": args.m,
                        "weights": args.weights, "seed": args.seed,
                        "x0": args.x0, "reference": out["reference"],
                        "median_bucket0_re": float(np.median(buckets[:, 0].real))},
                 csv_rows=rows,
                 csv_header=["index", "k", "value_re", "value_im", "reference"])


def cmd_mobius(args):
    mu = dynamics.mobius_sieve(args.N + 1)
    rows = [[n, int(mu[n])] for n in range(1, args.N + 1)]
    return _emit(args, {"N": args.N, "mertens": int(mu[1:].sum())},
                 csv_rows=rows, csv_header=["n", "mu"])


# ---------------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="bohrlab",
                                description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, **kw):
        sp = sub.add_parser(name, **kw)
        sp.set_defaults(func=fn)
        sp.add_argument("--out", help="output path (CSV if applicable; JSON summary "
                                      "and manifest written alongside)")
        sp.add_argument("--threads", type=int, default=None,
                        help="worker count (default: BOHR_LAB_THREADS or 1)")
        return sp

    sp = add("mahler", cmd_mahler, help="logarithmic Mahler measure / entropy")
    sp.add_argument("--poly", required=True)
    sp.add_argument("--dim", type=int, default=None,
                    help="ambient number of variables (inferred when omitted)")
    sp.add_argument("--method", choices=["jensen", "quadrature"], default="jensen")
    sp.add_argument("--grid", type=int, default=4096)

    sp = add("roots", cmd_roots, help="certified complex roots (d=1)")
    sp.add_argument("--poly", required=True)
    sp.add_argument("--dim", type=int, default=None,
                    help="ambient number of variables (inferred when omitted)")

    sp = add("padic", cmd_padic, help="Newton-polygon p-adic root escape")
    sp.add_argument("--poly", required=True)
    sp.add_argument("--dim", type=int, default=None,
                    help="ambient number of variables (inferred when omitted)")

    sp = add("expansive", cmd_expansive, help="certify the unitary variety is empty")
    sp.add_argument("--poly", required=True)
    sp.add_argument("--dim", type=int, default=None,
                    help="ambient number of variables (inferred when omitted)")
    sp.add_argument("--grid", type=int, default=64)

    sp = add("kronecker", cmd_kronecker, help="zero-entropy cyclotomic factorization")
    sp.add_argument("--poly", required=True)
    sp.add_argument("--dim", type=int, default=None,
                    help="ambient number of variables (inferred when omitted)")

    sp = add("certify", cmd_certify, help="m-goodness certificate")
    sp.add_argument("--poly", required=True)
    sp.add_argument("--dim", type=int, default=None,
                    help="ambient number of variables (inferred when omitted)")
    sp.add_argument("--route", choices=["auto", "archimedean", "padic", "gap", "lift"],
                    default="auto")
    sp.add_argument("--H", type=int, default=2)
    sp.add_argument("--B", type=int, default=None, help="homoclinic box radius (gap route)")
    sp.add_argument("--grid-b", type=int, default=None, help="inversion grid (gap route)")
    sp.add_argument("--assume-irreducible", action="store_true",
                    help="acknowledge the irreducibility hypothesis (gap route)")
    sp.add_argument("--confirm-D", type=int, default=None,
                    help="also run the brute-force falsifier up to this horizon")

    sp = add("verify-certificate", cmd_verify_certificate,
             help="re-check a serialized certificate")
    sp.add_argument("--cert", required=True, help="certificate JSON file")

    sp = add("falsify", cmd_falsify, help="exhaustive counterexample search")
    sp.add_argument("--poly", required=True)
    sp.add_argument("--dim", type=int, default=None,
                    help="ambient number of variables (inferred when omitted)")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--D", type=int, required=True)
    sp.add_argument("--condition", choices=["C1", "C2"], default="C1")

    sp = add("homoclinic", cmd_homoclinic, help="fundamental summable homoclinic data")
    sp.add_argument("--poly", required=True)
    sp.add_argument("--dim", type=int, default=None,
                    help="ambient number of variables (inferred when omitted)")
    sp.add_argument("--B", type=int, default=32)
    sp.add_argument("--grid", type=int, default=None)

    sp = add("gap", cmd_gap, help="gap radius R and separation constant m = 6R")
    sp.add_argument("--poly", required=True)
    sp.add_argument("--dim", type=int, default=None,
                    help="ambient number of variables (inferred when omitted)")
    sp.add_argument("--B", type=int, default=32)
    sp.add_argument("--grid-b", type=int, default=None)
    sp.add_argument("--H", type=int, default=2)

    def riesz_common(sp):
        sp.add_argument("--poly", required=True)
        sp.add_argument("--dim", type=int, default=None,
                        help="ambient number of variables (inferred when omitted)")
        sp.add_argument("--m", type=int, required=True)
        sp.add_argument("--trunc", type=int, required=True, help="truncation order N")
        sp.add_argument("--coeffs", default=None,
                        help="explicit a_n as 're,im;re,im;...'")
        sp.add_argument("--weights", default=None,
                        choices=["bernoulli", "mobius", "constant"],
                        help="derive a_n = e^{-i arg w_{mn}} from this weight")
        sp.add_argument("--seed", type=int, default=0)

    sp = add("riesz-coeff", cmd_riesz_coeff, help="exact Riesz-product Fourier coefficient")
    riesz_common(sp)
    sp.add_argument("--h", required=True, help="character representative polynomial")

    sp = add("riesz-expand", cmd_riesz_expand, help="epsilon-pattern table + dissociation check")
    riesz_common(sp)

    sp = add("sample", cmd_sample, help="Metropolis sampler for the truncated density")
    riesz_common(sp)
    sp.add_argument("--chains", type=int, default=4)
    sp.add_argument("--steps", type=int, default=20_000)
    sp.add_argument("--burnin", type=int, default=10_000)
    sp.add_argument("--width", type=float, default=0.1)
    sp.add_argument("--thin", type=int, default=1)

    def experiment_common(sp):
        sp.add_argument("--poly", required=True)
        sp.add_argument("--dim", type=int, default=None,
                        help="ambient number of variables (inferred when omitted)")
        sp.add_argument("--weights", default="bernoulli",
                        choices=["bernoulli", "mobius", "constant"])
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--N", type=int, default=10_000)
        sp.add_argument("--x0", default="haar",
                        help="'haar', 'riesz', or comma-separated coordinates")
        sp.add_argument("--K", type=int, default=20, help="number of initial points")
        sp.add_argument("--m", type=int, default=1)
        sp.add_argument("--trunc", type=int, default=12)
        sp.add_argument("--coeffs", default=None)
        sp.add_argument("--chains", type=int, default=4)
        sp.add_argument("--steps", type=int, default=20_000)
        sp.add_argument("--burnin", type=int, default=10_000)
        sp.add_argument("--width", type=float, default=0.1)
        sp.add_argument("--thin", type=int, default=1)

    sp = add("average", cmd_average, help="weighted Birkhoff averages |S_N|/N")
    experiment_common(sp)

    sp = add("split", cmd_split, help="residue-class split of the weighted average")
    experiment_common(sp)

    sp = add("mobius", cmd_mobius, help="exact Moebius values by sieve")
    sp.add_argument("--N", type=int, required=True)

    return p


def main(argv=None):
    p = build_parser()
    args = p.parse_args(argv)
    try:
        return args.func(args)
    except BohrLabError as exc:
        err = {"schema": SCHEMA,
               "error": {"type": type(exc).__name__, "message": str(exc)}}
        print(json.dumps(err, sort_keys=True))
        return 2


if __name__ == "__main__":
    sys.exit(main())
