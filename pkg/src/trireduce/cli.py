"""Command-line front end: ``trireduce analyze|flow|sample``.

Exit codes: 0 success, 1 input error, 2 mathematical precondition failure.
"""

import argparse
import csv
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .dynamics import (FlowPolicy, conservation_report, convergence_study,
                       piecewise_flow, three_tangle)
from .lie import PAULI, embed
from .moment import (chamber_position, facet_violations, load_facets, local_spectra,
                     marginal_spectra, moment_map, polytope_position, weyl_normalize)
from .numerics import DEFAULT_TOL, NotHermitianError
from .reduction import ReductionError, local_model, orbit_type, stabilizer_dimension
from .states import StateError, catalog, load_state, state_to_json

EXIT_OK, EXIT_INPUT, EXIT_PRECONDITION = 0, 1, 2

# torus generator used by ``flow --policy fixed`` when no --generator is given
DEFAULT_TORUS_WEIGHTS = (1.0, 0.7, 0.3)


class InputError(Exception):
    pass


def default_torus_generator():
    eta = np.array([w * PAULI["z"] for w in DEFAULT_TORUS_WEIGHTS])
    return embed(eta)


def _complex_matrix(M):
    M = np.asarray(M)
    return {"re": np.real(M).tolist(), "im": np.imag(M).tolist()}


def _load_generator(path):
    try:
        with open(path) as fh:
            obj = json.load(fh)
        F = np.array(obj["re"], dtype=float) + 1j * np.array(obj["im"], dtype=float)
    except (OSError, KeyError, TypeError, ValueError) as exc:
        raise InputError(f"cannot read generator file {path}: {exc}") from None
    if F.shape != (8, 8):
        raise InputError(f"generator must be 8x8, got {F.shape}")
    return F


def _resolve_state(args):
    if args.state and args.catalog:
        raise InputError("give either --state or --catalog, not both")
    if args.state:
        return load_state(args.state), {"state_file": os.path.basename(args.state)}
    name = args.catalog or "HAAR_RANDOM"
    return catalog(name, args.seed), {"catalog": name.upper(), "seed": args.seed}


def _write_json(obj, path):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, allow_nan=False)
        fh.write("\n")


def _facets(args):
    try:
        return load_facets(args.facets)
    except (OSError, ValueError) as exc:
        raise InputError(f"cannot read facet file: {exc}") from None


def analyze_report(psi, facets=None, tol=DEFAULT_TOL):
    """Everything known about one state, as a JSON-ready dict."""
    lam = local_spectra(psi)
    psi_n, g = weyl_normalize(psi, tol)
    report = {
        "state": state_to_json(psi)["amplitudes"],
        "weyl_normalized_state": state_to_json(psi_n)["amplitudes"],
        "weyl_rotation": [_complex_matrix(gk) for gk in g],
        "tolerances": tol.as_dict(),
        "spectra": lam.tolist(),
        "marginal_spectra": marginal_spectra(psi).tolist(),
        "moment": [_complex_matrix(b) for b in moment_map(psi)],
        "chamber_position": chamber_position(lam, tol.interior_gap).value,
        "polytope_position": polytope_position(lam, facets, tol.polytope_gap).value,
        "stabilizer_dim": stabilizer_dimension(psi, tol.rank),
        "orbit_type": str(orbit_type(psi, tol.rank)),
        "three_tangle": three_tangle(psi),
        "local_model": None,
        "error": None,
    }
    try:
        report["local_model"] = local_model(psi_n, tol).to_json()
    except ReductionError as exc:
        report["error"] = {"code": exc.code, "message": str(exc)}
    return report


def cmd_analyze(args):
    psi, source = _resolve_state(args)
    report = analyze_report(psi, _facets(args))
    report = {"command": "analyze", "version": __version__, "input": source, **report}
    os.makedirs(args.out, exist_ok=True)
    _write_json(report, os.path.join(args.out, "analyze.json"))
    if report["error"] is not None:
        print(f"{report['error']['code']}: {report['error']['message']}", file=sys.stderr)
        return EXIT_PRECONDITION
    return EXIT_OK


def _policy(args, generator):
    if args.policy == "fixed":
        return FlowPolicy.fixed(generator, args.dt, args.duration, stride=args.stride)
    return FlowPolicy.normal(int(args.policy[-1]), args.dt, args.duration,
                             stride=args.stride, selection=args.selection)


def _close(a, b, rtol=1e-8, atol=1e-12):
    if isinstance(a, dict) and isinstance(b, dict):
        return a.keys() == b.keys() and all(_close(a[k], b[k], rtol, atol) for k in a)
    if isinstance(a, list) and isinstance(b, list):
        return len(a) == len(b) and all(_close(x, y, rtol, atol) for x, y in zip(a, b))
    if isinstance(a, (int, float)) and isinstance(b, (int, float)) \
            and not isinstance(a, bool) and not isinstance(b, bool):
        return math.isclose(a, b, rel_tol=rtol, abs_tol=atol)
    return a == b


def cmd_flow(args):
    if not args.dt > 0 or not args.duration >= args.dt:
        raise InputError("--dt must be positive and --duration at least one step")
    psi, source = _resolve_state(args)
    generator = _load_generator(args.generator) if args.generator else default_torus_generator()
    psi_n, _ = weyl_normalize(psi)
    try:
        policy = _policy(args, generator)
    except (ValueError, NotHermitianError) as exc:
        raise InputError(str(exc)) from None
    try:
        tr = piecewise_flow(psi_n, policy)
    except ReductionError as exc:
        print(f"{exc.code}: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION

    summary = {"command": "flow", "version": __version__, "input": source,
               **conservation_report(tr)}
    if args.halvings:
        if policy.kind != "normal":
            raise InputError("--halvings applies to normal-direction policies only")
        study = convergence_study(psi_n, policy.index, args.dt, args.halvings,
                                  args.duration, args.selection)
        for p in study["points"]:
            p["steps"] = int(round(args.duration / p["dt"]))
        summary["convergence"] = study

    os.makedirs(args.out, exist_ok=True)
    tr.write_csv(os.path.join(args.out, "trajectory.csv"))
    _write_json(summary, os.path.join(args.out, "summary.json"))

    if args.golden:
        if args.bless:
            _write_json(summary, args.golden)
        else:
            try:
                with open(args.golden) as fh:
                    ref = json.load(fh)
            except (OSError, json.JSONDecodeError) as exc:
                raise InputError(f"cannot read golden file: {exc}") from None
            if not _close(summary, ref):
                print(f"summary differs from golden file {args.golden}", file=sys.stderr)
                return EXIT_INPUT
    return EXIT_PRECONDITION if tr.exit_reason else EXIT_OK


def sample_rows(n, seed, facets=None, tol=DEFAULT_TOL):
    """Local spectra, stabilizer dimension and polytope position of Haar samples."""
    rows = []
    for i in range(n):
        s = seed + i
        psi = catalog("HAAR_RANDOM", s)
        lam = local_spectra(psi)
        rows.append({
            "seed": s,
            "lam": lam,
            "stabilizer_dim": stabilizer_dimension(psi, tol.rank),
            "position": polytope_position(lam, facets, tol.polytope_gap).value,
            "violations": len(facet_violations(lam, facets, tol.polytope_gap)),
        })
    return sorted(rows, key=lambda r: r["seed"])


def cmd_sample(args):
    if args.samples < 1:
        raise InputError("--samples must be positive")
    facets = _facets(args)
    rows = sample_rows(args.samples, args.seed or 0, facets)
    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "samples.csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["seed", "lam1", "lam2", "lam3", "stabilizer_dim", "position"])
        for r in rows:
            w.writerow([r["seed"]] + [repr(float(x)) for x in r["lam"]]
                       + [r["stabilizer_dim"], r["position"]])
    lam = np.array([r["lam"] for r in rows])
    positions = [r["position"] for r in rows]
    summary = {
        "command": "sample",
        "version": __version__,
        "samples": len(rows),
        "seed": args.seed or 0,
        "facets": [f.to_json() for f in facets],
        "facet_violations": int(sum(r["violations"] for r in rows)),
        "positions": {p: positions.count(p) for p in ("INTERIOR", "BOUNDARY", "OUTSIDE")},
        "lam_min": lam.min(axis=0).tolist(),
        "lam_max": lam.max(axis=0).tolist(),
        "stabilizer_dims": {str(d): sum(r["stabilizer_dim"] == d for r in rows)
                            for d in sorted({r["stabilizer_dim"] for r in rows})},
    }
    _write_json(summary, os.path.join(args.out, "sample_summary.json"))
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="trireduce", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--state", help="JSON state file {\"amplitudes\": [[re, im] x 8]}")
        sp.add_argument("--catalog", help="SEP, BISEP1-3, GHZ, W or HAAR_RANDOM")
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--out", default="out")
        sp.add_argument("--facets", default=None, help="JSON facet list (default: bundled)")

    a = sub.add_parser("analyze", help="moment data, orbit type and local model of a state")
    common(a)
    a.set_defaults(func=cmd_analyze)

    f = sub.add_parser("flow", help="integrate a piecewise reduced flow")
    common(f)
    f.add_argument("--dt", type=float, default=1e-3)
    f.add_argument("--duration", type=float, default=1.0)
    f.add_argument("--policy", choices=["fixed", "normal1", "normal2"], default="normal1")
    f.add_argument("--selection", choices=["midpoint", "start"], default="midpoint")
    f.add_argument("--generator", help="JSON 8x8 Hermitian {\"re\": ..., \"im\": ...} for --policy fixed")
    f.add_argument("--stride", type=int, default=1)
    f.add_argument("--halvings", type=int, default=0,
                   help="also run a convergence study over this many dt halvings")
    f.add_argument("--golden", help="reference summary to compare against (or write with --bless)")
    f.add_argument("--bless", action="store_true", help="overwrite --golden with this run")
    f.set_defaults(func=cmd_flow)

    s = sub.add_parser("sample", help="Haar-sample the moment polytope")
    common(s)
    s.add_argument("--samples", type=int, default=10_000)
    s.set_defaults(func=cmd_sample)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (InputError, StateError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
