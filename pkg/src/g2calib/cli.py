"""Command-line front end.

Subcommands: verify, grassmann-sample, chi-flow, dirac, sw-residual, deform.
Common flags: --seed, --tol, --output, --format.  All outputs carry the run
seed and package version; identical flags and seed give identical output
(the verify report's wall_time_s field is the one timing exception).
"""

import argparse
import json
import sys

import numpy as np

from . import __version__
from .deformations import LambdaParam, SplitFrame, cross_lambda, f_locus_defect, phi_lambda
from .dirac import Connection1Form, SWState, dirac_spectrum, sw_residual
from .forms import Metric7, cross_from_phi_batch, metric_from_phi, phi0
from .grassmann import Immersion3Lattice, chi_flow_step, sample_grassmann
from .verify import run_verification

_FLOAT_FMT = "{:.17g}"


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _json_text(obj):
    return json.dumps(obj, sort_keys=True, indent=2)


def _csv_text(header, rows, seed):
    lines = [f"# g2calib {__version__} seed={seed}", ",".join(header)]
    for row in rows:
        cells = []
        for x in row:
            if isinstance(x, float):
                cells.append(_FLOAT_FMT.format(x))
            else:
                cells.append(str(x))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------


def cmd_verify(args):
    if args.samples < 1:
        print("error: --samples must be >= 1", file=sys.stderr)
        return 2
    report = run_verification(seed=args.seed, samples=args.samples,
                              tol_scale=args.tol)
    d = report.to_json_dict()
    if args.format == "csv":
        rows = [(c["name"], c["identity"], c["max_error"], c["threshold"],
                 int(c["pass"])) for c in d["checks"]]
        text = _csv_text(("name", "identity", "max_error", "threshold", "pass"),
                         rows, args.seed)
    else:
        text = _json_text(d)
    _write(args.output, text)
    for c in report.checks:
        status = "PASS" if c.passed else "FAIL"
        print(f"[{status}] {c.name}: max_error={c.max_error:.3e} "
              f"threshold={c.threshold:.3e}", file=sys.stderr)
    return 0 if report.passed else 1


def cmd_grassmann_sample(args):
    F = sample_grassmann(args.seed, args.count)
    phi_vals = phi0().evaluate_batch(F[:, 0], F[:, 1], F[:, 2])
    from .forms import chi_via_cross_batch
    defect = 2.0 * np.linalg.norm(chi_via_cross_batch(F[:, 0], F[:, 1], F[:, 2]), axis=1)

    def stats(x):
        return {"mean": float(x.mean()), "std": float(x.std()),
                "min": float(x.min()), "max": float(x.max())}

    out = {"schema": 1, "version": __version__, "seed": args.seed,
           "count": args.count, "phi": stats(phi_vals),
           "defect_norm": stats(defect)}
    _write(args.output, _json_text(out))
    return 0


def cmd_chi_flow(args):
    if args.n < 4:
        print("error: --n must be >= 4", file=sys.stderr)
        return 2
    rng = np.random.default_rng(args.seed)
    if args.amplitude == 0.0:
        lat = Immersion3Lattice.flat_torus(args.n)
    else:
        lat = Immersion3Lattice.perturbed_torus(args.n, args.amplitude,
                                                phase=rng.uniform(0, 2 * np.pi))
    rows = []
    try:
        d = lat.defect_norms()
        rows.append((0, float(d.max()), float(d.mean())))
        for step in range(1, args.steps + 1):
            lat = chi_flow_step(lat, args.dt)
            d = lat.defect_norms()
            rows.append((step, float(d.max()), float(d.mean())))
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _write(args.output, _csv_text(("step", "max_defect", "mean_defect"), rows, args.seed))
    if args.snapshot:
        header = ("site", "x1", "x2", "x3", "x4", "x5", "x6", "x7", "defect_norm")
        _write(args.snapshot, _csv_text(header, lat.to_csv_rows(), args.seed))
    return 0


def cmd_dirac(args):
    conn = Connection1Form.u1_constant(args.n, args.twist)
    vals = dirac_spectrum(conn, count=args.count, form=args.form, seed=args.seed)
    rows = [(i, float(v)) for i, v in enumerate(vals)]
    if args.format == "json":
        out = {"schema": 1, "version": __version__, "seed": args.seed,
               "n": args.n, "twist": list(args.twist), "form": args.form,
               "eigenvalues": [float(v) for v in vals]}
        _write(args.output, _json_text(out))
    else:
        _write(args.output, _csv_text(("index", "eigenvalue"), rows, args.seed))
    return 0


def cmd_sw_residual(args):
    try:
        if args.input in (None, "-"):
            state = SWState.from_json_dict(json.load(sys.stdin))
        else:
            with open(args.input) as fh:
                state = SWState.from_json_dict(json.load(fh))
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: cannot read state: {exc}", file=sys.stderr)
        return 1
    r1, r2 = sw_residual(state)
    out = {"schema": 1, "version": __version__, "seed": args.seed,
           "n": state.a.n,
           "dirac_residual_norm": float(np.linalg.norm(r1)),
           "curvature_residual_norm": float(np.linalg.norm(r2)),
           "total_norm": float(np.sqrt(np.linalg.norm(r1) ** 2 + np.linalg.norm(r2) ** 2))}
    _write(args.output, _json_text(out))
    return 0


def cmd_deform(args):
    rng = np.random.default_rng(args.seed)
    g = Metric7.identity()
    split = SplitFrame(np.eye(7)[0], np.eye(7)[1])
    rows = []
    for _ in range(args.count):
        l = LambdaParam.from_vector8(rng.normal(size=8))
        pl = phi_lambda(l)
        metric_err = float(np.max(np.abs(metric_from_phi(pl).matrix - np.eye(7))))
        cross_err = 0.0
        for _ in range(3):
            u, v = rng.normal(size=(2, 7))
            d = cross_lambda(l, u, v) - cross_from_phi_batch(pl, g, u[None], v[None])[0]
            cross_err = max(cross_err, float(np.max(np.abs(d))))
        fnorm = float(np.linalg.norm(f_locus_defect(l, split)))
        rows.append((l.a, *[float(x) for x in l.alpha], metric_err, cross_err, fnorm))
    header = ("a", "alpha1", "alpha2", "alpha3", "alpha4", "alpha5", "alpha6",
              "alpha7", "metric_error", "cross_deviation_error", "f_norm")
    _write(args.output, _csv_text(header, rows, args.seed))
    return 0


# ---------------------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(
        prog="g2calib",
        description="Numerical G2/Spin(7) calibrated-geometry toolkit")
    p.add_argument("--version", action="version", version=f"g2calib {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int, default=0, help="run seed (default 0)")
        sp.add_argument("--tol", type=float, default=1.0,
                        help="scale factor on check thresholds (verify only)")
        sp.add_argument("--output", default=None, help="output path (default stdout)")
        sp.add_argument("--format", choices=("json", "csv"), default=None,
                        help="output format (default depends on subcommand)")

    sp = sub.add_parser("verify", help="run every identity suite; exit 0 iff all pass")
    common(sp)
    sp.add_argument("--samples", type=int, default=100_000,
                    help="random samples per suite (default 100000)")
    sp.set_defaults(fn=cmd_verify, format_default="json")

    sp = sub.add_parser("grassmann-sample",
                        help="statistics of the calibration value over Haar 3-planes")
    common(sp)
    sp.add_argument("--count", type=int, default=100_000)
    sp.set_defaults(fn=cmd_grassmann_sample, format_default="json")

    sp = sub.add_parser("chi-flow", help="defect-flow trace on an immersed 3-torus")
    common(sp)
    sp.add_argument("--n", type=int, default=8, help="grid size (>= 4)")
    sp.add_argument("--steps", type=int, default=50)
    sp.add_argument("--dt", type=float, default=0.02)
    sp.add_argument("--amplitude", type=float, default=0.01,
                    help="normal perturbation amplitude; 0 = flat torus")
    sp.add_argument("--snapshot", default=None,
                    help="also write the final lattice as CSV site rows")
    sp.set_defaults(fn=cmd_chi_flow, format_default="csv")

    sp = sub.add_parser("dirac", help="low spectrum of the twisted lattice Dirac operator")
    common(sp)
    sp.add_argument("--n", type=int, default=8, help="grid size")
    sp.add_argument("--twist", type=float, nargs=3, default=(0.0, 0.0, 0.0),
                    metavar=("T1", "T2", "T3"),
                    help="constant determinant-line twist (three imaginary parts)")
    sp.add_argument("--count", type=int, default=20, help="number of eigenvalues")
    sp.add_argument("--form", choices=("real", "complex"), default="real")
    sp.set_defaults(fn=cmd_dirac, format_default="csv")

    sp = sub.add_parser("sw-residual",
                        help="residual norms of a monopole-equation state from JSON")
    common(sp)
    sp.add_argument("--input", default=None, help="state JSON path (default stdin)")
    sp.set_defaults(fn=cmd_sw_residual, format_default="json")

    sp = sub.add_parser("deform", help="scan of the metric-preserving 3-form family")
    common(sp)
    sp.add_argument("--count", type=int, default=1000, help="family samples")
    sp.set_defaults(fn=cmd_deform, format_default="csv")
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = args.format_default
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
