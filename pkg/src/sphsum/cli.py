"""Command-line interface.

Every subcommand takes a JSON configuration, inline or as a file path,
and writes CSV (header always present, complex numbers as Re/Im column
pairs).  Exit codes: 0 success, 2 configuration, 3 dimension mismatch,
4 capability limit, 5 numerical-quality gate.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np
from scipy import integrate

from . import __version__
from .biorth import build_biorth, kernel, transformed_kernel
from .ensembles import GUE, LUE, DegenerateEnsembleError, Fixed, as_pe, ensemble_from_json, transform_of
from .mc import Histogram, UnsamplableError, kernel_marginal, ks_distance, marginal_cdf, sample_ensemble, sample_sum
from .quadrature import QuadratureError
from .spherical import spherical_phi, spherical_phi_mc
from .sums import CapabilityError, sum_density, summed_ensemble
from .transform import DimensionTooLargeError, InconsistentTransformError, evaluate, forward_numeric

log = logging.getLogger("sphsum")

EXIT_OK, EXIT_CONFIG, EXIT_DIM, EXIT_CAPABILITY, EXIT_GATE = 0, 2, 3, 4, 5


class CliError(Exception):
    def __init__(self, code, msg):
        super().__init__(msg)
        self.code = code


def _config(text):
    if text is None:
        raise CliError(EXIT_CONFIG, "missing --config")
    try:
        if text.lstrip().startswith("{"):
            cfg = json.loads(text)
        else:
            cfg = json.loads(Path(text).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(EXIT_CONFIG, f"cannot read configuration: {exc}") from exc
    if not isinstance(cfg, dict):
        raise CliError(EXIT_CONFIG, "configuration must be a JSON object")
    return cfg


def _need(cfg, key):
    if key not in cfg:
        raise CliError(EXIT_CONFIG, f"configuration lacks {key!r}")
    return cfg[key]


def _ensemble(spec):
    try:
        return ensemble_from_json(spec)
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError(EXIT_CONFIG, f"bad ensemble {spec!r}: {exc}") from exc


def _points(raw, n, name):
    """List of n-vectors (scalars allowed when n == 1)."""
    try:
        arr = np.asarray(raw, dtype=float)
    except (TypeError, ValueError) as exc:
        raise CliError(EXIT_CONFIG, f"{name} must be numeric") from exc
    if arr.ndim == 1 and n == 1:
        arr = arr[:, None]
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2:
        raise CliError(EXIT_CONFIG, f"{name} must be a list of vectors")
    if arr.shape[1] != n:
        raise CliError(EXIT_DIM, f"{name} has vectors of length {arr.shape[1]}, expected {n}")
    return arr


def _grid(raw, name):
    if isinstance(raw, dict):
        try:
            return np.linspace(float(raw["start"]), float(raw["stop"]), int(raw["num"]))
        except (KeyError, ValueError) as exc:
            raise CliError(EXIT_CONFIG, f"{name} grid needs start/stop/num") from exc
    try:
        arr = np.asarray(raw, dtype=float).ravel()
    except (TypeError, ValueError) as exc:
        raise CliError(EXIT_CONFIG, f"{name} must be numeric") from exc
    return arr


def _fmt(v):
    return repr(float(v))


class _Out:
    def __init__(self, path):
        self.fh = open(path, "w", newline="", encoding="utf-8") if path else sys.stdout
        self.w = csv.writer(self.fh, lineterminator="\n")

    def row(self, values):
        self.w.writerow([v if isinstance(v, str) else _fmt(v) for v in values])

    def close(self):
        if self.fh is not sys.stdout:
            self.fh.close()


def _threads(args):
    if args.threads:
        return max(1, args.threads)
    env = os.environ.get("SPHSUM_THREADS")
    try:
        return max(1, int(env)) if env else 1
    except ValueError:
        raise CliError(EXIT_CONFIG, f"SPHSUM_THREADS={env!r} is not an integer")


# -- subcommands ------------------------------------------------------------


def cmd_phi(args, out):
    cfg = _config(args.config)
    s = np.asarray(_need(cfg, "s"), dtype=float).ravel()
    x = np.asarray(_need(cfg, "x"), dtype=float).ravel()
    if len(s) != len(x):
        raise CliError(EXIT_DIM, f"len(s)={len(s)} but len(x)={len(x)}")
    val = spherical_phi(s, x)
    head = ["re", "im"]
    row = [val.real, val.imag]
    if args.mc:
        est, err = spherical_phi_mc(s, x, samples=args.mc, seed=args.seed, workers=_threads(args))
        head += ["mc_re", "mc_im", "mc_stderr"]
        row += [est.real, est.imag, err]
    out.row(head)
    out.row(row)


def cmd_transform(args, out):
    cfg = _config(args.config)
    ens = _ensemble(_need(cfg, "ensemble"))
    s = _points(_need(cfg, "s"), ens.n, "s")
    rep = transform_of(ens)
    vals = np.atleast_1d(evaluate(rep, s))
    head = [f"s{j + 1}" for j in range(ens.n)] + ["re", "im"]
    if args.numeric:
        num = np.atleast_1d(forward_numeric(ens, s))
        head += ["num_re", "num_im", "check"]
    out.row(head)
    for i, row in enumerate(s):
        r = list(row) + [vals[i].real, vals[i].imag]
        if args.numeric:
            r += [num[i].real, num[i].imag, abs(num[i] - vals[i])]
        out.row(r)
    if args.numeric:
        worst = float(np.max(np.abs(num - vals)))
        log.info("max |numeric - structured| = %.3e", worst)
        if worst > args.tol:
            raise CliError(EXIT_GATE, f"numeric and structured transforms differ by {worst:.2e}")


def cmd_sum(args, out):
    cfg = _config(args.config)
    a = _ensemble(_need(cfg, "a"))
    b = _ensemble(_need(cfg, "b"))
    if a.n != b.n:
        raise CliError(EXIT_DIM, f"ensemble sizes differ: {a.n} vs {b.n}")
    kind = cfg.get("kind", "marginal" if args.marginal else "joint")
    method = cfg.get("method", "auto")
    if kind == "marginal":
        x = _grid(_need(cfg, "x"), "x")
        vals, path = sum_density(a, b, x, kind="marginal", return_path=True)
        out.row(["x", "density", "path"])
        for xi, v in zip(x, vals):
            out.row([xi, v, path])
    else:
        x = _points(_need(cfg, "x"), a.n, "x")
        vals, path = sum_density(a, b, x, kind=kind, method=method, return_path=True)
        vals = np.atleast_1d(vals)
        out.row([f"x{j + 1}" for j in range(a.n)] + ["density", "path"])
        for row, v in zip(x, vals):
            out.row(list(row) + [v, path])
    log.info("sum path: %s", path)


def cmd_kernel(args, out):
    cfg = _config(args.config)
    ens = _ensemble(_need(cfg, "ensemble"))
    x = _grid(_need(cfg, "x"), "x")
    system = build_biorth(as_pe(ens))
    if args.transformed:
        alpha = float(cfg.get("alpha", 0.0))
        k = transformed_kernel(system, alpha)
    else:
        k = kernel(system)
    if args.full:
        mat = k(x, x)
        out.row(["x", "y", "K"])
        for i, xi in enumerate(x):
            for j, yj in enumerate(x):
                out.row([xi, yj, mat[i, j]])
        return
    diag = k.diag(x)
    trace = k.trace()
    head = ["x", "K_xx", "trace"]
    check = None
    if args.transformed and args.check:
        ref = sum_density(ens, LUE(ens.n, float(cfg.get("alpha", 0.0))), x, kind="marginal") * ens.n
        check = np.abs(ref - diag)
        head.append("check")
    out.row(head)
    for i, xi in enumerate(x):
        r = [xi, diag[i], trace]
        if check is not None:
            r.append(check[i])
        out.row(r)
    if check is not None and float(np.max(check)) > 1e-4:
        raise CliError(EXIT_GATE, f"transformed kernel and sum marginal differ by {np.max(check):.2e}")


def _target_marginal(spec_a, spec_b):
    if spec_b is None:
        return kernel_marginal(spec_a)
    ens, _ = summed_ensemble(spec_a, spec_b)
    return kernel_marginal(ens)


def _csv_cdf(path):
    """CDF from a marginal CSV with columns ``x`` and ``density`` (as written by ``sum``)."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
        x = np.array([float(r["x"]) for r in rows])
        f = np.array([float(r["density"]) for r in rows])
    except (OSError, KeyError, ValueError) as exc:
        raise CliError(EXIT_CONFIG, f"cannot read marginal CSV {path!r}: {exc}") from exc
    if len(x) < 3 or np.any(np.diff(x) <= 0):
        raise CliError(EXIT_CONFIG, "marginal CSV needs an increasing x grid")
    c = integrate.cumulative_trapezoid(f, x, initial=0.0)
    return lambda t: np.interp(t, x, c, left=0.0, right=c[-1])


def _sampled(a, b, size, seed, workers):
    try:
        if b is None:
            return sample_ensemble(a, size, seed=seed, workers=workers)
        return sample_sum(a, b, seed=seed, size=size, workers=workers)
    except UnsamplableError as exc:
        raise CliError(EXIT_CAPABILITY, str(exc)) from exc


def cmd_validate(args, out):
    cfg = _config(args.config)
    a = _ensemble(_need(cfg, "a"))
    b = _ensemble(cfg["b"]) if "b" in cfg else None
    size = int(cfg.get("samples", args.samples))
    gate = float(cfg.get("gate", args.gate))
    spectra = _sampled(a, b, size, args.seed, _threads(args))
    tgt = cfg.get("target")
    if tgt is not None and "csv" in tgt:
        cdf = _csv_cdf(tgt["csv"])
    else:
        if tgt is not None:
            ta = _ensemble(_need(tgt, "a"))
            tb = _ensemble(tgt["b"]) if "b" in tgt else None
        else:
            ta, tb = a, b
        dens, (lo, hi) = _target_marginal(ta, tb)
        cdf = marginal_cdf(dens, lo, hi)
    ks = ks_distance(spectra.ravel(), cdf)
    ok = ks < gate
    out.row(["ks", "samples", "gate", "seed", "result"])
    out.row([ks, str(size), gate, str(args.seed), "pass" if ok else "fail"])
    if not ok:
        raise CliError(EXIT_GATE, f"KS distance {ks:.4f} exceeds gate {gate}")


def cmd_sample(args, out):
    cfg = _config(args.config)
    a = _ensemble(_need(cfg, "a"))
    b = _ensemble(cfg["b"]) if "b" in cfg else None
    size = int(cfg.get("samples", args.samples))
    spectra = _sampled(a, b, size, args.seed, _threads(args))
    if args.histogram:
        h = Histogram.from_samples(spectra.ravel())
        out.row(["bin_left", "bin_right", "density"])
        for r in h.rows():
            out.row(r)
        return
    out.row([f"lambda{j + 1}" for j in range(spectra.shape[1])])
    for row in spectra:
        out.row(row)


# -- entry point ------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="sphsum", description="Spherical transforms of invariant random matrices.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", "-c", help="JSON object or path to a JSON file")
    common.add_argument("--output", "-o", help="CSV output file (default: stdout)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=None, help="worker cap (env SPHSUM_THREADS)")
    common.add_argument("--verbose", "-v", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("phi", parents=[common], help="spherical function phi_s(x)")
    sp.add_argument("--mc", type=int, default=0, metavar="N", help="add a Haar Monte Carlo estimate")
    sp.set_defaults(func=cmd_phi)

    sp = sub.add_parser("transform", parents=[common], help="spherical transform on an s-grid")
    sp.add_argument("--numeric", action="store_true", help="cross-check by quadrature")
    sp.add_argument("--tol", type=float, default=1e-6)
    sp.set_defaults(func=cmd_transform)

    sp = sub.add_parser("sum", parents=[common], help="density of a sum of two ensembles")
    sp.add_argument("--marginal", action="store_true", help="one-point density on a 1-d grid")
    sp.set_defaults(func=cmd_sum)

    sp = sub.add_parser("kernel", parents=[common], help="correlation kernel diagonal")
    sp.add_argument("--transformed", action="store_true", help="kernel after adding an LUE matrix")
    sp.add_argument("--check", action="store_true", help="compare with the sum marginal")
    sp.add_argument("--full", action="store_true", help="emit K(x, y) on the grid squared")
    sp.set_defaults(func=cmd_kernel)

    sp = sub.add_parser("validate", parents=[common], help="Monte Carlo KS gate")
    sp.add_argument("--samples", type=int, default=50_000)
    sp.add_argument("--gate", type=float, default=0.02)
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("sample", parents=[common], help="dump sampled spectra")
    sp.add_argument("--samples", type=int, default=1000)
    sp.add_argument("--histogram", action="store_true")
    sp.set_defaults(func=cmd_sample)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    root = logging.getLogger("sphsum")
    root.handlers = [handler]
    root.setLevel(logging.INFO if args.verbose else logging.WARNING)
    root.propagate = False
    out = None
    try:
        out = _Out(args.output)
        args.func(args, out)
        return EXIT_OK
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (DimensionTooLargeError, CapabilityError, UnsamplableError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPABILITY
    except (InconsistentTransformError, QuadratureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GATE
    except (DegenerateEnsembleError, KeyError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    finally:
        if out is not None:
            out.close()


if __name__ == "__main__":
    sys.exit(main())
