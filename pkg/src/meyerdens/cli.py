"""Command line interface: ``meyerdens {estimate,deconvolve,simulate,oracle,basis}``.

Every file written starts with ``#`` comment lines recording the version,
the invocation and the seed. Nothing time-dependent goes into the header,
so repeating a command reproduces its output byte for byte.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
import warnings
from contextlib import contextmanager

import numpy as np

from . import __version__
from .estimator import MeyerDensityEstimator
from .harness import (
    ExperimentConfig,
    emit_report,
    parse_config_file,
    run_experiment,
)
from .meyer import BasisSpec, build_band_table
from .spectral import IllPosedBand, NoiseModel
from .truth import DENSITIES, TruthModel, oracle_quantities
from .utils import log2_ceil

__all__ = ["main", "build_parser", "read_samples"]

PROG = "meyerdens"


class CliError(ValueError):
    """Invalid combination of command line options."""


def _fmt(value) -> str:
    return f"{float(value):.17g}"


def read_samples(path) -> np.ndarray:
    """One number per line; blank lines and ``#`` comments are skipped."""
    values = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                values.append(float(line))
            except ValueError:
                raise ValueError(f"{path}:{lineno}: expected one number per line, got {line!r}") from None
    if not values:
        raise ValueError(f"{path}: no samples")
    return np.asarray(values)


def _auto_int(text):
    return text if text == "auto" else int(text)


def _auto_float(text):
    return text if text == "auto" else float(text)


def _invocation(argv) -> str:
    # the worker count never changes results, so it is left out of the record
    kept, skip = [], False
    for arg in argv:
        if skip:
            skip = False
            continue
        if arg == "--threads":
            skip = True
            continue
        if arg.startswith("--threads="):
            continue
        kept.append(arg)
    return " ".join([PROG] + kept)


def _header(argv, seed) -> list:
    return [
        f"{PROG} {__version__}",
        f"invocation: {_invocation(argv)}",
        f"seed: {'none' if seed is None else seed}",
    ]


@contextmanager
def _open_output(path):
    if path in (None, "-"):
        yield sys.stdout
        return
    try:
        fh = open(path, "w", newline="")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from None
    with fh:
        yield fh


def _write_table(path, header, columns, rows):
    buf = io.StringIO()
    for line in header:
        buf.write(f"# {line}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    writer.writerows(rows)
    with _open_output(path) as fh:
        fh.write(buf.getvalue())


# ---------------------------------------------------------------- parser


def _add_output(p):
    p.add_argument("--output", "-o", default=None, help="output CSV path (default: stdout)")


def _add_fit_options(p):
    p.add_argument("--input", "-i", required=True, help="CSV file, one sample per line")
    p.add_argument("--grid", type=int, default=512, help="number of grid points (power of two)")
    p.add_argument("--j0", type=_auto_int, default="auto")
    p.add_argument("--j1", type=_auto_int, default="auto")
    p.add_argument("--J", type=int, default=None, help="transform depth")
    p.add_argument("--delta", type=_auto_float, default="auto")
    p.add_argument("--alpha", type=_auto_float, default="auto",
                   help="log-factor exponent of the automatic delta (auto: 0 direct, 0.5 deconvolve)")
    p.add_argument("--rule", choices=("random", "level"), default="random")
    p.add_argument("--variance", choices=("vhat", "sigma2"), default="vhat",
                   help="variance estimate inside the random thresholds")
    p.add_argument("--post", choices=("raw", "clip", "clip-renorm", "clip-renormalize"), default="raw")
    p.add_argument("--no-rescale", action="store_true", help="samples already lie in [0, 1]")
    p.add_argument("--margin", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=None, help="accepted for uniformity; fitting is deterministic")
    _add_output(p)


def _add_noise_options(p, required):
    p.add_argument("--noise", choices=("none", "laplace"), required=required)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--sigma-eps", type=float, default=None, help="noise standard deviation")
    group.add_argument("--s2n", type=float, default=None, help="root signal-to-noise ratio")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=PROG, description="Meyer wavelet density estimation and deconvolution.")
    parser.add_argument("--version", action="version", version=f"{PROG} {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="density estimate on a grid")
    _add_fit_options(p)

    p = sub.add_parser("deconvolve", help="density estimate from noisy samples")
    _add_fit_options(p)
    _add_noise_options(p, required=True)

    p = sub.add_parser("simulate", help="Monte Carlo risk-ratio curves")
    p.add_argument("--config", default=None, help="key = value file; flags override it")
    p.add_argument("--density", choices=DENSITIES)
    p.add_argument("--mode", choices=("direct", "deconvolve"))
    p.add_argument("--n", type=int)
    p.add_argument("--reps", type=int)
    p.add_argument("--j1", help="comma separated levels")
    p.add_argument("--j0", type=int)
    p.add_argument("--J", type=int)
    p.add_argument("--delta", help="start:step:stop or a comma separated list")
    p.add_argument("--sigma-eps", type=float)
    p.add_argument("--s2n", type=float)
    p.add_argument("--variance", choices=("vhat", "sigma2"))
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--output", "-o")

    p = sub.add_parser("oracle", help="exact coefficients, standard deviations and oracle keep mask")
    p.add_argument("--density", choices=DENSITIES, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--N", type=int, default=256, help="resolution 2^J")
    p.add_argument("--j0", type=int, default=None)
    _add_noise_options(p, required=False)
    _add_output(p)

    p = sub.add_parser("basis", help="dump the Fourier coefficients of one band")
    p.add_argument("--j", type=int, required=True)
    p.add_argument("--scaling", action="store_true", help="the scaling band at level j instead")
    _add_output(p)
    return parser


# ---------------------------------------------------------------- commands


def _noise_from_args(args, y=None):
    if args.noise in (None, "none"):
        if args.sigma_eps is not None or args.s2n is not None:
            raise CliError("--sigma-eps/--s2n need --noise laplace")
        return NoiseModel.identity()
    if args.sigma_eps is not None:
        return NoiseModel.laplace(args.sigma_eps)
    if args.s2n is None:
        raise CliError("--noise laplace needs --sigma-eps or --s2n")
    if args.s2n <= 0:
        raise CliError("--s2n must be positive")
    if y is None:
        return None
    # Var(Y) = sigma_X^2 + sigma_eps^2 and sigma_X = s2n sigma_eps
    return NoiseModel.laplace(math.sqrt(np.var(y) / (1.0 + args.s2n**2)))


def _fit(args, argv, deconvolve):
    y = read_samples(args.input)
    noise = _noise_from_args(args, y) if deconvolve else None
    est = MeyerDensityEstimator(
        mode="deconvolve" if deconvolve else "direct", noise=noise, j0=args.j0, j1=args.j1,
        delta=args.delta, alpha=args.alpha, J=args.J, rule=args.rule,
        use_sigma2=args.variance == "sigma2", rescale=not args.no_rescale, margin=args.margin,
        grid_size=args.grid, postprocess=args.post,
    )
    est.fit(y)
    header = _header(argv, args.seed) + [
        f"n={est.n_samples_} j0={est.j0_} j1={est.j1_} delta={_fmt(est.delta_)} J={est.spec_.J} "
        f"offset={_fmt(est.rescale_.offset)} scale={_fmt(est.rescale_.scale)}"
        + (f" sigma_eps={_fmt(noise.sigma * 1.0)}" if deconvolve else "")
    ]
    rows = [(_fmt(x), _fmt(f)) for x, f in zip(est.grid_, est.density_)]
    _write_table(args.output, header, ("x", "fhat"), rows)


def _simulate(args, argv):
    values = parse_config_file(args.config) if args.config else {}
    for key in ("density", "mode", "n", "reps", "j1", "j0", "J", "delta", "sigma_eps", "s2n",
                "variance", "seed", "threads", "format", "output"):
        value = getattr(args, key)
        if value is not None:
            values[key] = value
    missing = [k for k in ("density", "n", "j1", "delta") if k not in values]
    if missing:
        raise CliError("simulate needs " + ", ".join("--" + k.replace("_", "-") for k in missing))
    fmt = values.pop("format", "csv")
    variance = values.pop("variance", "vhat")
    if variance not in ("vhat", "sigma2"):
        raise CliError("variance must be 'vhat' or 'sigma2'")
    values["deltas"] = values.pop("delta")
    values.setdefault("seed", 0)
    if "mode" not in values and ("sigma_eps" in values or "s2n" in values):
        values["mode"] = "deconvolve"
    cfg = ExperimentConfig(use_sigma2=variance == "sigma2", **values)
    report = run_experiment(cfg)
    output = cfg.output
    if output in (None, "-"):
        raise CliError("simulate needs --output (the report is written with companion files)")
    emit_report(report, output, fmt=fmt, header=_header(argv, cfg.seed))


def _oracle(args, argv):
    J = log2_ceil(args.N)
    if 2**J != args.N:
        raise CliError("--N must be a power of two")
    noise = _noise_from_args(args)
    if noise is None:
        truth = TruthModel(args.density)
        noise = NoiseModel.laplace(math.sqrt(truth.variance) / args.s2n)
    j0 = args.j0 if args.j0 is not None else int(math.floor(math.log2(math.log(args.n)))) + 1
    spec = BasisSpec(j0, j0, J)
    oq = oracle_quantities(TruthModel(args.density), spec, args.n, noise)
    rows = []
    for j in spec.levels:
        beta = oq.beta.wavelet[j]
        sigma = np.sqrt(np.maximum(oq.sigma2.wavelet[j], 0.0))
        keep = oq.keep_mask(j)
        for k in range(2**j):
            rows.append((j, k, _fmt(abs(beta[k])), _fmt(sigma[k]), int(keep[k])))
    header = _header(argv, None) + [
        f"density={args.density} n={args.n} N={args.N} j0={j0} sigma_eps={_fmt(noise.sigma)}"
    ]
    _write_table(args.output, header, ("j", "k", "abs_beta", "sigma", "keep"), rows)


def _basis(args, argv):
    if args.j < 0:
        raise CliError("--j must be nonnegative")
    spec = BasisSpec(args.j, args.j, args.j + 1)
    table = build_band_table(spec)
    band = table.scaling if args.scaling else table[args.j]
    rows = [(args.j, int(l), _fmt(v.real), _fmt(v.imag)) for l, v in zip(band.freqs, band.values)]
    header = _header(argv, None) + [f"{'scaling' if args.scaling else 'wavelet'} band, level {args.j}"]
    _write_table(args.output, header, ("j", "ell", "re", "im"), rows)


_COMMANDS = {
    "estimate": lambda a, v: _fit(a, v, deconvolve=False),
    "deconvolve": lambda a, v: _fit(a, v, deconvolve=True),
    "simulate": _simulate,
    "oracle": _oracle,
    "basis": _basis,
}


def main(argv=None) -> int:
    """Run the CLI; returns the exit status (0 on success, 1 on a reported error)."""
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            _COMMANDS[args.command](args, argv)
    except (ValueError, ArithmeticError, OSError, IllPosedBand) as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
