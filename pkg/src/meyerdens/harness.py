"""Monte Carlo risk-ratio experiments against the oracle risk."""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .meyer import BasisSpec, build_band_table, fourier_size_for
from .spectral import NoiseModel, deconvolution_weights, empirical_fourier
from .threshold import estimate_variance, select_hyperparams_direct, threshold_formula
from .transform import forward_fast
from .truth import DENSITIES, TruthModel, oracle_quantities
from .utils import log2_ceil

__all__ = [
    "ExperimentConfig",
    "RiskReport",
    "parse_delta_grid",
    "parse_config_file",
    "default_depth",
    "default_threads",
    "run_experiment",
    "emit_report",
    "read_report_csv",
    "CSV_COLUMNS",
]

CSV_COLUMNS = (
    "density", "mode", "n", "j1", "delta", "mean_Rn", "se_Rn",
    "mean_Rtilde", "se_Rtilde", "oracle_risk", "seed", "M",
)

THREADS_ENV = "MEYERDENS_THREADS"


def default_depth(n: int) -> int:
    return max(8, log2_ceil(n))


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def parse_delta_grid(text) -> np.ndarray:
    """``'start:step:stop'`` (inclusive) or a comma separated list."""
    if not isinstance(text, str):
        return np.atleast_1d(np.asarray(text, dtype=float))
    text = text.strip()
    if ":" in text:
        start, step, stop = (float(v) for v in text.split(":"))
        if step <= 0:
            raise ValueError("delta grid step must be positive")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return np.round(start + step * np.arange(max(count, 0)), 12)
    if not text:
        return np.array([])
    return np.array([float(v) for v in text.split(",")])


def _parse_int_list(text):
    if isinstance(text, str):
        return tuple(int(v) for v in text.split(",") if v.strip())
    return tuple(int(v) for v in np.atleast_1d(text))


@dataclass
class ExperimentConfig:
    """One risk-curve experiment.

    In ``'deconvolve'`` mode give exactly one of ``sigma_eps`` and ``s2n``;
    the latter sets ``sigma_eps = sigma_X / s2n`` from the exact density
    variance. ``J`` defaults to ``max(8, ceil(log2 n))`` and ``j0`` to
    ``floor(log2(log n)) + 1``.
    """

    density: str
    n: int
    j1: Sequence[int]
    deltas: Sequence[float]
    reps: int = 100
    mode: str = "direct"
    sigma_eps: Optional[float] = None
    s2n: Optional[float] = None
    seed: int = 0
    J: Optional[int] = None
    j0: Optional[int] = None
    threads: Optional[int] = None
    use_sigma2: bool = False
    keep_raw: bool = False
    output: Optional[str] = None

    def __post_init__(self):
        self.density = self.density.lower()
        if self.density not in DENSITIES:
            raise ValueError(f"unknown density {self.density!r}")
        if self.mode not in ("direct", "deconvolve"):
            raise ValueError("mode must be 'direct' or 'deconvolve'")
        self.n = int(self.n)
        if self.n < 3:
            raise ValueError("n must be at least 3")
        if int(self.reps) < 1:
            raise ValueError("reps must be at least 1")
        self.reps = int(self.reps)
        self.deltas = parse_delta_grid(self.deltas)
        if self.deltas.size == 0:
            raise ValueError("delta grid is empty")
        if np.any(self.deltas < 0) or not np.all(np.isfinite(self.deltas)):
            raise ValueError("delta grid must be finite and nonnegative")
        self.j1 = _parse_int_list(self.j1)
        if not self.j1:
            raise ValueError("need at least one j1")
        if self.mode == "deconvolve":
            if (self.sigma_eps is None) == (self.s2n is None):
                raise ValueError("deconvolve mode needs exactly one of sigma_eps and s2n")
        elif self.sigma_eps is not None or self.s2n is not None:
            raise ValueError("noise settings only apply to deconvolve mode")
        if self.J is None:
            self.J = default_depth(self.n)
        if self.j0 is None:
            self.j0 = select_hyperparams_direct(self.n)[0]
        BasisSpec(self.j0, max(self.j1), self.J)
        if min(self.j1) < self.j0:
            raise ValueError(f"every j1 must be >= j0={self.j0}")

    @property
    def noise(self) -> NoiseModel:
        if self.mode == "direct":
            return NoiseModel.identity()
        if self.sigma_eps is not None:
            return NoiseModel.laplace(self.sigma_eps)
        return NoiseModel.laplace(math.sqrt(TruthModel(self.density).variance) / self.s2n)


@dataclass
class RiskReport:
    """Mean and standard error of the two risk ratios over the ``(j1, delta)`` grid.

    Arrays are indexed ``[j1 index, delta index]``; ``raw_R`` and
    ``raw_Rtilde`` (if kept) add a leading replicate axis.
    """

    config: ExperimentConfig
    j1: np.ndarray
    deltas: np.ndarray
    mean_R: np.ndarray
    se_R: np.ndarray
    mean_Rtilde: np.ndarray
    se_Rtilde: np.ndarray
    oracle_risk: np.ndarray
    J: int
    sigma_eps: float
    clamped: int = 0
    raw_R: Optional[np.ndarray] = field(default=None, repr=False)
    raw_Rtilde: Optional[np.ndarray] = field(default=None, repr=False)

    def argmin_delta(self, j1: int, tilde: bool = False) -> float:
        row = list(self.j1).index(j1)
        curve = (self.mean_Rtilde if tilde else self.mean_R)[row]
        return float(self.deltas[int(np.argmin(curve))])

    def rows(self):
        cfg = self.config
        for a, j1 in enumerate(self.j1):
            for b, delta in enumerate(self.deltas):
                yield {
                    "density": cfg.density, "mode": cfg.mode, "n": cfg.n,
                    "j1": int(j1), "delta": float(delta),
                    "mean_Rn": float(self.mean_R[a, b]), "se_Rn": float(self.se_R[a, b]),
                    "mean_Rtilde": float(self.mean_Rtilde[a, b]),
                    "se_Rtilde": float(self.se_Rtilde[a, b]),
                    "oracle_risk": float(self.oracle_risk[a]), "seed": cfg.seed,
                    "M": cfg.reps,
                }


class _Replicate:
    """Everything one replicate needs; shared read-only across worker threads."""

    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        self.truth = TruthModel(cfg.density)
        self.noise = cfg.noise
        self.top = max(cfg.j1)
        self.spec = BasisSpec(cfg.j0, self.top, cfg.J)
        self.weights = deconvolution_weights(build_band_table(self.spec), self.noise)
        self.grid = fourier_size_for(self.top)
        self.oq = oracle_quantities(self.truth, self.spec, cfg.n, self.noise, max_level=self.top)
        self.denominators = np.array([sum(self.oq.risk_terms(j1)) for j1 in cfg.j1])
        if np.any(self.denominators <= 0):
            raise ArithmeticError("oracle risk is not positive")
        beta = self.oq.beta
        self.tails = np.array(
            [sum(float(np.sum(beta.wavelet[j] ** 2)) for j in range(j1 + 1, cfg.J)) for j1 in cfg.j1]
        )
        self.levels = list(range(cfg.j0, self.top + 1))
        dl = cfg.deltas[:, None]
        self.level_tau = {j: dl * math.sqrt(j / cfg.n) for j in self.levels}

    def errors(self, seed_seq):
        """Numerators of both ratios for one replicate, shape ``(len(j1), len(deltas))`` each."""
        cfg = self.cfg
        rng = np.random.default_rng(seed_seq)
        x, clamped = self.truth.sample(rng, cfg.n, return_clamped=True)
        direct = cfg.mode == "direct"
        y = x if direct else x + self.noise.sample(rng, cfg.n)
        fourier = empirical_fourier(y, self.grid, check_range=direct)
        coeffs = forward_fast(fourier, self.weights, max_level=self.top)
        vt = estimate_variance(y, self.weights, max_level=self.top, check_range=direct)
        variances = vt.sigma2hat if cfg.use_sigma2 else vt.vhat
        beta = self.oq.beta
        scaling_err = float(np.sum((coeffs.scaling - beta.scaling) ** 2))
        per_level, per_level_t = [], []
        for j in self.levels:
            b, true = coeffs.wavelet[j], beta.wavelet[j]
            tau = threshold_formula(variances.wavelet[j][None, :], vt.eta[j], cfg.n, cfg.deltas[:, None])
            kept = np.where(np.abs(b) >= tau, b, 0.0)
            per_level.append(np.sum((kept - true) ** 2, axis=1))
            kept_t = np.where(np.abs(b) >= self.level_tau[j], b, 0.0)
            per_level_t.append(np.sum((kept_t - true) ** 2, axis=1))
        cum = np.cumsum(per_level, axis=0)
        cum_t = np.cumsum(per_level_t, axis=0)
        rows = [j1 - cfg.j0 for j1 in cfg.j1]
        num = scaling_err + cum[rows] + self.tails[:, None]
        num_t = scaling_err + cum_t[rows] + self.tails[:, None]
        return num, num_t, clamped


def run_experiment(cfg: ExperimentConfig) -> RiskReport:
    """Run ``cfg.reps`` replicates and summarize ``R_n`` and ``R~_n`` on the grid.

    Replicates draw from independent streams spawned from ``cfg.seed``; the
    same samples serve every ``(j1, delta)`` and both threshold rules.
    Results do not depend on the number of worker threads.
    """
    rep = _Replicate(cfg)
    streams = np.random.SeedSequence(cfg.seed).spawn(cfg.reps)
    threads = cfg.threads or default_threads()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(rep.errors, streams))
    else:
        results = [rep.errors(s) for s in streams]
    num = np.stack([r[0] for r in results])
    num_t = np.stack([r[1] for r in results])
    clamped = sum(r[2] for r in results)
    denom = rep.denominators[None, :, None]
    R, Rt = num / denom, num_t / denom
    M = cfg.reps

    def se(a):
        if M < 2:
            return np.full(a.shape[1:], np.nan)
        return a.std(axis=0, ddof=1) / math.sqrt(M)

    return RiskReport(
        config=cfg, j1=np.array(cfg.j1), deltas=cfg.deltas.copy(),
        mean_R=R.mean(axis=0), se_R=se(R), mean_Rtilde=Rt.mean(axis=0), se_Rtilde=se(Rt),
        oracle_risk=rep.denominators, J=cfg.J, sigma_eps=cfg.noise.sigma, clamped=clamped,
        raw_R=R if cfg.keep_raw else None, raw_Rtilde=Rt if cfg.keep_raw else None,
    )


def _fmt(value):
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def _header_lines(report, header):
    cfg = report.config
    lines = list(header or [])
    lines.append(
        f"density={cfg.density} mode={cfg.mode} n={cfg.n} M={cfg.reps} J={report.J} "
        f"j0={cfg.j0} sigma_eps={_fmt(float(report.sigma_eps))} seed={cfg.seed} "
        f"clamped={report.clamped}"
    )
    return ["# " + line for line in lines]


def emit_report(report: RiskReport, path, fmt: str = "csv", header=None) -> list:
    """Write the report and per-``j1`` plot files; returns the written paths.

    ``header`` lines are written as ``#`` comments ahead of the data.
    """
    path = Path(path)
    if fmt not in ("csv", "json"):
        raise ValueError("format must be 'csv' or 'json'")
    rows = list(report.rows())
    written = []
    try:
        if fmt == "csv":
            with open(path, "w", newline="") as fh:
                for line in _header_lines(report, header):
                    fh.write(line + "\n")
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(CSV_COLUMNS)
                for row in rows:
                    writer.writerow([_fmt(row[c]) for c in CSV_COLUMNS])
        else:
            # thread count and output path do not affect results; leave them out
            skip = {"deltas", "threads", "output"}
            meta = {k: v for k, v in asdict(report.config).items() if k not in skip}
            meta["deltas"] = [float(d) for d in report.deltas]
            meta["J"] = report.J
            meta["header"] = list(header or [])
            with open(path, "w") as fh:
                json.dump({"meta": meta, "columns": list(CSV_COLUMNS), "rows": rows}, fh, indent=1)
                fh.write("\n")
        written.append(path)
        for a, j1 in enumerate(report.j1):
            plot = path.with_name(f"{path.stem}_j1_{int(j1)}.csv")
            with open(plot, "w", newline="") as fh:
                for line in _header_lines(report, header):
                    fh.write(line + "\n")
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(("delta", "mean_Rn", "mean_Rtilde"))
                for b, delta in enumerate(report.deltas):
                    writer.writerow([_fmt(float(delta)), _fmt(float(report.mean_R[a, b])),
                                     _fmt(float(report.mean_Rtilde[a, b]))])
            written.append(plot)
    except OSError as exc:
        raise OSError(f"cannot write report to {exc.filename or path}: {exc.strerror}") from exc
    return written


def read_report_csv(path) -> list:
    """Parse a report CSV back into row dicts with numeric fields converted."""
    ints = {"n", "j1", "seed", "M"}
    strs = {"density", "mode"}
    with open(path) as fh:
        lines = [line for line in fh if not line.startswith("#")]
    out = []
    for row in csv.DictReader(lines):
        out.append({k: (v if k in strs else int(v) if k in ints else float(v)) for k, v in row.items()})
    return out


_CONFIG_KEYS = {
    "density": str, "mode": str, "n": int, "reps": int, "delta": str, "j1": str,
    "sigma_eps": float, "s2n": float, "seed": int, "J": int, "j0": int, "threads": int,
    "variance": str, "output": str, "format": str,
}


def parse_config_file(path) -> dict:
    """Read a flat ``key = value`` file (``#`` comments allowed) into a dict of typed values."""
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in _CONFIG_KEYS:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            out[key] = _CONFIG_KEYS[key](value)
    return out
