"""Deterministic chunked Monte Carlo of received power and its lower tail.

Every chunk of samples draws from its own stream, keyed by (seed, chunk index,
branch index), so counts do not depend on how chunks are spread over workers.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .diversity import BranchSet, DiversityScheme, MRC, SC
from .models.base import ChannelModel, DomainError

DEFAULT_CHUNK = 2 ** 20
Z95 = 1.96


class InsufficientDataError(ValueError):
    """Too few usable points for a fit."""


@dataclass(frozen=True)
class SampleSpec:
    model: ChannelModel
    n: int
    seed: int
    chunk: int = DEFAULT_CHUNK

    def __post_init__(self):
        _check_run(self.n, self.seed, self.chunk)


def _check_run(n, seed, chunk):
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n}")
    if int(seed) != seed or not 0 <= seed < 2 ** 64:
        raise DomainError(f"seed must be an unsigned 64-bit integer, got {seed}")
    if int(chunk) != chunk or chunk < 1:
        raise DomainError(f"chunk must be a positive integer, got {chunk}")


def stream(seed: int, chunk_index: int, branch: int = 0) -> np.random.Generator:
    """Generator for one (chunk, branch) cell of a run."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(chunk_index), int(branch)))
    return np.random.Generator(np.random.PCG64(ss))


def sample_power(model: ChannelModel, rng: np.random.Generator, n: int = 1) -> np.ndarray:
    """``n`` i.i.d. received powers of ``model``."""
    return np.asarray(model.sample(rng, n), dtype=float)


@dataclass
class EmpiricalTail:
    thresholds: np.ndarray
    counts: np.ndarray
    n: int
    seed: int | None = None
    reference_power: float = 1.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.thresholds = np.asarray(self.thresholds, dtype=float)
        self.counts = np.asarray(self.counts, dtype=np.int64)

    @property
    def eps_hat(self) -> np.ndarray:
        return self.counts / self.n

    @property
    def ci95(self) -> np.ndarray:
        e = self.eps_hat
        return Z95 * np.sqrt(e * (1.0 - e) / self.n)

    @property
    def threshold_dB(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return 10.0 * np.log10(self.thresholds / self.reference_power)

    def rows(self):
        for t, c, e, h in zip(self.threshold_dB, self.counts, self.eps_hat, self.ci95):
            yield float(t), int(c), self.n, float(e), float(h)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["threshold_dB", "count", "n", "eps_hat", "ci95"])
        for t, c, n, e, h in self.rows():
            w.writerow([_fmt(t), c, n, _fmt(e), _fmt(h)])
        return buf.getvalue()

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "seed": self.seed,
            "reference_power": self.reference_power,
            "thresholds": [float(t) for t in self.thresholds],
            "threshold_dB": [float(t) for t in self.threshold_dB],
            "counts": [int(c) for c in self.counts],
            "eps_hat": [float(e) for e in self.eps_hat],
            "ci95": [float(h) for h in self.ci95],
            **({"meta": self.meta} if self.meta else {}),
        }


def _fmt(x: float) -> str:
    return format(x, ".17g")


def _sorted_thresholds(thresholds) -> np.ndarray:
    t = np.asarray(thresholds, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise DomainError("need a nonempty 1-d list of thresholds")
    if np.any(np.diff(t) < 0):
        raise DomainError("thresholds must be sorted ascending")
    return t


def _count_below(x: np.ndarray, thresholds: np.ndarray) -> np.ndarray:
    # position of each sample among the thresholds; samples below t_j land in bins 0..j
    idx = np.searchsorted(thresholds, x, side="right")
    return np.cumsum(np.bincount(idx, minlength=thresholds.size + 1))[:-1]


def _chunk_counts(args):
    models, scheme, seed, index, size, thresholds = args
    if len(models) == 1:
        x = sample_power(models[0], stream(seed, index, 0), size)
    else:
        draws = [sample_power(m, stream(seed, index, b), size) for b, m in enumerate(models)]
        if scheme == "MRC":
            x = np.sum(draws, axis=0)
        else:
            x = np.max(draws, axis=0)
    return _count_below(x, thresholds)


def _run(models, scheme, n, seed, chunk, thresholds, workers):
    _check_run(n, seed, chunk)
    t = _sorted_thresholds(thresholds)
    n_chunks = -(-n // chunk)
    jobs = [(tuple(models), scheme, seed, i, min(chunk, n - i * chunk), t) for i in range(n_chunks)]
    total = np.zeros(t.size, dtype=np.int64)
    if workers is None or workers <= 1 or n_chunks == 1:
        for j in jobs:
            total += _chunk_counts(j)
    else:
        with ProcessPoolExecutor(max_workers=int(workers)) as ex:
            for c in ex.map(_chunk_counts, jobs):
                total += c
    return t, total


def estimate_tail(spec: SampleSpec, thresholds: Sequence[float], *, workers: int = 1) -> EmpiricalTail:
    """Count samples with P < threshold for every threshold in one pass."""
    t, counts = _run([spec.model], "SC", spec.n, spec.seed, spec.chunk, thresholds, workers)
    return EmpiricalTail(t, counts, spec.n, spec.seed, spec.model.mean_power())


def simulate_diversity(bs: BranchSet, scheme: DiversityScheme, n: int, seed: int,
                       thresholds: Sequence[float], *, chunk: int = DEFAULT_CHUNK,
                       workers: int = 1) -> EmpiricalTail:
    """Empirical tail of the combined power (max for SC, sum for MRC).

    Branch m of chunk c uses stream (seed, c, m), so branch 0 matches a
    single-model run with the same seed.
    """
    if not isinstance(scheme, DiversityScheme):
        scheme = DiversityScheme.parse(str(scheme))
    key = "MRC" if scheme is MRC else "SC"
    t, counts = _run(list(bs), key, n, seed, chunk, thresholds, workers)
    return EmpiricalTail(t, counts, n, seed, bs.branches[0].mean_power())


def sample_mean(spec: SampleSpec) -> tuple[float, float]:
    """Sample mean of P and its standard error, same streams as ``estimate_tail``."""
    _check_run(spec.n, spec.seed, spec.chunk)
    s = s2 = 0.0
    left, i = spec.n, 0
    while left > 0:
        size = min(spec.chunk, left)
        x = sample_power(spec.model, stream(spec.seed, i, 0), size)
        s += math.fsum(x)
        s2 += math.fsum(x * x)
        left -= size
        i += 1
    mean = s / spec.n
    var = max(s2 / spec.n - mean * mean, 0.0)
    return mean, math.sqrt(var / spec.n)


def fit_loglog_slope(tail: EmpiricalTail, window: tuple[float, float] | None = None, *,
                     eps_window: tuple[float, float] | None = None) -> tuple[float, float]:
    """Least-squares slope of log eps_hat against log threshold, with its standard error.

    ``window`` limits thresholds, ``eps_window`` limits the empirical
    probabilities; zero counts are always dropped. The stderr is the plain
    regression one and ignores that cumulative counts are correlated.
    """
    t, e = tail.thresholds, tail.eps_hat
    keep = tail.counts > 0
    if window is not None:
        keep &= (t >= window[0]) & (t <= window[1])
    if eps_window is not None:
        keep &= (e >= eps_window[0]) & (e <= eps_window[1])
    if keep.sum() < 3:
        raise InsufficientDataError(f"need at least 3 thresholds with nonzero counts, got {int(keep.sum())}")
    x = np.log(t[keep])
    y = np.log(e[keep])
    xm = x.mean()
    sxx = np.sum((x - xm) ** 2)
    if sxx == 0:
        raise InsufficientDataError("thresholds in the window are all equal")
    slope = np.sum((x - xm) * (y - y.mean())) / sxx
    resid = y - y.mean() - slope * (x - xm)
    dof = x.size - 2
    stderr = math.sqrt(np.sum(resid ** 2) / dof / sxx) if dof > 0 else math.inf
    return float(slope), float(stderr)


def dumps_json(tail: EmpiricalTail) -> str:
    return json.dumps(tail.to_json(), indent=2, sort_keys=True)
