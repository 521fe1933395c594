"""Calibration of the neighbor-graph normalizing constant.

The entropy estimator divides the graph functional by ``gamma * n^(1-p/d)``
where ``gamma`` is the limit of ``L_p / n^(1-p/d)`` on uniform unit-cube
samples. The limit depends on ``(d, p, S)`` only. For single-rank specs a
closed form exists (:func:`gamma_analytic`); in general the constant is
estimated by Monte Carlo (:func:`estimate_gamma`) and can be cached on disk
(:class:`GammaCache`).
"""

from __future__ import annotations

import fcntl
import json
import math
import os
from dataclasses import dataclass
from numbers import Integral
from pathlib import Path

import numpy as np
from scipy.special import gammaln

from ._version import __version__
from .errors import GammaCacheError
from .graph import build_nn_graph, l_p
from .points import NeighborSpec, as_neighbor_spec

__all__ = [
    "DEFAULT_N_CAL",
    "DEFAULT_REPS",
    "GammaKey",
    "GammaEstimate",
    "estimate_gamma",
    "estimate_record",
    "gamma_analytic",
    "GammaCache",
]

DEFAULT_N_CAL = 200_000
DEFAULT_REPS = 10


@dataclass(frozen=True)
class GammaKey:
    """Identifies one calibration target.

    The cache treats two keys as equal only when all five fields match, so
    estimates computed at different calibration sizes never collide.
    """

    d: int
    p: float
    spec: NeighborSpec
    n_cal: int = DEFAULT_N_CAL
    reps: int = DEFAULT_REPS

    def __post_init__(self) -> None:
        if not isinstance(self.d, Integral) or isinstance(self.d, bool) or self.d < 1:
            raise ValueError(f"d must be a positive integer, got {self.d!r}")
        object.__setattr__(self, "d", int(self.d))
        p = float(self.p)
        if not (0.0 < p < self.d) or not math.isfinite(p):
            raise ValueError(f"p must satisfy 0 < p < d (= {self.d}), got {p}")
        object.__setattr__(self, "p", p)
        spec = as_neighbor_spec(self.spec)
        object.__setattr__(self, "spec", spec)
        if not isinstance(self.n_cal, Integral) or self.n_cal <= spec.k:
            raise ValueError(f"n_cal must be an integer > max(S) = {spec.k}, got {self.n_cal!r}")
        object.__setattr__(self, "n_cal", int(self.n_cal))
        if not isinstance(self.reps, Integral) or self.reps < 1:
            raise ValueError(f"reps must be a positive integer, got {self.reps!r}")
        object.__setattr__(self, "reps", int(self.reps))


@dataclass(frozen=True)
class GammaEstimate:
    """A Monte-Carlo estimate of the constant, with replication uncertainty."""

    key: GammaKey
    seed: int
    mean: float
    std_error: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.mean) and self.mean > 0.0):
            raise ValueError(f"gamma mean must be positive and finite, got {self.mean}")
        if not (math.isfinite(self.std_error) and self.std_error >= 0.0):
            raise ValueError(f"std_error must be nonnegative and finite, got {self.std_error}")


def estimate_gamma(
    key: GammaKey, seed: int = 0, method: str = "auto", workers: int = -1
) -> GammaEstimate:
    """Monte-Carlo estimate of the graph constant for ``key``.

    Draws ``key.reps`` independent uniform samples of size ``key.n_cal`` on
    the unit cube, computes ``L_p / n_cal^(1-p/d)`` for each, and returns
    the replication mean and its standard error. Each replication uses a
    child stream spawned from ``seed``, so the result is deterministic and
    independent of evaluation order or thread count.
    """
    if not isinstance(key, GammaKey):
        raise ValueError("key must be a GammaKey")
    streams = np.random.SeedSequence(seed).spawn(key.reps)
    scale = key.n_cal ** (1.0 - key.p / key.d)
    values = np.empty(key.reps)
    for r, stream in enumerate(streams):
        rng = np.random.default_rng(stream)
        pts = rng.random((key.n_cal, key.d))
        graph = build_nn_graph(pts, key.spec, method=method, workers=workers)
        values[r] = l_p(graph, key.p) / scale
    mean = float(values.mean())
    if key.reps > 1:
        std_error = float(values.std(ddof=1) / math.sqrt(key.reps))
    else:
        std_error = 0.0
    return GammaEstimate(key=key, seed=int(seed), mean=mean, std_error=std_error)


def gamma_analytic(d: int, p: float, k: int) -> float:
    """Closed-form limit constant for the single-rank spec ``{k}``.

    The value is ``V_d^(-p/d) * Gamma(k + p/d) / Gamma(k)`` where ``V_d``
    is the volume of the d-dimensional unit ball. It is obtained by
    equating the graph-based entropy estimator with the classical
    single-rank form whose normalization is known in closed form, and it
    matches :func:`estimate_gamma` in the large-sample limit (the two are
    mutual cross-checks). No closed form is known for multi-rank specs.

    Parameters
    ----------
    d : int
        Dimension, >= 1.
    p : float
        Power, 0 < p < d.
    k : int
        The single neighbor rank, >= 1.
    """
    if not isinstance(d, Integral) or isinstance(d, bool) or d < 1:
        raise ValueError(f"d must be a positive integer, got {d!r}")
    if not isinstance(k, Integral) or isinstance(k, bool) or k < 1:
        raise ValueError(f"k must be a positive integer, got {k!r}")
    p = float(p)
    if not (0.0 < p < d):
        raise ValueError(f"p must satisfy 0 < p < d (= {d}), got {p}")
    log_vd = (d / 2.0) * math.log(math.pi) - float(gammaln(d / 2.0 + 1.0))
    log_gamma = -(p / d) * log_vd + float(gammaln(k + p / d)) - float(gammaln(k))
    return math.exp(log_gamma)


_CACHE_FIELDS = ("d", "p", "S", "n_cal", "reps", "seed", "mean", "std_error", "tool_version")


def estimate_record(est: GammaEstimate) -> dict:
    """JSON-ready record of an estimate — the cache's line format."""
    return {
        "d": est.key.d,
        "p": est.key.p,
        "S": list(est.key.spec.indices),
        "n_cal": est.key.n_cal,
        "reps": est.key.reps,
        "seed": est.seed,
        "mean": est.mean,
        "std_error": est.std_error,
        "tool_version": __version__,
    }


class GammaCache:
    """A JSON Lines cache of calibration results.

    Each line is one record with fields ``d, p, S (sorted array), n_cal,
    reps, seed, mean, std_error, tool_version``. Floats are written with
    Python's shortest-roundtrip repr, so cached means reload bit-exactly.
    Reads and appends are serialized through an exclusive advisory lock on
    the cache file, so concurrent processes may duplicate work but cannot
    corrupt the file.
    """

    def __init__(self, path) -> None:
        self.path = Path(path)

    def records(self) -> list[dict]:
        """Parse and validate all records; error on the first corrupt line."""
        if not self.path.exists():
            return []
        with open(self.path, "a+", encoding="utf-8") as fh:
            fcntl.flock(fh.fileno(), fcntl.LOCK_EX)
            try:
                fh.seek(0)
                return self._parse(fh)
            finally:
                fcntl.flock(fh.fileno(), fcntl.LOCK_UN)

    def _parse(self, fh) -> list[dict]:
        out = []
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise GammaCacheError(f"{self.path}: line {lineno}: invalid JSON ({exc.msg})") from None
            out.append(self._validate(rec, lineno))
        return out

    def _validate(self, rec, lineno: int) -> dict:
        where = f"{self.path}: line {lineno}"
        if not isinstance(rec, dict):
            raise GammaCacheError(f"{where}: record is not a JSON object")
        missing = [f for f in _CACHE_FIELDS if f not in rec]
        if missing:
            raise GammaCacheError(f"{where}: invalid gamma record, missing fields {missing}")
        s = rec["S"]
        if (
            not isinstance(s, list)
            or not s
            or any(not isinstance(r, int) or r < 1 for r in s)
            or s != sorted(set(s))
        ):
            raise GammaCacheError(
                f"{where}: invalid gamma record, S must be a sorted array of distinct positive integers"
            )
        if not isinstance(rec["mean"], (int, float)) or not rec["mean"] > 0:
            raise GammaCacheError(f"{where}: invalid gamma record, mean must be > 0")
        if not isinstance(rec["std_error"], (int, float)) or rec["std_error"] < 0:
            raise GammaCacheError(f"{where}: invalid gamma record, std_error must be >= 0")
        return rec

    @staticmethod
    def _matches(rec: dict, key: GammaKey) -> bool:
        return (
            rec["d"] == key.d
            and rec["p"] == key.p
            and rec["S"] == list(key.spec.indices)
            and rec["n_cal"] == key.n_cal
            and rec["reps"] == key.reps
        )

    @staticmethod
    def _to_estimate(rec: dict, key: GammaKey) -> GammaEstimate:
        return GammaEstimate(
            key=key, seed=int(rec["seed"]), mean=float(rec["mean"]), std_error=float(rec["std_error"])
        )

    def lookup(self, key: GammaKey) -> GammaEstimate | None:
        """Return the first cached estimate matching ``key``, if any."""
        for rec in self.records():
            if self._matches(rec, key):
                return self._to_estimate(rec, key)
        return None

    def store(self, estimate: GammaEstimate) -> None:
        """Append an estimate to the cache."""
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.path, "a+", encoding="utf-8") as fh:
            fcntl.flock(fh.fileno(), fcntl.LOCK_EX)
            try:
                fh.seek(0, os.SEEK_END)
                fh.write(self._record_line(estimate))
                fh.flush()
            finally:
                fcntl.flock(fh.fileno(), fcntl.LOCK_UN)

    @staticmethod
    def _record_line(est: GammaEstimate) -> str:
        return json.dumps(estimate_record(est)) + "\n"

    def get_or_compute(
        self, key: GammaKey, seed: int = 0, method: str = "auto", workers: int = -1
    ) -> tuple[GammaEstimate, bool]:
        """Return ``(estimate, was_hit)``; compute and persist on a miss.

        The cache is re-checked after computing, so if a concurrent process
        stored the same key first, its record wins and all callers see
        identical bytes.
        """
        hit = self.lookup(key)
        if hit is not None:
            return hit, True
        est = estimate_gamma(key, seed=seed, method=method, workers=workers)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.path, "a+", encoding="utf-8") as fh:
            fcntl.flock(fh.fileno(), fcntl.LOCK_EX)
            try:
                fh.seek(0)
                for rec in self._parse(fh):
                    if self._matches(rec, key):
                        return self._to_estimate(rec, key), True
                fh.seek(0, os.SEEK_END)
                fh.write(self._record_line(est))
                fh.flush()
            finally:
                fcntl.flock(fh.fileno(), fcntl.LOCK_UN)
        # Round-trip through the serialized form so later cache hits are
        # bit-identical to what this call returned.
        return self._to_estimate(json.loads(self._record_line(est)), key), False
