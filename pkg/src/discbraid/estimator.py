"""Monte Carlo estimates of the flow quasi-morphisms.

The estimated quantity is the integral over n-point configurations of a
braid quasi-morphism evaluated on the loop braid of the flow; the sampling
measure is the uniform product measure on the disc power, so estimates are
the sample mean scaled by pi^n.

Reproducibility contract: all randomness is derived from one user seed via
(seed, task, chunk) keyed generators over fixed-size chunks, and partial
results are merged in chunk order.  The same seed therefore gives bitwise
identical output for any worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DegeneracyError, InputError
from .flows import FlowSpec
from .loops import (
    COINCIDENCE_THRESHOLD,
    DegenerateConfigurationError,
    gg_loop,
    loop_braid,
)
from .quasimorphisms import QuasimorphismSpec, spec_from_pool_key

__all__ = [
    "QmEstimate",
    "CalibrationResult",
    "default_base",
    "estimate_phi_n",
    "estimate_phi_tilde_n",
    "calibrate_constant",
]

CHUNK_SAMPLES = 512
MIN_SEPARATION = 1e-6

TASK_PHI = 1
TASK_DEFECT = 2
TASK_LP_SPACE = 3
TASK_EXPERIMENT = 4


def chunk_rng(seed: int, task: int, chunk: int) -> np.random.Generator:
    """Generator keyed by (seed, task, chunk); the package-wide derivation."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(task, chunk)))


@dataclass(frozen=True)
class QmEstimate:
    """A Monte Carlo value with its sampling error and provenance."""

    value: float
    std_error: float
    samples: int
    rejected: int
    seed: int
    k_schedule: tuple[int, ...] = ()

    def __post_init__(self):
        if self.samples <= 0:
            raise InputError("estimate must use at least one accepted sample")
        if not math.isfinite(self.value) or self.std_error < 0:
            raise InputError("estimate value/error out of range")

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "std_error": self.std_error,
            "samples": self.samples,
            "rejected": self.rejected,
            "seed": self.seed,
            "k_schedule": list(self.k_schedule),
        }


def default_base(n: int) -> np.ndarray:
    """Regular n-gon of radius 1/2, rotated off the axes."""
    angles = 2.0 * np.pi * np.arange(n) / n + 0.5
    return 0.5 * np.stack((np.cos(angles), np.sin(angles)), axis=1)


def _sample_configs(rng: np.random.Generator, count: int, n: int) -> np.ndarray:
    r = np.sqrt(rng.uniform(0.0, 1.0, size=(count, n)))
    theta = rng.uniform(0.0, 2.0 * np.pi, size=(count, n))
    return np.stack((r * np.cos(theta), r * np.sin(theta)), axis=-1)


def _min_pairwise(config: np.ndarray) -> float:
    n = config.shape[0]
    best = math.inf
    for i in range(n):
        for j in range(i + 1, n):
            best = min(best, float(np.hypot(*(config[i] - config[j]))))
    return best


def _phi_single(
    flow: FlowSpec,
    phi: QuasimorphismSpec,
    base: np.ndarray,
    config: np.ndarray,
    samples_per_segment: int,
):
    """phi on the loop braid of one configuration, or None when rejected."""
    if _min_pairwise(config) < MIN_SEPARATION:
        return None
    try:
        bundle = gg_loop(base, config, flow, samples_per_segment)
        word = loop_braid(bundle)
    except DegenerateConfigurationError:
        return None
    return float(phi(word))


def _lk2_chunk_values(
    flow: FlowSpec,
    phi: QuasimorphismSpec,
    base: np.ndarray,
    configs: np.ndarray,
    samples_per_segment: int,
):
    """Vectorized two-strand linking values; None entries mean 'rejected'.

    Computes, for every configuration at once, the same signed crossing
    count / 2 that braid extraction plus ``linking_number`` produces (the
    default projection direction never has to be perturbed for generic
    data; samples that hit a projection tie are recomputed through the
    generic path so results agree bitwise with it).
    """
    m = samples_per_segment
    count = configs.shape[0]
    values: list = [None] * count
    sep = np.hypot(
        configs[:, 0, 0] - configs[:, 1, 0], configs[:, 0, 1] - configs[:, 1, 1]
    )
    keep = np.nonzero(sep >= MIN_SEPARATION)[0]
    if keep.size == 0:
        return values

    # cap the working-array footprint for finely sampled (large-k) flows
    rows_per_slice = max(1, 2_000_000 // (3 * m + 1))
    if keep.size > rows_per_slice:
        for start in range(0, keep.size, rows_per_slice):
            part = _lk2_chunk_values(
                flow, phi, base, configs[keep[start : start + rows_per_slice]], m
            )
            for offset, val in enumerate(part):
                values[keep[start + offset]] = val
        return values

    from .flows import flow_path

    x = configs[keep]  # (K, 2, 2)
    K = x.shape[0]
    s = np.linspace(0.0, 1.0, m + 1)
    z = base[None, :, None, :]
    seg1 = z + (x[:, :, None, :] - z) * s[None, None, :, None]
    orbit = flow_path(flow, x.reshape(-1, 2), s).reshape(K, 2, m + 1, 2)
    gx = orbit[:, :, -1:, :]
    seg3 = gx + (base[None, :, None, :] - gx) * s[None, None, :, None]
    pos = np.concatenate((seg1, orbit[:, :, 1:, :], seg3[:, :, 1:, :]), axis=2)

    rel = pos[:, 0] - pos[:, 1]  # (K, T, 2)
    dist2 = rel[..., 0] ** 2 + rel[..., 1] ** 2
    coincident = np.any(dist2 < COINCIDENCE_THRESHOLD**2, axis=1)

    d = rel[..., 0]  # projection gap along (1, 0)
    tied = np.any(d == 0.0, axis=1)
    d0, d1 = d[:, :-1], d[:, 1:]
    flips = (d0 < 0) != (d1 < 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        tau = np.where(flips, d0 / (d0 - d1), 0.0)
    relp = rel[..., 1]
    rel_perp = relp[:, :-1] + (relp[:, 1:] - relp[:, :-1]) * tau
    # orient so the reference strand is the one on the left before the swap
    left_is_zero = d0 < 0
    oriented = np.where(left_is_zero, rel_perp, -rel_perp)
    tied |= np.any(flips & (oriented == 0.0), axis=1)
    signs = np.where(flips, np.where(oriented < 0, 1.0, -1.0), 0.0)
    lk = signs.sum(axis=1) / 2.0

    for row, idx in enumerate(keep):
        if coincident[row]:
            continue  # generic path rejects these too
        if tied[row]:
            values[idx] = _phi_single(flow, phi, base, configs[idx], m)
        else:
            values[idx] = float(lk[row])
    return values


def _phi_chunk(
    flow: FlowSpec,
    phi: QuasimorphismSpec,
    n: int,
    base: np.ndarray,
    seed: int,
    chunk: int,
    count: int,
    samples_per_segment: int,
) -> tuple[float, float, int, int]:
    """Accumulate (sum, sum of squares, accepted, rejected) for one chunk."""
    rng = chunk_rng(seed, TASK_PHI, chunk)
    configs = _sample_configs(rng, count, n)
    fast_lk2 = (
        n == 2
        and phi.pool_key is not None
        and phi.pool_key[0] == "lk"
        and set(phi.pool_key[1:]) == {1, 2}
    )
    if fast_lk2:
        values = _lk2_chunk_values(flow, phi, base, configs, samples_per_segment)
    else:
        values = [
            _phi_single(flow, phi, base, config, samples_per_segment)
            for config in configs
        ]
    total = total_sq = 0.0
    accepted = rejected = 0
    for val in values:
        if val is None:
            rejected += 1
            continue
        total += val
        total_sq += val * val
        accepted += 1
    return total, total_sq, accepted, rejected


def _phi_chunk_task(payload):
    flow, pool_key, n, base, seed, chunk, count, sps = payload
    phi = spec_from_pool_key(pool_key)
    return _phi_chunk(flow, phi, n, base, seed, chunk, count, sps)


def estimate_phi_n(
    flow: FlowSpec,
    phi: QuasimorphismSpec,
    n: int,
    base: Optional[np.ndarray] = None,
    samples: int = 10_000,
    seed: int = 0,
    threads: int = 1,
    samples_per_segment: Optional[int] = None,
) -> QmEstimate:
    """Estimate the configuration integral of phi over loop braids of the flow.

    Configurations are uniform on the disc power; tuples with a pair closer
    than the separation threshold, or whose extraction stays degenerate
    after direction perturbations, are rejected and counted.  The value is
    the accepted-sample mean scaled by pi^n.
    """
    if n < 2:
        raise InputError("need n >= 2 marked points")
    if samples < 1:
        raise InputError("need at least one sample")
    base = default_base(n) if base is None else np.asarray(base, dtype=float)
    if base.shape != (n, 2):
        raise InputError(f"base must be ({n}, 2), got {base.shape}")
    if samples_per_segment is None:
        samples_per_segment = max(32, int(math.ceil(8.0 * flow.rotation_bound)))

    chunks = []
    start = 0
    index = 0
    while start < samples:
        count = min(CHUNK_SAMPLES, samples - start)
        chunks.append((flow, phi.pool_key, n, base, seed, index, count, samples_per_segment))
        start += count
        index += 1

    if threads > 1 and phi.pool_key is not None and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_phi_chunk_task, chunks))
    else:
        results = [
            _phi_chunk(flow, phi, n, base, seed, chunk, count, sps)
            for flow, _key, n, base, seed, chunk, count, sps in chunks
        ]

    total = total_sq = 0.0
    accepted = rejected = 0
    for part_sum, part_sq, part_acc, part_rej in results:
        total += part_sum
        total_sq += part_sq
        accepted += part_acc
        rejected += part_rej

    if rejected > samples // 2:
        raise DegeneracyError(
            f"rejected {rejected} of {samples} configurations; flow or base ill-posed"
        )
    if accepted == 0:
        raise DegeneracyError("no configuration was accepted")

    scale = math.pi**n
    mean = total / accepted
    if accepted > 1:
        var = max(total_sq / accepted - mean * mean, 0.0) * accepted / (accepted - 1)
        std_error = scale * math.sqrt(var / accepted)
    else:
        std_error = 0.0
    return QmEstimate(scale * mean, std_error, accepted, rejected, seed)


def estimate_phi_tilde_n(
    flow: FlowSpec,
    phi: QuasimorphismSpec,
    n: int,
    base: Optional[np.ndarray] = None,
    samples: int = 10_000,
    k_schedule: Sequence[int] = (1, 2, 4),
    seed: int = 0,
    threads: int = 1,
    samples_per_segment: Optional[int] = None,
) -> QmEstimate:
    """Homogenized estimate: the k-th entry evaluates the flow at k-fold time.

    For flows, powers are exact time scalings, so no trajectory error
    compounds.  The reported value is the largest-k estimate divided by k;
    the Cauchy gap between the last two entries is added to the Monte Carlo
    error.  Sharing the seed across k correlates the samples, which keeps
    that gap an honest measure of the homogenization residual.
    """
    ks = tuple(int(k) for k in k_schedule)
    if not ks or any(k <= 0 for k in ks) or any(b <= a for a, b in zip(ks, ks[1:])):
        raise InputError("k_schedule must be increasing positive integers")
    per_k = []
    for k in ks:
        est = estimate_phi_n(
            flow.scaled(k),
            phi,
            n,
            base=base,
            samples=samples,
            seed=seed,
            threads=threads,
            samples_per_segment=samples_per_segment,
        )
        per_k.append(
            QmEstimate(
                est.value / k,
                est.std_error / k,
                est.samples,
                est.rejected,
                seed,
            )
        )
    last = per_k[-1]
    cauchy = abs(per_k[-1].value - per_k[-2].value) if len(per_k) >= 2 else 0.0
    return QmEstimate(
        last.value,
        last.std_error + cauchy,
        last.samples,
        last.rejected,
        seed,
        ks,
    )


@dataclass(frozen=True)
class CalibrationResult:
    constant: float
    spread: float
    ratios: tuple[float, ...]
    estimates: tuple[QmEstimate, ...]

    def to_dict(self) -> dict:
        return {
            "constant": self.constant,
            "spread": self.spread,
            "ratios": list(self.ratios),
            "estimates": [e.to_dict() for e in self.estimates],
        }


def calibrate_constant(
    flows: Sequence[FlowSpec],
    phi: QuasimorphismSpec,
    n: int,
    predicted: Sequence[float],
    samples: int = 10_000,
    seed: int = 0,
    k_schedule: Optional[Sequence[int]] = None,
    threads: int = 1,
    base: Optional[np.ndarray] = None,
) -> CalibrationResult:
    """Fit the proportionality constant estimate/predicted over a flow family.

    ``predicted`` holds the closed-form values the estimates should be
    proportional to (Calabi values, signature moments, ...).  The constant
    is the mean ratio; the spread is the worst relative deviation from it,
    which the proportionality theorems say should sit inside Monte Carlo
    noise.
    """
    if len(flows) < 2 or len(flows) != len(predicted):
        raise InputError("need >= 2 flows with matching predicted values")
    if any(p == 0 for p in predicted):
        raise InputError("predicted values must be nonzero")
    estimates = []
    for flow in flows:
        if k_schedule is None:
            estimates.append(
                estimate_phi_n(flow, phi, n, base=base, samples=samples, seed=seed, threads=threads)
            )
        else:
            estimates.append(
                estimate_phi_tilde_n(
                    flow,
                    phi,
                    n,
                    base=base,
                    samples=samples,
                    k_schedule=k_schedule,
                    seed=seed,
                    threads=threads,
                )
            )
    ratios = tuple(est.value / float(p) for est, p in zip(estimates, predicted))
    constant = sum(ratios) / len(ratios)
    if constant == 0:
        spread = max(abs(r) for r in ratios)
    else:
        spread = max(abs(r - constant) for r in ratios) / abs(constant)
    return CalibrationResult(constant, spread, ratios, tuple(estimates))
