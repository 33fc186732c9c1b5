"""L^p lengths of sampled isotopies of the disc.

The length of an isotopy is the time integral of the spatial L^p norm of
its velocity field.  Because the maps are area-preserving, the spatial
integral may be taken over initial conditions, so the estimator tracks a
fixed cloud of uniformly sampled points, differentiates their motion in
time, and applies the trapezoid rule in t.  The time discretization is
accepted only after a Richardson check: halving dt must move the value by
less than 0.1%.

These lengths are upper bounds for the right-invariant metric (which is an
infimum over all isotopies); every consumer in this package treats them as
such.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InputError
from .estimator import TASK_LP_SPACE, chunk_rng
from .flows import FlowSpec
from .loops import TrajectoryBundle

__all__ = ["LengthEstimate", "holder_constant", "lp_length_sampled", "lp_length_of_bundle", "as_isotopy"]

RICHARDSON_RTOL = 1e-3
MAX_REFINEMENTS = 8


@dataclass(frozen=True)
class LengthEstimate:
    value: float
    std_error: float
    time_steps: int
    space_samples: int
    seed: int

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "std_error": self.std_error,
            "time_steps": self.time_steps,
            "space_samples": self.space_samples,
            "seed": self.seed,
        }


def holder_constant(p: float) -> float:
    """The constant pi^{1/p - 1} with L1-length <= pi^{1-1/p} * Lp-length.

    Instance of the Hoelder inequality on the disc of area pi: the L^1 norm
    of the velocity field is at most area^{1-1/p} times its L^p norm.
    """
    if p < 1:
        raise InputError("p must be >= 1")
    return math.pi ** (1.0 / p - 1.0)


def as_isotopy(obj) -> Callable[[float, np.ndarray], np.ndarray]:
    """Adapt a FlowSpec (or pass through a callable) to t, points -> points."""
    if isinstance(obj, FlowSpec):

        def apply(t: float, pts: np.ndarray) -> np.ndarray:
            pts = np.asarray(pts, dtype=float)
            r2 = np.clip(np.sum(pts**2, axis=1), 0.0, 1.0)
            dtheta = t * obj.angular_rate_float(r2)
            c, s = np.cos(dtheta), np.sin(dtheta)
            return np.stack(
                (c * pts[:, 0] - s * pts[:, 1], s * pts[:, 0] + c * pts[:, 1]), axis=1
            )

        return apply
    if callable(obj):
        return obj
    raise InputError("isotopy must be a FlowSpec or a callable(t, points)")


def lp_length_sampled(
    isotopy,
    p: float,
    time_steps: int = 33,
    space_samples: int = 65536,
    seed: int = 0,
) -> LengthEstimate:
    """Monte Carlo / trapezoid estimate of the L^p length of an isotopy.

    ``isotopy`` maps (t, initial points) to moved points and must accept t
    slightly outside [0, 1] (centered differences).  The spatial cloud is
    drawn once from the uniform measure and reused across the whole time
    grid; the reported standard error conservatively treats the per-time
    errors as fully correlated.
    """
    if p < 1:
        raise InputError("p must be >= 1")
    if time_steps < 2 or space_samples < 1:
        raise InputError("need time_steps >= 2 and space_samples >= 1")
    apply = as_isotopy(isotopy)
    rng = chunk_rng(seed, TASK_LP_SPACE, 0)
    r = np.sqrt(rng.uniform(0.0, 1.0, space_samples))
    theta = rng.uniform(0.0, 2.0 * np.pi, space_samples)
    cloud = np.stack((r * np.cos(theta), r * np.sin(theta)), axis=1)

    times = np.linspace(0.0, 1.0, time_steps)
    dt = 0.5 * (times[1] - times[0])

    def evaluate(step: float) -> tuple[float, float]:
        value = 0.0
        error = 0.0
        weights = np.full(time_steps, times[1] - times[0])
        weights[0] *= 0.5
        weights[-1] *= 0.5
        for t, w in zip(times, weights):
            fwd = apply(t + step, cloud)
            back = apply(t - step, cloud)
            speed = np.hypot(*(fwd - back).T) / (2.0 * step)
            powers = speed**p
            mean = float(np.mean(powers))
            if mean == 0.0:
                continue
            inner = (math.pi * mean) ** (1.0 / p)
            value += w * inner
            if space_samples > 1:
                sigma_mean = float(np.std(powers, ddof=1)) / math.sqrt(space_samples)
                error += w * inner * sigma_mean / (p * mean)
        return value, error

    value, error = evaluate(dt)
    for _ in range(MAX_REFINEMENTS):
        dt *= 0.5
        refined, error = evaluate(dt)
        if abs(refined - value) <= RICHARDSON_RTOL * max(abs(refined), 1e-300):
            value = refined
            break
        value = refined
    return LengthEstimate(value, error, time_steps, space_samples, seed)


def lp_length_of_bundle(bundle: TrajectoryBundle, p: float) -> float:
    """Diagnostic L^p length of tracked strands with the empirical measure.

    Strand speeds come from finite differences of the samples; the empirical
    average over strands is scaled by the disc area so the number is
    comparable with the field-based length when the strands sample the disc.
    """
    if p < 1:
        raise InputError("p must be >= 1")
    pos = bundle.positions
    times = bundle.times
    value = 0.0
    for k in range(times.size - 1):
        dt = times[k + 1] - times[k]
        step = pos[:, k + 1, :] - pos[:, k, :]
        speed = np.hypot(step[:, 0], step[:, 1]) / dt
        value += dt * (math.pi * float(np.mean(speed**p))) ** (1.0 / p)
    return value
