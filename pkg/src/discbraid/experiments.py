"""Desk-scale verifications of the structural theorems.

Each check returns a machine-readable Report: a pass flag, the worst margin
observed (how much slack the asserted inequality had), and every
intermediate quantity needed to audit the run.  The checks verify
structure: boundedness of ratios, linearity, sign conditions, and sandwich
inequalities with empirically fitted constants.  Where exact formulas exist
(moments, even-p speed moments, determinants) the comparisons run in
rational arithmetic; Monte Carlo quantities carry 3-sigma bands.

Lower bounds on the group norm are never computed directly (the norm is an
infimum over isotopies); the bi-Lipschitz check uses the exact moment
functionals as the lower-bound proxy, which is how the inequalities are
actually proved.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .braids import BraidWord, representative_length
from .errors import InputError
from .estimator import (
    TASK_EXPERIMENT,
    CalibrationResult,
    calibrate_constant,
    chunk_rng,
    default_base,
    estimate_phi_tilde_n,
    _min_pairwise,
    _sample_configs,
    MIN_SEPARATION,
)
from .flows import (
    FlowSpec,
    calabi,
    lp_length_radial,
    lp_speed_moment_exact,
    make_flow,
    signature_moment,
)
from .loops import DegenerateConfigurationError, gg_loop, loop_braid, winding_length
from .profiles import RadialProfile, make_hs_profile
from .quasimorphisms import QuasimorphismSpec, linking_quasimorphism, sample_defect

__all__ = [
    "Report",
    "check_crossing_bound",
    "check_word_length_bound",
    "check_lipschitz",
    "check_bilipschitz_disc",
    "check_signature_matrix",
    "check_hs_family",
    "check_calabi_proportionality",
]


@dataclass(frozen=True)
class Report:
    check: str
    passed: bool
    margin: float
    details: dict = field(default_factory=dict)
    seed: Optional[int] = None

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "passed": self.passed,
            "margin": self.margin,
            "seed": self.seed,
            "details": self.details,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def check_crossing_bound(
    flow: FlowSpec,
    n: int,
    base: Optional[np.ndarray] = None,
    trials: int = 100,
    seed: int = 0,
    samples_per_segment: Optional[int] = None,
) -> Report:
    """Crossing-count bound: twice the sum of (pair winding + 4) dominates
    the reduced letter count of the extracted braid, for every sampled
    configuration."""
    if trials < 1:
        raise InputError("need at least one trial")
    base = default_base(n) if base is None else np.asarray(base, dtype=float)
    worst = math.inf
    margins = []
    skipped = 0
    for trial in range(trials):
        rng = chunk_rng(seed, TASK_EXPERIMENT, trial)
        config = _sample_configs(rng, 1, n)[0]
        if _min_pairwise(config) < MIN_SEPARATION:
            skipped += 1
            continue
        try:
            bundle = gg_loop(base, config, flow, samples_per_segment)
            word = loop_braid(bundle)
        except DegenerateConfigurationError:
            skipped += 1
            continue
        bound = 2.0 * sum(
            winding_length(bundle, i, j) + 4.0
            for i in range(n)
            for j in range(i + 1, n)
        )
        margin = bound - representative_length(word)
        margins.append(margin)
        worst = min(worst, margin)
    passed = bool(margins) and worst >= 0.0
    return Report(
        "crossing_bound",
        passed,
        worst if margins else math.nan,
        {
            "trials": trials,
            "skipped": skipped,
            "mean_margin": float(np.mean(margins)) if margins else None,
        },
        seed,
    )


def check_word_length_bound(
    phi: QuasimorphismSpec,
    generator_values: Sequence[Fraction],
    words: Sequence[BraidWord],
    defect: Optional[Fraction] = None,
    defect_trials: int = 200,
    seed: int = 0,
) -> Report:
    """|phi| <= (defect + max generator value) * reduced length over a corpus.

    The defect is the declared bound if available, the supplied value, or a
    sampled lower bound from pairs drawn out of the corpus itself.
    """
    if defect is None:
        defect = phi.declared_defect_bound
    if defect is None:
        pool = list(words)

        def sampler(rng):
            return pool[rng.randrange(len(pool))]

        defect = sample_defect(phi, sampler, defect_trials, seed)
    defect = Fraction(defect)
    gen_max = max((abs(Fraction(v)) for v in generator_values), default=Fraction(0))
    factor = defect + gen_max
    worst = None
    for word in words:
        value = abs(phi(word))
        bound = factor * representative_length(word)
        margin = bound - value
        if worst is None or margin < worst:
            worst = margin
    passed = worst is not None and worst >= 0
    return Report(
        "word_length_bound",
        passed,
        float(worst) if worst is not None else math.nan,
        {
            "defect": float(defect),
            "generator_max": float(gen_max),
            "words": len(words),
        },
        seed,
    )


def check_lipschitz(
    flow_family: Sequence[FlowSpec],
    phi: QuasimorphismSpec,
    n: int,
    p: float,
    samples: int = 10_000,
    seed: int = 0,
    k_schedule: Sequence[int] = (1, 2),
    threads: int = 1,
) -> Report:
    """Lipschitz structure along a time-scaled family.

    Computes (L^p length upper bound, homogenized estimate) per member,
    fits the affine bound through the first two members and extrapolates it
    to the rest within 3 sigma, and reports the empirical ratio and the
    R^2 of the linear fit of the estimates against the lengths.
    """
    if len(flow_family) < 3:
        raise InputError("need at least three family members")
    lengths = [lp_length_radial(flow, p) for flow in flow_family]
    estimates = [
        estimate_phi_tilde_n(
            flow, phi, n, samples=samples, k_schedule=k_schedule, seed=seed, threads=threads
        )
        for flow in flow_family
    ]
    values = [abs(e.value) for e in estimates]
    sigmas = [e.std_error for e in estimates]

    # affine fit through the first two members, tested on the rest
    l0, l1 = lengths[0], lengths[1]
    v0, v1 = values[0], values[1]
    slope = (v1 - v0) / (l1 - l0)
    intercept = v0 - slope * l0
    fit_margins = []
    for l, v, s in zip(lengths[2:], values[2:], sigmas[2:]):
        predicted = slope * l + intercept
        fit_margins.append(3.0 * (s + sigmas[0] + sigmas[1]) - abs(v - predicted))

    ratios = [v / l for v, l in zip(values, lengths)]
    ratio_sigmas = [s / l for s, l in zip(sigmas, lengths)]
    mean_ratio = sum(ratios) / len(ratios)
    m = len(ratios)
    ratio_margins = []
    for i, (r, s) in enumerate(zip(ratios, ratio_sigmas)):
        comb = math.sqrt(
            (1 - 1 / m) ** 2 * s**2
            + sum(ratio_sigmas[j] ** 2 for j in range(m) if j != i) / m**2
        )
        ratio_margins.append(3.0 * comb - abs(r - mean_ratio))

    # linear fit of signed estimates against lengths (lengths scale with t)
    xs = np.array(lengths)
    ys = np.array([e.value for e in estimates])
    coef = np.polyfit(xs, ys, 1)
    residuals = ys - np.polyval(coef, xs)
    ss_res = float(np.sum(residuals**2))
    ss_tot = float(np.sum((ys - ys.mean()) ** 2))
    r_squared = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0

    margin = min(fit_margins + ratio_margins)
    passed = margin >= 0.0 and r_squared >= 0.99
    return Report(
        "lipschitz",
        passed,
        margin,
        {
            "lengths": lengths,
            "estimates": [e.to_dict() for e in estimates],
            "ratios": ratios,
            "mean_ratio": mean_ratio,
            "r_squared": r_squared,
            "fit": {"slope": slope, "intercept": intercept},
        },
        seed,
    )


def check_bilipschitz_disc(
    profiles: Sequence[RadialProfile],
    vectors: Sequence[Sequence],
    p: int = 2,
) -> Report:
    """Two-sided bound for commuting combinations of the profile flows.

    Lower side: with same-sign moment responses and nonnegative weights,
    |sum v_i * moment_i| >= min|moment| * |v|_1 holds exactly.  Upper side:
    the length of the combined isotopy is at most max_i length_i * |v|_1
    (an exact even-p comparison of speed moments).  The lower side is a
    proxy built only from exact moment functionals, never from the metric
    infimum itself.
    """
    if not profiles or not vectors:
        raise InputError("need profiles and vectors")
    moments = [signature_moment(h, 3) for h in profiles]
    if any(m == 0 for m in moments):
        return Report(
            "bilipschitz_disc",
            False,
            math.nan,
            {"hypothesis_failure": "a moment vanishes", "moments": [float(m) for m in moments]},
        )
    if len({m > 0 for m in moments}) != 1:
        return Report(
            "bilipschitz_disc",
            False,
            math.nan,
            {"hypothesis_failure": "moments change sign", "moments": [float(m) for m in moments]},
        )
    single_moments = [
        lp_speed_moment_exact(make_flow([(h, 1)]), p) for h in profiles
    ]
    c1 = min(abs(m) for m in moments)
    max_speed_moment = max(single_moments)
    c2 = math.pi ** (1.0 / p) * float(max_speed_moment) ** (1.0 / p)

    worst = None
    mixed_sign = 0
    for vec in vectors:
        v = [Fraction(x) for x in vec]
        if len(v) != len(profiles):
            raise InputError("vector length does not match profile count")
        norm1 = sum(abs(x) for x in v)
        if norm1 == 0:
            continue
        if any(x < 0 for x in v) and any(x > 0 for x in v):
            mixed_sign += 1
            continue
        lower = abs(sum(x * m for x, m in zip(v, moments)))
        lower_margin = lower - c1 * norm1
        combined = make_flow([(h, x) for h, x in zip(profiles, v)])
        m_combined = lp_speed_moment_exact(combined, p)
        upper_margin = max_speed_moment * norm1**p - m_combined
        margin = min(float(lower_margin), float(upper_margin))
        if worst is None or margin < worst:
            worst = margin
    passed = worst is not None and worst >= 0.0
    return Report(
        "bilipschitz_disc",
        passed,
        worst if worst is not None else math.nan,
        {
            "c1": float(c1),
            "c2": c2,
            "moments": [float(m) for m in moments],
            "vectors": len(vectors),
            "mixed_sign_skipped": mixed_sign,
            "exact": True,
        },
    )


def _det_fraction(rows: list[list[Fraction]]) -> Fraction:
    n = len(rows)
    m = [row[:] for row in rows]
    det = Fraction(1)
    for k in range(n):
        pivot = next((i for i in range(k, n) if m[i][k] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != k:
            m[k], m[pivot] = m[pivot], m[k]
            det = -det
        det *= m[k][k]
        for r in range(k + 1, n):
            factor = m[r][k] / m[k][k]
            if factor != 0:
                for c in range(k, n):
                    m[r][c] -= factor * m[k][c]
    return det


def check_signature_matrix(profiles: Sequence[RadialProfile]) -> Report:
    """Nonsingularity of the moment matrix M[j][i] = int y^{j+1} h_i.

    Rows are the signature responses for 3..n+2 marked points up to the
    positive per-row constants, which rescale rows and cannot change
    singularity; the determinant is computed exactly.
    """
    if not profiles:
        raise InputError("need at least one profile")
    n = len(profiles)
    rows = [[profiles[i].moment(j + 1) for i in range(n)] for j in range(n)]
    det = _det_fraction(rows)
    passed = det != 0
    return Report(
        "signature_matrix",
        passed,
        float(abs(det)),
        {
            "determinant": [det.numerator, det.denominator],
            "size": n,
            "matrix": [[float(x) for x in row] for row in rows],
        },
    )


def _exact_lobe_sign(profile: RadialProfile, lo: Fraction, hi: Fraction, positive: bool) -> bool:
    """Exact sign of h on the open interval (lo, hi) for the bump family.

    Each covered piece must be either linear or a cubic with a double
    rational root (the two shapes the family uses); in both cases interval
    positivity reduces to endpoint evaluations of a linear factor.
    """
    for k, piece in enumerate(profile.pieces):
        a, b = profile.breakpoints[k], profile.breakpoints[k + 1]
        seg_lo, seg_hi = max(a, lo), min(b, hi)
        if seg_lo >= seg_hi:
            continue
        coeffs = list(piece)
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        deg = len(coeffs) - 1
        if deg <= 1:
            if not _linear_sign_on_open(coeffs, seg_lo, seg_hi, positive):
                return False
        elif deg == 3:
            # the flank shape: a double root at one piece endpoint
            quot = _divide_out_double_root(coeffs, a)
            if quot is None:
                quot = _divide_out_double_root(coeffs, b)
            if quot is None:
                return False
            if not _linear_sign_on_open(quot, seg_lo, seg_hi, positive, strict=True):
                return False
        else:
            return False
    return True


def _linear_sign_on_open(coeffs, lo: Fraction, hi: Fraction, positive: bool, strict: bool = False) -> bool:
    """Sign of a degree <= 1 polynomial on the open interval (lo, hi)."""
    v_lo, v_hi = _eval(coeffs, lo), _eval(coeffs, hi)
    if not positive:
        v_lo, v_hi = -v_lo, -v_hi
    if strict:
        return v_lo > 0 and v_hi > 0
    # zeros allowed only at the interval ends
    return v_lo >= 0 and v_hi >= 0 and (v_lo > 0 or v_hi > 0)


def _eval(coeffs, y: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * y + c
    return acc


def _divide_linear(coeffs, root: Fraction):
    """Synthetic division by (y - root); (quotient, remainder), ascending."""
    desc = list(reversed(coeffs))
    out = [desc[0]]
    for c in desc[1:]:
        out.append(c + root * out[-1])
    return list(reversed(out[:-1])), out[-1]


def _divide_out_double_root(coeffs, root: Fraction):
    """Divide a cubic by (y - root)^2; the linear quotient, or None."""
    current = list(coeffs)
    for _ in range(2):
        current, remainder = _divide_linear(current, root)
        if remainder != 0:
            return None
    return current


def check_hs_family(
    s_values: Sequence[Fraction],
    p: int = 2,
) -> Report:
    """All structural conditions of the zero-mean bump family, exactly.

    Supports, lobe signs, the shared core on [3/8, 5/8], the monotone
    dependence on the parameter, the vanishing mean and the negative first
    moment are all checked in rational arithmetic; the lower moment bound
    M1 and the upper length bound M2 over the parameter grid are reported.
    """
    s_list = [Fraction(s) for s in s_values]
    if not s_list:
        raise InputError("need at least one parameter value")
    half = Fraction(1, 2)
    core_lo, core_hi = Fraction(3, 8), Fraction(5, 8)
    failures = []
    first_moments = []
    speed_moments = []
    core_piece = None
    for s in s_list:
        h = make_hs_profile(s)
        lo, hi = half - s, half + s
        if h.support != (lo, hi):
            failures.append(f"support mismatch at s={s}")
        if h.moment(0) != 0:
            failures.append(f"mean nonzero at s={s}")
        fm = h.moment(1)
        if fm >= 0:
            failures.append(f"first moment not negative at s={s}")
        first_moments.append(fm)
        if not _exact_lobe_sign(h, lo, half, positive=True):
            failures.append(f"left lobe not positive at s={s}")
        if not _exact_lobe_sign(h, half, hi, positive=False):
            failures.append(f"right lobe not negative at s={s}")
        piece = _core_restriction(h, core_lo, core_hi)
        if core_piece is None:
            core_piece = piece
        elif piece != core_piece:
            failures.append(f"core differs at s={s}")
        speed_moments.append(lp_speed_moment_exact(make_flow([(h, 1)]), p))

    # monotone dependence: with a shared core the inequalities hold with
    # equality on (3/8, 1/2) and (1/2, 5/8); verified via the core equality.
    m1 = min(abs(m) for m in first_moments)
    m2_moment = max(speed_moments)
    m2 = math.pi ** (1.0 / p) * float(m2_moment) ** (1.0 / p)
    # continuity along the grid: successive integral values move by O(ds)
    sorted_pairs = sorted(zip(s_list, first_moments))
    cont_ratio = 0.0
    for (s0, f0), (s1, f1) in zip(sorted_pairs, sorted_pairs[1:]):
        if s1 != s0:
            cont_ratio = max(cont_ratio, abs(float(f1 - f0)) / float(s1 - s0))
    passed = not failures and m1 > 0 and math.isfinite(m2)
    return Report(
        "hs_family",
        passed,
        float(m1),
        {
            "failures": failures,
            "count": len(s_list),
            "M1": float(m1),
            "M2": m2,
            "first_moment_range": [float(min(first_moments)), float(max(first_moments))],
            "max_first_moment_slope": cont_ratio,
        },
    )


def _core_restriction(profile: RadialProfile, lo: Fraction, hi: Fraction):
    pieces = []
    for k, piece in enumerate(profile.pieces):
        a, b = profile.breakpoints[k], profile.breakpoints[k + 1]
        if max(a, lo) < min(b, hi):
            pieces.append(piece)
    return tuple(pieces)


def check_calabi_proportionality(
    profiles: Sequence[RadialProfile],
    times: Sequence = (1, 1, 1),
    samples: int = 10_000,
    seed: int = 0,
    k_schedule: Sequence[int] = (4, 8),
    threads: int = 1,
) -> Report:
    """Proportionality of the homogenized two-strand estimate to Calabi.

    Every flow built from a compactly supported profile should give the
    same ratio estimate/Calabi; each ratio must sit within 3 combined
    standard errors of the family mean.
    """
    flows = [make_flow([(h, t)]) for h, t in zip(profiles, times)]
    predicted = [calabi(f) for f in flows]
    result: CalibrationResult = calibrate_constant(
        flows,
        linking_quasimorphism(1, 2),
        2,
        predicted,
        samples=samples,
        seed=seed,
        k_schedule=k_schedule,
        threads=threads,
    )
    ratio_sigmas = [
        est.std_error / abs(pred) for est, pred in zip(result.estimates, predicted)
    ]
    m = len(result.ratios)
    mean_ratio = sum(result.ratios) / m
    margins = []
    for i, (r, s) in enumerate(zip(result.ratios, ratio_sigmas)):
        comb = math.sqrt(
            (1 - 1 / m) ** 2 * s**2
            + sum(ratio_sigmas[j] ** 2 for j in range(m) if j != i) / m**2
        )
        margins.append(3.0 * comb - abs(r - mean_ratio))
    margin = min(margins)
    return Report(
        "calabi_proportionality",
        margin >= 0.0,
        margin,
        {
            "constant": result.constant,
            "spread": result.spread,
            "ratios": list(result.ratios),
            "predicted": predicted,
            "estimates": [e.to_dict() for e in result.estimates],
        },
        seed,
    )
