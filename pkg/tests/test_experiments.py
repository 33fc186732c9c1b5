import json
import math
from fractions import Fraction

import numpy as np
import pytest

from discbraid.braids import make_word, power
from discbraid.errors import InputError
from discbraid.experiments import (
    Report,
    check_bilipschitz_disc,
    check_calabi_proportionality,
    check_crossing_bound,
    check_hs_family,
    check_lipschitz,
    check_signature_matrix,
    check_word_length_bound,
)
from discbraid.flows import make_flow
from discbraid.profiles import RadialProfile, make_hs_profile, polynomial_bump
from discbraid.quasimorphisms import linking_quasimorphism, signature_quasimorphism


def bump(a, b, scale):
    return polynomial_bump(Fraction(a, 8), Fraction(b, 8), scale)


THREE_PROFILES = [bump(1, 4, 60), bump(2, 6, 96), bump(3, 7, 48)]


class TestCrossingBound:
    def test_identity_flow_trivially_passes(self):
        rep = check_crossing_bound(make_flow([]), 3, trials=5, seed=0)
        assert rep.passed
        # trivial braid: margin is at least 2 * sum(4) = 8 * C(3,2) (the
        # out-and-back lines still contribute nonnegative winding length)
        assert rep.margin >= 24.0 - 1e-9

    def test_rotation_flows(self):
        flow = make_flow([(bump(2, 6, 40), 1)])
        rep = check_crossing_bound(flow, 3, trials=30, seed=1)
        assert rep.passed and rep.margin >= 0

    def test_relative_margin_shrinks_with_time_but_stays_positive(self):
        # both sides grow linearly in t, so the margin relative to the bound
        # shrinks while the absolute margin stays nonnegative
        relative = []
        for t in (1, 3, 6):
            flow = make_flow([(bump(2, 6, 40), t)])
            rep = check_crossing_bound(flow, 3, trials=20, seed=2)
            assert rep.passed and rep.margin >= 0
            relative.append(rep.margin / (24.0 * t))
        assert relative[-1] < relative[0]

    def test_deterministic_report(self):
        flow = make_flow([(bump(2, 6, 40), 1)])
        a = check_crossing_bound(flow, 3, trials=10, seed=3)
        b = check_crossing_bound(flow, 3, trials=10, seed=3)
        assert a == b

    def test_validation(self):
        with pytest.raises(InputError):
            check_crossing_bound(make_flow([]), 3, trials=0)


class TestWordLengthBound:
    def test_linking_on_two_strands(self):
        words = [power(make_word([1, 1], 2), k) for k in range(11)]
        rep = check_word_length_bound(
            linking_quasimorphism(), [Fraction(1)], words, seed=0
        )
        assert rep.passed

    def test_signature_on_torus_words(self):
        words = [make_word([1] * (2 * k), 2) for k in range(12)]
        rep = check_word_length_bound(
            signature_quasimorphism(), [Fraction(1)], words, defect=Fraction(1)
        )
        assert rep.passed

    def test_empty_corpus_fails_gracefully(self):
        rep = check_word_length_bound(
            linking_quasimorphism(), [Fraction(1)], [], defect=Fraction(0)
        )
        assert not rep.passed


class TestSignatureMatrix:
    def test_single_profile(self):
        h = RadialProfile(
            (Fraction(0), Fraction(1)), ((Fraction(0), Fraction(1), Fraction(-1)),), 1
        )
        rep = check_signature_matrix([h])
        assert rep.passed
        assert rep.details["determinant"] == [1, 12]

    def test_three_distinct_supports(self):
        rep = check_signature_matrix(THREE_PROFILES)
        assert rep.passed

    def test_duplicate_is_singular(self):
        rep = check_signature_matrix([THREE_PROFILES[0], THREE_PROFILES[0]])
        assert not rep.passed
        assert rep.details["determinant"] == [0, 1]


class TestHsFamily:
    def test_endpoints(self):
        rep = check_hs_family([Fraction(1, 4), Fraction(1, 3)])
        assert rep.passed
        assert rep.details["failures"] == []

    def test_grid(self):
        grid = [Fraction(1, 4) + Fraction(k, 360) for k in range(31)]
        rep = check_hs_family(grid)
        assert rep.passed
        assert rep.details["M1"] > 0
        assert math.isfinite(rep.details["M2"])

    def test_validation(self):
        with pytest.raises(InputError):
            check_hs_family([])


class TestBilipschitz:
    def test_single_direction_vectors(self):
        hs = [make_hs_profile(Fraction(1, 4) + Fraction(k, 60)) for k in range(5)]
        vectors = [[0, 0, Fraction(3, 2), 0, 0], [1, 0, 0, 0, 0]]
        rep = check_bilipschitz_disc(hs, vectors)
        assert rep.passed

    def test_random_positive_vectors(self):
        hs = [make_hs_profile(Fraction(1, 4) + Fraction(k, 60)) for k in range(5)]
        rng = np.random.default_rng(5)
        vectors = [
            [Fraction(int(v), 16) for v in rng.integers(1, 64, size=5)]
            for _ in range(10)
        ]
        rep = check_bilipschitz_disc(hs, vectors)
        assert rep.passed and rep.margin >= 0
        assert rep.details["exact"]

    def test_sign_condition_failure_reported_not_raised(self):
        up = polynomial_bump(Fraction(1, 4), Fraction(3, 4), 5)
        down = polynomial_bump(Fraction(1, 4), Fraction(3, 4), -5)
        rep = check_bilipschitz_disc([up, down], [[1, 1]])
        assert not rep.passed
        assert "hypothesis_failure" in rep.details

    def test_mixed_sign_vectors_skipped(self):
        hs = [make_hs_profile(Fraction(1, 4)), make_hs_profile(Fraction(1, 3))]
        rep = check_bilipschitz_disc(hs, [[1, -1], [1, 1]])
        assert rep.details["mixed_sign_skipped"] == 1


class TestMonteCarloChecks:
    def test_calabi_proportionality_small(self):
        rep = check_calabi_proportionality(
            THREE_PROFILES, samples=2500, seed=11, k_schedule=(4, 8)
        )
        assert rep.passed
        assert rep.details["constant"] == pytest.approx(-1.0, abs=0.15)

    def test_lipschitz_small(self):
        # a quick, low-sample pass over the machinery; the acceptance suite
        # runs the stated sizes where R^2 >= 0.99 is asserted
        prof = polynomial_bump(Fraction(1, 4), Fraction(3, 4), 20)
        family = [make_flow([(prof, t)]) for t in range(1, 7)]
        rep = check_lipschitz(
            family, signature_quasimorphism(), 3, p=2, samples=800, seed=17
        )
        d = rep.details
        assert d["r_squared"] >= 0.9
        assert min(d["ratios"]) > 0
        assert len(d["lengths"]) == 6
        assert min(m for m in rep.details["ratios"]) > 0

    def test_lipschitz_needs_three_members(self):
        prof = polynomial_bump(Fraction(1, 4), Fraction(3, 4), 20)
        with pytest.raises(InputError):
            check_lipschitz(
                [make_flow([(prof, 1)])], signature_quasimorphism(), 3, p=2
            )


class TestReport:
    def test_json_roundtrip(self):
        rep = Report("demo", True, 1.25, {"extra": [1, 2]}, seed=9)
        doc = json.loads(rep.to_json())
        assert doc["check"] == "demo" and doc["passed"] and doc["seed"] == 9
