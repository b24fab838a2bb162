"""The bound chain: threshold index, telescoped check, certificate curve."""

import math
import random
from fractions import Fraction

import pytest

from halfstep.certificates import (
    DEFAULT_EPS_GRID,
    Refusal,
    TailCertificate,
    certify,
    find_threshold_index,
    indistinguishable_limits_check,
    tail_bound,
    telescoped_bound_check,
)
from halfstep.errors import IndexOutOfRange, PrefixTooShort
from halfstep.seminorms import PSeminorm, SeminormFamily, eval_seminorm, vec_scale
from halfstep.sequences import (
    DrivenSpec,
    ExplicitSpec,
    NamedSpec,
    SequencePrefix,
    converges_to,
)

F = Fraction


def scalar_prefix(*values):
    return SequencePrefix(tuple((v,) for v in values))


class TestFindThresholdIndex:
    def test_zero_drive_gives_one(self):
        s = PSeminorm(p=0.5, weights=(1,))
        c = scalar_prefix(0, 0, 0, 0)
        assert find_threshold_index(s, c, eps=0.01) == 1

    def test_halving_drive_under_unit_budget(self):
        s = PSeminorm(p=1, weights=(1,))
        c = scalar_prefix(*(F(1, 2**n) for n in range(1, 9)))
        assert find_threshold_index(s, c, eps=1.0) == 1

    def test_constant_violation_gives_none(self):
        s = PSeminorm(p=1, weights=(1,))
        c = scalar_prefix(*([1] * 8))
        assert find_threshold_index(s, c, eps=0.1) is None

    def test_settles_midway(self):
        s = PSeminorm(p=1, weights=(1,))
        c = scalar_prefix(9, 9, F(1, 4), F(1, 8), F(1, 16))
        assert find_threshold_index(s, c, eps=1.0) == 3

    def test_eps_must_be_positive(self):
        s = PSeminorm(p=1, weights=(1,))
        with pytest.raises(ValueError):
            find_threshold_index(s, scalar_prefix(0), eps=0)


class TestTailBound:
    def test_m_zero_returns_start(self):
        assert tail_bound(3.5, 0.1, 0.5, 0) == 3.5

    def test_flat_when_endpoints_equal(self):
        for m in range(10):
            assert tail_bound(1.0, 1.0, 1.0, m) == pytest.approx(1.0, abs=1e-15)

    def test_approaches_eps(self):
        assert tail_bound(5.0, 0.1, 0.5, 200) == pytest.approx(0.1, abs=1e-12)

    def test_monotone_toward_eps(self):
        rng = random.Random(2)
        for _ in range(200):
            sigma = rng.uniform(0, 5)
            eps = rng.uniform(0.01, 3)
            p = rng.choice((0.3, 0.5, 1.0))
            curve = [tail_bound(sigma, eps, p, m) for m in range(30)]
            diffs = [b - a for a, b in zip(curve, curve[1:])]
            if sigma < eps:
                assert all(d >= -1e-15 for d in diffs)
            else:
                assert all(d <= 1e-15 for d in diffs)

    def test_validates_inputs(self):
        with pytest.raises(ValueError):
            tail_bound(1.0, 0.0, 0.5, 1)
        with pytest.raises(ValueError):
            tail_bound(1.0, 1.0, 0.5, -1)


class TestTelescopedBoundCheck:
    def test_constant_at_limit_all_zero(self):
        s = PSeminorm(p=0.5, weights=(1,))
        x = scalar_prefix(*([F(2, 3)] * 6))
        rows = telescoped_bound_check(s, x, (F(2, 3),), N=1, eps=0.5)
        assert len(rows) == 5
        assert all(r.lhs == 0.0 and r.passed for r in rows)

    def test_halving_sequence_hand_value(self):
        # x_n = 2^-n has zero drive: 2^m * x_{1+m} - x_1 = 0 exactly
        s = PSeminorm(p=1, weights=(1,))
        x = scalar_prefix(*(F(1, 2**n) for n in range(1, 7)))
        rows = telescoped_bound_check(s, x, (0,), N=1, eps=1.0)
        row3 = rows[2]
        assert row3.m == 3
        assert row3.lhs == 0.0
        assert row3.rhs == pytest.approx(7.0)
        assert row3.passed

    def test_harmonic_first_step(self):
        s = PSeminorm(p=1, weights=(1,))
        x = scalar_prefix(*(F(1, n) for n in range(1, 7)))
        rows = telescoped_bound_check(s, x, (0,), N=1, eps=1.0)
        assert rows[0].m == 1
        assert rows[0].lhs == 0.0  # |2*(1/2) - 1|
        assert rows[0].rhs == pytest.approx(1.0)

    def test_bad_index(self):
        s = PSeminorm(p=1, weights=(1,))
        x = scalar_prefix(1, 2)
        with pytest.raises(IndexOutOfRange):
            telescoped_bound_check(s, x, (0,), N=3, eps=1.0)


def test_scale_coherence_on_powers_of_two():
    rng = random.Random(7)
    for _ in range(300):
        p = rng.choice((0.3, 0.5, 1.0))
        s = PSeminorm(p=p, weights=(rng.uniform(0, 2), rng.uniform(0, 2)))
        u = (F(rng.randint(-64, 64), 8), F(rng.randint(-64, 64), 8))
        m = rng.randint(0, 20)
        lhs = eval_seminorm(s, vec_scale(2**m, u))
        rhs = 2.0 ** (m * p) * eval_seminorm(s, u)
        assert abs(lhs - rhs) <= 1e-9 * (1.0 + abs(lhs))


class TestCertify:
    def test_geometric_drive_certifies_everywhere(self):
        # independently recoded bound: decay = 4**(-m*p/2) ... computed
        # below straight from the definition with math.pow
        drive = NamedSpec(family="geometric", scale=(1,), ratio=F(1, 4))
        spec = DrivenSpec(x1=(1,), drive=drive)
        fam = SeminormFamily((PSeminorm(p=0.5, weights=(1,)),))
        report = certify(fam, spec, (0,), prefix_len=48)
        assert report.all_certified
        assert len(report.outcomes) == len(DEFAULT_EPS_GRID)
        for cert in report.outcomes:
            assert isinstance(cert, TailCertificate)
            for row in cert.rows:
                independent = (
                    math.pow(2.0, -row.m * 0.5) * cert.sigma_xN
                    + (1.0 - math.pow(2.0, -row.m * 0.5)) * cert.epsilon
                )
                assert row.bound == pytest.approx(independent, rel=1e-12)
                assert row.observed <= row.bound + 1e-9 * (1 + row.bound)

    def test_constant_sequence_trivially_certified(self):
        spec = NamedSpec(family="constant", scale=(3, -1))
        fam = SeminormFamily((PSeminorm(p=1, weights=(1, 2)),))
        report = certify(fam, spec, (3, -1), prefix_len=12)
        assert report.all_certified
        for cert in report.outcomes:
            assert cert.sigma_xN == 0.0
            assert cert.N == 1

    def test_alternating_sequence_refused(self):
        terms = tuple(((-1) ** n,) for n in range(1, 33))
        spec = ExplicitSpec(SequencePrefix(terms))
        fam = SeminormFamily((PSeminorm(p=1, weights=(1,)),))
        report = certify(fam, spec, (0,), eps_grid=(0.1,), prefix_len=32)
        assert not report.all_certified
        assert len(report.refusals) == 1
        refusal = report.refusals[0]
        assert isinstance(refusal, Refusal)
        assert refusal.epsilon == 0.1
        # the drive alternates at magnitude 3, far above the budget
        assert refusal.budget == pytest.approx(0.1)

    def test_outcomes_ordered_by_seminorm_then_eps(self):
        spec = NamedSpec(family="constant", scale=(0, 0))
        fam = SeminormFamily(
            (PSeminorm(p=1, weights=(1, 0)), PSeminorm(p=0.5, weights=(0, 1)))
        )
        report = certify(fam, spec, (0, 0), eps_grid=(1.0, 0.5), prefix_len=8)
        keys = [(o.seminorm_index, o.epsilon) for o in report.outcomes]
        assert keys == [(0, 1.0), (0, 0.5), (1, 1.0), (1, 0.5)]

    def test_validates_inputs(self):
        spec = NamedSpec(family="constant", scale=(0,))
        fam = SeminormFamily((PSeminorm(p=1, weights=(1,)),))
        with pytest.raises(PrefixTooShort):
            certify(fam, spec, (0,), prefix_len=2)
        with pytest.raises(ValueError):
            certify(fam, spec, (0,), eps_grid=(), prefix_len=8)
        with pytest.raises(ValueError):
            certify(fam, spec, (0,), eps_grid=(0.0,), prefix_len=8)

    def test_report_projection(self):
        spec = NamedSpec(family="constant", scale=(1,))
        fam = SeminormFamily((PSeminorm(p=1, weights=(1,)),))
        obj = certify(fam, spec, (1,), eps_grid=(0.5,), prefix_len=8).to_report()
        assert obj["all_certified"] is True
        entry = obj["outcomes"][0]
        assert entry["verdict"] == "certified"
        assert {"m", "observed", "bound", "pass"} <= set(entry["rows"][0])

    def test_consistency_with_convergence_diagnostic(self):
        drive = NamedSpec(family="geometric", scale=(2, 1), ratio=F(1, 3))
        spec = DrivenSpec(x1=(1, -1), drive=drive)
        fam = SeminormFamily(
            (PSeminorm(p=0.5, weights=(1, 1)), PSeminorm(p=1, weights=(2, 0)))
        )
        report = certify(fam, spec, (0, 0), prefix_len=64)
        assert report.all_certified
        diag = converges_to(fam, spec, (0, 0), 64, DEFAULT_EPS_GRID)
        assert diag.converging


class TestIndistinguishableLimits:
    def test_blind_coordinate_two_limits(self):
        # sequence (2^-n, (-1)^n) converges to (0, anything) for the
        # first-coordinate-only seminorm
        terms = tuple((F(1, 2**n), (-1) ** n) for n in range(1, 17))
        spec = ExplicitSpec(SequencePrefix(terms))
        fam = SeminormFamily((PSeminorm(p=1, weights=(1, 0)),))
        rep = indistinguishable_limits_check(
            fam, spec, (0, 0), (0, 9), 16, (0.5, 0.01)
        )
        assert rep.converges_a and rep.converges_b
        assert rep.indistinguishable
        assert rep.consistent

    def test_separating_family_rejects_second_limit(self):
        spec = NamedSpec(family="geometric", scale=(F(1, 2),), ratio=F(1, 2))
        fam = SeminormFamily((PSeminorm(p=1, weights=(1,)),))
        rep = indistinguishable_limits_check(
            fam, spec, (0,), (1,), 20, (0.1, 0.01)
        )
        assert rep.converges_a
        assert not rep.converges_b
        assert not rep.indistinguishable
        assert rep.consistent

    def test_constant_sequence_same_limit(self):
        spec = NamedSpec(family="constant", scale=(4,))
        fam = SeminormFamily((PSeminorm(p=0.5, weights=(2,)),))
        rep = indistinguishable_limits_check(
            fam, spec, (4,), (4,), 8, (0.1,)
        )
        assert rep.converges_a and rep.converges_b
        assert rep.indistinguishable and rep.consistent
