import json
from fractions import Fraction

import mpmath as mp
import pytest

import oracles
from baileyzeta.qcore import PrecisionContext
from baileyzeta.weights import (
    ArithmeticWeight,
    GaussianRational,
    evaluate,
    partial_l_series,
    preset,
    weight_from_descriptor,
    weight_to_descriptor,
)


@pytest.fixture(scope="module")
def ctx():
    return PrecisionContext()


class TestEvaluate:
    def test_mod4_values(self):
        chi = ArithmeticWeight.mod4()
        assert evaluate(chi, 3).re == -1
        assert evaluate(chi, 6).is_zero()
        assert evaluate(chi, 1).re == 1
        assert evaluate(chi, 5).re == 1

    def test_alternating(self):
        chi = ArithmeticWeight.alternating()
        assert evaluate(chi, 4).re == -1
        assert evaluate(chi, 7).re == 1

    def test_zero_rejected(self):
        with pytest.raises(ValueError):
            evaluate(ArithmeticWeight.trivial(), 0)

    def test_periodicity(self):
        for chi in (ArithmeticWeight.trivial(), ArithmeticWeight.alternating(), ArithmeticWeight.mod4()):
            for r in range(1, 10 * chi.period + 1):
                assert evaluate(chi, r) == evaluate(chi, r + chi.period)

    def test_boundedness_attained(self):
        for chi in (ArithmeticWeight.trivial(), ArithmeticWeight.alternating(), ArithmeticWeight.mod4()):
            observed = max(evaluate(chi, r).abs_squared() for r in range(1, 10001))
            assert observed == chi.bound_squared

    def test_mod4_multiplicative_on_odds(self):
        chi = ArithmeticWeight.mod4()
        for m in range(1, 101, 2):
            for n in range(1, 101, 2):
                assert evaluate(chi, m * n) == evaluate(chi, m) * evaluate(chi, n)

    def test_weight_addition(self):
        total = ArithmeticWeight.trivial() + ArithmeticWeight.alternating()
        assert total.period == 2
        assert evaluate(total, 1).re == 2
        assert evaluate(total, 2).is_zero()


class TestGaussianRational:
    def test_exactness_from_strings(self):
        v = GaussianRational.of(["1/3", "-0.25"])
        assert v.re == Fraction(1, 3)
        assert v.im == Fraction(-1, 4)

    def test_abs_squared(self):
        v = GaussianRational(Fraction(3), Fraction(4))
        assert v.abs_squared() == 25

    def test_arithmetic(self):
        i = GaussianRational(Fraction(0), Fraction(1))
        assert i * i == GaussianRational(Fraction(-1), Fraction(0))


class TestPartialLSeries:
    def test_single_term(self, ctx):
        out = partial_l_series(ArithmeticWeight.trivial(), 2, 1, ctx)
        assert out.value == 1
        assert out.tail_bound == 1

    def test_trivial_matches_zeta2_within_tail(self, ctx):
        R = 10**6
        out = partial_l_series(ArithmeticWeight.trivial(), 2, R, ctx)
        target = oracles.zeta2(ctx.precision_bits + 16)
        err = abs(out.value - target)
        assert err <= out.tail_bound
        assert float(out.tail_bound) == pytest.approx(1e-6)
        # the integral bound is crude but not wildly so
        assert err >= out.tail_bound / 100

    def test_mod4_approaches_catalan(self, ctx):
        out = partial_l_series(ArithmeticWeight.mod4(), 2, 20001, ctx)
        target = oracles.catalan_constant(ctx.precision_bits + 16)
        assert abs(out.value - target) < 1e-8
        assert abs(out.value - target) <= out.tail_bound

    def test_eta_identity_partial_sums(self, ctx):
        # |sum_{r<=R} (-1)^(r-1) r^-s - (1 - 2^(1-s)) zeta(s)| -> 0
        chi = ArithmeticWeight.alternating()
        for s, zeta_val in ((2, oracles.zeta2()), (3, oracles.zeta3())):
            target = (1 - mp.mpf(2) ** (1 - s)) * zeta_val
            errs = [
                abs(partial_l_series(chi, s, R, ctx).value - target)
                for R in (10, 100, 1000, 10000)
            ]
            assert all(b < a for a, b in zip(errs, errs[1:]))
            assert errs[-1] < 1e-7

    def test_domain_errors(self, ctx):
        with pytest.raises(ValueError):
            partial_l_series(ArithmeticWeight.trivial(), 1, 10, ctx)
        with pytest.raises(ValueError):
            partial_l_series(ArithmeticWeight.trivial(), 2, 0, ctx)


class TestDescriptor:
    def test_documented_example_equals_mod4(self):
        doc = {"kind": "periodic", "period": 4, "values": [[1, 0], [0, 0], [-1, 0], [0, 0]]}
        chi = weight_from_descriptor(doc)
        ref = ArithmeticWeight.mod4()
        for r in range(1, 9):
            assert evaluate(chi, r) == evaluate(ref, r)

    def test_round_trip(self):
        chi = ArithmeticWeight.periodic(3, [["1/2", 0], [0, "1/3"], [-1, 0]])
        doc = weight_to_descriptor(chi)
        back = weight_from_descriptor(json.loads(json.dumps(doc)))
        assert back == chi

    def test_presets_by_name(self):
        assert preset("mod4") == ArithmeticWeight.mod4()
        with pytest.raises(KeyError):
            preset("nope")

    def test_bad_descriptor(self):
        with pytest.raises(ValueError):
            weight_from_descriptor({"kind": "periodic", "period": 2})
