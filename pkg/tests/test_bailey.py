import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from baileyzeta.bailey import (
    BaileyPair,
    BaileyZetaPair,
    ChainParameters,
    Monomial,
    VerificationStatus,
    _beta_sum_zeta,
    aar_alpha,
    aar_beta,
    alpha_from_beta,
    beta_from_alpha,
    chain_step,
    classical_to_zeta,
    determine_a_param,
    pair_from_alpha,
    unit_pair,
    unit_zeta_pair,
    verify_pair,
    zeta_to_classical,
)
from baileyzeta.qcore import QSeries, ZeroConstantTermError, pochhammer_in, q_integer


def constant_alpha(table):
    """Generator for an alpha sequence of exact constants (zero beyond it)."""

    def alpha(r, q):
        c = table[r] if r < len(table) else Fraction(0)
        return c * q**0

    return alpha


MINUS_ONE = Monomial.parse("-1")


class TestMonomial:
    @pytest.mark.parametrize(
        "text,coeff,power",
        [
            ("1", 1, 0),
            ("-1", -1, 0),
            ("q", 1, 1),
            ("-q", -1, 1),
            ("q^3", 1, 3),
            ("3/2*q^2", Fraction(3, 2), 2),
            ("q^-1", 1, -1),
            ("+2", 2, 0),
        ],
    )
    def test_parse(self, text, coeff, power):
        m = Monomial.parse(text)
        assert m.coeff == coeff and m.power == power

    def test_parse_round_trip(self):
        for text in ("1", "-1", "q", "-q", "5*q^2", "q^-2", "2/3"):
            m = Monomial.parse(text)
            assert Monomial.parse(str(m)) == m

    def test_bad_strings(self):
        for text in ("", "qq", "q^", "2**q"):
            with pytest.raises(ValueError):
                Monomial.parse(text)

    def test_arithmetic(self):
        a = Monomial.parse("2*q^3")
        b = Monomial.parse("-q")
        assert str(a * b) == "-2*q^4"
        assert (a / b).power == 2
        assert (b**2).coeff == 1


class TestBetaFromAlpha:
    def test_unit_pair_n0(self):
        assert beta_from_alpha(constant_alpha([Fraction(1)]), 1, 0, 10) == QSeries.constant(1, 10)

    def test_unit_pair_n2_closed_form(self):
        got = beta_from_alpha(constant_alpha([Fraction(1)]), 1, 2, 16)
        q = QSeries.variable(16)
        poch2 = pochhammer_in(q, q, 2)
        assert got == 1 / (poch2 * poch2)

    def test_linear_in_alpha(self):
        rng = random.Random(4)
        t1 = [Fraction(rng.randint(-5, 5), rng.randint(1, 5)) for _ in range(5)]
        t2 = [Fraction(rng.randint(-5, 5), rng.randint(1, 5)) for _ in range(5)]
        c1, c2 = Fraction(3, 2), Fraction(-2, 7)
        combo = [c1 * a + c2 * b for a, b in zip(t1, t2)]
        for n in range(5):
            lhs = beta_from_alpha(constant_alpha(combo), 1, n, 18)
            rhs = c1 * beta_from_alpha(constant_alpha(t1), 1, n, 18) + c2 * beta_from_alpha(
                constant_alpha(t2), 1, n, 18
            )
            assert lhs == rhs

    def test_degenerate_a_rejected(self):
        # a = q^-1 makes (aq;q)_{n+r} contain the factor 1 - q^0 = 0
        with pytest.raises(ZeroConstantTermError):
            beta_from_alpha(constant_alpha([Fraction(1)]), Monomial.parse("q^-1"), 1, 8)


class TestInversion:
    def test_round_trip_unit_n0(self):
        betas = {n: beta_from_alpha(constant_alpha([Fraction(1)]), 1, n, 12) for n in range(1)}
        got = alpha_from_beta(lambda j, q: betas[j], 1, 0, 12)
        assert got == QSeries.constant(1, 12)

    def test_unit_alpha3_is_zero(self):
        betas = {n: beta_from_alpha(constant_alpha([Fraction(1)]), 1, n, 20) for n in range(4)}
        got = alpha_from_beta(lambda j, q: betas[j], 1, 3, 20)
        assert got.is_zero()

    @settings(max_examples=25, deadline=None)
    @given(
        st.lists(
            st.fractions(min_value=-9, max_value=9, max_denominator=9),
            min_size=7,
            max_size=7,
        )
    )
    def test_round_trip_random(self, table):
        alpha = constant_alpha(table)
        betas = {n: beta_from_alpha(alpha, 1, n, 25) for n in range(7)}
        for n in range(7):
            got = alpha_from_beta(lambda j, q: betas[j], 1, n, 25)
            assert got == QSeries.constant(table[n], 25)

    def test_inversion_of_aar_beta_is_self_consistent(self):
        # whatever alpha the inversion produces must reproduce beta exactly
        for a in (Monomial.one(), Monomial.q()):
            alphas = {
                n: alpha_from_beta(aar_beta, a, n, 30) for n in range(4)
            }
            for n in range(4):
                back = beta_from_alpha(lambda r, q: alphas[r], a, n, 30)
                direct = aar_beta(n, QSeries.variable(30))
                assert back == direct


class TestVerify:
    def test_unit_pair_verifies(self):
        report = verify_pair(unit_pair(), depth=6, order=30)
        assert report.status is VerificationStatus.VERIFIED

    def test_planted_defect_located(self):
        base = unit_pair()

        def bad_beta(n, q):
            value = base.beta(n, q)
            if n == 3:
                value = value + q**5
            return value

        bad = BaileyPair(alpha=base.alpha, beta=bad_beta, a_param=base.a_param, name="defect")
        report = verify_pair(bad, depth=6, order=30)
        assert report.status is VerificationStatus.MISMATCH
        assert report.first_mismatch == (3, 5)

    def test_vacuous_comparison_is_inconclusive(self):
        # alpha supported on q^10 only; at order 5 every coefficient is zero
        def alpha(n, q):
            return q**10 if n == 0 else 0 * q

        pair = pair_from_alpha(alpha, 1, name="high-valuation")
        report = verify_pair(pair, depth=2, order=5)
        assert report.status is VerificationStatus.INCONCLUSIVE

    def test_rational_mode(self):
        report = verify_pair(unit_pair(), depth=5, q=Fraction(3, 7))
        assert report.status is VerificationStatus.VERIFIED

    def test_depth_validation(self):
        with pytest.raises(ValueError):
            verify_pair(unit_pair(), depth=-1, order=10)


class TestChain:
    def test_unit_chain_closure_two_steps(self):
        params = ChainParameters(MINUS_ONE, MINUS_ONE)
        first = chain_step(unit_pair(), params, order=30)
        assert verify_pair(first, depth=4, order=30).status is VerificationStatus.VERIFIED
        second = chain_step(first, params, order=30)
        assert verify_pair(second, depth=3, order=30).status is VerificationStatus.VERIFIED

    def test_depth_zero_collapse(self):
        params = ChainParameters(MINUS_ONE, MINUS_ONE)
        out = chain_step(unit_pair(), params, order=20)
        assert verify_pair(out, depth=0, order=20).status is VerificationStatus.VERIFIED

    def test_zero_parameter_rejected(self):
        with pytest.raises(ValueError):
            ChainParameters(Monomial(Fraction(0)), MINUS_ONE)

    def test_chain_preserves_a_param(self):
        out = chain_step(unit_pair(), ChainParameters(MINUS_ONE, MINUS_ONE))
        assert out.a_param == Monomial.one()


class TestZetaPairs:
    def make_random_zeta(self, seed, q):
        rng = random.Random(seed)
        table = [Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(6)]

        def alpha_s(n, s, qq):
            c = table[n] if n < len(table) else Fraction(0)
            return c * qq**0

        def beta_s(n, s, qq):
            return _beta_sum_zeta(alpha_s, Monomial.one(), s, n, qq)

        return BaileyZetaPair(alpha_s=alpha_s, beta_s=beta_s, a_param=1, s=2, name=f"rand{seed}")

    def test_lemma_equivalence_both_ways(self):
        q = Fraction(2, 5)
        for seed in range(8):
            zp = self.make_random_zeta(seed, q)
            assert verify_pair(zp, depth=5, q=q).status is VerificationStatus.VERIFIED
            cp = zeta_to_classical(zp)
            assert verify_pair(cp, depth=5, q=q).status is VerificationStatus.VERIFIED

    def test_lemma_equivalence_fails_together(self):
        q = Fraction(1, 3)
        zp = self.make_random_zeta(3, q)

        def bad_beta(n, s, qq):
            extra = Fraction(1, 7) if n == 2 else Fraction(0)
            return zp.beta_s(n, s, qq) + extra

        bad = BaileyZetaPair(alpha_s=zp.alpha_s, beta_s=bad_beta, a_param=1, s=2)
        assert verify_pair(bad, depth=4, q=q).status is VerificationStatus.MISMATCH
        assert (
            verify_pair(zeta_to_classical(bad), depth=4, q=q).status
            is VerificationStatus.MISMATCH
        )

    def test_round_trip_classical_zeta(self):
        q = Fraction(1, 2)
        zp = self.make_random_zeta(11, q)
        back = classical_to_zeta(zeta_to_classical(zp), s=2)
        for n in range(5):
            assert back.alpha_s(n, 2, q) == zp.alpha_s(n, 2, q)
            assert back.beta_s(n, 2, q) == zp.beta_s(n, 2, q)

    def test_unit_zeta_to_classical_alpha0(self):
        cp = zeta_to_classical(unit_zeta_pair())
        assert cp.alpha(0, QSeries.variable(8)) == QSeries.constant(1, 8)

    def test_dual_path_beta_with_q_integer_family(self):
        # alpha_r(s,q) = 1/[r]_q^s at s=2, exact rationals at q=1/2
        q = Fraction(1, 2)

        def alpha_s(n, s, qq):
            if n == 0:
                return Fraction(0)
            return Fraction(1) / q_integer(n, qq) ** 2

        def beta_s(n, s, qq):
            return _beta_sum_zeta(alpha_s, Monomial.one(), s, n, qq)

        zp = BaileyZetaPair(alpha_s=alpha_s, beta_s=beta_s, a_param=1, s=2)
        cp = zeta_to_classical(zp)
        qq = Monomial.q()
        from baileyzeta.bailey import _beta_sum_classical

        direct = _beta_sum_classical(cp.alpha, cp.a_param, 3, q)
        assert direct == zp.beta_s(3, 2, q)


class TestCandidateSearch:
    def test_aar_candidates_both_fail_at_n1_q0(self):
        result = determine_a_param(
            aar_alpha, aar_beta, ["1", "q"], depth=5, order=40, name="aar"
        )
        assert result.winner is None
        for mono, report in result.reports:
            assert report.status is VerificationStatus.MISMATCH
            assert report.first_mismatch == (1, 0)

    def test_search_finds_unit_a(self):
        base = unit_pair()
        result = determine_a_param(
            base.alpha, base.beta, ["q", "1"], depth=4, order=25, name="unit"
        )
        assert result.winner == Monomial.one()
        statuses = {str(m): rep.status for m, rep in result.reports}
        assert statuses["q"] is VerificationStatus.MISMATCH
        assert statuses["1"] is VerificationStatus.VERIFIED

    def test_empty_candidates_rejected(self):
        with pytest.raises(ValueError):
            determine_a_param(aar_alpha, aar_beta, [], depth=2, order=10)
