"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Tolerances are pinned here, not tuned at runtime.  Expected values come from
the independent oracles in oracles.py (Machin pi, accelerated alternating
series, Euler-Maclaurin corrected sums), never from the code paths under
test.

Criterion 10 asserts the documented closed form pi^4/96 for the mod-4 weight
at s = 4 and is expected to FAIL: the pipeline demonstrably converges to the
alternating series value beta(4) = 0.98894455174..., and pi^4/96 =
1.01467803... equals the non-alternating odd sum (1 - 2^-4) zeta(4) instead.
The failure is the criterion's, not the implementation's; see
test_criterion_10_beta4's docstring.
"""

import json
import random
import time
from fractions import Fraction
from pathlib import Path

import mpmath as mp
import pytest
from click.testing import CliRunner

import oracles
from baileyzeta.bailey import (
    BaileyPair,
    BaileyZetaPair,
    ChainParameters,
    Monomial,
    VerificationStatus,
    _beta_sum_zeta,
    alpha_from_beta,
    beta_from_alpha,
    chain_step,
    unit_pair,
    verify_pair,
    zeta_to_classical,
)
from baileyzeta.cli import cli
from baileyzeta.extrapolation import ExtrapolationConfig
from baileyzeta.limits import (
    AlphaFamily,
    a_n,
    a_n_via_inner,
    beta_n,
    euler_mascheroni_regularized,
    inner_limit_exact,
    outer_limit,
)
from baileyzeta.qcore import (
    PrecisionContext,
    QSeries,
    big_binomial,
    exact_to_mpf,
    ulp_distance,
)
from baileyzeta.weights import ArithmeticWeight

FIXTURES = Path(__file__).resolve().parents[1] / "src" / "baileyzeta" / "fixtures"
SCHEDULE = [64 * 2**k for k in range(7)]  # 64 .. 4096
CTX192 = PrecisionContext(precision_bits=192)
runner = CliRunner()


def report(number: int, label: str, ok: bool, detail: str = ""):
    state = "PASS" if ok else "FAIL"
    suffix = f"  ({detail})" if detail else ""
    print(f"{state} criterion {number:2d}: {label}{suffix}")
    assert ok, f"criterion {number}: {label}{suffix}"


def test_criterion_01_symbolic_verification_and_planted_defect():
    t0 = time.perf_counter()
    ok_unit = runner.invoke(
        cli, ["pair-verify", str(FIXTURES / "unit.json"), "--depth", "8", "--truncation", "30"]
    )
    elapsed = time.perf_counter() - t0
    defect = runner.invoke(
        cli, ["pair-verify", str(FIXTURES / "unit_defect_q5.json"), "--format", "json"]
    )
    loc = json.loads(defect.output)["candidates"][0]["first_mismatch"]
    ok = (
        ok_unit.exit_code == 0
        and elapsed < 5.0
        and defect.exit_code == 2
        and loc == {"n": 3, "power": 5}
    )
    report(1, "unit pair verifies to n<=8 at order 30; q^5 defect located at (3,5)",
           ok, f"verify {elapsed:.2f}s")


def test_criterion_02_inversion_round_trip_50_random():
    rng = random.Random(20260809)
    failures = 0
    for _ in range(50):
        table = [Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(7)]

        def alpha(r, q, _t=table):
            return (_t[r] if r < len(_t) else Fraction(0)) * q**0

        betas = {n: beta_from_alpha(alpha, 1, n, 25) for n in range(7)}
        for n in range(7):
            back = alpha_from_beta(lambda j, q: betas[j], 1, n, 25)
            if back != QSeries.constant(table[n], 25):
                failures += 1
    report(2, "alpha_from_beta o beta_from_alpha is the identity on 50 random sequences",
           failures == 0, f"{failures} failures")


def test_criterion_03_chain_closure_two_iterations():
    params = ChainParameters(Monomial.parse("-1"), Monomial.parse("-1"))
    first = chain_step(unit_pair(), params, order=30)
    r1 = verify_pair(first, depth=4, order=30)
    second = chain_step(first, params, order=30)
    r2 = verify_pair(second, depth=4, order=30)
    ok = r1.status is VerificationStatus.VERIFIED and r2.status is VerificationStatus.VERIFIED
    report(3, "chain transform of the unit pair verifies to depth 4, twice", ok)


def test_criterion_04_zeta_lemma_equivalence_20_instances():
    rng = random.Random(77)
    ok = True
    for trial in range(20):
        table = [Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(6)]
        q = Fraction(rng.randint(1, 8), 9)

        def alpha_s(n, s, qq, _t=table):
            return (_t[n] if n < len(_t) else Fraction(0)) * qq**0

        def beta_s(n, s, qq, _a=alpha_s):
            return _beta_sum_zeta(_a, Monomial.one(), s, n, qq)

        zp = BaileyZetaPair(alpha_s=alpha_s, beta_s=beta_s, a_param=1, s=2)
        direct = verify_pair(zp, depth=5, q=q)
        transformed = verify_pair(zeta_to_classical(zp), depth=5, q=q)
        if not (direct.ok and transformed.ok):
            ok = False
        # and a perturbed instance must fail along BOTH routes
        def bad_beta(n, s, qq, _b=beta_s):
            return _b(n, s, qq) + (Fraction(1, 5) if n == 3 else Fraction(0))

        bad = BaileyZetaPair(alpha_s=alpha_s, beta_s=bad_beta, a_param=1, s=2)
        if verify_pair(bad, depth=5, q=q).ok:
            ok = False
        if verify_pair(zeta_to_classical(bad), depth=5, q=q).ok:
            ok = False
    report(4, "weighted and classical relations agree exactly both ways on 20 instances", ok)


def test_criterion_05_proof_identity_two_ulps_at_128_bits():
    ctx = PrecisionContext(precision_bits=128)
    weights = (ArithmeticWeight.trivial(), ArithmeticWeight.alternating(), ArithmeticWeight.mod4())
    worst = 0.0
    for n in list(range(1, 65)) + [128, 256]:
        for s in (2, 3, complex(2, 1)):
            for chi in weights:
                d = float(ulp_distance(a_n(chi, s, n, ctx), a_n_via_inner(chi, s, n, ctx), 128))
                worst = max(worst, d)
    report(5, "binomial-sum and factorial-sum routes agree to <= 2 ulps at 128 bits",
           worst <= 2.0, f"worst {worst:.3f} ulps")


def test_criterion_06_inner_limit_strictly_decreasing_deviation():
    fam = AlphaFamily(ArithmeticWeight.trivial(), 2)
    ok = True
    detail = []
    for n in range(1, 6):
        exact = inner_limit_exact(fam.weight, 2, n, CTX192)
        devs = []
        for k in range(2, 7):
            q = Fraction(10**k - 1, 10**k)
            beta = beta_n(fam, n, q, CTX192)
            with CTX192.guarded():
                scaled = exact_to_mpf((1 - q) ** (2 * n)) * beta
                devs.append(abs(scaled - exact))
        if not all(b < a for a, b in zip(devs, devs[1:])):
            ok = False
            detail.append(f"n={n}")
    report(6, "|(1-q)^2n beta_n - L_n| strictly decreases along q = 1-10^-k, k=2..6",
           ok, ",".join(detail))


def test_criterion_07_zeta2_over_sqrt_pi():
    t0 = time.perf_counter()
    rep = outer_limit(ArithmeticWeight.trivial(), 2, SCHEDULE, ExtrapolationConfig(order=6), CTX192)
    elapsed = time.perf_counter() - t0
    target = oracles.zeta2(208) / oracles.sqrt_pi(208)
    rel = oracles.rel_err(rep.extrapolated, target)
    report(7, "trivial weight, s=2: extrapolation hits zeta(2)/sqrt(pi) to 1e-4 rel",
           rel < 1e-4 and elapsed < 60.0, f"rel {rel:.2e}, {elapsed:.1f}s")


def test_criterion_08_catalan():
    rep = outer_limit(ArithmeticWeight.mod4(), 2, SCHEDULE, ExtrapolationConfig(order=6), CTX192)
    with CTX192.guarded():
        unscaled = rep.extrapolated * oracles.sqrt_pi(208)
    rel = oracles.rel_err(unscaled, oracles.catalan_constant(208))
    report(8, "mod4 weight, s=2, times sqrt(pi): Catalan's constant to 1e-4",
           rel < 1e-4, f"rel {rel:.2e}")


def test_criterion_09_eta_relation_within_error_estimates():
    rep_alt = outer_limit(ArithmeticWeight.alternating(), 2, SCHEDULE, ExtrapolationConfig(order=6), CTX192)
    rep_triv = outer_limit(ArithmeticWeight.trivial(), 2, SCHEDULE, ExtrapolationConfig(order=6), CTX192)
    with CTX192.guarded():
        gap = abs(rep_alt.extrapolated - (1 - mp.mpf(2) ** -1) * rep_triv.extrapolated)
        budget = rep_alt.error_estimate + rep_triv.error_estimate
    report(9, "extrapolated alternating = (1 - 2^-1) x extrapolated trivial within estimates",
           gap <= budget, f"gap {float(gap):.2e} vs budget {float(budget):.2e}")


def test_criterion_10_beta4():
    """Asserts the stated closed form pi^4/96 at 1e-6 relative.

    Expected to fail: pi^4/96 = (1 - 2^-4) zeta(4) is the odd sum WITHOUT
    alternating signs, whereas L(4, chi_4) alternates.  The pipeline output
    times sqrt(pi) matches the directly-summed alternating series
    beta(4) = 0.9889445517... to ~3e-11 (see test_cli for that check), so
    the discrepancy is in the documented constant, not the computation.
    """
    rep = outer_limit(ArithmeticWeight.mod4(), 4, SCHEDULE, ExtrapolationConfig(order=6), CTX192)
    with CTX192.guarded():
        unscaled = rep.extrapolated * oracles.sqrt_pi(208)
        stated_target = oracles.machin_pi(208) ** 4 / 96
    rel = oracles.rel_err(unscaled, stated_target)
    report(10, "mod4 weight at s=4 times sqrt(pi) equals pi^4/96 to 1e-6 rel",
           rel < 1e-6, f"rel {rel:.2e}; pipeline value {mp.nstr(unscaled, 12)} "
           f"is beta(4), stated target {mp.nstr(stated_target, 12)}")


def test_criterion_11_euler_mascheroni_regularized():
    deltas = [Fraction(1, 2), Fraction(1, 4), Fraction(1, 8), Fraction(1, 16)]
    rep = euler_mascheroni_regularized(deltas, SCHEDULE, ExtrapolationConfig(order=6), CTX192)
    target = oracles.euler_gamma(208) / oracles.sqrt_pi(208)
    rel = oracles.rel_err(rep.extrapolated_gamma_over_sqrt_pi, target)
    with CTX192.guarded():
        pole_floor = mp.mpf(9) / 10 / (oracles.sqrt_pi(208) * exact_to_mpf(Fraction(1, 16)))
        pole_witness = abs(rep.raw[-1]) > pole_floor
    report(11, "regularized path recovers gamma/sqrt(pi) to 1e-2 rel; raw shows the 1/delta pole",
           rel < 1e-2 and bool(pole_witness),
           f"rel {rel:.2e}, raw {float(abs(rep.raw[-1])):.3f} > {float(pole_floor):.3f}")


def test_criterion_12_binomial_ratio_limit():
    inv_sqrt_pi = 1 / oracles.sqrt_pi(192)
    ok = True
    details = []
    with mp.workprec(192):
        for r in (1, 2, 5):
            devs = {}
            for n in (10**3, 10**4):
                val = mp.sqrt(n) * mp.mpf(big_binomial(2 * n, n + r)) / (1 << (2 * n))
                devs[n] = abs(val - inv_sqrt_pi)
            if not (float(devs[10**4]) < 1e-2 and devs[10**4] < devs[10**3]):
                ok = False
            details.append(f"r={r}: {float(devs[10**4]):.2e}")
    report(12, "(sqrt(n)/4^n) C(2n, n+r) -> 1/sqrt(pi): deviation < 1e-2 at n=1e4 and shrinking",
           ok, "; ".join(details))


def test_criterion_13_determinism_byte_identical_json():
    args = [
        "lvalue", "--weight", "trivial", "--s", "2", "--n0", "64", "--factor", "2",
        "--count", "7", "--order", "6", "--precision", "192",
        "--policy", "sequential-ascending", "--format", "json", "--no-timing",
    ]
    one = runner.invoke(cli, args + ["--threads", "1"])
    four = runner.invoke(cli, args + ["--threads", "4"])
    ok = (
        one.exit_code == 0
        and four.exit_code == 0
        and one.output.encode("utf-8") == four.output.encode("utf-8")
    )
    report(13, "criterion-7 run repeats byte-identically across thread counts", ok)
