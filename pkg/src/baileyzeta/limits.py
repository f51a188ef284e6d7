"""The two-step limit engine.

For a bounded periodic weight chi and Re(s) > 1 the weighted sums

    beta_n(s,q) = sum_{r=1}^n q^r alpha_r(s,q) / ((q;q)_{n-r} (q;q)_{n+r}),
    alpha_r(s,q) = chi(r) / [r]_q^s,

satisfy a two-step limit: q -> 1- turns (1-q)^(2n) beta_n into the exact
finite sum  L_n(s) = sum_{r<=n} chi(r) / ((n-r)! (n+r)! r^s),  and the
binomial-weighted sequence

    a_n = (sqrt(n)/4^n) sum_{r<=n} C(2n, n+r) chi(r) / r^s
        = sqrt(n) (2n)! L_n(s) / 4^n

tends to L(s,chi)/sqrt(pi) as n grows.  The inner limit is taken exactly
through L_n (chasing q -> 1 numerically cancels catastrophically in the
(1-q)^(2n) products); the numeric q-path survives only as a diagnostic.
The outer limit is accelerated by eliminating known decay exponents of the
error; raw a_n alone converges like n^(-1/2) at s = 2.

Everything here is fixed at the a = 1 specialization of the weighted pair
relation, the only case the limit needs.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import mpmath as mp

from .extrapolation import ExtrapolationConfig, extrapolate_to_limit, neville_at_zero
from .qcore import PrecisionContext, big_factorial, exact_to_mpf, q_integer
from .weights import ArithmeticWeight, _exact, _normalize_s, _s_value

__all__ = [
    "AlphaFamily",
    "ConvergenceRecord",
    "ConvergenceReport",
    "RegularizationReport",
    "RegularizationError",
    "InnerLimitRow",
    "BoundSample",
    "BoundDiagnostic",
    "alpha_zeta",
    "beta_n",
    "t_n",
    "inner_limit_exact",
    "a_n",
    "a_n_via_inner",
    "outer_limit",
    "outer_limit_stream",
    "inner_limit_numeric",
    "hypothesis_bound_diagnostic",
    "euler_mascheroni_regularized",
    "gamma_exponent_model",
]


@dataclass(frozen=True)
class AlphaFamily:
    """The weight-deformed coefficient family alpha_r(s,q) = chi(r) / [r]_q^s.

    Pointwise in r, alpha_r(s,q) -> chi(r)/r^s as q -> 1-, and at q = 1 the
    equality is exact.  Re(s) > 1 is required by the limit theorem; the
    regularized path uses s = 1 + delta which still satisfies it.
    """

    weight: ArithmeticWeight
    s: object

    def __post_init__(self):
        s_re, s_im = _normalize_s(self.s)
        if s_re <= 0:
            raise ValueError("the coefficient family needs Re(s) > 0")
        object.__setattr__(self, "s", (s_re, s_im))

    @property
    def s_re(self) -> Fraction:
        return self.s[0]

    @property
    def s_im(self) -> Fraction:
        return self.s[1]


def _require_q_open_unit(q) -> Fraction:
    qv = Fraction(q)
    if not 0 < qv < 1:
        raise ValueError("q must be a rational in (0, 1)")
    return qv


def _alpha_term(fam: AlphaFamily, r: int, qv: Fraction, s_val):
    """chi(r) * [r]_q^(-s) at the current working precision (None when chi=0)."""
    c = fam.weight.evaluate(r)
    if c.is_zero():
        return None
    base = exact_to_mpf(q_integer(r, qv))
    return c.as_mpc() * mp.power(base, -s_val)


def alpha_zeta(fam: AlphaFamily, r: int, q, ctx: PrecisionContext = PrecisionContext()):
    """alpha_r(s,q) = chi(r) [r]_q^(-s) for rational q in (0, 1].

    [r]_q is evaluated exactly as a rational, then raised to -s with the
    principal branch (the base is a positive real).
    """
    if r < 1:
        raise ValueError("r must be positive")
    qv = Fraction(q)
    if not 0 < qv <= 1:
        raise ValueError("q must lie in (0, 1]")
    with ctx.guarded():
        value = _alpha_term(fam, r, qv, _s_value(*fam.s))
        if value is None:
            value = mp.mpf(0)
    return ctx.round(value)


def beta_n(fam: AlphaFamily, n: int, q, ctx: PrecisionContext = PrecisionContext()):
    """beta_n(s,q) = sum_{r=1}^n q^r alpha_r(s,q) / ((q;q)_{n-r} (q;q)_{n+r}).

    The q-Pochhammer weights are accumulated exactly in rationals and each
    term is rounded once at conversion; the sum follows the context's
    summation policy in ascending r.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    qv = _require_q_open_unit(q)
    # (q;q)_m for m = 0..2n, exact
    poch = [Fraction(1)]
    qpow = Fraction(1)
    for m in range(1, 2 * n + 1):
        qpow *= qv
        poch.append(poch[-1] * (1 - qpow))
    with ctx.guarded():
        s_val = _s_value(*fam.s)
        terms = []
        qr = Fraction(1)
        for r in range(1, n + 1):
            qr *= qv
            alpha = _alpha_term(fam, r, qv, s_val)
            if alpha is None:
                continue
            weight = qr / (poch[n - r] * poch[n + r])
            terms.append(exact_to_mpf(weight) * alpha)
        total = ctx.sum_terms(terms)
    return ctx.round(total)


def t_n(fam: AlphaFamily, n: int, q, ctx: PrecisionContext = PrecisionContext()):
    """T_n(s,q) = sqrt(n) (2n)! (1-q)^(2n) beta_n(s,q) / 4^n.

    (2n)! / 4^n and (1-q)^(2n) are combined exactly before any rounding;
    sqrt(n) and the final product are evaluated at the context precision.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    qv = _require_q_open_unit(q)
    scale = Fraction(big_factorial(2 * n), 4**n) * (1 - qv) ** (2 * n)
    beta = beta_n(fam, n, qv, ctx)
    with ctx.guarded():
        value = mp.sqrt(n) * exact_to_mpf(scale) * beta
    return ctx.round(value)


def inner_limit_exact(
    chi: ArithmeticWeight,
    s,
    n: int,
    ctx: PrecisionContext = PrecisionContext(),
):
    """The exact q -> 1- limit of (1-q)^(2n) beta_n:
    L_n(s) = sum_{r=1}^n chi(r) / ((n-r)! (n+r)! r^s).

    Factorials are exact integers; r^(-s) is evaluated at the context
    precision.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    s_re, s_im = _normalize_s(s)
    with ctx.guarded():
        s_val = _s_value(s_re, s_im)
        terms = []
        for r in range(1, n + 1):
            c = chi.evaluate(r)
            if c.is_zero():
                continue
            w = Fraction(1, big_factorial(n - r) * big_factorial(n + r))
            terms.append(exact_to_mpf(w) * c.as_mpc() * mp.power(r, -s_val))
        total = ctx.sum_terms(terms)
    return ctx.round(total)


def a_n(chi: ArithmeticWeight, s, n: int, ctx: PrecisionContext = PrecisionContext()):
    """a_n = (sqrt(n)/4^n) sum_{r=1}^n C(2n, n+r) chi(r) / r^s.

    Binomials are exact integers updated incrementally along the row; the
    result agrees with sqrt(n) (2n)! L_n(s) / 4^n to within a couple of
    units in the last place at the context precision.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    s_re, s_im = _normalize_s(s)
    if s_re <= 1:
        raise ValueError("a_n requires Re(s) > 1")
    with ctx.guarded():
        s_val = _s_value(s_re, s_im)
        binom = math.comb(2 * n, n + 1)
        terms = []
        for r in range(1, n + 1):
            c = chi.evaluate(r)
            if not c.is_zero():
                kernel = mp.mpf(binom) * mp.power(r, -s_val)
                terms.append(kernel * c.as_mpc())
            if r < n:
                binom = binom * (n - r) // (n + r + 1)
        total = ctx.sum_terms(terms)
        value = mp.sqrt(n) * total / (1 << (2 * n))
    return ctx.round(value)


def a_n_via_inner(chi: ArithmeticWeight, s, n: int, ctx: PrecisionContext = PrecisionContext()):
    """The identical quantity computed through the exact inner limit:
    sqrt(n) (2n)! L_n(s) / 4^n.  Kept as an independent route for the
    proof-identity check."""
    inner = inner_limit_exact(chi, s, n, ctx)
    with ctx.guarded():
        value = mp.sqrt(n) * mp.mpf(big_factorial(2 * n)) * inner / (1 << (2 * n))
    return ctx.round(value)


# ---------------------------------------------------------------------------
# Convergence reporting


@dataclass(frozen=True)
class ConvergenceRecord:
    n: int
    value: object
    error_estimate: object
    elapsed_s: float


@dataclass(frozen=True)
class ConvergenceReport:
    """Approximant trace plus the extrapolated limit.

    `error_estimate` is the difference of the last two extrapolation
    columns: a heuristic, reported but never claimed rigorous.
    """

    records: tuple
    extrapolated: object
    method: str
    error_estimate: object
    target_hint: object = None

    def __post_init__(self):
        ns = [rec.n for rec in self.records]
        if any(b <= a for a, b in zip(ns, ns[1:])):
            raise ValueError("records must be sorted by strictly increasing n")
        for rec in self.records:
            if rec.error_estimate < 0:
                raise ValueError("error estimates must be nonnegative")


def _prefix_config(config: ExtrapolationConfig, npoints: int) -> ExtrapolationConfig:
    exps = config.resolved_exponents()
    usable = min(len(exps), npoints - 1)
    return ExtrapolationConfig(order=usable, exponents=exps[:usable])


def outer_limit_stream(
    chi: ArithmeticWeight,
    s,
    schedule: Sequence[int],
    accel: ExtrapolationConfig = ExtrapolationConfig(),
    ctx: PrecisionContext = PrecisionContext(),
    target_hint=None,
):
    """Generator form of :func:`outer_limit`.

    Yields ("record", ConvergenceRecord) per schedule point as soon as it is
    computed, then one final ("report", ConvergenceReport); the CLI streams
    the records and both entry points share this single code path.
    """
    s_re, _ = _normalize_s(s)
    if s_re <= 1:
        raise ValueError("outer limit requires Re(s) > 1")
    sched = [int(n) for n in schedule]
    if not sched or any(n < 1 for n in sched):
        raise ValueError("schedule must contain positive indices")
    if any(b <= a for a, b in zip(sched, sched[1:])):
        raise ValueError("schedule must be strictly increasing")
    needed = len(accel.resolved_exponents()) + 1
    if len(sched) < needed:
        raise ValueError(
            f"schedule too short for the requested order: need {needed} points"
        )

    records = []
    values = []
    running = None
    for k, nval in enumerate(sched):
        t0 = time.perf_counter()
        value = a_n(chi, s, nval, ctx)
        elapsed = time.perf_counter() - t0
        values.append(value)
        if k == 0:
            estimate = mp.mpf(0)
        else:
            result = extrapolate_to_limit(
                sched[: k + 1], values, _prefix_config(accel, k + 1), ctx
            )
            previous = running if running is not None else values[0]
            with ctx.guarded():
                estimate = ctx.round(abs(result.value - previous))
            running = result.value
        record = ConvergenceRecord(
            n=nval, value=value, error_estimate=estimate, elapsed_s=elapsed
        )
        records.append(record)
        yield "record", record

    final = extrapolate_to_limit(sched, values, accel, ctx)
    yield "report", ConvergenceReport(
        records=tuple(records),
        extrapolated=final.value,
        method=accel.describe(),
        error_estimate=final.error_estimate,
        target_hint=target_hint,
    )


def outer_limit(
    chi: ArithmeticWeight,
    s,
    schedule: Sequence[int],
    accel: ExtrapolationConfig = ExtrapolationConfig(),
    ctx: PrecisionContext = PrecisionContext(),
    target_hint=None,
) -> ConvergenceReport:
    """Drive a_n over the schedule and extrapolate n -> infinity.

    The limit equals L(s,chi)/sqrt(pi).  Per-record error estimates track
    the change of the running extrapolated value as points accumulate.
    """
    report = None
    for kind, payload in outer_limit_stream(chi, s, schedule, accel, ctx, target_hint):
        if kind == "report":
            report = payload
    return report


# ---------------------------------------------------------------------------
# Diagnostics


@dataclass(frozen=True)
class InnerLimitRow:
    q: Fraction
    scaled_beta: object
    exact_inner: object
    deviation: object


def inner_limit_numeric(
    fam: AlphaFamily,
    n: int,
    q_grid: Sequence,
    ctx: PrecisionContext = PrecisionContext(),
) -> list:
    """(1-q)^(2n) beta_n along a q-grid, against the exact inner limit.

    The deviations must shrink along the tail of any grid approaching 1;
    this function only reports, callers assert.
    """
    grid = [_require_q_open_unit(q) for q in q_grid]
    if not grid:
        raise ValueError("empty q grid")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("q grid must increase toward 1")
    exact = inner_limit_exact(fam.weight, fam.s, n, ctx)
    rows = []
    for qv in grid:
        beta = beta_n(fam, n, qv, ctx)
        with ctx.guarded():
            scaled = exact_to_mpf((1 - qv) ** (2 * n)) * beta
            deviation = abs(scaled - exact)
        rows.append(
            InnerLimitRow(
                q=qv,
                scaled_beta=ctx.round(scaled),
                exact_inner=exact,
                deviation=ctx.round(deviation),
            )
        )
    return rows


@dataclass(frozen=True)
class BoundSample:
    r: int
    max_ratio: object


@dataclass(frozen=True)
class BoundDiagnostic:
    """Sampled check of |alpha_r(s,q)| <= C r^(-sigma).

    Ratios <= 1 mean the bound held on the sampled domain.  This is purely
    observational: nothing in the pipeline assumes the bound, and for the
    [r]_q family no sigma > Re(s) can satisfy it for all q, so it must stay
    a diagnostic.
    """

    samples: tuple
    max_ratio: object
    argmax: tuple
    holds_on_sample: bool


def hypothesis_bound_diagnostic(
    fam: AlphaFamily,
    sigma,
    C,
    r_max: int,
    q_grid: Sequence,
    ctx: PrecisionContext = PrecisionContext(),
) -> BoundDiagnostic:
    """Report max over the grid and r <= r_max of |alpha_r(s,q)| r^sigma / C."""
    sig = _exact(sigma)
    cval = _exact(C)
    if sig <= 0 or cval <= 0:
        raise ValueError("sigma and C must be positive")
    if r_max < 1:
        raise ValueError("r_max must be at least 1")
    grid = []
    for q in q_grid:
        qv = Fraction(q)
        if not 0 < qv <= 1:
            raise ValueError("grid points must lie in (0, 1]")
        grid.append(qv)
    if not grid:
        raise ValueError("empty q grid")

    samples = []
    best = None
    best_at = None
    with ctx.guarded():
        sigma_mp = exact_to_mpf(sig)
        c_mp = exact_to_mpf(cval)
        s_re = exact_to_mpf(fam.s_re)
        for r in range(1, r_max + 1):
            chi_abs2 = fam.weight.evaluate(r).abs_squared()
            row_best = mp.mpf(0)
            row_q = grid[0]
            if chi_abs2 != 0:
                chi_abs = mp.sqrt(exact_to_mpf(chi_abs2))
                for qv in grid:
                    base = exact_to_mpf(q_integer(r, qv))
                    # |[r]_q^{-s}| depends only on Re(s) for a positive base
                    ratio = chi_abs * mp.power(base, -s_re) * mp.power(r, sigma_mp) / c_mp
                    if ratio > row_best:
                        row_best = ratio
                        row_q = qv
            samples.append(BoundSample(r=r, max_ratio=ctx.round(row_best)))
            if best is None or row_best > best:
                best = row_best
                best_at = (r, row_q)
    return BoundDiagnostic(
        samples=tuple(samples),
        max_ratio=ctx.round(best),
        argmax=best_at,
        holds_on_sample=bool(best <= 1),
    )


# ---------------------------------------------------------------------------
# Regularized Euler-Mascheroni path


class RegularizationError(RuntimeError):
    """Outer-limit failure on the regularized path, with the delta recorded."""

    def __init__(self, delta, message: str):
        super().__init__(f"delta={delta}: {message}")
        self.delta = delta


@dataclass(frozen=True)
class RegularizationReport:
    """Pole-subtracted limit data over a decreasing delta grid.

    `raw` are outer-limit estimates at s = 1 + delta, which blow up like
    1/(sqrt(pi) delta); `subtracted` removes that pole and stays bounded,
    extrapolating to gamma/sqrt(pi) as delta -> 0+.
    """

    delta_grid: tuple
    raw: tuple
    subtracted: tuple
    extrapolated_gamma_over_sqrt_pi: object
    method: str


def gamma_exponent_model(delta: Fraction, order: int = 6) -> tuple:
    """Decay exponents of the a_n error at s = 1 + delta.

    The expansion of the binomial-weighted tail carries n^(-delta/2) from
    the continuum part and integer powers n^(-k) (with n^(-k-delta/2)
    companions) from the local corrections, so the model interleaves
    {delta/2} with {1, 1+delta/2, 2, 2+delta/2, ...}.  The default
    half-integer ladder misses the delta-dependent exponents badly for
    small delta; this model is what makes the regularized path converge.
    """
    d = Fraction(delta)
    if not 0 < d < 2:
        raise ValueError("delta must lie in (0, 2)")
    exps = [d / 2]
    k = 1
    while len(exps) < order:
        exps.append(Fraction(k))
        if len(exps) < order:
            exps.append(k + d / 2)
        k += 1
    return tuple(exps)


def euler_mascheroni_regularized(
    delta_grid: Sequence,
    schedule: Sequence[int],
    accel: ExtrapolationConfig = ExtrapolationConfig(),
    ctx: PrecisionContext = PrecisionContext(),
) -> RegularizationReport:
    """Estimate gamma/sqrt(pi) from the pole-subtracted limit at s = 1 + delta.

    For each delta the outer limit runs with the trivial weight; the pole
    term 1/(sqrt(pi) delta) is subtracted at context precision, and the
    subtracted values are extrapolated polynomially in delta to 0+.
    Unless the caller supplied explicit decay exponents, each delta uses
    the delta-aware model from :func:`gamma_exponent_model`.
    """
    deltas = [Fraction(d) for d in delta_grid]
    if not deltas or any(d <= 0 for d in deltas):
        raise ValueError("delta grid must be positive")
    if any(b >= a for a, b in zip(deltas, deltas[1:])):
        raise ValueError("delta grid must be strictly decreasing")

    chi = ArithmeticWeight.trivial()
    raw = []
    subtracted = []
    methods = []
    for d in deltas:
        if accel.exponents is None:
            accel_d = ExtrapolationConfig(
                order=accel.order, exponents=gamma_exponent_model(d, accel.order)
            )
        else:
            accel_d = accel
        try:
            report = outer_limit(chi, 1 + d, schedule, accel_d, ctx)
        except (ValueError, ArithmeticError) as exc:
            raise RegularizationError(d, str(exc)) from exc
        raw.append(report.extrapolated)
        methods.append(report.method)
        with ctx.guarded():
            pole = 1 / (mp.sqrt(mp.pi) * exact_to_mpf(d))
            subtracted.append(ctx.round(report.extrapolated - pole))
    with ctx.guarded():
        nodes = [exact_to_mpf(d) for d in deltas]
    gamma_est = neville_at_zero(nodes, subtracted, ctx)
    method = f"pole-subtracted; per-delta {methods[-1]}; delta->0 polynomial"
    return RegularizationReport(
        delta_grid=tuple(deltas),
        raw=tuple(raw),
        subtracted=tuple(subtracted),
        extrapolated_gamma_over_sqrt_pi=gamma_est,
        method=method,
    )
