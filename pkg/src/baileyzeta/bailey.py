"""Bailey pairs, the inversion relation, the chain transform, and the
q^r-weighted (zeta) deformation, with an exact symbolic verifier.

Every identity here is checked exactly: either coefficientwise over
truncated q-series with rational coefficients, or pointwise at an exact
rational q.  Generators are pure functions of (n, q) where q is a QSeries
(symbolic mode) or a Fraction (rational mode); both rings share the same
relation code.

The parameter "relative to a" is restricted to exact monomials c*q^k with
rational c, which covers every instance handled by this package while
keeping series inversion exact.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

from .qcore import QSeries, ZeroConstantTermError, pochhammer_in

__all__ = [
    "Monomial",
    "BaileyPair",
    "BaileyZetaPair",
    "ChainParameters",
    "VerificationStatus",
    "VerificationReport",
    "CandidateSearch",
    "beta_from_alpha",
    "alpha_from_beta",
    "chain_step",
    "zeta_to_classical",
    "classical_to_zeta",
    "verify_pair",
    "determine_a_param",
    "memoized",
    "pair_from_alpha",
    "unit_pair",
    "unit_zeta_pair",
    "aar_alpha",
    "aar_beta",
]

Ring = Union[Fraction, QSeries]


# ---------------------------------------------------------------------------
# Monomials c * q^k


@dataclass(frozen=True, slots=True)
class Monomial:
    """Exact monomial c * q^k with rational c and integer (possibly negative) k."""

    coeff: Fraction
    power: int = 0

    def __post_init__(self):
        object.__setattr__(self, "coeff", Fraction(self.coeff))

    @classmethod
    def one(cls) -> "Monomial":
        return cls(Fraction(1), 0)

    @classmethod
    def q(cls) -> "Monomial":
        return cls(Fraction(1), 1)

    @classmethod
    def parse(cls, text: str) -> "Monomial":
        """Parse strings like '1', '-1', 'q', '-q', '3/2*q^2', 'q^-1'."""
        s = text.strip().replace(" ", "")
        if not s:
            raise ValueError("empty monomial")
        sign = Fraction(1)
        while s and s[0] in "+-":
            if s[0] == "-":
                sign = -sign
            s = s[1:]
        if not s:
            raise ValueError(f"cannot parse monomial {text!r}")
        coeff = Fraction(1)
        power = 0
        if "*" in s:
            head, s = s.split("*", 1)
            coeff = Fraction(head)
        if s.startswith("q"):
            rest = s[1:]
            if rest == "":
                power = 1
            elif rest.startswith("^"):
                power = int(rest[1:])
            else:
                raise ValueError(f"cannot parse monomial {text!r}")
        else:
            if "*" in s or "q" in s:
                raise ValueError(f"cannot parse monomial {text!r}")
            coeff = coeff * Fraction(s)
        return cls(sign * coeff, power)

    def shifted(self, extra_power: int) -> "Monomial":
        return Monomial(self.coeff, self.power + extra_power)

    def __mul__(self, other: "Monomial") -> "Monomial":
        return Monomial(self.coeff * other.coeff, self.power + other.power)

    def __truediv__(self, other: "Monomial") -> "Monomial":
        if other.coeff == 0:
            raise ZeroDivisionError("division by the zero monomial")
        return Monomial(self.coeff / other.coeff, self.power - other.power)

    def __pow__(self, e: int) -> "Monomial":
        return Monomial(self.coeff**e, self.power * e)

    def is_zero(self) -> bool:
        return self.coeff == 0

    def value(self, q: Ring) -> Ring:
        """Evaluate in the ring of q.

        A negative power needs q to be invertible; for a series q this
        raises ZeroConstantTermError, which is exactly the a = 1/q style
        degeneracy the relations reject.
        """
        return self.coeff * q**self.power

    def __str__(self):
        if self.power == 0:
            return str(self.coeff)
        qpart = "q" if self.power == 1 else f"q^{self.power}"
        if self.coeff == 1:
            return qpart
        if self.coeff == -1:
            return f"-{qpart}"
        return f"{self.coeff}*{qpart}"


def _as_monomial(value) -> Monomial:
    if isinstance(value, Monomial):
        return value
    if isinstance(value, (int, Fraction)):
        return Monomial(Fraction(value), 0)
    if isinstance(value, str):
        return Monomial.parse(value)
    raise TypeError(f"cannot interpret {value!r} as a monomial in q")


# ---------------------------------------------------------------------------
# Ring helpers shared by the rational and the symbolic mode


def _ring_one(q: Ring) -> Ring:
    return q**0


def _ring_div(num, den):
    if isinstance(den, QSeries):
        return num * den.inverse()
    if den == 0:
        raise ZeroConstantTermError("zero denominator in Bailey relation")
    return num / den


def _div_q_power(value: Ring, q: Ring, n: int) -> Ring:
    """Exact division by q^n; series must vanish to order n."""
    if n == 0:
        return value
    if isinstance(value, QSeries):
        if any(c != 0 for c in value.coefficients[:n]):
            raise ValueError("series is not divisible by q^n")
        return QSeries(value.coefficients[n:], value.truncation_order - n)
    return value / q**n


def _poch(mono: Monomial, q: Ring, count: int, step: int = 1) -> Ring:
    """prod_{i=0}^{count-1} (1 - value(c * q^(k + step*i))).

    Covers (q;q)_m (mono=q), (aq;q)_m (mono=a shifted by 1), (rho;q)_j, and
    base-q^2 products like (q^2;q^2)_n (mono=q^2, step=2).
    """
    one = _ring_one(q)
    result = one
    for i in range(count):
        result = result * (one - mono.shifted(step * i).value(q))
    return result


def memoized(generator: Callable) -> Callable:
    """Memoize a pure generator of (n, q); both argument types are hashable."""
    return functools.lru_cache(maxsize=None)(generator)


# ---------------------------------------------------------------------------
# Pair types


@dataclass(frozen=True, eq=False)
class BaileyPair:
    """Sequences (alpha_n, beta_n) intended to satisfy
    beta_n = sum_{r=0}^n alpha_r / ((q;q)_{n-r} (aq;q)_{n+r})  relative to a.

    The generators are pure functions of (n, q); validity is established by
    :func:`verify_pair`, never assumed.
    """

    alpha: Callable[[int, Ring], Ring]
    beta: Callable[[int, Ring], Ring]
    a_param: Monomial = field(default_factory=Monomial.one)
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "a_param", _as_monomial(self.a_param))


@dataclass(frozen=True, eq=False)
class BaileyZetaPair:
    """The q^r-weighted deformation:
    beta_n(s) = sum_{r=0}^n q^r alpha_r(s) / ((q;q)_{n-r} (aq;q)_{n+r}).

    `alpha_s` and `beta_s` are generators of (n, s, q); `s` rides along as
    an opaque parameter so exact rings stay exact.
    """

    alpha_s: Callable[[int, object, Ring], Ring]
    beta_s: Callable[[int, object, Ring], Ring]
    a_param: Monomial = field(default_factory=Monomial.one)
    s: object = None
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "a_param", _as_monomial(self.a_param))


@dataclass(frozen=True, slots=True)
class ChainParameters:
    """The two free parameters of the chain transform; both must be nonzero
    since aq/(rho1*rho2) and aq/rho_i appear in denominators."""

    rho1: Monomial
    rho2: Monomial

    def __post_init__(self):
        object.__setattr__(self, "rho1", _as_monomial(self.rho1))
        object.__setattr__(self, "rho2", _as_monomial(self.rho2))
        if self.rho1.is_zero() or self.rho2.is_zero():
            raise ValueError("chain parameters must be nonzero")


# ---------------------------------------------------------------------------
# The defining relation and its inverse


def _beta_sum_classical(alpha, a: Monomial, n: int, q: Ring) -> Ring:
    total = None
    qq = Monomial.q()
    aq = a.shifted(1)
    for r in range(n + 1):
        den = _poch(qq, q, n - r) * _poch(aq, q, n + r)
        term = _ring_div(alpha(r, q), den)
        total = term if total is None else total + term
    return total


def _beta_sum_zeta(alpha_s, a: Monomial, s, n: int, q: Ring) -> Ring:
    total = None
    qq = Monomial.q()
    aq = a.shifted(1)
    for r in range(n + 1):
        den = _poch(qq, q, n - r) * _poch(aq, q, n + r)
        term = _ring_div(q**r * alpha_s(r, s, q), den)
        total = term if total is None else total + term
    return total


def beta_from_alpha(alpha, a_param, n: int, order: int) -> QSeries:
    """beta_n from the defining relation, as a series truncated at `order`.

    `alpha` maps (r, q) to an exact scalar or series; division is exact
    series inversion, so a denominator with zero constant term (an
    ill-posed a, e.g. of 1/q type) raises ZeroConstantTermError.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    q = QSeries.variable(order)
    return _beta_sum_classical(_normalize_generator(alpha), _as_monomial(a_param), n, q)


def alpha_from_beta(beta, a_param, n: int, order: int) -> QSeries:
    """Inversion relation: recover alpha_n from beta_0..beta_n.

    alpha_n = (1 - a q^(2n)) sum_{j=0}^n
        (aq;q)_{n+j-1} (-1)^(n-j) q^C(n-j,2) beta_j / (q;q)_{n-j},
    with the n = j = 0 prefactor (1-a)(aq;q)_{-1} equal to 1 identically.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    q = QSeries.variable(order)
    return _alpha_sum_inverse(_normalize_generator(beta), _as_monomial(a_param), n, q)


def _alpha_sum_inverse(beta, a: Monomial, n: int, q: Ring) -> Ring:
    one = _ring_one(q)
    qq = Monomial.q()
    aq = a.shifted(1)
    total = None
    for j in range(n + 1):
        m = n + j - 1
        if m >= 0:
            prefactor = (one - a.shifted(2 * n).value(q)) * _poch(aq, q, m)
        else:
            # n = j = 0: (1 - a)(aq;q)_{-1} = 1 by the standard convention
            prefactor = one
        c2 = (n - j) * (n - j - 1) // 2
        sign = -1 if (n - j) % 2 else 1
        num = prefactor * beta(j, q) * (sign * q**c2)
        term = _ring_div(num, _poch(qq, q, n - j))
        total = term if total is None else total + term
    return total


def _normalize_generator(gen):
    """Accept (n, q) callables and memoize-wrapped ones alike."""
    if not callable(gen):
        raise TypeError("generator must be callable")
    return gen


# ---------------------------------------------------------------------------
# Chain transform


def chain_step(
    pair: BaileyPair,
    params: ChainParameters,
    order: Optional[int] = None,
) -> BaileyPair:
    """One step of the chain transform with parameters (rho1, rho2).

    Returns the transformed pair relative to the same a.  When `order` is
    given, the lowest transformed terms are evaluated eagerly at that
    truncation so that degenerate parameters (zero denominators in
    (aq/rho_i; q)_n) fail here rather than at first use.
    """
    a = pair.a_param
    rho1, rho2 = params.rho1, params.rho2
    aq = a.shifted(1)
    c = aq / (rho1 * rho2)
    a_over_rho1 = aq / rho1
    a_over_rho2 = aq / rho2

    def alpha_prime(n: int, q: Ring) -> Ring:
        num = (
            _poch(rho1, q, n)
            * _poch(rho2, q, n)
            * (c**n).value(q)
            * pair.alpha(n, q)
        )
        den = _poch(a_over_rho1, q, n) * _poch(a_over_rho2, q, n)
        return _ring_div(num, den)

    def beta_prime(n: int, q: Ring) -> Ring:
        qq = Monomial.q()
        den_fixed = _poch(a_over_rho1, q, n) * _poch(a_over_rho2, q, n)
        total = None
        for j in range(n + 1):
            num = (
                _poch(rho1, q, j)
                * _poch(rho2, q, j)
                * _poch(c, q, n - j)
                * (c**j).value(q)
                * pair.beta(j, q)
            )
            term = _ring_div(num, _poch(qq, q, n - j) * den_fixed)
            total = term if total is None else total + term
        return total

    out = BaileyPair(
        alpha=memoized(alpha_prime),
        beta=memoized(beta_prime),
        a_param=a,
        name=f"{pair.name}+chain({rho1},{rho2})" if pair.name else f"chain({rho1},{rho2})",
    )
    if order is not None:
        probe = QSeries.variable(order)
        out.alpha(0, probe)
        out.beta(0, probe)
    return out


# ---------------------------------------------------------------------------
# Zeta deformation <-> classical


def zeta_to_classical(zp: BaileyZetaPair) -> BaileyPair:
    """Absorb the q^r weight: alpha-bar_n = q^n alpha_n(s), beta-bar_n = beta_n(s).

    The result satisfies the classical relation iff the input satisfies the
    weighted one (the substitution is term-by-term).
    """

    def alpha_bar(n: int, q: Ring) -> Ring:
        return q**n * zp.alpha_s(n, zp.s, q)

    def beta_bar(n: int, q: Ring) -> Ring:
        return zp.beta_s(n, zp.s, q)

    return BaileyPair(
        alpha=memoized(alpha_bar),
        beta=memoized(beta_bar),
        a_param=zp.a_param,
        name=f"{zp.name}->classical" if zp.name else "zeta->classical",
    )


def classical_to_zeta(pair: BaileyPair, s=None) -> BaileyZetaPair:
    """Inverse of :func:`zeta_to_classical`: alpha_n(s) = alpha-bar_n / q^n.

    In the symbolic ring the division is an exact coefficient shift, so the
    result of round-tripping a truncated series loses n orders at index n.
    """

    def alpha_s(n: int, _s, q: Ring) -> Ring:
        return _div_q_power(pair.alpha(n, q), q, n)

    def beta_s(n: int, _s, q: Ring) -> Ring:
        return pair.beta(n, q)

    return BaileyZetaPair(
        alpha_s=alpha_s,
        beta_s=beta_s,
        a_param=pair.a_param,
        s=s,
        name=f"{pair.name}->zeta" if pair.name else "classical->zeta",
    )


# ---------------------------------------------------------------------------
# Verification


class VerificationStatus(str, Enum):
    VERIFIED = "verified"
    MISMATCH = "mismatch"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of replaying the defining relation up to a depth.

    `first_mismatch` is (n, power) in symbolic mode and (n, None) at a fixed
    rational q.  A run in which every compared coefficient was zero proves
    nothing and is reported as INCONCLUSIVE rather than success.
    """

    status: VerificationStatus
    pair_name: str
    a_param: str
    depth: int
    order: Optional[int]
    q: Optional[Fraction]
    first_mismatch: Optional[tuple]
    message: str

    @property
    def ok(self) -> bool:
        return self.status is VerificationStatus.VERIFIED


def verify_pair(
    pair,
    depth: int,
    order: Optional[int] = 30,
    q: Optional[Fraction] = None,
) -> VerificationReport:
    """Check the defining relation for n = 0..depth.

    Symbolic mode (default) expands both sides as q-series truncated at
    `order` and compares coefficients exactly; pass a rational `q` in (0,1)
    instead to compare exact values at that point.  Zeta pairs are checked
    against the weighted relation.
    """
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    if q is None:
        if order is None or order < 0:
            raise ValueError("symbolic verification needs a truncation order")
        ring_q: Ring = QSeries.variable(order)
    else:
        q = Fraction(q)
        if not 0 < q < 1:
            raise ValueError("rational q must lie in (0, 1)")
        ring_q = q

    if isinstance(pair, BaileyZetaPair):
        given = lambda n: pair.beta_s(n, pair.s, ring_q)
        recomputed = lambda n: _beta_sum_zeta(pair.alpha_s, pair.a_param, pair.s, n, ring_q)
        name = pair.name or "zeta-pair"
    elif isinstance(pair, BaileyPair):
        given = lambda n: pair.beta(n, ring_q)
        recomputed = lambda n: _beta_sum_classical(pair.alpha, pair.a_param, n, ring_q)
        name = pair.name or "pair"
    else:
        raise TypeError("verify_pair expects a BaileyPair or BaileyZetaPair")

    saw_nonzero = False
    for n in range(depth + 1):
        lhs = given(n)
        rhs = recomputed(n)
        if isinstance(ring_q, QSeries):
            lc, rc = lhs, rhs
            if not isinstance(lc, QSeries):
                lc = QSeries.constant(lc, order)
            if not isinstance(rc, QSeries):
                rc = QSeries.constant(rc, order)
            for k in range(order + 1):
                a_k, b_k = lc.coefficients[k], rc.coefficients[k]
                if a_k != 0 or b_k != 0:
                    saw_nonzero = True
                if a_k != b_k:
                    return VerificationReport(
                        status=VerificationStatus.MISMATCH,
                        pair_name=name,
                        a_param=str(pair.a_param),
                        depth=depth,
                        order=order,
                        q=None,
                        first_mismatch=(n, k),
                        message=f"beta_{n}: coefficient of q^{k} is {a_k}, relation gives {b_k}",
                    )
        else:
            if lhs != 0 or rhs != 0:
                saw_nonzero = True
            if lhs != rhs:
                return VerificationReport(
                    status=VerificationStatus.MISMATCH,
                    pair_name=name,
                    a_param=str(pair.a_param),
                    depth=depth,
                    order=None,
                    q=q,
                    first_mismatch=(n, None),
                    message=f"beta_{n} at q={q}: {lhs} vs relation value {rhs}",
                )

    if not saw_nonzero:
        return VerificationReport(
            status=VerificationStatus.INCONCLUSIVE,
            pair_name=name,
            a_param=str(pair.a_param),
            depth=depth,
            order=order if q is None else None,
            q=q,
            first_mismatch=None,
            message="every compared coefficient was zero; raise the truncation order",
        )
    return VerificationReport(
        status=VerificationStatus.VERIFIED,
        pair_name=name,
        a_param=str(pair.a_param),
        depth=depth,
        order=order if q is None else None,
        q=q,
        first_mismatch=None,
        message=f"relation holds for n <= {depth}",
    )


@dataclass(frozen=True)
class CandidateSearch:
    """Result of testing several candidate values of a against the relation."""

    reports: tuple
    winner: Optional[Monomial]

    @property
    def ok(self) -> bool:
        return self.winner is not None


def determine_a_param(
    alpha,
    beta,
    candidates: Sequence,
    depth: int,
    order: int,
    name: str = "",
) -> CandidateSearch:
    """Try each candidate a and record which (if any) validates the relation.

    The first verifying candidate wins; when none does, every candidate's
    first mismatch is preserved verbatim in the per-candidate reports.
    """
    if not candidates:
        raise ValueError("need at least one candidate for a")
    reports = []
    winner = None
    for cand in candidates:
        mono = _as_monomial(cand)
        pair = BaileyPair(alpha=alpha, beta=beta, a_param=mono, name=name)
        report = verify_pair(pair, depth=depth, order=order)
        reports.append((mono, report))
        if winner is None and report.ok:
            winner = mono
    return CandidateSearch(reports=tuple(reports), winner=winner)


def pair_from_alpha(alpha, a_param, name: str = "") -> BaileyPair:
    """Pair whose beta is derived from alpha through the defining relation.

    Valid by construction, hence useful as chain input; verifying it is
    vacuous.
    """
    a = _as_monomial(a_param)
    gen = _normalize_generator(alpha)

    def beta(n: int, q: Ring) -> Ring:
        return _beta_sum_classical(gen, a, n, q)

    return BaileyPair(alpha=gen, beta=memoized(beta), a_param=a, name=name)


# ---------------------------------------------------------------------------
# Reference pairs


def unit_pair(a_param=Monomial.one()) -> BaileyPair:
    """alpha = (1, 0, 0, ...); the relation then gives
    beta_n = 1 / ((q;q)_n (aq;q)_n)."""
    a = _as_monomial(a_param)
    aq = a.shifted(1)
    qq = Monomial.q()

    def alpha(n: int, q: Ring) -> Ring:
        one = _ring_one(q)
        return one if n == 0 else one - one

    def beta(n: int, q: Ring) -> Ring:
        return _ring_div(_ring_one(q), _poch(qq, q, n) * _poch(aq, q, n))

    return BaileyPair(alpha=memoized(alpha), beta=memoized(beta), a_param=a, name="unit")


def unit_zeta_pair(a_param=Monomial.one(), s=None) -> BaileyZetaPair:
    """Weighted unit pair: alpha_0 = 1 only, so beta_n = 1/((q;q)_n (aq;q)_n)."""
    base = unit_pair(a_param)

    def alpha_s(n: int, _s, q: Ring) -> Ring:
        return base.alpha(n, q)

    def beta_s(n: int, _s, q: Ring) -> Ring:
        return base.beta(n, q)

    return BaileyZetaPair(alpha_s=alpha_s, beta_s=beta_s, a_param=base.a_param, s=s, name="unit-zeta")


def aar_alpha(n: int, q: Ring) -> Ring:
    """Andrews-Askey-Roy example alpha:
    alpha_n = q^(n^2+n) * sum_{j=-n}^n (-1)^j q^(-j^2).

    Every exponent n^2 + n - j^2 is >= n, so this is a polynomial in q.
    """
    total = None
    for j in range(-n, n + 1):
        e = n * n + n - j * j
        sign = -1 if j % 2 else 1
        term = sign * q**e
        total = term if total is None else total + term
    return total


def aar_beta(n: int, q: Ring) -> Ring:
    """Andrews-Askey-Roy example beta: beta_n = (-q)^n / (q^2; q^2)_n."""
    num = q**n if n % 2 == 0 else -(q**n)
    den = _poch(Monomial(Fraction(1), 2), q, n, step=2)
    return _ring_div(num, den)
