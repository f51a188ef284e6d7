"""Exact arithmetic foundations.

Truncated q-series over exact rationals, q-Pochhammer symbols, q-integers,
big-integer combinatorics, and the precision context under which every
floating evaluation in this package happens.  The symbolic layer is exact:
coefficients are `fractions.Fraction`, never floats.  Conversion to binary
floating point is done once, at a stated precision, through
:class:`PrecisionContext`.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Iterable, Sequence, Union

import mpmath as mp
from mpmath import libmp

__all__ = [
    "OrderMismatchError",
    "ZeroConstantTermError",
    "QSeries",
    "SummationPolicy",
    "PrecisionContext",
    "GUARD_BITS",
    "exact_to_mpf",
    "BigCombinatorics",
    "big_binomial",
    "big_factorial",
    "q_pochhammer",
    "pochhammer_in",
    "q_integer",
    "ScalingCheckRow",
    "pochhammer_scaling_limit_check",
    "ulp_distance",
]

# Extra mantissa bits used inside summation pipelines so that the single
# final rounding dominates the error budget.  Fixed, hence deterministic.
GUARD_BITS = 64

Exact = Union[int, Fraction]


class OrderMismatchError(ValueError):
    """Arithmetic between series of different truncation orders."""


class ZeroConstantTermError(ZeroDivisionError):
    """Inversion of a series whose constant term is zero."""


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    raise TypeError(f"exact rational coefficient required, got {type(value).__name__}")


@dataclass(frozen=True, slots=True)
class QSeries:
    """Formal power series in q, truncated modulo q^(N+1), N = truncation_order.

    `coefficients[k]` is the exact rational coefficient of q^k and the tuple
    always has length `truncation_order + 1`.  All arithmetic is closed at a
    fixed order; mixing orders raises :class:`OrderMismatchError` rather than
    silently changing the truncation.
    """

    coefficients: tuple
    truncation_order: int

    def __post_init__(self):
        if self.truncation_order < 0:
            raise ValueError("truncation_order must be nonnegative")
        coeffs = tuple(_as_fraction(c) for c in self.coefficients)
        if len(coeffs) != self.truncation_order + 1:
            raise ValueError(
                f"need {self.truncation_order + 1} coefficients, got {len(coeffs)}"
            )
        object.__setattr__(self, "coefficients", coeffs)

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_coefficients(cls, coeffs: Iterable, order: int) -> "QSeries":
        """Series with the given low-order coefficients, zero-padded to `order`."""
        cl = [_as_fraction(c) for c in coeffs]
        if len(cl) > order + 1:
            cl = cl[: order + 1]
        cl.extend([Fraction(0)] * (order + 1 - len(cl)))
        return cls(tuple(cl), order)

    @classmethod
    def constant(cls, value: Exact, order: int) -> "QSeries":
        return cls.from_coefficients([_as_fraction(value)], order)

    @classmethod
    def variable(cls, order: int) -> "QSeries":
        """The series q itself."""
        return cls.monomial(1, 1, order)

    @classmethod
    def monomial(cls, coeff: Exact, power: int, order: int) -> "QSeries":
        """coeff * q^power; a power beyond the order is zero modulo q^(N+1)."""
        if power < 0:
            raise ValueError("monomial power must be nonnegative")
        coeffs = [Fraction(0)] * (order + 1)
        if power <= order:
            coeffs[power] = _as_fraction(coeff)
        return cls(tuple(coeffs), order)

    @classmethod
    def zero(cls, order: int) -> "QSeries":
        return cls.constant(0, order)

    # -- queries -----------------------------------------------------------

    def coefficient(self, power: int) -> Fraction:
        if not 0 <= power <= self.truncation_order:
            raise IndexError(f"power {power} outside truncated range")
        return self.coefficients[power]

    @property
    def constant_term(self) -> Fraction:
        return self.coefficients[0]

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coefficients)

    def valuation(self):
        """Lowest power with nonzero coefficient, or None for the zero series."""
        for k, c in enumerate(self.coefficients):
            if c != 0:
                return k
        return None

    def truncate(self, order: int) -> "QSeries":
        """Explicitly lower the truncation order (raising it would invent data)."""
        if order > self.truncation_order:
            raise OrderMismatchError("cannot extend a truncated series")
        return QSeries(self.coefficients[: order + 1], order)

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, QSeries):
            if other.truncation_order != self.truncation_order:
                raise OrderMismatchError(
                    f"truncation orders differ: {self.truncation_order} vs "
                    f"{other.truncation_order}"
                )
            return other
        if isinstance(other, (int, Fraction)):
            return QSeries.constant(other, self.truncation_order)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QSeries(
            tuple(a + b for a, b in zip(self.coefficients, o.coefficients)),
            self.truncation_order,
        )

    __radd__ = __add__

    def __neg__(self):
        return QSeries(tuple(-c for c in self.coefficients), self.truncation_order)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n = self.truncation_order
        a, b = self.coefficients, o.coefficients
        out = [Fraction(0)] * (n + 1)
        for i, ai in enumerate(a):
            if ai == 0:
                continue
            for j in range(n + 1 - i):
                bj = b[j]
                if bj != 0:
                    out[i + j] += ai * bj
        return QSeries(tuple(out), n)

    __rmul__ = __mul__

    def inverse(self) -> "QSeries":
        """Multiplicative inverse modulo q^(N+1); requires nonzero constant term."""
        c0 = self.coefficients[0]
        if c0 == 0:
            raise ZeroConstantTermError("series has zero constant term")
        n = self.truncation_order
        inv0 = Fraction(1) / c0
        out = [Fraction(0)] * (n + 1)
        out[0] = inv0
        for k in range(1, n + 1):
            acc = Fraction(0)
            for i in range(1, k + 1):
                ci = self.coefficients[i]
                if ci != 0:
                    acc += ci * out[k - i]
            out[k] = -inv0 * acc
        return QSeries(tuple(out), n)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = QSeries.constant(1, self.truncation_order)
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            base = base * base if e > 1 else base
            e >>= 1
        return result

    def __repr__(self):
        terms = []
        for k, c in enumerate(self.coefficients):
            if c == 0:
                continue
            if k == 0:
                terms.append(str(c))
            elif k == 1:
                terms.append(f"{c}*q" if c != 1 else "q")
            else:
                terms.append(f"{c}*q^{k}" if c != 1 else f"q^{k}")
            if len(terms) >= 8:
                terms.append("...")
                break
        body = " + ".join(terms) if terms else "0"
        return f"QSeries({body} + O(q^{self.truncation_order + 1}))"


# ---------------------------------------------------------------------------
# Precision context


class SummationPolicy(str, Enum):
    SEQUENTIAL_ASCENDING = "sequential-ascending"
    PAIRWISE = "pairwise"


@dataclass(frozen=True, slots=True)
class PrecisionContext:
    """Configuration for every floating evaluation.

    Results produced under one context are deterministic and bit-reproducible
    for a fixed summation policy.  The default policy sums terms sequentially
    in ascending index order; the pairwise policy uses a deterministic
    balanced-tree reduction and exists as an opt-in for speed.
    """

    precision_bits: int = 192
    truncation_order: int = 30
    summation_policy: SummationPolicy = SummationPolicy.SEQUENTIAL_ASCENDING

    def __post_init__(self):
        if self.precision_bits < 64:
            raise ValueError("precision_bits must be at least 64")
        if self.truncation_order < 0:
            raise ValueError("truncation_order must be nonnegative")
        object.__setattr__(
            self, "summation_policy", SummationPolicy(self.summation_policy)
        )

    def workprec(self):
        """mpmath precision scope at exactly precision_bits."""
        return mp.workprec(self.precision_bits)

    def guarded(self):
        """mpmath precision scope with guard bits for internal pipelines."""
        return mp.workprec(self.precision_bits + GUARD_BITS)

    def round(self, value):
        """Round an (mpf or mpc) value to precision_bits once."""
        with mp.workprec(self.precision_bits):
            return +value

    def to_real(self, value: Exact):
        """Correctly rounded conversion of an exact rational at the current precision."""
        return exact_to_mpf(value)

    def sum_terms(self, terms: Sequence):
        """Sum at the current working precision under the configured policy."""
        if not terms:
            return mp.mpf(0)
        if self.summation_policy is SummationPolicy.SEQUENTIAL_ASCENDING:
            total = terms[0]
            for t in terms[1:]:
                total = total + t
            return total
        return _pairwise_sum(terms, 0, len(terms))


def exact_to_mpf(value: Exact):
    """Correctly rounded (to nearest) mpf at the current working precision.

    mpmath's own Fraction conversion truncates, which would smuggle a full
    ulp of one-sided error into every exact-to-float boundary crossing;
    integers convert losslessly.
    """
    if isinstance(value, int):
        return mp.mpf(value)
    frac = value if isinstance(value, Fraction) else Fraction(value)
    return mp.mpf(
        libmp.from_rational(
            frac.numerator, frac.denominator, mp.mp.prec, libmp.round_nearest
        )
    )


def _pairwise_sum(terms: Sequence, lo: int, hi: int):
    # Split point is a deterministic function of the index range.
    if hi - lo == 1:
        return terms[lo]
    mid = (lo + hi) // 2
    return _pairwise_sum(terms, lo, mid) + _pairwise_sum(terms, mid, hi)


def ulp_distance(x, y, precision_bits: int):
    """Distance |x - y| measured in units in the last place at precision_bits.

    For complex inputs the magnitude |x - y| is compared against one ulp of
    the larger magnitude.  Returns an mpf (0 when the values are equal).
    """
    with mp.workprec(precision_bits + GUARD_BITS):
        diff = abs(mp.mpmathify(x) - mp.mpmathify(y))
        if diff == 0:
            return mp.mpf(0)
        scale = max(abs(mp.mpmathify(x)), abs(mp.mpmathify(y)))
        _, e = mp.frexp(scale)
        ulp = mp.mpf(2) ** (e - precision_bits)
        return diff / ulp


# ---------------------------------------------------------------------------
# Big-integer combinatorics


class BigCombinatorics:
    """Monotonically growing cache of exact factorials and binomials.

    Safe for concurrent reads; insertion is synchronized.  No eviction: the
    cache is bounded by the largest argument ever requested.
    """

    def __init__(self):
        self._factorials = {}
        self._binomials = {}
        self._lock = threading.Lock()

    def factorial(self, m: int) -> int:
        if m < 0:
            raise ValueError("factorial of a negative integer")
        hit = self._factorials.get(m)
        if hit is not None:
            return hit
        value = math.factorial(m)
        with self._lock:
            self._factorials.setdefault(m, value)
        return value

    def binomial(self, n: int, k: int) -> int:
        """C(n, k) exactly; zero outside 0 <= k <= n."""
        if n < 0:
            raise ValueError("binomial with negative row index")
        if k < 0 or k > n:
            return 0
        key = (n, k)
        hit = self._binomials.get(key)
        if hit is not None:
            return hit
        value = math.comb(n, k)
        with self._lock:
            self._binomials.setdefault(key, value)
        return value


_COMBINATORICS = BigCombinatorics()


def big_binomial(n: int, k: int) -> int:
    return _COMBINATORICS.binomial(n, k)


def big_factorial(m: int) -> int:
    return _COMBINATORICS.factorial(m)


# ---------------------------------------------------------------------------
# q-Pochhammer and q-integers


def pochhammer_in(x, q, n: int):
    """(x; q)_n = prod_{j=0}^{n-1} (1 - x q^j) in any exact ring.

    Works for Fraction values (numeric q) and for QSeries values (symbolic q)
    alike; the empty product is the ring's 1.
    """
    if n < 0:
        raise ValueError("pochhammer length must be nonnegative")
    one = q ** 0
    result = one
    qj = one
    for _ in range(n):
        result = result * (one - x * qj)
        qj = qj * q
    return result


def q_pochhammer(a, n: int, order: int) -> QSeries:
    """Truncated series for (a; q)_n, with a an exact scalar or a QSeries.

    Returns the constant series 1 when n = 0.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if order < 0:
        raise ValueError("order must be nonnegative")
    q = QSeries.variable(order)
    if isinstance(a, QSeries):
        if a.truncation_order != order:
            raise OrderMismatchError("a has a different truncation order")
        x = a
    else:
        x = QSeries.constant(_as_fraction(a), order)
    return pochhammer_in(x, q, n)


def q_integer(r: int, q):
    """[r]_q = 1 + q + ... + q^(r-1); exactly r at q = 1."""
    if r < 1:
        raise ValueError("q-integer index must be positive")
    if isinstance(q, QSeries):
        total = QSeries.zero(q.truncation_order)
        power = QSeries.constant(1, q.truncation_order)
        for _ in range(r):
            total = total + power
            power = power * q
        return total
    qv = _as_fraction(q)
    if not 0 < qv <= 1:
        raise ValueError("rational q must lie in (0, 1]")
    total = Fraction(0)
    power = Fraction(1)
    for _ in range(r):
        total += power
        power *= qv
    return total


@dataclass(frozen=True, slots=True)
class ScalingCheckRow:
    q: Fraction
    ratio: Fraction
    deviation: Fraction


def pochhammer_scaling_limit_check(m: int, q_grid: Sequence) -> list:
    """Exact deviations |(q;q)_m / (1-q)^m - m!| over a grid of rationals in (0,1).

    The ratio tends to m! as q -> 1-, so the deviation sequence must
    eventually decrease along a grid approaching 1; callers assert that on
    the returned table.
    """
    if m < 0:
        raise ValueError("m must be nonnegative")
    grid = [_as_fraction(qv) for qv in q_grid]
    if not grid:
        raise ValueError("empty q grid")
    target = Fraction(big_factorial(m))
    rows = []
    for qv in grid:
        if not 0 < qv < 1:
            raise ValueError("grid points must lie in (0, 1)")
        ratio = pochhammer_in(qv, qv, m) / (1 - qv) ** m
        rows.append(ScalingCheckRow(q=qv, ratio=ratio, deviation=abs(ratio - target)))
    return rows
