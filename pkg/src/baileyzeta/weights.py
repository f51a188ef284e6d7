"""Bounded periodic arithmetic weights and a direct partial-L-series oracle.

A weight chi maps positive integers to exact Gaussian rationals and depends
only on the residue class of its argument.  The three shipped kinds cover
the trivial weight, the alternating sign, and the quadratic character mod 4;
arbitrary periodic value tables are accepted as well.  No character-group
machinery (conductors, primitivity, Gauss sums) lives here: only
boundedness and pointwise values are ever needed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from decimal import Decimal
from enum import Enum
from fractions import Fraction
from typing import Sequence, Union

import mpmath as mp

from .qcore import GUARD_BITS, PrecisionContext, exact_to_mpf

__all__ = [
    "GaussianRational",
    "WeightKind",
    "ArithmeticWeight",
    "PartialLSeries",
    "evaluate",
    "partial_l_series",
    "preset",
    "PRESET_NAMES",
    "weight_from_descriptor",
    "weight_to_descriptor",
    "load_weight",
    "dump_weight",
]


def _exact(value) -> Fraction:
    """Exact conversion; floats are read as their decimal literal."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(Decimal(repr(value)))
    if isinstance(value, str):
        s = value.strip()
        if "/" in s:
            num, den = s.split("/", 1)
            return Fraction(Fraction(Decimal(num.strip())), Fraction(Decimal(den.strip())))
        return Fraction(Decimal(s))
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


@dataclass(frozen=True, slots=True)
class GaussianRational:
    """Exact complex number with rational real and imaginary parts."""

    re: Fraction
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", _exact(self.re))
        object.__setattr__(self, "im", _exact(self.im))

    @classmethod
    def of(cls, value) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, (tuple, list)):
            if len(value) != 2:
                raise ValueError("complex value needs exactly [re, im]")
            return cls(_exact(value[0]), _exact(value[1]))
        if isinstance(value, complex):
            return cls(_exact(value.real), _exact(value.imag))
        return cls(_exact(value))

    def __add__(self, other):
        o = GaussianRational.of(other)
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-GaussianRational.of(other))

    def __mul__(self, other):
        o = GaussianRational.of(other)
        return GaussianRational(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )

    __rmul__ = __mul__

    def abs_squared(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_real(self) -> bool:
        return self.im == 0

    def as_mpc(self):
        """Correctly rounded conversion at the current working precision."""
        if self.im == 0:
            return exact_to_mpf(self.re)
        return mp.mpc(exact_to_mpf(self.re), exact_to_mpf(self.im))


class WeightKind(str, Enum):
    TRIVIAL = "trivial"
    ALTERNATING = "alternating"
    MOD4 = "mod4"
    PERIODIC = "periodic"


@dataclass(frozen=True, slots=True)
class ArithmeticWeight:
    """Periodic bounded weight chi with exact values.

    `values[i]` is chi at residue i+1; the value at residue 0 is stored last,
    so chi(r) = values[(r - 1) % period] for every r >= 1.
    """

    kind: WeightKind
    period: int
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "kind", WeightKind(self.kind))
        if self.period < 1:
            raise ValueError("period must be positive")
        vals = tuple(GaussianRational.of(v) for v in self.values)
        if len(vals) != self.period:
            raise ValueError("need exactly one value per residue class")
        object.__setattr__(self, "values", vals)

    # -- shipped kinds -------------------------------------------------------

    @classmethod
    def trivial(cls) -> "ArithmeticWeight":
        return cls(WeightKind.TRIVIAL, 1, (GaussianRational.of(1),))

    @classmethod
    def alternating(cls) -> "ArithmeticWeight":
        """chi(r) = (-1)^(r-1)."""
        return cls(WeightKind.ALTERNATING, 2, (GaussianRational.of(1), GaussianRational.of(-1)))

    @classmethod
    def mod4(cls) -> "ArithmeticWeight":
        """Quadratic character mod 4: 0 at even r, +1 at r=1 (4), -1 at r=3 (4)."""
        return cls(
            WeightKind.MOD4,
            4,
            (
                GaussianRational.of(1),
                GaussianRational.of(0),
                GaussianRational.of(-1),
                GaussianRational.of(0),
            ),
        )

    @classmethod
    def periodic(cls, period: int, values: Sequence) -> "ArithmeticWeight":
        return cls(WeightKind.PERIODIC, period, tuple(GaussianRational.of(v) for v in values))

    # -- evaluation ----------------------------------------------------------

    def evaluate(self, r: int) -> GaussianRational:
        if r < 1:
            raise ValueError("weights are defined on positive integers only")
        return self.values[(r - 1) % self.period]

    def __call__(self, r: int) -> GaussianRational:
        return self.evaluate(r)

    @property
    def bound_squared(self) -> Fraction:
        """Exact max of |chi|^2 over one period."""
        return max(v.abs_squared() for v in self.values)

    @property
    def bound(self) -> float:
        return math.sqrt(self.bound_squared)

    def is_real(self) -> bool:
        return all(v.is_real() for v in self.values)

    def __add__(self, other):
        if not isinstance(other, ArithmeticWeight):
            return NotImplemented
        period = math.lcm(self.period, other.period)
        vals = [self.evaluate(r) + other.evaluate(r) for r in range(1, period)]
        vals.append(self.evaluate(period) + other.evaluate(period))
        return ArithmeticWeight(WeightKind.PERIODIC, period, tuple(vals))


def evaluate(chi: ArithmeticWeight, r: int) -> GaussianRational:
    """chi(r) for r >= 1."""
    return chi.evaluate(r)


# ---------------------------------------------------------------------------
# Partial L-series oracle


@dataclass(frozen=True, slots=True)
class PartialLSeries:
    """Truncated Dirichlet sum with a crude integral tail bound attached."""

    value: object
    tail_bound: object
    cutoff: int


def partial_l_series(
    chi: ArithmeticWeight,
    s,
    R: int,
    ctx: PrecisionContext = PrecisionContext(),
) -> PartialLSeries:
    """Sum_{r<=R} chi(r) / r^s for Re(s) > 1, at the context precision.

    The attached tail bound is bound(chi) * R^(1-Re(s)) / (Re(s)-1), the
    plain integral estimate; it is deliberately crude and is used as an
    acceptance oracle, not as a rigorous certificate.
    """
    s_re, s_im = _normalize_s(s)
    if s_re <= 1:
        raise ValueError("partial L-series requires Re(s) > 1")
    if R < 1:
        raise ValueError("cutoff R must be at least 1")
    with ctx.guarded():
        s_val = _s_value(s_re, s_im)
        terms = []
        for r in range(1, R + 1):
            c = chi.evaluate(r)
            if c.is_zero():
                continue
            terms.append(c.as_mpc() * mp.power(r, -s_val))
        total = ctx.sum_terms(terms)
        sigma = exact_to_mpf(s_re)
        tail = mp.sqrt(exact_to_mpf(chi.bound_squared)) * mp.power(R, 1 - sigma) / (sigma - 1)
    return PartialLSeries(value=ctx.round(total), tail_bound=ctx.round(tail), cutoff=R)


def _fraction_from_mpf(x) -> Fraction:
    sign, man, exp, _ = x._mpf_
    if man == 0 and exp != 0:
        raise ValueError("cannot convert a non-finite value to a rational")
    frac = Fraction(man) * Fraction(2) ** exp
    return -frac if sign else frac


def _normalize_s(s) -> tuple:
    """Split s into exact rational real and imaginary parts."""
    if isinstance(s, tuple):
        return _exact(s[0]), _exact(s[1])
    if isinstance(s, complex):
        return _exact(s.real), _exact(s.imag)
    if isinstance(s, mp.mpc):
        return _fraction_from_mpf(s.real), _fraction_from_mpf(s.imag)
    if isinstance(s, mp.mpf):
        return _fraction_from_mpf(s), Fraction(0)
    return _exact(s), Fraction(0)


def _s_value(s_re: Fraction, s_im: Fraction):
    """s at the current working precision (mpf when real)."""
    if s_im == 0:
        return exact_to_mpf(s_re)
    return mp.mpc(exact_to_mpf(s_re), exact_to_mpf(s_im))


# ---------------------------------------------------------------------------
# JSON descriptor

PRESET_NAMES = ("trivial", "alternating", "mod4")


def preset(name: str) -> ArithmeticWeight:
    if name == "trivial":
        return ArithmeticWeight.trivial()
    if name == "alternating":
        return ArithmeticWeight.alternating()
    if name == "mod4":
        return ArithmeticWeight.mod4()
    raise KeyError(f"unknown weight preset {name!r}")


def _fraction_token(x: Fraction):
    if x.denominator == 1:
        return int(x)
    return f"{x.numerator}/{x.denominator}"


def weight_to_descriptor(chi: ArithmeticWeight) -> dict:
    return {
        "kind": chi.kind.value,
        "period": chi.period,
        "values": [[_fraction_token(v.re), _fraction_token(v.im)] for v in chi.values],
    }


def weight_from_descriptor(doc: dict) -> ArithmeticWeight:
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ValueError("weight descriptor must be an object with a 'kind' field")
    kind = doc["kind"]
    if kind in PRESET_NAMES and "values" not in doc:
        return preset(kind)
    period = doc.get("period")
    values = doc.get("values")
    if period is None or values is None:
        raise ValueError("periodic weight descriptor needs 'period' and 'values'")
    w = ArithmeticWeight(WeightKind(kind), int(period), tuple(GaussianRational.of(v) for v in values))
    return w


def load_weight(path: str) -> ArithmeticWeight:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    return weight_from_descriptor(doc)


def dump_weight(chi: ArithmeticWeight, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(weight_to_descriptor(chi), fh, indent=2)
        fh.write("\n")
