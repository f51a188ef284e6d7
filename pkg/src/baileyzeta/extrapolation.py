"""Sequence extrapolation for algebraically convergent approximants.

The engine eliminates a configurable list of decay exponents from a
sequence A(n) ~= L + sum_k c_k n^(-e_k) by successive Neville-style
eliminations (the E-algorithm specialized to power model functions).
With the default exponent list e_k = k/2 this is polynomial extrapolation
in the variable h = n^(-1/2); paths whose error expansion contains
non half-integer exponents (the regularized s = 1 + delta family) pass
their own exponent model instead.

Nothing here is a rigorous bound: the reported error estimate is the
difference between the last two elimination columns, a heuristic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import mpmath as mp

from .qcore import PrecisionContext, exact_to_mpf

__all__ = [
    "ExtrapolationConfig",
    "ExtrapolationResult",
    "extrapolate_to_limit",
    "neville_at_zero",
]


def _lift(value):
    """Exact inputs round once correctly; mpf/mpc pass through losslessly."""
    if isinstance(value, (int, Fraction)):
        return exact_to_mpf(value)
    return mp.mpmathify(value)


@dataclass(frozen=True)
class ExtrapolationConfig:
    """Elimination order and (optionally) an explicit decay-exponent model.

    `order` is the number of eliminated terms; a schedule of at least
    order + 1 points is required.  When `exponents` is None the model is
    n^(-1/2), n^(-1), ..., n^(-order/2): polynomial extrapolation in
    h = n^(-1/2).  Order 0 performs no elimination (the last raw value is
    the "extrapolation"), which is what a one-point table degenerates to.
    """

    order: int = 6
    exponents: Optional[tuple] = None

    def __post_init__(self):
        if self.order < 0:
            raise ValueError("extrapolation order must be nonnegative")
        if self.exponents is not None:
            exps = tuple(Fraction(e) for e in self.exponents)
            if any(e <= 0 for e in exps):
                raise ValueError("decay exponents must be positive")
            if len(set(exps)) != len(exps):
                raise ValueError("decay exponents must be distinct")
            object.__setattr__(self, "exponents", exps)

    def resolved_exponents(self) -> tuple:
        if self.exponents is not None:
            return self.exponents
        return tuple(Fraction(k, 2) for k in range(1, self.order + 1))

    def describe(self) -> str:
        if self.exponents is None:
            return f"poly(h=n^-1/2, order={self.order})"
        body = ",".join(str(e) for e in self.exponents)
        return f"exponent-model(n^-[{body}])"


@dataclass(frozen=True)
class ExtrapolationResult:
    value: object
    error_estimate: object
    columns: int


def extrapolate_to_limit(
    ns: Sequence[int],
    values: Sequence,
    config: ExtrapolationConfig = ExtrapolationConfig(),
    ctx: PrecisionContext = PrecisionContext(),
) -> ExtrapolationResult:
    """Extrapolate A(n_i) = values[i] to n = infinity under the configured model.

    Raises ValueError when the schedule is too short for the requested
    elimination order.
    """
    if len(ns) != len(values):
        raise ValueError("schedule and values have different lengths")
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError("schedule must be strictly increasing")
    exponents = config.resolved_exponents()
    if len(values) < len(exponents) + 1:
        raise ValueError(
            f"schedule too short: need at least {len(exponents) + 1} points "
            f"for order {len(exponents)}"
        )
    with ctx.guarded():
        current = [_lift(v) for v in values]
        models = [
            [mp.power(mp.mpf(n), -exact_to_mpf(e)) for n in ns] for e in exponents
        ]
        last_column_tail = current[-1]
        prev_tail = None
        columns = 0
        for j, g in enumerate(models):
            if len(current) < 2:
                break
            new_vals = []
            new_models = [[] for _ in models]
            for i in range(len(current) - 1):
                denom = g[i + 1] - g[i]
                new_vals.append((current[i] * g[i + 1] - current[i + 1] * g[i]) / denom)
                for k, gk in enumerate(models):
                    new_models[k].append((gk[i] * g[i + 1] - gk[i + 1] * g[i]) / denom)
            current = new_vals
            models = new_models
            prev_tail = last_column_tail
            last_column_tail = current[-1]
            columns = j + 1
        estimate = abs(last_column_tail - prev_tail) if prev_tail is not None else mp.mpf(0)
    return ExtrapolationResult(
        value=ctx.round(last_column_tail),
        error_estimate=ctx.round(estimate),
        columns=columns,
    )


def neville_at_zero(
    xs: Sequence,
    values: Sequence,
    ctx: PrecisionContext = PrecisionContext(),
):
    """Value at 0 of the polynomial interpolating (xs[i], values[i]).

    Used for the delta -> 0+ step of the regularized limit, where the
    subtracted quantity is smooth in delta.
    """
    if len(xs) != len(values) or not xs:
        raise ValueError("need matching, nonempty nodes and values")
    if len(set(xs)) != len(xs):
        raise ValueError("interpolation nodes must be distinct")
    with ctx.guarded():
        x = [_lift(v) for v in xs]
        t = [_lift(v) for v in values]
        m = len(t)
        for j in range(1, m):
            nxt = []
            for i in range(m - j):
                num = x[i + j] * t[i] - x[i] * t[i + 1]
                nxt.append(num / (x[i + j] - x[i]))
            t = nxt
        result = t[0]
    return ctx.round(result)
