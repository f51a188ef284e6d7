"""Declarative pair-definition documents.

A pair file is JSON with fields

    {
      "name":   "unit",
      "a_param": "1"            (or a list of candidate monomials to search),
      "alpha":  "delta(n)",
      "beta":   "1/(qpoch(q,q,n)*qpoch(q,q,n))"   (optional),
      "depth":  8,
      "order":  30,
      "s":      "2"             (optional rational, bound as a scalar)
    }

where alpha/beta are expressions in n (the sequence index) and q built from
integers, + - * / ^, finite sums with explicit integer bounds, and a
q-Pochhammer atom:

    qpoch(x, base, count)   product_{i=0}^{count-1} (1 - x * base^i)
    sum(j, lo, hi, body)    finite sum, lo/hi integer expressions of n
    delta(k)                1 if the integer expression k is 0, else 0

Exponents and sum bounds must evaluate to integers.  Intermediate values may
carry negative powers of q (e.g. q^(-j^2) inside a sum); only the final
alpha_n / beta_n must be honest power series.  Expressions evaluate either
symbolically (truncated series) or at an exact rational q, matching the two
verification modes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .bailey import BaileyPair, Monomial, memoized, pair_from_alpha
from .qcore import QSeries, ZeroConstantTermError

__all__ = [
    "ExpressionSyntaxError",
    "PairDefinitionError",
    "PairEvaluationError",
    "parse_expression",
    "PairDefinition",
    "load_pair_definition",
    "loads_pair_definition",
    "dump_pair_definition",
]


class ExpressionSyntaxError(ValueError):
    """Syntax error inside an alpha/beta expression; column is 1-based."""

    def __init__(self, message: str, column: int):
        super().__init__(f"column {column}: {message}")
        self.column = column


class PairDefinitionError(ValueError):
    """Structurally invalid pair-definition document."""


class PairEvaluationError(ValueError):
    """Expression evaluated to something that is not a power series."""


# ---------------------------------------------------------------------------
# Tokens and AST


_OPERATORS = set("+-*/^(),")


@dataclass(frozen=True)
class _Token:
    kind: str  # 'int' | 'name' | operator literal | 'end'
    text: str
    column: int


def _tokenize(src: str) -> list:
    tokens = []
    i = 0
    while i < len(src):
        ch = src[i]
        if ch.isspace():
            i += 1
            continue
        col = i + 1
        if ch.isdigit():
            j = i
            while j < len(src) and src[j].isdigit():
                j += 1
            tokens.append(_Token("int", src[i:j], col))
            i = j
        elif ch.isalpha() or ch == "_":
            j = i
            while j < len(src) and (src[j].isalnum() or src[j] == "_"):
                j += 1
            tokens.append(_Token("name", src[i:j], col))
            i = j
        elif ch in _OPERATORS:
            tokens.append(_Token(ch, ch, col))
            i += 1
        else:
            raise ExpressionSyntaxError(f"unexpected character {ch!r}", col)
    tokens.append(_Token("end", "", len(src) + 1))
    return tokens


@dataclass(frozen=True)
class Num:
    value: int
    column: int


@dataclass(frozen=True)
class Name:
    ident: str
    column: int


@dataclass(frozen=True)
class Bin:
    op: str
    left: object
    right: object
    column: int


@dataclass(frozen=True)
class Neg:
    operand: object
    column: int


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple
    column: int


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ExpressionSyntaxError(
                f"expected {kind!r}, found {tok.text or 'end of expression'!r}",
                tok.column,
            )
        return self.next()

    def parse(self):
        node = self.expr()
        tail = self.peek()
        if tail.kind != "end":
            raise ExpressionSyntaxError(f"unexpected {tail.text!r}", tail.column)
        return node

    def expr(self):
        node = self.term()
        while self.peek().kind in ("+", "-"):
            op = self.next()
            node = Bin(op.kind, node, self.term(), op.column)
        return node

    def term(self):
        node = self.factor()
        while self.peek().kind in ("*", "/"):
            op = self.next()
            node = Bin(op.kind, node, self.factor(), op.column)
        return node

    def factor(self):
        tok = self.peek()
        if tok.kind == "-":
            self.next()
            return Neg(self.factor(), tok.column)
        if tok.kind == "+":
            self.next()
            return self.factor()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek().kind == "^":
            op = self.next()
            return Bin("^", base, self.factor(), op.column)
        return base

    def atom(self):
        tok = self.next()
        if tok.kind == "int":
            return Num(int(tok.text), tok.column)
        if tok.kind == "name":
            if self.peek().kind == "(":
                self.next()
                args = [self.expr()]
                while self.peek().kind == ",":
                    self.next()
                    args.append(self.expr())
                self.expect(")")
                return Call(tok.text, tuple(args), tok.column)
            return Name(tok.text, tok.column)
        if tok.kind == "(":
            node = self.expr()
            self.expect(")")
            return node
        raise ExpressionSyntaxError(
            f"expected a value, found {tok.text or 'end of expression'!r}", tok.column
        )


def parse_expression(src: str):
    """Parse an expression string, reporting syntax errors with a column."""
    return _Parser(_tokenize(src)).parse()


# ---------------------------------------------------------------------------
# Integer-context evaluation (exponents, bounds, delta arguments)


def _eval_int(node, env: dict) -> int:
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Name):
        if node.ident in env:
            return env[node.ident]
        raise PairEvaluationError(
            f"column {node.column}: {node.ident!r} is not an integer variable here"
        )
    if isinstance(node, Neg):
        return -_eval_int(node.operand, env)
    if isinstance(node, Bin):
        a = _eval_int(node.left, env)
        b = _eval_int(node.right, env)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if node.op == "^":
            if b < 0:
                raise PairEvaluationError(
                    f"column {node.column}: negative exponent in an integer expression"
                )
            return a**b
        if node.op == "/":
            if b == 0 or a % b != 0:
                raise PairEvaluationError(
                    f"column {node.column}: integer expressions require exact division"
                )
            return a // b
    raise PairEvaluationError("function calls are not allowed in integer expressions")


# ---------------------------------------------------------------------------
# Laurent values over truncated series (symbolic mode)


@dataclass(frozen=True)
class _LS:
    """q^shift times a coefficient window; `exact` means no unknown tail.

    Exponents below `shift` are identically zero; exponents past the window
    are zero when exact and unknown otherwise.
    """

    shift: int
    coeffs: tuple
    exact: bool

    @classmethod
    def scalar(cls, c: Fraction) -> "_LS":
        c = Fraction(c)
        if c == 0:
            return cls(0, (), True)
        return cls(0, (c,), True)

    @classmethod
    def q_power(cls, k: int) -> "_LS":
        return cls(k, (Fraction(1),), True)

    def is_zero_exact(self) -> bool:
        return self.exact and not self.coeffs

    def _end(self):
        """One past the last known exponent; None means known forever."""
        return None if self.exact else self.shift + len(self.coeffs)


def _ls_normalize(shift, coeffs, exact) -> _LS:
    lead = 0
    while lead < len(coeffs) and coeffs[lead] == 0:
        lead += 1
    coeffs = coeffs[lead:]
    shift += lead
    if exact:
        k = len(coeffs)
        while k > 0 and coeffs[k - 1] == 0:
            k -= 1
        coeffs = coeffs[:k]
        if not coeffs:
            return _LS(0, (), True)
    return _LS(shift, tuple(coeffs), exact)


def _ls_add(a: _LS, b: _LS) -> _LS:
    if a.is_zero_exact():
        return b
    if b.is_zero_exact():
        return a
    lo = min(a.shift, b.shift)
    ends = [e for e in (a._end(), b._end()) if e is not None]
    if not ends:
        hi = max(a.shift + len(a.coeffs), b.shift + len(b.coeffs))
        exact = True
    else:
        hi = min(ends)
        exact = False
    if hi <= lo:
        raise PairEvaluationError("known coefficient windows do not overlap; raise the order")
    out = [Fraction(0)] * (hi - lo)
    for src in (a, b):
        for i, c in enumerate(src.coeffs):
            e = src.shift + i
            if lo <= e < hi:
                out[e - lo] += c
    return _ls_normalize(lo, out, exact)


def _ls_neg(a: _LS) -> _LS:
    return _LS(a.shift, tuple(-c for c in a.coeffs), a.exact)


def _ls_mul(a: _LS, b: _LS) -> _LS:
    if a.is_zero_exact() or b.is_zero_exact():
        return _LS(0, (), True)
    shift = a.shift + b.shift
    if a.exact and b.exact:
        size = len(a.coeffs) + len(b.coeffs) - 1
        exact = True
    else:
        # After normalization each factor's lowest kept coefficient is
        # nonzero, so an unknown tail at relative index >= L pollutes the
        # product from relative index L on.
        sizes = []
        if not a.exact:
            sizes.append(len(a.coeffs))
        if not b.exact:
            sizes.append(len(b.coeffs))
        size = min(sizes)
        exact = False
    out = [Fraction(0)] * size
    for i, ca in enumerate(a.coeffs):
        if ca == 0 or i >= size:
            continue
        for j, cb in enumerate(b.coeffs):
            if i + j >= size:
                break
            if cb != 0:
                out[i + j] += ca * cb
    return _ls_normalize(shift, out, exact)


def _ls_inverse(a: _LS, window: int) -> _LS:
    if not a.coeffs:
        if a.exact:
            raise ZeroConstantTermError("division by the zero series")
        raise PairEvaluationError("cannot invert: series vanishes to the working order")
    # coeffs[0] != 0 after normalization, so the valuation is a.shift
    if a.exact and len(a.coeffs) == 1:
        return _LS(-a.shift, (Fraction(1) / a.coeffs[0],), True)
    c0 = a.coeffs[0]
    size = window if a.exact else min(window, len(a.coeffs))
    inv0 = Fraction(1) / c0
    out = [Fraction(0)] * size
    out[0] = inv0
    for k in range(1, size):
        acc = Fraction(0)
        for i in range(1, k + 1):
            ci = a.coeffs[i] if i < len(a.coeffs) else Fraction(0)
            if ci != 0:
                acc += ci * out[k - i]
        out[k] = -inv0 * acc
    return _ls_normalize(-a.shift, out, False)


def _ls_pow(a: _LS, e: int, window: int) -> _LS:
    if e < 0:
        return _ls_pow(_ls_inverse(a, window), -e, window)
    result = _LS.scalar(Fraction(1))
    base = a
    while e:
        if e & 1:
            result = _ls_mul(result, base)
        e >>= 1
        if e:
            base = _ls_mul(base, base)
    return result


# ---------------------------------------------------------------------------
# Value-context evaluation, generic over the two modes


class _SeriesMode:
    def __init__(self, window: int):
        self.window = window

    def scalar(self, c):
        return _LS.scalar(c)

    def q(self):
        return _LS.q_power(1)

    def add(self, a, b):
        return _ls_add(a, b)

    def neg(self, a):
        return _ls_neg(a)

    def mul(self, a, b):
        return _ls_mul(a, b)

    def div(self, a, b):
        return _ls_mul(a, _ls_inverse(b, self.window))

    def pow(self, a, e):
        return _ls_pow(a, e, self.window)


class _RationalMode:
    def __init__(self, q: Fraction):
        self.q_value = Fraction(q)

    def scalar(self, c):
        return Fraction(c)

    def q(self):
        return self.q_value

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def div(self, a, b):
        if b == 0:
            raise ZeroConstantTermError("division by zero at the given q")
        return a / b

    def pow(self, a, e):
        if a == 0 and e < 0:
            raise ZeroConstantTermError("zero base with negative exponent")
        return a**e


def _eval_value(node, env: dict, mode):
    if isinstance(node, Num):
        return mode.scalar(Fraction(node.value))
    if isinstance(node, Name):
        if node.ident == "q":
            return mode.q()
        if node.ident in env:
            val = env[node.ident]
            return mode.scalar(Fraction(val))
        raise PairEvaluationError(f"column {node.column}: unknown name {node.ident!r}")
    if isinstance(node, Neg):
        return mode.neg(_eval_value(node.operand, env, mode))
    if isinstance(node, Bin):
        if node.op == "^":
            e = _eval_int(node.right, _int_env(env))
            return mode.pow(_eval_value(node.left, env, mode), e)
        a = _eval_value(node.left, env, mode)
        b = _eval_value(node.right, env, mode)
        if node.op == "+":
            return mode.add(a, b)
        if node.op == "-":
            return mode.add(a, mode.neg(b))
        if node.op == "*":
            return mode.mul(a, b)
        if node.op == "/":
            return mode.div(a, b)
    if isinstance(node, Call):
        return _eval_call(node, env, mode)
    raise PairEvaluationError("malformed expression tree")


def _int_env(env: dict) -> dict:
    return {k: v for k, v in env.items() if isinstance(v, int)}


def _eval_call(node: Call, env: dict, mode):
    if node.func == "delta":
        if len(node.args) != 1:
            raise PairEvaluationError(f"column {node.column}: delta takes one argument")
        k = _eval_int(node.args[0], _int_env(env))
        return mode.scalar(Fraction(1 if k == 0 else 0))
    if node.func == "qpoch":
        if len(node.args) != 3:
            raise PairEvaluationError(
                f"column {node.column}: qpoch takes (x, base, count)"
            )
        x = _eval_value(node.args[0], env, mode)
        base = _eval_value(node.args[1], env, mode)
        count = _eval_int(node.args[2], _int_env(env))
        if count < 0:
            raise PairEvaluationError(f"column {node.column}: qpoch count must be >= 0")
        one = mode.scalar(Fraction(1))
        acc = one
        bpow = one
        for _ in range(count):
            acc = mode.mul(acc, mode.add(one, mode.neg(mode.mul(x, bpow))))
            bpow = mode.mul(bpow, base)
        return acc
    if node.func == "sum":
        if len(node.args) != 4 or not isinstance(node.args[0], Name):
            raise PairEvaluationError(
                f"column {node.column}: sum takes (variable, lo, hi, body)"
            )
        var = node.args[0].ident
        ints = _int_env(env)
        lo = _eval_int(node.args[1], ints)
        hi = _eval_int(node.args[2], ints)
        total = mode.scalar(Fraction(0))
        child = dict(env)
        for value in range(lo, hi + 1):
            child[var] = value
            total = mode.add(total, _eval_value(node.args[3], child, mode))
        return total
    raise PairEvaluationError(f"column {node.column}: unknown function {node.func!r}")


# Working slack past the requested order; inversions and negative shifts eat
# into the window, the rest is headroom.
_WINDOW_SLACK = 64


def _finalize_series(value: _LS, order: int) -> QSeries:
    for i, c in enumerate(value.coeffs):
        if c != 0 and value.shift + i < 0:
            raise PairEvaluationError(
                f"result has a negative power q^{value.shift + i}; not a power series"
            )
    end = value._end()
    if end is not None and end <= order:
        raise PairEvaluationError(
            f"coefficients above q^{end - 1} are unknown at the working order; "
            "raise the order"
        )
    coeffs = []
    for e in range(order + 1):
        i = e - value.shift
        coeffs.append(value.coeffs[i] if 0 <= i < len(value.coeffs) else Fraction(0))
    return QSeries(tuple(coeffs), order)


def evaluate_series(ast, env: dict, order: int) -> QSeries:
    mode = _SeriesMode(window=order + _WINDOW_SLACK + 1)
    return _finalize_series(_eval_value(ast, env, mode), order)


def evaluate_rational(ast, env: dict, q: Fraction) -> Fraction:
    return _eval_value(ast, env, _RationalMode(q))


# ---------------------------------------------------------------------------
# Documents


@dataclass(frozen=True)
class PairDefinition:
    """Parsed pair document; expression sources are kept for round-tripping."""

    name: str
    a_candidates: tuple
    alpha_src: str
    beta_src: Optional[str]
    depth: int
    order: int
    s: Optional[Fraction] = None

    @property
    def alpha_ast(self):
        return parse_expression(self.alpha_src)

    @property
    def beta_ast(self):
        return None if self.beta_src is None else parse_expression(self.beta_src)

    @property
    def has_candidate_search(self) -> bool:
        return len(self.a_candidates) > 1

    def _env(self, n: int) -> dict:
        env = {"n": n}
        if self.s is not None:
            env["s"] = self.s
        return env

    def alpha_generator(self):
        ast = self.alpha_ast

        def alpha(n: int, q):
            if isinstance(q, QSeries):
                return evaluate_series(ast, self._env(n), q.truncation_order)
            return evaluate_rational(ast, self._env(n), q)

        return memoized(alpha)

    def beta_generator(self):
        ast = self.beta_ast
        if ast is None:
            return None

        def beta(n: int, q):
            if isinstance(q, QSeries):
                return evaluate_series(ast, self._env(n), q.truncation_order)
            return evaluate_rational(ast, self._env(n), q)

        return memoized(beta)

    def build_pair(self, a_param: Optional[Monomial] = None) -> BaileyPair:
        """Materialize the pair at a specific a (default: the sole candidate).

        A definition without beta gets the relation-derived beta, which is
        what chain iteration needs; verification of such a pair is vacuous.
        """
        if a_param is None:
            if self.has_candidate_search:
                raise PairDefinitionError(
                    f"{self.name}: several a candidates; pick one or run the search"
                )
            a_param = self.a_candidates[0]
        alpha = self.alpha_generator()
        beta = self.beta_generator()
        if beta is None:
            return pair_from_alpha(alpha, a_param, name=self.name)
        return BaileyPair(alpha=alpha, beta=beta, a_param=a_param, name=self.name)


def _parse_candidates(raw) -> tuple:
    if isinstance(raw, (list, tuple)):
        items = list(raw)
    else:
        items = [raw]
    if not items:
        raise PairDefinitionError("a_param must name at least one candidate")
    out = []
    for item in items:
        try:
            out.append(Monomial.parse(str(item)))
        except ValueError as exc:
            raise PairDefinitionError(f"bad a_param entry {item!r}: {exc}") from exc
    return tuple(out)


def loads_pair_definition(text: str) -> PairDefinition:
    doc = json.loads(text)
    if not isinstance(doc, dict):
        raise PairDefinitionError("pair definition must be a JSON object")
    missing = [k for k in ("name", "a_param", "alpha", "depth", "order") if k not in doc]
    if missing:
        raise PairDefinitionError(f"missing fields: {', '.join(missing)}")
    depth = int(doc["depth"])
    order = int(doc["order"])
    if depth < 0 or order < 0:
        raise PairDefinitionError("depth and order must be nonnegative")
    s_val = doc.get("s")
    s = None if s_val is None else Fraction(str(s_val))
    defn = PairDefinition(
        name=str(doc["name"]),
        a_candidates=_parse_candidates(doc["a_param"]),
        alpha_src=str(doc["alpha"]),
        beta_src=None if doc.get("beta") is None else str(doc["beta"]),
        depth=depth,
        order=order,
        s=s,
    )
    # Surface expression syntax errors at load time, tagged with the field.
    for field_name, src in (("alpha", defn.alpha_src), ("beta", defn.beta_src)):
        if src is None:
            continue
        try:
            parse_expression(src)
        except ExpressionSyntaxError as exc:
            raise PairDefinitionError(f"{field_name}: {exc}") from exc
    return defn


def load_pair_definition(path: str) -> PairDefinition:
    with open(path, "r", encoding="utf-8") as fh:
        return loads_pair_definition(fh.read())


def dump_pair_definition(defn: PairDefinition) -> str:
    doc = {
        "name": defn.name,
        "a_param": (
            str(defn.a_candidates[0])
            if len(defn.a_candidates) == 1
            else [str(c) for c in defn.a_candidates]
        ),
        "alpha": defn.alpha_src,
        "beta": defn.beta_src,
        "depth": defn.depth,
        "order": defn.order,
    }
    if defn.s is not None:
        doc["s"] = str(defn.s)
    if doc["beta"] is None:
        del doc["beta"]
    return json.dumps(doc, indent=2) + "\n"
