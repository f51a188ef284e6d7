"""Command-line surface.

Subcommands
    pair-verify   replay the pair relation from a definition file
    pair-chain    apply chain-transform steps, then verify the result
    lvalue        extrapolated L(s,chi)/sqrt(pi) for a weight and s
    table         stream the convergence table row by row
    constant      named presets (catalan, gamma, zeta2, beta4)

Exit codes: 0 success, 1 parse/usage error, 2 coefficient mismatch,
3 inconclusive truncation, 4 error estimate above tolerance, 130 interrupted.
"""

from __future__ import annotations

import json
import sys
from dataclasses import asdict, dataclass, field
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from pathlib import Path
from typing import Optional

import click
import mpmath as mp

from .bailey import ChainParameters, Monomial, chain_step, determine_a_param, verify_pair
from .extrapolation import ExtrapolationConfig
from .limits import (
    euler_mascheroni_regularized,
    outer_limit_stream,
)
from .pairdef import (
    ExpressionSyntaxError,
    PairDefinitionError,
    PairEvaluationError,
    load_pair_definition,
)
from .qcore import PrecisionContext, SummationPolicy, ZeroConstantTermError, exact_to_mpf
from .reporting import (
    convergence_to_csv,
    convergence_to_json,
    extrapolation_row,
    record_row,
    regularization_to_csv,
    regularization_to_json,
)
from .weights import PRESET_NAMES, load_weight, preset

DIGITS = 24

GAMMA_DELTA_GRID = (Fraction(1, 2), Fraction(1, 4), Fraction(1, 8), Fraction(1, 16))

CONSTANT_PRESETS = {
    "catalan": {"weight": "mod4", "s": "2", "label": "catalan"},
    "zeta2": {"weight": "trivial", "s": "2", "label": "zeta2"},
    "beta4": {"weight": "mod4", "s": "4", "label": "beta4"},
    "gamma": {"label": "gamma"},
}


# ---------------------------------------------------------------------------
# Configuration


@dataclass
class RunConfiguration:
    """Fully parsed invocation; round-trips through a plain dict."""

    command: str
    weight: Optional[str] = None
    s: Optional[str] = None
    n0: int = 64
    factor: int = 2
    count: int = 7
    precision_bits: int = 192
    order: int = 6
    output_format: str = "text"
    out: Optional[str] = None
    tolerance: Optional[float] = None
    policy: str = SummationPolicy.SEQUENTIAL_ASCENDING.value
    threads: int = 1
    include_timing: bool = True
    constant_name: Optional[str] = None

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, doc: dict) -> "RunConfiguration":
        return cls(**doc)

    def schedule(self) -> list:
        return [self.n0 * self.factor**k for k in range(self.count)]

    def context(self) -> PrecisionContext:
        return PrecisionContext(
            precision_bits=self.precision_bits,
            summation_policy=SummationPolicy(self.policy),
        )

    def accel(self) -> ExtrapolationConfig:
        return ExtrapolationConfig(order=self.order)

    def validate(self) -> None:
        """Reject invalid combinations before any computation starts."""
        if self.command in ("lvalue", "table"):
            if self.weight is None or self.s is None:
                raise ValueError(f"{self.command} needs --weight and --s")
            s_re, _ = parse_s(self.s)
            if s_re <= 1:
                raise ValueError("Re(s) must exceed 1 (the gamma preset handles s near 1)")
        if self.command == "constant" and self.constant_name not in CONSTANT_PRESETS:
            raise ValueError(f"unknown constant {self.constant_name!r}")
        if self.n0 < 1 or self.factor < 2 or self.count < 1:
            raise ValueError("schedule needs n0 >= 1, factor >= 2, count >= 1")
        if self.order < 1:
            raise ValueError("extrapolation order must be positive")
        if self.tolerance is not None and self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.threads < 1:
            raise ValueError("threads must be at least 1")
        SummationPolicy(self.policy)
        if self.precision_bits < 64:
            raise ValueError("precision must be at least 64 bits")


def parse_s(text: str) -> tuple:
    """Parse 're[+imi]' into exact rational parts: '2', '3/2', '2.5-0.5i', '2+i'."""
    s = text.strip().replace(" ", "")
    if not s:
        raise ValueError("empty s")
    if s.endswith(("i", "I")):
        body = s[:-1]
        split = max(body.rfind("+", 1), body.rfind("-", 1))
        if split <= 0:
            re_part, im_part = "0", body or "+1"
        else:
            re_part, im_part = body[:split], body[split:]
        if im_part in ("+", "-"):
            im_part += "1"
        return _rational(re_part), _rational(im_part)
    return _rational(s), Fraction(0)


def _rational(text: str) -> Fraction:
    t = text.strip()
    if not t:
        raise ValueError("empty number")
    try:
        if "/" in t:
            num, den = t.split("/", 1)
            return Fraction(Fraction(Decimal(num)), Fraction(Decimal(den)))
        return Fraction(Decimal(t))
    except (InvalidOperation, ZeroDivisionError) as exc:
        raise ValueError(f"cannot parse number {text!r}") from exc


def resolve_weight(spec: str):
    if spec in PRESET_NAMES:
        return preset(spec)
    path = Path(spec)
    if not path.exists():
        raise ValueError(f"--weight must be one of {PRESET_NAMES} or a JSON file path")
    return load_weight(str(path))


def _fail(message: str, code: int = 1):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _fmt(value) -> str:
    z = mp.mpc(value)
    if z.imag == 0:
        return mp.nstr(z.real, DIGITS)
    return f"{mp.nstr(z.real, DIGITS)} + {mp.nstr(z.imag, DIGITS)}i"


def _write_out(path: str, content: str) -> None:
    Path(path).write_text(content, encoding="utf-8")


# ---------------------------------------------------------------------------
# Group


@click.group()
@click.version_option(package_name="baileyzeta")
def cli():
    """Bailey pair verification and L-value computation via q-series limits."""


# -- pair commands -----------------------------------------------------------


def _load_definition(path: str):
    try:
        return load_pair_definition(path)
    except FileNotFoundError:
        _fail(f"no such file: {path}")
    except json.JSONDecodeError as exc:
        _fail(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}")
    except (PairDefinitionError, ExpressionSyntaxError) as exc:
        _fail(f"{path}: {exc}")


def _verification_payload(name, depth, order, reports, winner) -> dict:
    candidates = []
    for mono, rep in reports:
        payload = {
            "a": str(mono),
            "status": rep.status.value,
            "first_mismatch": (
                None
                if rep.first_mismatch is None
                else {"n": rep.first_mismatch[0], "power": rep.first_mismatch[1]}
            ),
            "message": rep.message,
        }
        candidates.append(payload)
    if winner is not None:
        status = "verified"
    elif any(rep.status.value == "mismatch" for _, rep in reports):
        status = "mismatch"
    else:
        status = "inconclusive"
    return {
        "name": name,
        "depth": depth,
        "order": order,
        "candidates": candidates,
        "winner": None if winner is None else str(winner),
        "status": status,
    }


def _emit_verification(payload: dict, fmt: str, out: Optional[str]):
    if fmt == "json":
        text = json.dumps(payload, indent=2) + "\n"
        click.echo(text, nl=False)
    else:
        click.echo(f"pair: {payload['name']} (depth {payload['depth']}, order {payload['order']})")
        for cand in payload["candidates"]:
            loc = cand["first_mismatch"]
            where = "" if loc is None else f" at (n={loc['n']}, power {loc['power']})"
            click.echo(f"  a = {cand['a']}: {cand['status']}{where}")
            if cand["status"] != "verified":
                click.echo(f"    {cand['message']}")
        if payload["winner"] is not None:
            click.echo(f"validated relative to a = {payload['winner']}")
        else:
            click.echo(f"result: {payload['status']}")
    if out:
        _write_out(out, json.dumps(payload, indent=2) + "\n")


def _verification_exit(payload: dict) -> int:
    return {"verified": 0, "mismatch": 2, "inconclusive": 3}[payload["status"]]


@cli.command("pair-verify")
@click.argument("definition", type=click.Path())
@click.option("--depth", type=int, default=None, help="Override the file's depth.")
@click.option("--truncation", type=int, default=None, help="Override the file's order.")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
@click.option("--out", type=click.Path(), default=None, help="Also write the JSON report here.")
def cmd_pair_verify(definition, depth, truncation, fmt, out):
    """Verify the defining relation of a pair file, exactly.

    Exit 0 when verified, 2 on a coefficient mismatch (location printed),
    3 when the truncation order is too small to conclude anything.
    """
    defn = _load_definition(definition)
    depth = defn.depth if depth is None else depth
    order = defn.order if truncation is None else truncation
    if defn.beta_src is None:
        _fail(f"{defn.name}: definition has no beta; nothing to verify")
    try:
        alpha = defn.alpha_generator()
        beta = defn.beta_generator()
        search = determine_a_param(
            alpha, beta, defn.a_candidates, depth=depth, order=order, name=defn.name
        )
    except (PairEvaluationError, ZeroConstantTermError) as exc:
        _fail(f"{defn.name}: {exc}")
    payload = _verification_payload(defn.name, depth, order, search.reports, search.winner)
    _emit_verification(payload, fmt, out)
    sys.exit(_verification_exit(payload))


@cli.command("pair-chain")
@click.argument("definition", type=click.Path())
@click.option("--rho1", required=True, help="First chain parameter (monomial, e.g. -1 or q).")
@click.option("--rho2", required=True, help="Second chain parameter.")
@click.option("--steps", type=int, default=1, show_default=True)
@click.option("--depth", type=int, default=None, help="Verification depth for the result.")
@click.option("--truncation", type=int, default=None, help="Truncation order for the result.")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
@click.option("--out", type=click.Path(), default=None)
def cmd_pair_chain(definition, rho1, rho2, steps, depth, truncation, fmt, out):
    """Iterate the chain transform on a pair file and verify the output.

    The input pair must determine a single validating a (or name one); the
    transformed pair is verified at the same depth by construction of the
    chain lemma, and this command checks exactly that.
    """
    defn = _load_definition(definition)
    depth = defn.depth if depth is None else depth
    order = defn.order if truncation is None else truncation
    if steps < 1:
        _fail("--steps must be at least 1")
    try:
        params = ChainParameters(Monomial.parse(rho1), Monomial.parse(rho2))
    except ValueError as exc:
        _fail(str(exc))
    try:
        if defn.has_candidate_search and defn.beta_src is not None:
            search = determine_a_param(
                defn.alpha_generator(),
                defn.beta_generator(),
                defn.a_candidates,
                depth=depth,
                order=order,
                name=defn.name,
            )
            if search.winner is None:
                payload = _verification_payload(defn.name, depth, order, search.reports, None)
                _emit_verification(payload, fmt, out)
                sys.exit(_verification_exit(payload))
            pair = defn.build_pair(search.winner)
        else:
            pair = defn.build_pair(defn.a_candidates[0])
        for _ in range(steps):
            pair = chain_step(pair, params, order=order)
        report = verify_pair(pair, depth=depth, order=order)
    except (PairEvaluationError, ZeroConstantTermError, ValueError) as exc:
        _fail(f"{defn.name}: {exc}")
    payload = _verification_payload(defn.name, depth, order, [(pair.a_param, report)], pair.a_param if report.ok else None)
    payload["steps"] = steps
    payload["rho1"] = str(params.rho1)
    payload["rho2"] = str(params.rho2)
    _emit_verification(payload, fmt, out)
    sys.exit(_verification_exit(payload))


# -- numeric commands --------------------------------------------------------


def _common_numeric_options(fn):
    fn = click.option("--n0", type=int, default=64, show_default=True)(fn)
    fn = click.option("--factor", type=int, default=2, show_default=True)(fn)
    fn = click.option("--count", type=int, default=7, show_default=True)(fn)
    fn = click.option("--precision", type=int, default=192, show_default=True,
                      help="Mantissa bits for floating evaluation.")(fn)
    fn = click.option("--order", type=int, default=6, show_default=True,
                      help="Extrapolation order.")(fn)
    fn = click.option("--format", "fmt", type=click.Choice(["json", "csv", "text"]),
                      default="text", show_default=True)(fn)
    fn = click.option("--out", type=click.Path(), default=None,
                      help="Write the full report to this path.")(fn)
    fn = click.option("--tolerance", type=float, default=None,
                      help="Exit 4 when the error estimate exceeds this.")(fn)
    fn = click.option("--policy", type=click.Choice([p.value for p in SummationPolicy]),
                      default=SummationPolicy.SEQUENTIAL_ASCENDING.value, show_default=True)(fn)
    fn = click.option("--threads", type=int, default=1, show_default=True,
                      help="Worker hint; under the sequential policy results are "
                           "independent of it by contract.")(fn)
    fn = click.option("--no-timing", "no_timing", is_flag=True,
                      help="Zero elapsed_ms fields for byte-reproducible output.")(fn)
    return fn


def _run_convergence(cfg: RunConfiguration, chi):
    """Shared pipeline behind lvalue, table, and the non-gamma constants."""
    ctx = cfg.context()
    s = parse_s(cfg.s)
    report = None
    for kind, payload in outer_limit_stream(chi, s, cfg.schedule(), cfg.accel(), ctx):
        if kind == "report":
            report = payload
    return report, ctx


def _scaled_and_unscaled(report, ctx):
    with ctx.guarded():
        unscaled = report.extrapolated * mp.sqrt(mp.pi)
    return report.extrapolated, ctx.round(unscaled)


def _report_file_content(report, cfg: RunConfiguration) -> str:
    if cfg.output_format == "csv":
        return convergence_to_csv(report, include_timing=cfg.include_timing)
    return convergence_to_json(report, include_timing=cfg.include_timing)


def _emit_lvalue(report, cfg: RunConfiguration, ctx, label="L(s,chi)"):
    scaled, unscaled = _scaled_and_unscaled(report, ctx)
    if cfg.output_format == "text":
        click.echo(f"{label}/sqrt(pi) = {_fmt(scaled)}")
        click.echo(f"{label}          = {_fmt(unscaled)}")
        click.echo(f"error estimate  = {mp.nstr(report.error_estimate, 6)}")
        click.echo(f"method          = {report.method}")
    elif cfg.output_format == "json":
        click.echo(convergence_to_json(report, include_timing=cfg.include_timing), nl=False)
    else:
        click.echo(convergence_to_csv(report, include_timing=cfg.include_timing), nl=False)
    if cfg.out:
        _write_out(cfg.out, _report_file_content(report, cfg))
    if cfg.tolerance is not None and float(report.error_estimate) > cfg.tolerance:
        click.echo(
            f"error estimate {mp.nstr(report.error_estimate, 6)} exceeds "
            f"tolerance {cfg.tolerance}",
            err=True,
        )
        sys.exit(4)


@cli.command("lvalue")
@click.option("--weight", required=True, help=f"Preset {PRESET_NAMES} or a weight JSON file.")
@click.option("--s", "s_text", required=True, help="s as re[+imi], Re(s) > 1.")
@_common_numeric_options
def cmd_lvalue(weight, s_text, n0, factor, count, precision, order, fmt, out,
               tolerance, policy, threads, no_timing):
    """Extrapolated L(s,chi)/sqrt(pi), the scaled limit value first."""
    cfg = RunConfiguration(
        command="lvalue", weight=weight, s=s_text, n0=n0, factor=factor, count=count,
        precision_bits=precision, order=order, output_format=fmt, out=out,
        tolerance=tolerance, policy=policy, threads=threads, include_timing=not no_timing,
    )
    try:
        cfg.validate()
        chi = resolve_weight(cfg.weight)
        report, ctx = _run_convergence(cfg, chi)
    except (ValueError, ArithmeticError) as exc:
        _fail(str(exc))
    _emit_lvalue(report, cfg, ctx)


@cli.command("table")
@click.option("--weight", required=True, help=f"Preset {PRESET_NAMES} or a weight JSON file.")
@click.option("--s", "s_text", required=True, help="s as re[+imi], Re(s) > 1.")
@_common_numeric_options
def cmd_table(weight, s_text, n0, factor, count, precision, order, fmt, out,
              tolerance, policy, threads, no_timing):
    """Stream one row per schedule point, extrapolation row last.

    Rows appear as soon as each approximant is computed; an interrupt
    flushes what exists and exits 130.
    """
    cfg = RunConfiguration(
        command="table", weight=weight, s=s_text, n0=n0, factor=factor, count=count,
        precision_bits=precision, order=order, output_format=fmt, out=out,
        tolerance=tolerance, policy=policy, threads=threads, include_timing=not no_timing,
    )
    try:
        cfg.validate()
        chi = resolve_weight(cfg.weight)
    except ValueError as exc:
        _fail(str(exc))
    ctx = cfg.context()
    s = parse_s(cfg.s)
    # A short table still streams; clamp the elimination order to what the
    # schedule supports (a single point degenerates to the raw value).
    accel = ExtrapolationConfig(order=min(cfg.order, cfg.count - 1))
    columns = ["n", "re", "im", "err_est", "elapsed_ms"]
    if cfg.output_format == "csv":
        click.echo(",".join(columns))
    elif cfg.output_format == "text":
        click.echo("\t".join(columns))
    report = None
    try:
        for kind, payload in outer_limit_stream(chi, s, cfg.schedule(), accel, ctx):
            if kind == "record":
                row = record_row(payload, include_timing=cfg.include_timing)
                _echo_row(row, cfg.output_format, columns)
            else:
                report = payload
        _echo_row(extrapolation_row(report), cfg.output_format, columns)
    except KeyboardInterrupt:
        sys.stdout.flush()
        sys.exit(130)
    except (ValueError, ArithmeticError) as exc:
        _fail(str(exc))
    if cfg.out:
        _write_out(cfg.out, _report_file_content(report, cfg))
    if cfg.tolerance is not None and float(report.error_estimate) > cfg.tolerance:
        sys.exit(4)


def _echo_row(row: dict, fmt: str, columns):
    if fmt == "json":
        click.echo(json.dumps(row))
    elif fmt == "csv":
        click.echo(",".join(str(row[c]) for c in columns))
    else:
        click.echo("\t".join(str(row[c]) for c in columns))
    sys.stdout.flush()


@cli.command("constant")
@click.argument("name", type=click.Choice(sorted(CONSTANT_PRESETS)))
@_common_numeric_options
def cmd_constant(name, n0, factor, count, precision, order, fmt, out,
                 tolerance, policy, threads, no_timing):
    """Named presets; prints the /sqrt(pi)-scaled value first, unscaled second.

    catalan: mod4 weight at s=2 (unscaled value is Catalan's G).
    gamma:   regularized path at s = 1+delta over delta = 1/2..1/16.
    zeta2:   trivial weight at s=2.  beta4: mod4 weight at s=4.
    """
    spec = CONSTANT_PRESETS[name]
    cfg = RunConfiguration(
        command="constant", constant_name=name,
        weight=spec.get("weight"), s=spec.get("s"),
        n0=n0, factor=factor, count=count, precision_bits=precision, order=order,
        output_format=fmt, out=out, tolerance=tolerance, policy=policy,
        threads=threads, include_timing=not no_timing,
    )
    try:
        cfg.validate()
    except ValueError as exc:
        _fail(str(exc))
    if name == "gamma":
        _run_gamma(cfg)
        return
    try:
        chi = resolve_weight(cfg.weight)
        report, ctx = _run_convergence(cfg, chi)
    except (ValueError, ArithmeticError) as exc:
        _fail(str(exc))
    _emit_lvalue(report, cfg, ctx, label=name.ljust(len("L(s,chi)")))


def _run_gamma(cfg: RunConfiguration):
    ctx = cfg.context()
    try:
        report = euler_mascheroni_regularized(
            GAMMA_DELTA_GRID, cfg.schedule(), cfg.accel(), ctx
        )
        from .extrapolation import neville_at_zero

        with ctx.guarded():
            nodes = [exact_to_mpf(d) for d in report.delta_grid]
        drop_first = neville_at_zero(nodes[1:], list(report.subtracted)[1:], ctx)
        with ctx.guarded():
            estimate = ctx.round(abs(report.extrapolated_gamma_over_sqrt_pi - drop_first))
            unscaled = ctx.round(report.extrapolated_gamma_over_sqrt_pi * mp.sqrt(mp.pi))
    except (ValueError, ArithmeticError) as exc:
        _fail(str(exc))
    if cfg.output_format == "text":
        click.echo(f"gamma/sqrt(pi) = {_fmt(report.extrapolated_gamma_over_sqrt_pi)}")
        click.echo(f"gamma          = {_fmt(unscaled)}")
        click.echo(f"error estimate = {mp.nstr(estimate, 6)} (leave-one-out)")
        click.echo(f"method         = {report.method}")
    elif cfg.output_format == "json":
        click.echo(regularization_to_json(report), nl=False)
    else:
        click.echo(regularization_to_csv(report), nl=False)
    if cfg.out:
        content = (
            regularization_to_csv(report)
            if cfg.output_format == "csv"
            else regularization_to_json(report)
        )
        _write_out(cfg.out, content)
    if cfg.tolerance is not None and float(estimate) > cfg.tolerance:
        click.echo(
            f"error estimate {mp.nstr(estimate, 6)} exceeds tolerance {cfg.tolerance}",
            err=True,
        )
        sys.exit(4)


def main():
    cli()


if __name__ == "__main__":
    main()
