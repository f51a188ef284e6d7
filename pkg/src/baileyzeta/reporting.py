"""Machine-readable serialization of convergence and regularization reports.

JSON and CSV carry the same payload: one row per schedule point with fields
n, re, im, err_est, elapsed_ms, then the extrapolated value.  Numeric fields
are emitted as shortest round-trip doubles; full precision stays on the
report objects themselves.  Wall-clock fields can be zeroed (include_timing
False) to make output byte-reproducible across runs.
"""

from __future__ import annotations

import csv
import io
import json

import mpmath as mp

from .limits import ConvergenceReport, RegularizationReport

__all__ = [
    "convergence_to_json",
    "convergence_to_csv",
    "regularization_to_json",
    "regularization_to_csv",
    "record_row",
    "extrapolation_row",
]


def _re_im(value):
    z = mp.mpc(value)
    return float(z.real), float(z.imag)


def record_row(rec, include_timing: bool = True) -> dict:
    re, im = _re_im(rec.value)
    return {
        "n": rec.n,
        "re": re,
        "im": im,
        "err_est": float(rec.error_estimate),
        "elapsed_ms": rec.elapsed_s * 1000.0 if include_timing else 0.0,
    }


def extrapolation_row(report: ConvergenceReport) -> dict:
    re, im = _re_im(report.extrapolated)
    return {
        "n": "extrapolated",
        "re": re,
        "im": im,
        "err_est": float(report.error_estimate),
        "elapsed_ms": 0.0,
    }


def convergence_to_json(report: ConvergenceReport, include_timing: bool = True) -> str:
    re, im = _re_im(report.extrapolated)
    doc = {
        "method": report.method,
        "records": [record_row(rec, include_timing) for rec in report.records],
        "extrapolated": {"re": re, "im": im},
    }
    return json.dumps(doc, indent=2) + "\n"


_COLUMNS = ["n", "re", "im", "err_est", "elapsed_ms"]


def convergence_to_csv(report: ConvergenceReport, include_timing: bool = True) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for rec in report.records:
        writer.writerow(record_row(rec, include_timing))
    writer.writerow(extrapolation_row(report))
    return buf.getvalue()


def regularization_to_json(report: RegularizationReport) -> str:
    rows = []
    for d, raw, sub in zip(report.delta_grid, report.raw, report.subtracted):
        raw_re, raw_im = _re_im(raw)
        sub_re, sub_im = _re_im(sub)
        rows.append(
            {
                "delta": float(d),
                "raw": {"re": raw_re, "im": raw_im},
                "subtracted": {"re": sub_re, "im": sub_im},
            }
        )
    g_re, g_im = _re_im(report.extrapolated_gamma_over_sqrt_pi)
    doc = {
        "method": report.method,
        "records": rows,
        "extrapolated_gamma_over_sqrt_pi": {"re": g_re, "im": g_im},
    }
    return json.dumps(doc, indent=2) + "\n"


def regularization_to_csv(report: RegularizationReport) -> str:
    buf = io.StringIO()
    columns = ["delta", "raw_re", "raw_im", "subtracted_re", "subtracted_im"]
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for d, raw, sub in zip(report.delta_grid, report.raw, report.subtracted):
        raw_re, raw_im = _re_im(raw)
        sub_re, sub_im = _re_im(sub)
        writer.writerow(
            {
                "delta": float(d),
                "raw_re": raw_re,
                "raw_im": raw_im,
                "subtracted_re": sub_re,
                "subtracted_im": sub_im,
            }
        )
    g_re, g_im = _re_im(report.extrapolated_gamma_over_sqrt_pi)
    writer.writerow(
        {
            "delta": "extrapolated",
            "raw_re": g_re,
            "raw_im": g_im,
            "subtracted_re": g_re,
            "subtracted_im": g_im,
        }
    )
    return buf.getvalue()
