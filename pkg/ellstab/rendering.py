"""Helpers for rendering reports, matrices and coefficient tables as text."""
from __future__ import annotations

import logging
from typing import List, Sequence

import numpy as np

from . import config
from .models import CheckRecord, RestrictionMatrix, VerificationReport, VertexSeries

logger = logging.getLogger(__name__)


def format_complex(value: complex, digits: int = 6) -> str:
    value = complex(value)
    return f"{value.real:.{digits}g}{value.imag:+.{digits}g}j"


def format_check_line(record: CheckRecord) -> str:
    """Return a single aligned line describing a check verdict."""
    return config.CHECK_LINE_TEMPLATE.format(
        verdict=record.verdict.upper(),
        check_id=record.check_id,
        residual=record.residual,
        tolerance=record.tolerance,
    )


def format_report_summary(report: VerificationReport) -> str:
    total = len(report.checks)
    return config.REPORT_SUMMARY_TEMPLATE.format(
        passed=total - len(report.failed),
        total=total,
        seed=report.seed,
        suites=", ".join(report.suites),
    )


def format_report(report: VerificationReport, show_all: bool = False) -> str:
    """Return the summary line followed by failing checks (or every check with *show_all*)."""
    lines: List[str] = [format_report_summary(report)]
    records: Sequence[CheckRecord] = report.sorted_checks() if show_all else report.failed
    if not records:
        lines.append(config.NO_FAILED_CHECKS)
    lines.extend(format_check_line(record) for record in sorted(records, key=lambda r: r.check_id))
    return "\n".join(lines)


def format_matrix(matrix: RestrictionMatrix, digits: int = 6) -> str:
    cells = [[format_complex(value, digits) for value in row] for row in matrix.entries]
    width = max([len(label) for label in matrix.basis] + [len(cell) for row in cells for cell in row])
    header = " " * width + "  " + "  ".join(label.rjust(width) for label in matrix.basis)
    lines = [header]
    for label, row in zip(matrix.basis, cells):
        lines.append(label.rjust(width) + "  " + "  ".join(cell.rjust(width) for cell in row))
    return "\n".join(lines)


def format_coefficients(series: VertexSeries, digits: int = 10) -> str:
    lines = [f"F{series.fixed_point}"]
    for order, value in enumerate(series.coeffs):
        lines.append(config.COEFFICIENT_LINE_TEMPLATE.format(order=order, value=format_complex(value, digits)))
    return "\n".join(lines)


def matrix_digest_line(matrix: RestrictionMatrix) -> str:
    """One line with the matrix size and its largest entry, for log output."""
    peak = float(np.max(np.abs(matrix.entries))) if matrix.size else 0.0
    return f"{matrix.size}x{matrix.size} matrix over {', '.join(matrix.basis)}; max |entry| = {peak:.3e}"
