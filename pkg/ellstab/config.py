"""Numerical configuration constants."""
from __future__ import annotations

import os

from dotenv import load_dotenv

from .errors import ConfigInvalid

# Ensure environment variables from .env are available before reading values.
load_dotenv()

PRECISION_MODES = ("double", "wide")


def precision_mode() -> str:
    raw = os.getenv("ELLSTAB_PRECISION", "double").strip().lower()
    if raw not in PRECISION_MODES:
        raise ConfigInvalid(f"Unknown precision mode {raw!r}; expected one of {PRECISION_MODES}.")
    return raw


def _load_int(name: str, default: int) -> int:
    raw = os.getenv(name, "")
    if not raw.strip():
        return default
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigInvalid(f"{name} must be an integer, got {raw!r}.") from exc


WIDE_DPS = _load_int("ELLSTAB_WIDE_DPS", 40)
LOG_LEVEL = os.getenv("ELLSTAB_LOG_LEVEL", "WARNING").upper()
DEFAULT_SEED = _load_int("ELLSTAB_DEFAULT_SEED", 7)

# Series evaluation.
DEFAULT_TOL = 1e-15
MAX_TERMS = 4000
RANGE_LOW = 1e-6
RANGE_HIGH = 1e6
# |value| below this in a denominator counts as vanishing.
DENOMINATOR_FLOOR = 1e-12

# Genericity guards, measured in log coordinates modulo Z ln q + 2 pi i Z.
RESONANCE_RADIUS = 1e-8
PINCH_TOL = 1e-6
SLOPE_WALL_TOL = 1e-6

# Vertex functions and residue probes.
DEFAULT_VERTEX_ORDER = 12
DEFAULT_QUAD_POINTS = 128
PROBE_NODES = 16
PROBE_RADIUS = 1e-3
# Largest relative change of the control residue when the probe radius is halved.
PROBE_STABILITY = 0.1
POLE_RESIDUE_TOL = 1e-7
CONTROL_FACTOR = 1e3

# q -> 0 limits.
DEFAULT_Q_SEQUENCE = (1e-2, 1e-3, 1e-4, 1e-5, 1e-6)
PHASE_SAMPLES = 16
SUPPORT_THRESHOLD = 1e-6
SUPPORT_GUARD_SLOTS = 2
LIMIT_TOL = 1e-6

# Random draws.
DRAW_RE_BOX = 3.0
DRAW_IM_BOX = 3.141592653589793
MAX_REJECTIONS = 1000

REPORT_SCHEMA_VERSION = 1
SUITE_NAMES = ("theta", "envelope", "grass", "rmatrix", "vertex", "tps", "limits")

# User-facing strings.
PARAMS_FILE_MISSING = "Parameter file not found: {path}"
PARAMS_FILE_INVALID = "Parameter file {path} is not valid JSON: {error}"
REPORT_WRITE_FAILED = "Failed to write report to {path}: {error}"
UNKNOWN_SUITE = "Unknown suite {name!r}; choose from: {choices}"
SUITE_FAILED = "{failed} of {total} checks failed; report written to {path}"
SUITE_PASSED = "All {total} checks passed; report written to {path}"
MATRIX_WRITTEN = "Wrote {rows}x{cols} restriction matrix to {path}"
REPORT_SUMMARY_TEMPLATE = "{passed}/{total} checks passed (seed {seed}, suites: {suites})"
CHECK_LINE_TEMPLATE = "{verdict:<4}  {check_id:<48}  residual={residual:.3e}  tol={tolerance:.1e}"
COEFFICIENT_LINE_TEMPLATE = "z^{order:<3} {value}"
NO_FAILED_CHECKS = "No failing checks."

# Subcommand help texts.
THETA_COMMAND_DESCRIPTION = "Evaluate theta and phi at a log coordinate."
STAB_COMMAND_DESCRIPTION = "Compute the restriction matrix of a T*P^(n-1) or hypertoric stable envelope."
GRASS_COMMAND_DESCRIPTION = "Compute the abelianized T*Gr(k,n) restriction matrix and its checks."
RMATRIX_COMMAND_DESCRIPTION = "Check R-matrix identities over seeded random draws."
VERTEX_COMMAND_DESCRIPTION = "Emit the vertex function coefficient table of T*P^(n-1)."
LIMITS_COMMAND_DESCRIPTION = "Run one q -> 0 degeneration check."
VERIFY_COMMAND_DESCRIPTION = "Run verification suites and write a JSON report."
