"""Line-oriented structured reports: one `key = value` per line, bracketed
sections, deterministic key order, floats at 17 significant digits.

The numerical payload of a report is a pure function of (config, seed);
the only volatile lines are `timestamp` and keys ending in `_seconds`,
which `comparison_body` strips for the determinism harness.
"""

from __future__ import annotations

import hashlib
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .checks import CheckResult


def format_value(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (complex, np.complexfloating)):
        z = complex(v)
        return f"{z.real:.17g}{z.imag:+.17g}j"
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


def config_hash(config_text: str) -> str:
    return hashlib.sha256(config_text.encode()).hexdigest()


def emit_report(name: str, config_text: str, results: list[CheckResult],
                tol_scale: float = 1.0) -> str:
    lines = [
        "[meta]",
        f"scenario = {name}",
        f"tool_version = {__version__}",
        f"config_sha256 = {config_hash(config_text)}",
        f"tol_scale = {format_value(tol_scale)}",
        f"timestamp = {datetime.now(timezone.utc).isoformat()}",
    ]
    n_pass = n_fail = n_refused = 0
    for r in results:
        lines.append(f"[check {r.name}]")
        lines.append(f"status = {r.status}")
        for key, value in r.metrics:
            lines.append(f"{key} = {format_value(value)}")
        n_pass += r.status == "pass"
        n_fail += r.status == "fail"
        n_refused += r.status == "refused"
    lines += [
        "[summary]",
        f"checks_run = {len(results)}",
        f"passed = {n_pass}",
        f"failed = {n_fail}",
        f"refused = {n_refused}",
        f"exit_status = {exit_status(results)}",
    ]
    return "\n".join(lines) + "\n"


def exit_status(results: list[CheckResult]) -> int:
    """0 iff all checks pass; refusals are a distinct status from failures."""
    if any(r.status == "refused" for r in results):
        return 3
    if any(r.status == "fail" for r in results):
        return 1
    return 0


def comparison_body(report_text: str) -> str:
    """Report body with volatile lines removed (for determinism checks)."""
    keep = []
    for line in report_text.splitlines():
        key = line.split("=", 1)[0].strip()
        if key == "timestamp" or key.endswith("_seconds"):
            continue
        keep.append(line)
    return "\n".join(keep)


def sweep_csv(param: str, rows: list[tuple[object, list[CheckResult]]]) -> str:
    """CSV table for parameter sweeps: one row per (value, check, metric)."""
    out = [f"{param},check,metric,value,status"]
    for value, results in rows:
        for r in results:
            out.append(f"{value},{r.name},status,{r.status},{r.status}")
            for key, metric in r.metrics:
                out.append(f"{value},{r.name},{key},{format_value(metric)},{r.status}")
    return "\n".join(out) + "\n"
