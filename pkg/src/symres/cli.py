"""Batch front-end: run scenario configs, sweep parameters, bundled demos,
and export symbols/operators.  Exit codes: 0 all checks pass, 1 a check
failed its tolerance, 2 config parse/validation error, 3 numerical refusal
(e.g. a spectral-gap precondition).
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .checks import run_checks
from .config import Scenario, parse_scenario
from .errors import ConfigError, SymresError
from .report import emit_report, exit_status, sweep_csv

_DEMOS = {
    ("lemma-a1", 1): """\
[field]
seed = 7

[checks]
run = lemma-a1
""",
    ("vanishing", 1): """\
[manifold]
n = 1
N = 64
N_f = 32

[field]
m = 2
recipe = rank-one
epsilon = 0.2
bandwidth = 2
margin_cells = 3
seed = 7

[projection]
J = 4

[contour]
radius = 0.5
nodes = 64

[checks]
run = pi0, idempotency, residue
""",
    ("vanishing", 2): """\
[manifold]
n = 2
N = 32
K = 32
N_f = 15

[field]
m = 2
recipe = rank-one
epsilon = 0.2
bandwidth = 2
theta_bandwidth = 1
margin_cells = 2
seed = 7

[projection]
J = 3

[contour]
radius = 0.5
nodes = 32

[checks]
run = pi0, idempotency, residue
""",
}


def _out_dir(ns) -> Path:
    out = ns.out or os.environ.get("SYMRES_OUT") or "."
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _run_one(args: tuple[str, str, float]) -> tuple[str, str, int]:
    """(name, config text, tol scale) -> (name, report, exit code)."""
    name, text, tol_scale = args
    sc = parse_scenario(text, name=name, tol_scale=tol_scale)
    results = run_checks(sc)
    report = emit_report(name, text, results, tol_scale)
    return name, report, exit_status(results)


def _cmd_run(ns) -> int:
    out = _out_dir(ns)
    jobs = []
    for cfg in ns.config:
        path = Path(cfg)
        try:
            text = path.read_text()
        except OSError as e:
            print(f"error: cannot read {cfg}: {e}", file=sys.stderr)
            return 2
        jobs.append((path.stem, text, ns.tol_scale))

    worst = 0
    if ns.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=ns.jobs) as ex:
            outputs = list(ex.map(_run_one, jobs))
    else:
        outputs = [_run_one(j) for j in jobs]
    for name, report, code in outputs:
        dest = out / f"{name}.report.txt"
        dest.write_text(report)
        print(f"{name}: exit {code} -> {dest}")
        worst = max(worst, code)
    if len(outputs) == 1:
        print(outputs[0][1], end="")
    return worst


def _parse_sweep_values(spec: str) -> tuple[str, list[str]]:
    key, _, rng = spec.partition("=")
    key = key.strip()
    rng = rng.strip()
    if ".." in rng:
        a, _, b = rng.partition("..")
        return key, [str(v) for v in range(int(a), int(b) + 1)]
    return key, [v.strip() for v in rng.split(",") if v.strip()]


_SWEEP_FIELDS = {
    "J": "order", "N": "N", "K": "K", "N_f": "n_f", "M": "contour_nodes",
    "r": "contour_radius", "epsilon": "epsilon", "seed": "seed",
    "margin": "margin_cells",
}


def _cmd_sweep(ns) -> int:
    out = _out_dir(ns)
    path = Path(ns.config)
    text = path.read_text()
    base = parse_scenario(text, name=path.stem, tol_scale=ns.tol_scale)
    key, values = _parse_sweep_values(ns.param)
    if key not in _SWEEP_FIELDS:
        print(f"error: checks.run: unsupported sweep parameter {key!r} "
              f"(supported: {', '.join(_SWEEP_FIELDS)})", file=sys.stderr)
        return 2
    fieldname = _SWEEP_FIELDS[key]
    conv = float if fieldname in ("contour_radius", "epsilon") else int
    rows = []
    worst = 0
    for v in values:
        sc = dataclasses.replace(base, name=f"{base.name}[{key}={v}]",
                                 **{fieldname: conv(v)})
        sc.validate()
        results = run_checks(sc)
        rows.append((v, results))
        worst = max(worst, exit_status(results))
        print(f"{key}={v}: exit {exit_status(results)}")
    dest = out / f"{path.stem}.sweep.csv"
    dest.write_text(sweep_csv(key, rows))
    print(f"sweep table -> {dest}")
    return worst


def _cmd_demo(ns) -> int:
    key = (ns.which, ns.dim if ns.which == "vanishing" else 1)
    if key not in _DEMOS:
        print(f"error: no demo {ns.which!r} for dim {ns.dim}", file=sys.stderr)
        return 2
    text = _DEMOS[key]
    name = f"{ns.which}_n{key[1]}" if ns.which == "vanishing" else "lemma_a1"
    out = _out_dir(ns)
    (out / f"{name}.cfg").write_text(text)
    name_, report, code = _run_one((name, text, ns.tol_scale))
    (out / f"{name}.report.txt").write_text(report)
    print(report, end="")
    return code


def _cmd_export_symbol(ns) -> int:
    from .checks import _State
    from .serialize import format_symbol
    sc = parse_scenario(Path(ns.config).read_text(), name=Path(ns.config).stem)
    state = _State(sc)
    Path(ns.dest).write_text(format_symbol(state.pi))
    print(f"projection symbol -> {ns.dest}")
    return 0


def _cmd_export_operator(ns) -> int:
    from .checks import _State
    from .oracle import quantize
    from .serialize import write_operator
    sc = parse_scenario(Path(ns.config).read_text(), name=Path(ns.config).stem)
    state = _State(sc)
    write_operator(quantize(state.pi, sc.n_f), ns.dest)
    print(f"quantized projection -> {ns.dest}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="symres",
        description="Residue calculus scenarios: run checks, sweep, export.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output directory (default $SYMRES_OUT or .)")
    common.add_argument("--tol-scale", type=float, default=1.0,
                        help="uniform tolerance relaxation for slow hardware")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("run", help="run one or more scenario configs",
                       parents=[common])
    p.add_argument("config", nargs="+")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(fn=_cmd_run)

    p = sub.add_parser("sweep", help="sweep one scenario parameter",
                       parents=[common])
    p.add_argument("config")
    p.add_argument("--param", required=True, metavar="KEY=A..B|KEY=V1,V2")
    p.set_defaults(fn=_cmd_sweep)

    p = sub.add_parser("demo", help="run a bundled demonstration scenario",
                       parents=[common])
    p.add_argument("which", choices=["lemma-a1", "vanishing"])
    p.add_argument("--dim", type=int, choices=[1, 2], default=1)
    p.set_defaults(fn=_cmd_demo)

    p = sub.add_parser("export-symbol", help="write the projection symbol record",
                       parents=[common])
    p.add_argument("config")
    p.add_argument("--dest", required=True)
    p.set_defaults(fn=_cmd_export_symbol)

    p = sub.add_parser("export-operator", help="write the quantized projection blob",
                       parents=[common])
    p.add_argument("config")
    p.add_argument("--dest", required=True)
    p.set_defaults(fn=_cmd_export_operator)
    return ap


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        return ns.fn(ns)
    except ConfigError as e:
        where = f" (field {e.field})" if e.field else ""
        where += f" (line {e.line})" if e.line else ""
        print(f"config error{where}: {e}", file=sys.stderr)
        return 2
    except SymresError as e:
        print(f"numerical refusal: {type(e).__name__}: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
