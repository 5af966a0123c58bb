"""Command-line experiment runner.

    fogsched run       --config cfg.json --out results/ [--seed S] [--slots N] [--v V]
    fogsched sweep-v   --values 1e6,2e6,... --seeds 0,1,2
    fogsched sweep-fog --values 2,4,...,16
    fogsched sweep-wd  --values 10,20,...,60
    fogsched bounds    --config cfg.json --out results/
    fogsched verify    [--quick]
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .config import ConfigError, default_config, load_config
from .oracle import bounds_report, slater_probe
from .outputs import OutputError, emit_outputs
from .simulation import ExperimentSpec, SimulationError, run_simulation, sweep
from .verification import run_all

log = logging.getLogger("fogsched")

DEFAULT_VALUES = {
    "V": [1e6, 2e6, 3e6, 4e6, 5e6, 6e6, 7e6],
    "num_fog": [2, 4, 6, 8, 10, 12, 14, 16],
    "num_wd": [10, 20, 30, 40, 50, 60],
}
# Fog and WD sweeps are run at a fixed trade-off weight.
SHAPE_SWEEP_V = 3e6


def _base_config(args):
    cfg = load_config(args.config) if args.config else default_config()
    changes = {}
    if args.seed is not None:
        changes["rng_seed"] = args.seed
    if args.slots is not None:
        changes["num_slots"] = args.slots
    if args.v is not None:
        changes["v_param"] = args.v
    return cfg.replace(**changes) if changes else cfg


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _tag(value, seed) -> str:
    v = f"{value:g}" if isinstance(value, float) else str(value)
    return f"{v}_seed{seed}"


def cmd_run(args) -> int:
    cfg = _base_config(args)
    res = run_simulation(cfg, trace_positions=args.trace_positions)
    s = res.summary
    paths = emit_outputs({"run": res}, [s], args.out)
    print(f"eta={s.eta:.6g} D={s.d_metric:.6g} power={s.total_power:.6g} violations={res.violations}")
    print(f"wrote {len(paths)} files to {args.out}")
    return 0 if res.violations == 0 else 3


def _sweep(axis: str, args) -> int:
    base = _base_config(args)
    if axis in ("num_fog", "num_wd") and args.v is None:
        base = base.replace(v_param=SHAPE_SWEEP_V)
    values = args.values if args.values is not None else DEFAULT_VALUES[axis]
    seeds = tuple(args.seeds) if args.seeds is not None else (base.rng_seed, base.rng_seed + 1, base.rng_seed + 2)
    spec = ExperimentSpec(base=base, axis=axis, values=tuple(values), seeds=seeds, out_dir=args.out)
    result = sweep(spec)
    runs = {_tag(v, s): r for (v, s), r in result.runs.items()}

    bounds = None
    if axis == "V":
        ref = run_simulation(base.replace(v_param=2 * max(values)))
        eta_star = max([r.eta for r in result.rows] + [ref.summary.eta])
        probe = slater_probe(base, samples=args.probe_samples)
        bounds = [
            bounds_report(r.eta, r.d_metric, base.replace(v_param=r.sweep_value), eta_star, probe.epsilon)
            for r in result.rows
        ]
    emit_outputs(runs, result.rows, args.out, bounds=bounds, base=base)
    print(f"{axis:>8} {'eta':>10} {'D':>12} {'power':>10} {'admitted':>10}")
    for r in result.rows:
        print(f"{r.sweep_value:>8g} {r.eta:>10.5g} {r.d_metric:>12.6g} {r.total_power:>10.5g} {r.mean_admitted:>10.5g}")
    if bounds and not all(b.eta_ok and b.d_ok for b in bounds):
        print("bound check failed", file=sys.stderr)
        return 4
    return 0


def cmd_bounds(args) -> int:
    cfg = _base_config(args)
    res = run_simulation(cfg)
    ref = run_simulation(cfg.replace(v_param=args.ref_factor * cfg.v_param))
    eta_star = max(res.summary.eta, ref.summary.eta)
    probe = slater_probe(cfg, samples=args.probe_samples)
    report = bounds_report(res.summary.eta, res.summary.d_metric, cfg, eta_star, probe.epsilon)
    emit_outputs({"run": res}, [res.summary], args.out, bounds=[report])
    for key, value in report.to_dict().items():
        print(f"{key:>16}: {value}")
    return 0 if report.eta_ok and report.d_ok else 4


def cmd_verify(args) -> int:
    results = run_all(quick=args.quick)
    for r in results:
        print(r.line())
    return 0 if all(r.passed for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fogsched", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, out_default="results"):
        p.add_argument("--config", type=Path, help="JSON config (or a run manifest)")
        p.add_argument("--seed", type=int)
        p.add_argument("--slots", type=int)
        p.add_argument("--v", type=float, help="trade-off weight V")
        p.add_argument("--out", type=Path, default=Path(out_default))
        p.add_argument("--probe-samples", type=int, default=2000)

    p = sub.add_parser("run", help="single simulation run")
    common(p)
    p.add_argument("--trace-positions", action="store_true", help="also dump per-slot node positions")
    p.set_defaults(func=cmd_run)

    for name, axis, conv in (("sweep-v", "V", _floats), ("sweep-fog", "num_fog", _ints), ("sweep-wd", "num_wd", _ints)):
        p = sub.add_parser(name, help=f"sweep over {axis}")
        common(p)
        p.add_argument("--values", type=conv)
        p.add_argument("--seeds", type=_ints)
        p.set_defaults(func=lambda a, axis=axis: _sweep(axis, a))

    p = sub.add_parser("bounds", help="check a run against the theoretical bounds")
    common(p)
    p.add_argument("--ref-factor", type=float, default=2.0, help="V multiplier of the reference run")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("verify", help="run the oracle checks")
    p.add_argument("--quick", action="store_true")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ConfigError, SimulationError, OutputError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
