"""CSV / JSON writers for run series, sweep tables, bounds and manifests."""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable

from . import __version__
from .config import config_hash, config_to_dict
from .model import RUN_RECORD_COLUMNS
from .oracle import BoundsReport
from .simulation import SUMMARY_COLUMNS, RunResult, SummaryRow


class OutputError(OSError):
    pass


def _open(path: Path):
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        return open(path, "w", newline="", encoding="utf-8")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc


def write_csv(path: Path, header: Iterable[str], rows: Iterable[list]) -> Path:
    with _open(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(list(header))
        w.writerows(rows)
    return path


def write_json(path: Path, doc) -> Path:
    with _open(path) as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def write_slots(path: Path, result: RunResult) -> Path:
    if not result.records:
        raise ValueError("no slots recorded")
    return write_csv(path, RUN_RECORD_COLUMNS, (r.as_row() for r in result.records))


def write_throughput(path: Path, result: RunResult) -> Path:
    rows = ([i, a, g] for i, (a, g) in enumerate(zip(result.mean_admitted, result.mean_gamma)))
    return write_csv(path, ("wd", "mean_admitted", "mean_gamma"), rows)


def manifest(runs: dict[str, RunResult], base=None) -> dict:
    entries = [
        {
            "tag": tag,
            "rng_seed": res.cfg.rng_seed,
            "config_hash": config_hash(res.cfg),
            "config": config_to_dict(res.cfg),
        }
        for tag, res in runs.items()
    ]
    top = base if base is not None else next(iter(runs.values())).cfg
    return {"tool": "fogsched", "version": __version__, "config": config_to_dict(top), "runs": entries}


def emit_outputs(
    runs: dict[str, RunResult],
    table: list[SummaryRow],
    out_dir: str | Path,
    bounds: list[BoundsReport] | None = None,
    base=None,
) -> list[Path]:
    """Write ``slots_<tag>.csv`` and ``throughput_<tag>.csv`` per run, then
    ``summary.csv``, ``bounds.json`` (when given) and ``manifest.json``."""
    out = Path(out_dir)
    if not runs or any(not r.records for r in runs.values()):
        raise ValueError("no slots recorded")
    written = []
    for tag, res in runs.items():
        written.append(write_slots(out / f"slots_{tag}.csv", res))
        written.append(write_throughput(out / f"throughput_{tag}.csv", res))
        if res.positions:
            written.append(write_csv(out / f"positions_{tag}.csv", ("t", "kind", "index", "x", "y"), res.positions))
    written.append(write_csv(out / "summary.csv", SUMMARY_COLUMNS, (r.as_row() for r in table)))
    if bounds is not None:
        written.append(write_json(out / "bounds.json", {"points": [b.to_dict() for b in bounds]}))
    written.append(write_json(out / "manifest.json", manifest(runs, base)))
    return written
