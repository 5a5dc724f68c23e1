"""Result persistence: per-trial CSV plus a JSON summary.

CSV files hold only deterministic columns so a replay with the same spec and
seed reproduces them byte for byte; wall-clock time goes to the JSON only.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .randomness import GENERATOR_FAMILY


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def write_outputs(
    out_dir: str | Path,
    stem: str,
    header: Sequence[str],
    rows: Iterable[Sequence],
    summary: dict,
    spec: dict,
    constants_sha256: str | None,
    wall_clock: float,
) -> tuple[Path, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"{stem}.csv"
    json_path = out / f"{stem}.json"
    csv_path.write_text(csv_text(header, rows))
    payload = {
        "spec": spec,
        "seed": spec.get("seed"),
        "generator": GENERATOR_FAMILY,
        "constants_sha256": constants_sha256,
        "wall_clock_seconds": wall_clock,
        "summary": summary,
    }
    json_path.write_text(json.dumps(_clean(payload), indent=2, sort_keys=True) + "\n")
    return csv_path, json_path
