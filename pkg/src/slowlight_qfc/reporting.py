"""CSV tables, JSON reports and the run manifest written beside every output."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from . import __version__

VELOCITY_NOTE = (
    "preset group velocities v1=1.25e4 m/s, v2=0.5*v1 are taken at the reference drive "
    "Omega_ref = 8 Gamma_ref; couplings G_i = Omega_ref^2 / v_i"
)


def _cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def write_table(path, columns, rows) -> Path:
    """Header row plus one line per row; floats with 17 significant digits."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
    return path


def read_table(path) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        return header, [row for row in reader if row]


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if hasattr(obj, "item"):  # numpy scalars
        return _clean(obj.item())
    return obj


def dumps(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=False)


def write_json(path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj) + "\n")
    return path


@dataclass
class RunManifest:
    config: dict
    derived: dict
    grid: dict
    command: str
    tool_version: str = __version__
    timestamp: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat())
    notes: list = field(default_factory=lambda: [VELOCITY_NOTE])
    extra: dict = field(default_factory=dict)


def manifest_path(output: Path) -> Path:
    output = Path(output)
    return output.with_name(output.stem + ".manifest.json")


def write_manifest(output, manifest: RunManifest) -> Path:
    return write_json(manifest_path(output), asdict(manifest))
