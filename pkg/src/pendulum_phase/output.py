"""CSV / JSON / SVG writers for CLI results.

CSV: UTF-8, ``\\n`` line endings, mandatory header, floats with 17 significant
digits.  JSON: one object with ``meta`` and a ``rows`` or ``orbit`` payload,
validated by ``schema/output.schema.json``.  SVG: standalone document whose
viewBox spans the main interval in phi.
"""

from __future__ import annotations

import io
import json
import math
from importlib import resources
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from . import __version__
from .integrate import TrajectorySegment
from .model import ModelParams

__all__ = ["format_value", "to_csv", "to_json", "load_schema", "portrait_svg",
           "portrait_rows"]


def format_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def to_csv(rows: Sequence[Mapping[str, Any]], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    buf.write(",".join(columns) + "\n")
    for row in rows:
        cells = []
        for col in columns:
            cell = format_value(row.get(col))
            if any(ch in cell for ch in ',"\n'):
                cell = '"' + cell.replace('"', '""') + '"'
            cells.append(cell)
        buf.write(",".join(cells) + "\n")
    return buf.getvalue()


def _jsonable(value: Any):
    if isinstance(value, Mapping):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def to_json(command: str, params: Mapping[str, Any], tolerances: Mapping[str, Any],
            rows: Iterable[Mapping[str, Any]] | None = None,
            orbit: Mapping[str, Any] | None = None) -> str:
    doc: dict[str, Any] = {
        "meta": {
            "command": command,
            "version": __version__,
            "params": _jsonable(params),
            "tolerances": _jsonable(tolerances),
        }
    }
    if rows is not None:
        doc["rows"] = _jsonable(list(rows))
    if orbit is not None:
        doc["orbit"] = _jsonable(orbit)
    return json.dumps(doc, indent=2) + "\n"


def load_schema() -> dict:
    text = resources.files("pendulum_phase").joinpath("schema/output.schema.json").read_text(
        encoding="utf-8")
    return json.loads(text)


# ---------------------------------------------------------------- portraits

def _z_extent(params: ModelParams) -> float:
    if params.gamma > 0:
        return (params.beta + 1.0) / params.gamma + 1.0
    # no line L without damping; the conservative separatrix peaks at z = 2
    return 3.0


def _fmt(x: float) -> str:
    return format(float(x), ".6g")


def _polyline(phi: np.ndarray, z: np.ndarray, cls: str) -> str:
    pts = " ".join(f"{_fmt(p)},{_fmt(-v)}" for p, v in zip(phi, z))
    return f'<polyline class="{cls}" points="{pts}"/>'


def portrait_svg(portrait, overlays: Iterable[str] = ("g", "equilibria", "shot")) -> str:
    """Render a :class:`~pendulum_phase.sweep.Portrait` as an SVG string.

    z is drawn upwards; SVG coordinates are ``(phi, -z)``.
    """
    overlays = set(overlays)
    params = portrait.params
    lo, hi = portrait.interval
    zmax = _z_extent(params)
    width = hi - lo
    stroke = _fmt(width / 600)
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{_fmt(lo)} {_fmt(-zmax)} '
        f'{_fmt(width)} {_fmt(2 * zmax)}" width="800" height="{int(800 * 2 * zmax / width)}" '
        'preserveAspectRatio="none">',
        f'<title>beta={params.beta:g} gamma={params.gamma:g}</title>',
        f'<style>polyline,line{{fill:none;stroke-width:{stroke}}} '
        '.trajectory{stroke:#4a6fa5} .g{stroke:#2a9d4b;stroke-dasharray:0.05} '
        '.shot{stroke:#c0392b} .axis{stroke:#888}</style>',
        f'<line class="axis" x1="{_fmt(lo)}" y1="0" x2="{_fmt(hi)}" y2="0"/>',
        '<g id="trajectories">',
    ]
    for seg in portrait.trajectories:
        if isinstance(seg, TrajectorySegment) and len(seg.phi) > 1:
            out.append(_polyline(seg.phi, seg.z, "trajectory"))
    out.append("</g>")
    if "g" in overlays and portrait.g_curve is not None:
        phi, z = portrait.g_curve
        out.append('<g id="curve-g">' + _polyline(phi, z, "g") + "</g>")
    if "shot" in overlays and portrait.shot is not None:
        seg = getattr(portrait.shot, "trajectory", portrait.shot)
        out.append('<g id="shot">' + _polyline(seg.phi, seg.z, "shot") + "</g>")
    if "equilibria" in overlays and portrait.equilibria:
        out.append('<g id="equilibria">')
        r = _fmt(width / 120)
        for fp in portrait.equilibria:
            out.append(f'<circle class="{fp.kind.value}" cx="{_fmt(fp.phi)}" cy="0" r="{r}"/>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def portrait_rows(portrait, overlays: Iterable[str] = ("g", "equilibria", "shot")
                  ) -> list[dict]:
    """Flatten a portrait into ``(curve, kind, phi, z)`` rows for CSV output."""
    overlays = set(overlays)
    rows: list[dict] = []
    for i, seg in enumerate(portrait.trajectories):
        if isinstance(seg, TrajectorySegment):
            rows.extend({"curve": f"trajectory-{i}", "kind": "trajectory", "phi": p, "z": v}
                        for p, v in zip(seg.phi, seg.z))
    if "g" in overlays and portrait.g_curve is not None:
        rows.extend({"curve": "g", "kind": "nullcline", "phi": p, "z": v}
                    for p, v in zip(*portrait.g_curve))
    if "shot" in overlays and portrait.shot is not None:
        seg = getattr(portrait.shot, "trajectory", portrait.shot)
        rows.extend({"curve": "shot", "kind": "separatrix", "phi": p, "z": v}
                    for p, v in zip(seg.phi, seg.z))
    if "equilibria" in overlays:
        rows.extend({"curve": f"equilibrium-{fp.index}", "kind": fp.kind.value,
                     "phi": fp.phi, "z": 0.0} for fp in portrait.equilibria)
    return rows
