"""Verdicts, run reports and plot-ready tables."""

from __future__ import annotations

import io
import json
import math
import os
from dataclasses import dataclass, field
from importlib import resources
from typing import Any, Sequence

from . import __version__


@dataclass(frozen=True)
class Verdict:
    name: str
    passed: bool
    value: float
    target: float
    tolerance: float
    note: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: value={fmt(self.value)} target={fmt(self.target)} tol={fmt(self.tolerance)}" + (
            f" ({self.note})" if self.note else ""
        )


def close(name, value, target, tol, relative=False, note="") -> Verdict:
    err = abs(value - target)
    if relative:
        err = err / abs(target) if target != 0 else err
    return Verdict(name, bool(err <= tol), float(value), float(target), float(tol), note)


def within_se(name, value, target, se, k=4.0, note="") -> Verdict:
    ok = abs(value - target) <= k * se
    return Verdict(name, bool(ok), float(value), float(target), float(k * se), note)


def at_least(name, value, bound, note="") -> Verdict:
    return Verdict(name, bool(value >= bound), float(value), float(bound), 0.0, note)


def at_most(name, value, bound, note="") -> Verdict:
    return Verdict(name, bool(value <= bound), float(value), float(bound), 0.0, note)


def fmt(x) -> str:
    """Shortest round-trip text for a number; stable across runs."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def _clean(value):
    if isinstance(value, float):
        if math.isfinite(value):
            return value
        return None
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if hasattr(value, "item"):
        return _clean(value.item())
    return value


@dataclass
class Table:
    columns: list
    rows: list

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(self.columns) + "\n")
        for row in self.rows:
            buf.write(",".join(fmt(v) if not isinstance(v, str) else v for v in row) + "\n")
        return buf.getvalue()


@dataclass
class Report:
    """Run report serialised to report.json.

    The timestamp comes from ``SOURCE_DATE_EPOCH`` when set so that
    reruns stay byte-identical; otherwise it is omitted.
    """

    command: str
    seed: int | None
    config: dict
    scalars: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict)
    verdicts: list = field(default_factory=list)

    def scalar(self, name: str, value, provenance: str = "computed", **extra) -> None:
        entry = {"value": _clean(value), "provenance": provenance}
        entry.update({k: _clean(v) for k, v in extra.items()})
        self.scalars[name] = entry

    def table(self, name: str, columns: Sequence[str], rows) -> Table:
        t = Table(list(columns), [list(r) for r in rows])
        self.tables[name] = t
        return t

    def add(self, verdicts) -> None:
        if isinstance(verdicts, Verdict):
            verdicts = [verdicts]
        self.verdicts.extend(verdicts)

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)

    def to_dict(self) -> dict:
        epoch = os.environ.get("SOURCE_DATE_EPOCH")
        meta = {
            "version": __version__,
            "command": self.command,
            "seed": self.seed,
            "timestamp": int(epoch) if epoch and epoch.isdigit() else None,
            "config": _clean(self.config),
        }
        return {
            "metadata": meta,
            "scalars": self.scalars,
            "tables": {k: {"columns": t.columns, "rows": _clean(t.rows)} for k, t in self.tables.items()},
            "verdicts": [
                {
                    "name": v.name,
                    "passed": v.passed,
                    "value": _clean(v.value),
                    "target": _clean(v.target),
                    "tolerance": _clean(v.tolerance),
                    "note": v.note,
                }
                for v in self.verdicts
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def report_schema() -> dict:
    text = resources.files("rmuq").joinpath("schemas/report.schema.json").read_text()
    return json.loads(text)


PLOT_KINDS = {
    "density": ["x", "density"],
    "band": ["x", "density", "lower", "upper"],
    "heatmap": ["y", "z", "value"],
    "spectrum": ["k", "eigenvalue", "index"],
    "line": ["x", "y"],
}


def emit_plot_data(kind: str, rows, extra_columns: Sequence[str] = ()) -> Table:
    """Plot-ready table with the column layout of ``kind``."""
    if kind not in PLOT_KINDS:
        raise ValueError(f"unknown plot kind {kind!r}")
    cols = PLOT_KINDS[kind] + list(extra_columns)
    rows = [list(r) for r in rows]
    if any(len(r) != len(cols) for r in rows):
        raise ValueError(f"{kind} rows need {len(cols)} columns")
    return Table(cols, rows)


def svg_lines(table: Table, width: int = 480, height: int = 320) -> str:
    """Minimal SVG polyline of the second column against the first."""
    xs = [float(r[0]) for r in table.rows]
    ys = [float(r[1]) for r in table.rows]
    if not xs:
        return '<svg xmlns="http://www.w3.org/2000/svg"/>\n'
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    sx = (width - 20) / (x1 - x0 or 1.0)
    sy = (height - 20) / (y1 - y0 or 1.0)
    pts = " ".join(f"{10 + (x - x0) * sx:.2f},{height - 10 - (y - y0) * sy:.2f}" for x, y in zip(xs, ys))
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">'
        f'<polyline fill="none" stroke="black" points="{pts}"/></svg>\n'
    )


def svg_heatmap(values: Sequence[Sequence[float]], cell: int = 4) -> str:
    rows = [list(map(float, r)) for r in values]
    lo = min(min(r) for r in rows)
    hi = max(max(r) for r in rows)
    span = hi - lo or 1.0
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{cell * len(rows[0])}" height="{cell * len(rows)}">'
    ]
    for i, r in enumerate(rows):
        for j, v in enumerate(r):
            level = int(255 * (v - lo) / span)
            out.append(
                f'<rect x="{j * cell}" y="{i * cell}" width="{cell}" height="{cell}" '
                f'fill="rgb({level},{level},{255 - level})"/>'
            )
    out.append("</svg>\n")
    return "".join(out)


def dump(obj: Any) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n"
