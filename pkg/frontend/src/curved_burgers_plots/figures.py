"""Figure builders for the three supported kinds.

Every figure is a pure function of its input CSVs with a pinned style, so
re-rendering the same inputs produces an identical image byte stream.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .reader import SchemaError, SnapshotTable, read_snapshots

KINDS = ("profiles-compare", "invariant-field", "time-stack")

_STYLE = {
    "figure.figsize": (8.0, 5.0),
    "figure.dpi": 110,
    "savefig.dpi": 150,
    "font.size": 11,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.6,
}

_MARKERS = ("+", ".", "x", "s", "d")


@dataclass
class FigureSpec:
    kind: str
    inputs: tuple
    output: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaError(f"unknown figure kind {self.kind!r}; choose from {KINDS}")
        if not self.inputs:
            raise SchemaError("at least one input CSV is required")
        if self.kind == "time-stack" and len(self.inputs) != 1:
            raise SchemaError("time-stack takes exactly one input CSV")


@dataclass
class FigureResult:
    """Output path plus the series that were drawn (for checks and tests)."""

    path: str
    series: dict = field(default_factory=dict)


def _finish(fig, spec: FigureSpec) -> None:
    out = Path(spec.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, metadata={"Software": "curved-burgers-plots"})
    plt.close(fig)


def _profiles_compare(spec: FigureSpec, tables: list[SnapshotTable]) -> FigureResult:
    result = FigureResult(spec.output)
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        first = tables[0]
        ax.plot(first.r, first.at("u", 0), "k--", label="initial", linewidth=1.0)
        result.series["initial"] = first.at("u", 0)
        for i, table in enumerate(tables):
            final = table.at("u", len(table.times) - 1)
            ax.plot(table.r, final, marker=_MARKERS[i % len(_MARKERS)],
                    markersize=4, label=table.label)
            result.series[table.label] = final
        ax.set_xlabel("r")
        ax.set_ylabel("u")
        ax.set_title(f"solution profiles at t = {first.times[-1]:g}")
        ax.legend()
        _finish(fig, spec)
    return result


def _invariant_field(spec: FigureSpec, tables: list[SnapshotTable]) -> FigureResult:
    result = FigureResult(spec.output)
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        for i, table in enumerate(tables):
            k = table.at("K_invariant", len(table.times) - 1)
            ax.plot(table.r, k, marker=_MARKERS[i % len(_MARKERS)],
                    markersize=4, label=table.label)
            result.series[table.label] = k
        ax.set_xlabel("r")
        ax.set_ylabel("steady invariant")
        ax.set_title(f"steady-family invariant at t = {tables[0].times[-1]:g}")
        ax.legend()
        _finish(fig, spec)
    return result


def _time_stack(spec: FigureSpec, tables: list[SnapshotTable]) -> FigureResult:
    table = tables[0]
    result = FigureResult(spec.output)
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        cmap = plt.get_cmap("viridis")
        n = len(table.times)
        for i in range(n):
            shade = cmap(i / max(n - 1, 1))
            label = f"t = {table.times[i]:g}" if i in (0, n - 1) else None
            ax.plot(table.r, table.at("u", i), color=shade, label=label)
            result.series[f"t={table.times[i]:g}"] = table.at("u", i)
        ax.set_xlabel("r")
        ax.set_ylabel("u")
        ax.set_title(f"{table.label}: evolution over {n} snapshots")
        ax.legend()
        _finish(fig, spec)
    return result


_BUILDERS = {
    "profiles-compare": _profiles_compare,
    "invariant-field": _invariant_field,
    "time-stack": _time_stack,
}


def make_figure(spec: FigureSpec) -> FigureResult:
    """Render the requested figure; raises SchemaError on bad inputs."""
    tables = [read_snapshots(p) for p in spec.inputs]
    return _BUILDERS[spec.kind](spec, tables)
