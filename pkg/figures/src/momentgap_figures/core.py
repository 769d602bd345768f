"""Shared machinery for rendering momentgap CSV outputs.

Each figure id declares the CSV columns it needs; rendering writes a PNG plus
a sidecar JSON holding exactly the plotted points, so figure correctness is
testable without image diffing.  Same CSV in, byte-stable sidecar out.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

FIGURE_IDS = ("fig1b", "fig1c", "fig3", "fig6b")

REQUIRED_COLUMNS = {
    "fig1b": ("builder", "N", "gap"),
    "fig1c": ("variant", "circuit", "N", "d", "eps_m"),
    "fig3": ("variant", "circuit", "N", "d", "eps_m"),
    "fig6b": ("graph", "n", "k", "edges", "gap_raw", "gap_normalized"),
}


class SchemaError(ValueError):
    """The input CSV does not carry the columns a figure needs."""


@dataclass(frozen=True)
class Series:
    label: str
    x: tuple[float, ...]
    y: tuple[float, ...]


@dataclass(frozen=True)
class FigureData:
    figure_id: str
    xlabel: str
    ylabel: str
    log_y: bool
    series: tuple[Series, ...]

    def sidecar_json(self) -> str:
        doc = {
            "figure": self.figure_id,
            "xlabel": self.xlabel,
            "ylabel": self.ylabel,
            "log_y": self.log_y,
            "series": [
                {"label": s.label, "x": list(s.x), "y": list(s.y)}
                for s in self.series
            ],
        }
        return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def read_rows(text: str, figure_id: str) -> list[dict]:
    if figure_id not in REQUIRED_COLUMNS:
        raise SchemaError(f"unknown figure id {figure_id!r}")
    lines = [l for l in text.splitlines() if l and not l.startswith("#")]
    if not lines:
        raise SchemaError("empty CSV: no header row")
    reader = csv.DictReader(io.StringIO("\n".join(lines)))
    header = reader.fieldnames or []
    for col in REQUIRED_COLUMNS[figure_id]:
        if col not in header:
            raise SchemaError(f"missing column {col!r} for {figure_id}")
    rows = list(reader)
    if not rows:
        raise SchemaError("empty CSV: header but no data rows")
    return rows


def _grouped_series(rows, key_fields, x_field, y_field, row_filter=None):
    groups: dict[str, list[tuple[float, float]]] = {}
    for row in rows:
        if row_filter is not None and not row_filter(row):
            continue
        label = "/".join(row[k] for k in key_fields)
        try:
            point = (float(row[x_field]), float(row[y_field]))
        except (TypeError, ValueError) as exc:
            raise SchemaError(f"non-numeric value in {x_field}/{y_field}: {exc}")
        groups.setdefault(label, []).append(point)
    if not groups:
        raise SchemaError("no rows left after filtering")
    return tuple(
        Series(label, *zip(*sorted(pts))) for label, pts in sorted(groups.items())
    )


def extract(figure_id: str, text: str) -> FigureData:
    rows = read_rows(text, figure_id)
    if figure_id == "fig1b":
        series = _grouped_series(rows, ("builder",), "N", "gap")
        return FigureData(figure_id, "sites N", "spectral gap", False, series)
    if figure_id == "fig1c":
        series = _grouped_series(
            rows, ("variant", "circuit"), "N", "eps_m",
            row_filter=lambda r: r["d"] == "1",
        )
        return FigureData(figure_id, "sites N", "multiplicative error", True, series)
    if figure_id == "fig3":
        series = _grouped_series(rows, ("variant", "circuit"), "d", "eps_m")
        return FigureData(figure_id, "periods d", "multiplicative error", True,
                          series)
    series = _grouped_series(
        rows, ("graph",), "k", "gap_raw",
        row_filter=lambda r: r["k"] != "",
    )
    flat = [r for r in rows if r["k"] == ""]
    if flat:
        base = float(flat[0]["gap_raw"])
        ks = sorted({float(r["k"]) for r in rows if r["k"] != ""})
        series = series + (Series(flat[0]["graph"], tuple(ks),
                                  tuple(base for _ in ks)),)
    return FigureData(figure_id, "clique size k", "spectral gap", False, series)


def render(figure_id: str, csv_text: str, out_path: str) -> FigureData:
    """Write the PNG and its sidecar JSON; returns the plotted data."""
    data = extract(figure_id, csv_text)
    fig, ax = plt.subplots(figsize=(5.0, 3.4), dpi=150)
    for s in data.series:
        ax.plot(s.x, s.y, marker="o", markersize=3.5, label=s.label)
    if data.log_y:
        ax.set_yscale("log")
    ax.set_xlabel(data.xlabel)
    ax.set_ylabel(data.ylabel)
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
    with open(_sidecar_path(out_path), "w", encoding="utf-8") as fh:
        fh.write(data.sidecar_json())
    return data


def _sidecar_path(out_path: str) -> str:
    stem = out_path.rsplit(".", 1)[0] if "." in out_path else out_path
    return stem + ".json"


def script_main(figure_id: str, argv=None) -> int:
    ap = argparse.ArgumentParser(
        description=f"Render {figure_id} from a momentgap CSV"
    )
    ap.add_argument("--in", dest="infile", required=True, help="input CSV")
    ap.add_argument("--out", required=True, help="output image path")
    args = ap.parse_args(argv)
    try:
        with open(args.infile, "r", encoding="utf-8") as fh:
            text = fh.read()
        render(figure_id, text, args.out)
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}")
        return 2
    return 0
