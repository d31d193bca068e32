"""Render reinsure-lab CSV outputs into figure files.

This package never recomputes model quantities: it validates each CSV
against its documented schema and draws the columns as they are.  Posterior,
count and retention columns are right-continuous step processes and are
drawn with post-step rendering; surplus paths are drawn as lines.

    render_figures <csv-dir> <out-dir> [--format png|svg]

expects the file names the reinsure-lab CLI writes (filter.csv, bounds.csv,
surplus_*.csv, values.csv) and emits one image per figure kind.
"""

from __future__ import annotations

import argparse
import csv
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

FIGURE_KINDS = ("filter", "bounds", "surplus", "value-table")

# trajectory colors follow the reference figures: red/orange bounds,
# black/blue sample paths, red full reinsurance
DEFAULT_COLORS = {
    "apriori_upper": "red",
    "apriori_lower": "orange",
    "b_ce_1": "black",
    "b_ce_2": "blue",
}
SURPLUS_COLOR_HINTS = (("full", "red"), ("constant", "blue"), ("certainty", "black"))


class SchemaError(ValueError):
    """A CSV does not match its documented schema."""


@dataclass
class FigureJob:
    """One rendering task: input CSV file(s), figure kind, output path."""

    inputs: list
    kind: str
    output: Path
    colors: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in FIGURE_KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}")


def _read_csv(path) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise SchemaError(f"{path}: empty file")
    return rows[0], rows[1:]


def _column(rows, idx) -> np.ndarray:
    return np.array([row[idx] for row in rows], dtype=float)


def _check_header(path, header, expected) -> None:
    """expected: list of exact names or compiled patterns, in order."""
    for i, spec in enumerate(expected):
        if i >= len(header):
            name = spec if isinstance(spec, str) else spec.pattern
            raise SchemaError(f"{path}: missing column '{name}'")
        got = header[i]
        ok = (got == spec) if isinstance(spec, str) else bool(spec.fullmatch(got))
        if not ok:
            name = spec if isinstance(spec, str) else spec.pattern
            raise SchemaError(f"{path}: unexpected column '{got}' (wanted '{name}')")
    if len(header) > len(expected):
        raise SchemaError(f"{path}: unexpected column '{header[len(expected)]}'")


def _validate_filter_header(path, header):
    if not header or header[0] != "t":
        raise SchemaError(f"{path}: unexpected column '{header[0] if header else ''}' (wanted 't')")
    m = 0
    while 1 + m < len(header) and re.fullmatch(rf"p_{m + 1}", header[1 + m]):
        m += 1
    if m == 0:
        raise SchemaError(f"{path}: missing column 'p_1'")
    expected = ["t"] + [f"p_{j}" for j in range(1, m + 1)] + ["lambda_hat"]
    rest = header[len(expected):]
    nq = 0
    while nq < len(rest) and re.fullmatch(rf"q_{nq + 1}", rest[nq]):
        nq += 1
    if nq == 0:
        raise SchemaError(f"{path}: missing column 'q_1'")
    expected += [f"q_{k}" for k in range(1, nq + 1)] + ["event"]
    _check_header(path, header, expected)
    return m, nq


def render(job: FigureJob):
    """Render one figure job; returns the matplotlib figure after saving."""
    renderer = {
        "filter": _render_filter,
        "bounds": _render_bounds,
        "surplus": _render_surplus,
        "value-table": _render_values,
    }[job.kind]
    fig = renderer(job)
    job.output.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(job.output)
    return fig


def _render_filter(job: FigureJob):
    path = job.inputs[0]
    header, rows = _read_csv(path)
    m, _ = _validate_filter_header(path, header)
    t = _column(rows, 0)
    fig, ax = plt.subplots(figsize=(9, 5))
    for j in range(m):
        ax.plot(t, _column(rows, 1 + j), drawstyle="steps-post",
                color=job.colors.get(f"p_{j + 1}"), label=f"p_{j + 1}")
    events = _column(rows, len(header) - 1)
    for te in t[events > 0]:
        ax.axvline(te, color="0.85", linewidth=0.5, zorder=0)
    ax.set_xlabel("t")
    ax.set_ylabel("posterior probability")
    ax.set_ylim(-0.02, 1.02)
    ax.legend()
    ax.set_title("intensity posterior along one scenario")
    return fig


def _render_bounds(job: FigureJob):
    path = job.inputs[0]
    header, rows = _read_csv(path)
    base = ["t", "apriori_lower", "apriori_upper"]
    _check_header(path, header[:3], base)
    trajectories = header[3:]
    if not trajectories:
        raise SchemaError(f"{path}: missing column 'b_ce'")
    for name in trajectories:
        if not re.fullmatch(r"b_ce(_\d+)?", name):
            raise SchemaError(f"{path}: unexpected column '{name}' (wanted 'b_ce*')")
    t = _column(rows, 0)
    fig, ax = plt.subplots(figsize=(9, 5))
    colors = {**DEFAULT_COLORS, **job.colors}
    ax.plot(t, _column(rows, 2), color=colors["apriori_upper"], label="a-priori upper")
    ax.plot(t, _column(rows, 1), color=colors["apriori_lower"], label="a-priori lower")
    fallback = ["black", "blue", "darkgreen", "purple"]
    for k, name in enumerate(trajectories):
        color = colors.get(name, fallback[k % len(fallback)])
        ax.plot(t, _column(rows, 3 + k), drawstyle="steps-post", color=color, label=name)
    ax.set_xlabel("t")
    ax.set_ylabel("retention level")
    ax.set_ylim(-0.02, 1.02)
    ax.legend()
    ax.set_title("retention bounds and certainty-equivalent paths")
    return fig


def _surplus_color(label: str, k: int) -> str:
    for needle, color in SURPLUS_COLOR_HINTS:
        if needle in label:
            return color
    return f"C{k}"


def _render_surplus(job: FigureJob):
    fig, ax = plt.subplots(figsize=(9, 5))
    event_times = None
    for k, path in enumerate(job.inputs):
        header, rows = _read_csv(path)
        _check_header(path, header, ["t", "X", "b", "xi", "event"])
        t = _column(rows, 0)
        x = _column(rows, 1)
        label = Path(path).stem.removeprefix("surplus_")
        ax.plot(t, x, color=job.colors.get(label, _surplus_color(label, k)), label=label)
        if event_times is None:
            events = _column(rows, 4)
            event_times = t[events > 0]
    for te in event_times if event_times is not None else []:
        ax.axvline(te, color="0.9", linewidth=0.5, zorder=0)
    ax.set_xlabel("t")
    ax.set_ylabel("surplus")
    ax.legend()
    ax.set_title("surplus paths under a shared scenario")
    return fig


def _render_values(job: FigureJob):
    path = job.inputs[0]
    header, rows = _read_csv(path)
    _check_header(path, header, ["strategy", "n_paths", "mean_utility", "std_err", "entropic_risk"])
    fig, ax = plt.subplots(figsize=(9, 1.0 + 0.4 * len(rows)))
    ax.axis("off")
    table = ax.table(cellText=rows, colLabels=header, loc="center")
    table.auto_set_font_size(False)
    table.set_fontsize(9)
    table.scale(1.0, 1.4)
    ax.set_title("strategy comparison")
    return fig


def discover_jobs(csv_dir: Path, out_dir: Path, fmt: str) -> list[FigureJob]:
    jobs = []
    if (csv_dir / "filter.csv").exists():
        jobs.append(FigureJob([csv_dir / "filter.csv"], "filter", out_dir / f"filter.{fmt}"))
    if (csv_dir / "bounds.csv").exists():
        jobs.append(FigureJob([csv_dir / "bounds.csv"], "bounds", out_dir / f"bounds.{fmt}"))
    surplus = sorted(csv_dir.glob("surplus_*.csv"))
    if surplus:
        jobs.append(FigureJob(surplus, "surplus", out_dir / f"surplus.{fmt}"))
    if (csv_dir / "values.csv").exists():
        jobs.append(FigureJob([csv_dir / "values.csv"], "value-table", out_dir / f"values.{fmt}"))
    return jobs


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="render_figures",
                                     description="render reinsure-lab CSV outputs as figures")
    parser.add_argument("csv_dir", help="directory holding the CLI's CSV files")
    parser.add_argument("out_dir", help="directory for the rendered images")
    parser.add_argument("--format", choices=("png", "svg"), default="png")
    args = parser.parse_args(argv)

    csv_dir, out_dir = Path(args.csv_dir), Path(args.out_dir)
    jobs = discover_jobs(csv_dir, out_dir, args.format)
    if not jobs:
        print(f"no reinsure-lab CSV files found in {csv_dir}", file=sys.stderr)
        return 2
    try:
        for job in jobs:
            fig = render(job)
            plt.close(fig)
            print(f"wrote {job.output}")
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
