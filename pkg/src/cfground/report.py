"""Deterministic analysis artifacts: CSV tables and static SVG charts.

Everything rendered here is a pure function of its inputs — fixed float
formatting, no timestamps — so identical inputs produce identical bytes.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Mapping, Sequence

from .errors import ValidationError

HistRow = tuple[float, float, int]


def histogram(
    samples: Sequence[float], n_bins: int, value_range: tuple[float, float]
) -> list[HistRow]:
    """Equal-width bin counts over [lo, hi] plus two overflow buckets.

    Rows are (bin_low, bin_high, count); the first and last rows are the
    underflow and overflow buckets, so counts always sum to len(samples).
    The top in-range bin is closed at hi.
    """
    lo, hi = value_range
    if n_bins < 1:
        raise ValidationError("n_bins must be at least 1")
    if not lo < hi:
        raise ValidationError(f"empty range ({lo}, {hi})")
    counts = [0] * n_bins
    under = over = 0
    width = (hi - lo) / n_bins
    for x in samples:
        if x < lo:
            under += 1
        elif x > hi:
            over += 1
        elif x == hi:
            counts[-1] += 1
        else:
            idx = min(int((x - lo) / width), n_bins - 1)
            # The division can land on the wrong side of an edge by one ulp;
            # honor the half-open [low, high) boundaries exactly.
            if x < lo + idx * width:
                idx -= 1
            elif idx + 1 < n_bins and x >= lo + (idx + 1) * width:
                idx += 1
            counts[idx] += 1
    rows: list[HistRow] = [(-math.inf, lo, under)]
    for i in range(n_bins):
        rows.append((lo + i * width, lo + (i + 1) * width, counts[i]))
    rows.append((hi, math.inf, over))
    return rows


def _fmt(x: float) -> str:
    if x == -math.inf:
        return "-inf"
    if x == math.inf:
        return "inf"
    return f"{x:.6f}"


def write_stats_csv(stats: Mapping[str, int], path: str | Path) -> None:
    """Filtering-funnel table: no_head, no_replacement, retained, samples."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["metric", "value"])
        for key in ("no_head", "no_replacement", "retained", "samples"):
            writer.writerow([key, stats[key]])


def write_per_bin_csv(
    per_bin: Sequence[tuple[int, float | None, int]], path: str | Path
) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bin", "mean", "count"])
        for b, mean, count in per_bin:
            writer.writerow([b, "" if mean is None else _fmt(mean), count])


def write_histogram_csv(rows: Sequence[HistRow], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bin_low", "bin_high", "count"])
        for lo, hi, count in rows:
            writer.writerow([_fmt(lo), _fmt(hi), count])


def _svg_document(body: list[str], width: int, height: int) -> str:
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">'
    )
    return "\n".join([head, *body, "</svg>"]) + "\n"


def bar_chart_svg(
    values: Sequence[tuple[str, float]],
    title: str,
    y_max: float | None = None,
    width: int = 480,
    height: int = 320,
) -> str:
    """Labelled vertical bars; values may be empty (renders axes only)."""
    margin_left, margin_bottom, margin_top = 50, 40, 36
    plot_w = width - margin_left - 16
    plot_h = height - margin_top - margin_bottom
    top = max((v for _, v in values), default=0.0)
    scale_max = y_max if y_max is not None else (top if top > 0 else 1.0)

    body = [
        f'<text x="{width // 2}" y="20" text-anchor="middle" font-size="14">{title}</text>',
        f'<line x1="{margin_left}" y1="{margin_top}" x2="{margin_left}" '
        f'y2="{margin_top + plot_h}" stroke="black"/>',
        f'<line x1="{margin_left}" y1="{margin_top + plot_h}" '
        f'x2="{margin_left + plot_w}" y2="{margin_top + plot_h}" stroke="black"/>',
        f'<text x="12" y="{margin_top + 6}" font-size="10">{_fmt(scale_max)}</text>',
    ]
    n = len(values)
    if n:
        step = plot_w / n
        bar_w = step * 0.7
        for i, (label, value) in enumerate(values):
            frac = 0.0 if scale_max <= 0 else max(0.0, min(1.0, value / scale_max))
            bar_h = frac * plot_h
            x = margin_left + i * step + (step - bar_w) / 2
            y = margin_top + plot_h - bar_h
            body.append(
                f'<rect class="bar" x="{_fmt(x)}" y="{_fmt(y)}" '
                f'width="{_fmt(bar_w)}" height="{_fmt(bar_h)}" fill="#4878a8"/>'
            )
            body.append(
                f'<text x="{_fmt(x + bar_w / 2)}" y="{margin_top + plot_h + 16}" '
                f'text-anchor="middle" font-size="10">{label}</text>'
            )
    return _svg_document(body, width, height)


def per_bin_svg(per_bin: Sequence[tuple[int, float | None, int]], title: str) -> str:
    values = [(str(b), 0.0 if mean is None else mean) for b, mean, _ in per_bin]
    return bar_chart_svg(values, title, y_max=1.0)


def histogram_svg(rows: Sequence[HistRow], title: str) -> str:
    in_range = [r for r in rows if math.isfinite(r[0]) and math.isfinite(r[1])]
    values = [(_fmt((lo + hi) / 2.0)[:5], float(count)) for lo, hi, count in in_range]
    return bar_chart_svg(values, title)


def render_tables(
    stats: Mapping[str, int],
    per_bin: Mapping[str, Sequence[tuple[int, float | None, int]]],
    correlations: Mapping[str, Mapping[str, object]],
    out_dir: str | Path,
    similarity_hist: Sequence[HistRow] | None = None,
) -> list[Path]:
    """Write the analysis file set into out_dir and return the written paths.

    Layout: stats.csv, per_bin_<strategy>.csv/.svg, correlations.json, and,
    when a distribution is given, similarity_hist.csv/.svg.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    stats_path = out / "stats.csv"
    write_stats_csv(stats, stats_path)
    written.append(stats_path)

    for strategy in sorted(per_bin):
        table = per_bin[strategy]
        csv_path = out / f"per_bin_{strategy}.csv"
        write_per_bin_csv(table, csv_path)
        written.append(csv_path)
        svg_path = out / f"per_bin_{strategy}.svg"
        svg_path.write_text(
            per_bin_svg(table, f"mean score per bin ({strategy})"), encoding="utf-8"
        )
        written.append(svg_path)

    corr_path = out / "correlations.json"
    corr_path.write_text(
        json.dumps({k: correlations[k] for k in sorted(correlations)}, sort_keys=True, indent=2)
        + "\n",
        encoding="utf-8",
    )
    written.append(corr_path)

    if similarity_hist is not None:
        hist_csv = out / "similarity_hist.csv"
        write_histogram_csv(similarity_hist, hist_csv)
        written.append(hist_csv)
        hist_svg = out / "similarity_hist.svg"
        hist_svg.write_text(
            histogram_svg(similarity_hist, "random-pair cosine similarity"),
            encoding="utf-8",
        )
        written.append(hist_svg)

    return written
