"""Report tables, CSV/JSON emission and plot-ready series.

Every CSV starts with a provenance block of ``#``-prefixed lines::

    # lens-report: collab-top
    # tool_version: 0.1.0
    # config_sha256: ...
    # input_sha256: ...

followed by a header row and data rows. Floats are written in shortest
round-trip form; undefined values are empty cells, never numbers.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .careers import BIN_LABELS, PeriodProfile, TransitionMatrix, VenueMixHistogram
from .dynamics import GrowthComparison, GrowthSeries, StabilityRow
from .graph import CollaborationRow


@dataclass
class MetricReport:
    kind: str
    header: list[str]
    rows: list[list] = field(default_factory=list)
    provenance: dict[str, str] = field(default_factory=dict)


def format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (tuple, list)):
        return ";".join(str(x) for x in v)
    return str(v)


def render_csv(report: MetricReport) -> str:
    buf = io.StringIO()
    buf.write(f"# lens-report: {report.kind}\n")
    prov = {"tool_version": __version__, **report.provenance}
    for k in sorted(prov):
        buf.write(f"# {k}: {prov[k]}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(report.header)
    for row in report.rows:
        w.writerow([format_value(v) for v in row])
    return buf.getvalue()


def render_json(report: MetricReport) -> str:
    doc = {
        "kind": report.kind,
        "provenance": {"tool_version": __version__, **report.provenance},
        "header": report.header,
        "rows": [[v if not isinstance(v, tuple) else list(v) for v in row] for row in report.rows],
    }
    return json.dumps(doc, indent=1, sort_keys=True, ensure_ascii=False) + "\n"


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".partial")
    tmp.write_text(text, encoding="utf-8", newline="")
    os.replace(tmp, path)


def write_report(report: MetricReport, path: str | Path, as_json: bool = False) -> Path:
    path = Path(path)
    _atomic_write(path, render_json(report) if as_json else render_csv(report))
    return path


def read_report(path: str | Path) -> MetricReport:
    """Parse a CSV written by :func:`write_report` (values stay strings)."""
    prov: dict[str, str] = {}
    kind = ""
    body = []
    with open(path, encoding="utf-8", newline="") as fh:
        for line in fh:
            if line.startswith("# "):
                k, _, v = line[2:].rstrip("\n").partition(": ")
                if k == "lens-report":
                    kind = v
                else:
                    prov[k] = v
            else:
                body.append(line)
    rows = list(csv.reader(body))
    return MetricReport(kind, rows[0] if rows else [], rows[1:], prov)


def data_digest(path: str | Path) -> str:
    """Digest of header and data rows, ignoring the provenance block."""
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for line in fh:
            if not line.startswith(b"# "):
                h.update(line)
    return h.hexdigest()


def file_digest(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


# builders

COLLAB_HEADER = [
    "area",
    "vertexes",
    "authors_per_paper_first_year",
    "authors_per_paper_final_year",
    "coauthors_in_area_first_year",
    "coauthors_in_area_avg",
    "coauthors_in_set",
    "coauthors_in_cs",
    "singleton_pct",
    "cc",
    "first_year",
    "final_year",
    "flags",
]


def collab_report(rows: Sequence[CollaborationRow], set_label: str) -> MetricReport:
    return MetricReport(
        f"collab-{set_label.lower()}",
        COLLAB_HEADER,
        [
            [
                r.area_id,
                r.vertex_count,
                r.authors_per_paper_first_year,
                r.authors_per_paper_final_year,
                r.coauthors_in_area_first_year,
                r.coauthors_in_area_avg,
                r.coauthors_in_set,
                r.coauthors_in_cs,
                r.singleton_pct,
                r.clustering_coefficient,
                r.first_year,
                r.final_year,
                r.flags,
            ]
            for r in rows
        ],
    )


STABILITY_HEADER = [
    "area",
    "conference",
    "first_year",
    "avg_newcomers",
    "avg_pure_newcomers",
    "avg_leavers",
    "flags",
]


def stability_report(rows: Sequence[StabilityRow], set_label: str) -> MetricReport:
    return MetricReport(
        f"stability-{set_label.lower()}",
        STABILITY_HEADER,
        [
            [r.area_id, r.conference, r.first_year, r.avg_newcomers, r.avg_pure_newcomers, r.avg_leavers, r.flags]
            for r in rows
        ],
    )


GROWTH_HEADER = ["scope", "year", "publications", "abs_growth", "rel_growth", "reference"]


def growth_report(series: Iterable[GrowthSeries]) -> MetricReport:
    rows = []
    for s in series:
        for y in s.years:
            rows.append(
                [s.label, y, s.counts[y], s.abs_growth.get(y), s.rel_growth.get(y), s.reference]
            )
    return MetricReport("growth", GROWTH_HEADER, rows)


def compare_report(cmp: GrowthComparison) -> MetricReport:
    rows: list[list] = [[y, t, n, v] for y, t, n, v in cmp.rows]
    rows.append(["mean", cmp.mean_top, cmp.mean_nontop, ""])
    rows.append(["share_nontop_higher", "", cmp.share_nontop_higher, f"{cmp.nontop_higher}/{cmp.years_compared} ties={cmp.ties}"])
    return MetricReport("compare-growth", ["year", "top_abs_growth", "nontop_abs_growth", "higher"], rows)


def transitions_report(matrix: TransitionMatrix, top: Mapping[str, list[str]]) -> MetricReport:
    rows = []
    for s in matrix.areas:
        ranks = {t: i + 1 for i, t in enumerate(top.get(s, []))}
        for t in matrix.areas:
            if t == s:
                continue
            rows.append([s, matrix.support[s], t, matrix.entries[(s, t)], ranks.get(t)])
    return MetricReport(
        "transitions", ["start_area", "support", "target_area", "probability", "rank"], rows
    )


def careers_report(distributions: Mapping[str, Mapping[int, float]]) -> MetricReport:
    rows = [[scope, length, pct] for scope, dist in distributions.items() for length, pct in dist.items()]
    return MetricReport("careers", ["scope", "career_length", "pct_authors"], rows)


def productivity_report(profiles: Iterable[PeriodProfile]) -> MetricReport:
    rows = []
    for p in profiles:
        for i, (m, n) in enumerate(zip(p.mean_pubs_per_period, p.authors_per_period), start=1):
            rows.append([p.cohort, i, m, n])
    return MetricReport("productivity", ["cohort", "period", "mean_pubs", "authors"], rows)


def venue_mix_report(hists: Mapping[str, VenueMixHistogram]) -> MetricReport:
    rows = []
    for label, h in hists.items():
        for b, (pct, n) in enumerate(zip(h.percentages, h.counts)):
            rows.append([label, BIN_LABELS[b], n, pct])
    return MetricReport("venue-mix", ["area", "top_share_bin", "authors", "pct_authors"], rows)


# plot data

PLOT_HEADER = ["x", "series", "y"]


def _plot_rows(report: MetricReport) -> list[list]:
    kind = report.kind
    col = {name: i for i, name in enumerate(report.header)}
    rows = report.rows
    if kind == "careers":
        return [[r[col["career_length"]], r[col["scope"]], r[col["pct_authors"]]] for r in rows]
    if kind == "growth":
        # set-level scopes plot absolute growth, areas plot growth relative to the set
        out = []
        for r in rows:
            is_area = r[col["reference"]] not in (None, "")
            y = r[col["rel_growth"]] if is_area else r[col["abs_growth"]]
            if y not in (None, ""):
                out.append([r[col["year"]], r[col["scope"]], y])
        return out
    if kind == "productivity":
        return [[r[col["period"]], r[col["cohort"]], r[col["mean_pubs"]]] for r in rows]
    if kind == "venue-mix":
        return [[r[col["top_share_bin"]], r[col["area"]], r[col["pct_authors"]]] for r in rows]
    if kind == "compare-growth":
        out = []
        for r in rows:
            if isinstance(r[0], int):
                for label, v in (("TOP", r[1]), ("NONTOP", r[2])):
                    if v is not None:
                        out.append([r[0], label, v])
        return out
    raise ValueError(f"report kind {kind!r} has no plot series")


def emit_plot_data(report: MetricReport, path: str | Path) -> Path:
    """Write a tidy (x, series, y) table for the figure backed by ``report``."""
    plot = MetricReport(f"plot-{report.kind}", PLOT_HEADER, _plot_rows(report), dict(report.provenance))
    return write_report(plot, path)
