"""Command-line entry point: ``lens <subcommand> ...``.

Examples::

    lens ingest --xml dblp.xml.gz --cutoff-year 2009 --out records.jsonl
    lens venues --records records.jsonl --print-merges
    lens collab --records records.jsonl --set top --out collab.csv
    lens report-all --xml dblp.xml --out-dir out/ --jobs 4

Analytic subcommands accept either ``--xml`` (ingested once, then cached in
``$LENS_CACHE_DIR``) or ``--records`` (a file written by ``lens ingest``).
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__, report
from .ingest import DEFAULT_CUTOFF_YEAR, IngestError
from .pipeline import ConfigError, RunConfig, build_analysis, load_corpus, run_pipeline, stamp
from .records import RecordFileError, ingest_to_file
from .venues import AreaConfigError

log = logging.getLogger("lens")


def _global_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    g.add_argument("--xml", type=Path, help="DBLP XML dump (plain or gzip)")
    g.add_argument("--records", type=Path, help="record file written by 'lens ingest'")
    g.add_argument("--dtd", type=Path, help="DTD to use instead of the one next to the dump")
    g.add_argument("--cutoff-year", type=int, default=None, help=f"last admitted year (default {DEFAULT_CUTOFF_YEAR})")
    g.add_argument("--config", type=Path, help="YAML run config; command-line flags override it")
    g.add_argument("--top-areas", type=Path, help="TOP area config (default: shipped)")
    g.add_argument("--nontop-areas", type=Path, help="NONTOP area config (default: shipped)")
    g.add_argument("--out-dir", type=Path, help="output directory for report-all")
    g.add_argument("--jobs", type=int, default=None, help="parallel analytics workers")
    g.add_argument("--json", action="store_true", help="also write JSON mirrors / write JSON instead of CSV")
    g.add_argument("-v", "--verbose", action="store_true")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _global_flags()
    parser = argparse.ArgumentParser(prog="lens", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"lens {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", parents=[common], help="parse the XML dump into a record file")
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("venues", parents=[common], help="canonical venue registry summary")
    p.add_argument("--print-merges", action="store_true", help="list series published under several names")

    p = sub.add_parser("collab", parents=[common], help="collaboration trends per area")
    p.add_argument("--set", choices=["top", "nontop"], default="top")
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("careers", parents=[common], help="career length distributions")
    p.add_argument("--scope", choices=["top", "cs", "all"], default="all")
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("transitions", parents=[common], help="area transition matrix")
    p.add_argument("--top-k", type=int, default=None)
    p.add_argument("--min-career", type=int, default=None)
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("venue-mix", parents=[common], help="share of top-venue papers per author")
    p.add_argument("--per-area", action="store_true")
    p.add_argument("--no-exclusions", action="store_true", help="keep CBIO and WWW in the per-area split")
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("productivity", parents=[common], help="publications per 5-year career period")
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("growth", parents=[common], help="absolute and relative growth series")
    p.add_argument("--scope", default="all", help="all | cs | top | nontop | <area> | NONTOP/<area>")
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("compare-growth", parents=[common], help="TOP vs NONTOP absolute growth")
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("stability", parents=[common], help="newcomers, pure newcomers, leavers")
    p.add_argument("--set", choices=["top", "nontop"], default="top")
    p.add_argument("--inclusive", action="store_true", help="average over all years, trivial ones included")
    p.add_argument("--out", type=Path, required=True)

    sub.add_parser("report-all", parents=[common], help="every report plus plot data")
    return parser


def _config(args) -> RunConfig:
    overrides = {
        "xml_path": args.xml,
        "records_path": args.records,
        "dtd_path": args.dtd,
        "cutoff_year": args.cutoff_year,
        "top_config": args.top_areas,
        "nontop_config": args.nontop_areas,
        "out_dir": args.out_dir,
        "jobs": args.jobs,
        "json_mirror": args.json or None,
        "top_k": getattr(args, "top_k", None),
        "min_career": getattr(args, "min_career", None),
        "inclusive_averages": getattr(args, "inclusive", None) or None,
    }
    if getattr(args, "no_exclusions", False):
        overrides["mix_excluded_areas"] = ()
    if args.config:
        return RunConfig.from_file(args.config, **overrides)
    return RunConfig(**{k: v for k, v in overrides.items() if v is not None})


def _emit(rep: report.MetricReport, out: Path, as_json: bool) -> None:
    report.write_report(rep, out, as_json=as_json)
    print(f"{rep.kind}: {len(rep.rows)} rows -> {out}")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return _dispatch(args)
    except (ConfigError, IngestError, AreaConfigError, RecordFileError, OSError) as exc:
        print(f"lens: error: {exc}", file=sys.stderr)
        return 1


def _dispatch(args) -> int:
    config = _config(args)
    cmd = args.command

    if cmd == "ingest":
        config.validate(need_input=False)
        if config.xml_path is None:
            raise ConfigError("ingest needs --xml")
        sha = report.file_digest(config.xml_path)
        stats = ingest_to_file(
            config.xml_path, args.out, cutoff_year=config.cutoff_year, source_sha256=sha, dtd_path=config.dtd_path
        )
        for k, v in stats.as_dict().items():
            print(f"{k}: {v}")
        if stats.total_seen:
            print(f"incomplete_share: {stats.dropped_incomplete / stats.total_seen:.6%}")
        return 0

    if cmd == "venues":
        config.validate()
        corpus = load_corpus(config)
        reg = corpus.registry
        print(f"canonical venues: {len(reg)}")
        print(f"distinct names: {reg.distinct_names()}")
        print(f"multi-name series: {len(reg.merges())}")
        print(f"quarantined tokens: {len(reg.quarantined)}")
        rs = corpus.resolve_stats
        print(f"records: admitted={rs.admitted} assigned={rs.assigned} dropped_unresolved={rs.dropped_unresolved}")
        if args.print_merges:
            for h in reg.merges():
                print(f"{h.venue.canonical_key}\t{h.venue.display_name}")
                for s in h.name_spans:
                    print(f"\t{s.name}\t{s.first_year}-{s.last_year}\t{s.length}y\t{s.event_count} events")
        return 0

    if cmd == "report-all":
        written = run_pipeline(config)
        for name, path in written.items():
            print(f"{name}\t{report.file_digest(path)[:16]}\t{path}")
        return 0

    analysis = build_analysis(config)
    if cmd == "collab":
        rep = analysis.collab(args.set)
    elif cmd == "careers":
        rep = analysis.careers(args.scope)
    elif cmd == "transitions":
        rep = analysis.transitions()
    elif cmd == "venue-mix":
        rep = analysis.venue_mix(per_area=args.per_area)
    elif cmd == "productivity":
        rep = analysis.productivity()
    elif cmd == "growth":
        rep = analysis.growth(args.scope)
    elif cmd == "compare-growth":
        rep = analysis.compare_growth()
    elif cmd == "stability":
        rep = analysis.stability(args.set)
    else:  # pragma: no cover - argparse restricts choices
        raise ConfigError(f"unknown command {cmd}")
    _emit(stamp(rep, analysis), args.out, args.json)
    if cmd == "transitions":
        for k in ("breadth_authors", "breadth_mean_active_areas", "breadth_single_area_share"):
            print(f"{k.removeprefix('breadth_')}: {rep.provenance[k]}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
