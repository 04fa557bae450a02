"""End-to-end orchestration: ingest, resolve, analyse, emit."""

from __future__ import annotations

import hashlib
import json
import logging
import os
import shutil
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Callable

import yaml

from . import careers, dynamics, report
from .corpus import PublicationRecord, ResolveStats, in_area, in_set, resolve_records
from .graph import CoauthorshipGraph, build_graph, collaboration_row
from .ingest import DEFAULT_CUTOFF_YEAR, MIN_YEAR, IngestStats
from .records import RecordFile, ingest_to_file, load_records
from .venues import AreaSet, VenueRegistry, build_registry, load_area_config, shipped_config_path, venue_events

logger = logging.getLogger(__name__)

CACHE_ENV = "LENS_CACHE_DIR"

REPORT_FILES = {
    "collab-top": "collab_top.csv",
    "collab-nontop": "collab_nontop.csv",
    "stability-top": "stability_top.csv",
    "stability-nontop": "stability_nontop.csv",
    "growth": "growth.csv",
    "transitions": "transitions.csv",
    "careers": "careers.csv",
    "venue-mix": "venue_mix.csv",
}
PLOT_FILES = {
    "careers": "career_length.csv",
    "productivity": "productivity_by_period.csv",
    "venue-mix": "venue_mix.csv",
    "growth": "growth.csv",
    "compare-growth": "growth_top_vs_nontop.csv",
}


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    xml_path: Path | None = None
    records_path: Path | None = None
    dtd_path: Path | None = None
    cutoff_year: int = DEFAULT_CUTOFF_YEAR
    top_config: Path = field(default_factory=lambda: shipped_config_path("TOP"))
    nontop_config: Path = field(default_factory=lambda: shipped_config_path("NONTOP"))
    out_dir: Path = Path("lens-out")
    cache_dir: Path | None = None
    inclusive_averages: bool = False
    mix_excluded_areas: tuple[str, ...] = careers.DEFAULT_MIX_EXCLUDED_AREAS
    min_career: int = careers.EXPERIENCED_YEARS
    top_k: int = 3
    jobs: int = 1
    json_mirror: bool = False

    def __post_init__(self):
        for name in ("xml_path", "records_path", "dtd_path", "top_config", "nontop_config", "out_dir", "cache_dir"):
            v = getattr(self, name)
            if v is not None and not isinstance(v, Path):
                setattr(self, name, Path(v))
        self.mix_excluded_areas = tuple(self.mix_excluded_areas)

    @classmethod
    def from_file(cls, path: str | Path, **overrides) -> "RunConfig":
        with open(path, encoding="utf-8") as fh:
            doc = yaml.safe_load(fh) or {}
        unknown = set(doc) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"{path}: unknown config keys {sorted(unknown)}")
        doc.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**doc)

    def validate(self, need_input: bool = True) -> None:
        if self.cutoff_year < MIN_YEAR:
            raise ConfigError(f"cutoff year {self.cutoff_year} is before {MIN_YEAR}")
        if need_input and self.xml_path is None and self.records_path is None:
            raise ConfigError("no input: give --xml or --records")
        for name in ("xml_path", "records_path", "dtd_path", "top_config", "nontop_config"):
            p = getattr(self, name)
            if p is not None and not p.is_file():
                raise ConfigError(f"{name.replace('_', ' ')} not found: {p}")
        if self.jobs < 1:
            raise ConfigError("--jobs must be >= 1")
        if self.top_k < 1:
            raise ConfigError("--top-k must be >= 1")

    def digest(self) -> str:
        """Digest of everything that affects report content (not paths)."""
        doc = {
            "cutoff_year": self.cutoff_year,
            "top_config": report.file_digest(self.top_config),
            "nontop_config": report.file_digest(self.nontop_config),
            "inclusive_averages": self.inclusive_averages,
            "mix_excluded_areas": list(self.mix_excluded_areas),
            "min_career": self.min_career,
            "top_k": self.top_k,
        }
        return hashlib.sha256(json.dumps(doc, sort_keys=True).encode()).hexdigest()

    def resolved_cache_dir(self) -> Path:
        if self.cache_dir is not None:
            return self.cache_dir
        env = os.environ.get(CACHE_ENV)
        if env:
            return Path(env)
        return Path.home() / ".cache" / "lens"


@dataclass
class Corpus:
    records: list[PublicationRecord]
    registry: VenueRegistry
    ingest_stats: IngestStats
    resolve_stats: ResolveStats
    input_sha256: str


def cached_records_path(config: RunConfig, xml_sha256: str) -> Path:
    return config.resolved_cache_dir() / f"records-{xml_sha256[:20]}-c{config.cutoff_year}.jsonl"


def ensure_record_file(config: RunConfig) -> tuple[Path, str]:
    """Return a record file for the configured input, ingesting only on cache miss."""
    if config.records_path is not None:
        return config.records_path, report.file_digest(config.records_path)
    assert config.xml_path is not None
    sha = report.file_digest(config.xml_path)
    path = cached_records_path(config, sha)
    if path.is_file():
        logger.info("reusing cached records %s", path)
        return path, sha
    logger.info("ingesting %s -> %s", config.xml_path, path)
    ingest_to_file(config.xml_path, path, cutoff_year=config.cutoff_year, source_sha256=sha, dtd_path=config.dtd_path)
    return path, sha


def corpus_from_record_file(rf: RecordFile, input_sha256: str = "") -> Corpus:
    registry = build_registry(venue_events(rf.proceedings, rf.publications))
    records, rstats = resolve_records(rf.publications, registry)
    return Corpus(records, registry, rf.stats, rstats, input_sha256)


def load_corpus(config: RunConfig) -> Corpus:
    path, sha = ensure_record_file(config)
    rf = load_records(path)
    if config.records_path is not None:
        sha = rf.header.get("source_sha256") or sha
    return corpus_from_record_file(rf, sha)


class Analysis:
    """Shared, lazily built structures over one corpus.

    Call :meth:`prepare` before fanning out across threads so the cached
    structures are built exactly once.
    """

    def __init__(self, corpus: Corpus, top: AreaSet, nontop: AreaSet, config: RunConfig):
        self.corpus = corpus
        self.top = top
        self.nontop = nontop
        self.config = config
        for aset in (top, nontop):
            unknown = aset.unknown_keys(corpus.registry)
            if unknown:
                logger.warning(
                    "%s venues absent from corpus: %s",
                    aset.set_label,
                    "; ".join(f"{a}: {', '.join(k)}" for a, k in unknown.items()),
                )

    def area_set(self, label: str) -> AreaSet:
        return {"TOP": self.top, "NONTOP": self.nontop}[label.upper()]

    @property
    def records(self) -> list[PublicationRecord]:
        return self.corpus.records

    @cached_property
    def cs_graph(self) -> CoauthorshipGraph:
        return build_graph(self.records, "CS")

    @cached_property
    def set_records(self) -> dict[str, list[PublicationRecord]]:
        return {s.set_label: list(in_set(self.records, s)) for s in (self.top, self.nontop)}

    @cached_property
    def set_graphs(self) -> dict[str, CoauthorshipGraph]:
        return {label: build_graph(rs, label) for label, rs in self.set_records.items()}

    @cached_property
    def stability_index(self) -> dynamics.StabilityIndex:
        return dynamics.StabilityIndex(self.records, self.cs_graph)

    @cached_property
    def top_profiles(self) -> dict:
        return careers.build_profiles(self.records, self.top, scope="set")

    @cached_property
    def cs_profiles(self) -> dict:
        return careers.build_profiles(self.records, self.top, scope="cs")

    def prepare(self) -> None:
        self.cs_graph, self.set_graphs, self.stability_index, self.top_profiles, self.cs_profiles

    # reports

    def collab(self, label: str) -> report.MetricReport:
        aset = self.area_set(label)
        recs = self.set_records[aset.set_label]
        rows = []
        for area in aset.areas:
            area_recs = list(in_area(recs, aset, area.area_id))
            g = build_graph(area_recs, area.area_id)
            rows.append(
                collaboration_row(area.area_id, g, self.set_graphs[aset.set_label], self.cs_graph, area_recs)
            )
        return report.collab_report(rows, aset.set_label)

    def stability(self, label: str) -> report.MetricReport:
        aset = self.area_set(label)
        rows = dynamics.stability_table(self.stability_index, aset, self.config.inclusive_averages)
        return report.stability_report(rows, aset.set_label)

    def growth_series(self, scope: str = "all") -> list[dynamics.GrowthSeries]:
        """Series for ``all``, ``cs``, ``top``, ``nontop`` or one area
        (``AT`` means the TOP area, ``NONTOP/AT`` the NONTOP one)."""
        s = scope.upper()
        out = []
        if s in ("ALL", "CS"):
            out.append(dynamics.growth_series(self.records, None, "CS"))
        for aset in (self.top, self.nontop):
            if s in ("ALL", aset.set_label):
                total, per_area = dynamics.area_growth(self.set_records[aset.set_label], aset)
                out.append(total)
                out.extend(self._prefixed(aset, per_area).values())
        if out:
            return out
        set_label, _, area = scope.rpartition("/")
        try:
            aset = self.area_set(set_label or "TOP")
        except KeyError:
            raise ConfigError(f"unknown growth scope {scope!r}") from None
        if area not in aset.area_ids:
            raise ConfigError(f"unknown growth scope {scope!r}")
        total, per_area = dynamics.area_growth(self.set_records[aset.set_label], aset)
        return [total, self._prefixed(aset, {area: per_area[area]})[area]]

    @staticmethod
    def _prefixed(aset: AreaSet, per_area: dict) -> dict:
        for s in per_area.values():
            s.label = f"{aset.set_label}/{s.label}"
        return per_area

    def growth(self, scope: str = "all") -> report.MetricReport:
        return report.growth_report(self.growth_series(scope))

    def compare_growth(self) -> report.MetricReport:
        def per_venue(aset):
            recs = self.set_records[aset.set_label]
            return [
                dynamics.growth_series(recs, conf.keys, conf.abbreviation)
                for area in aset.areas
                for conf in area.venues
            ]

        return report.compare_report(dynamics.compare_growth(per_venue(self.top), per_venue(self.nontop)))

    def experienced_top(self) -> list[careers.AuthorProfile]:
        return [p for p in self.top_profiles.values() if p.career_length >= self.config.min_career]

    def transitions(self) -> report.MetricReport:
        experienced = self.experienced_top()
        m = careers.transition_matrix(experienced, self.top.area_ids)
        rep = report.transitions_report(m, careers.top_transitions(m, self.config.top_k))
        breadth = careers.area_breadth(experienced)
        rep.provenance.update(
            {
                "breadth_authors": str(breadth.authors),
                "breadth_mean_active_areas": report.format_value(breadth.mean_active_areas),
                "breadth_single_area_share": report.format_value(breadth.single_area_share),
            }
        )
        return rep

    def careers(self, scope: str = "all") -> report.MetricReport:
        dists = {}
        if scope in ("all", "top"):
            dists["TOP"] = careers.career_length_distribution(self.top_profiles.values())
            for area in self.top.area_ids:
                dists[f"TOP/{area}"] = careers.career_length_distribution(self.top_profiles.values(), area)
        if scope in ("all", "cs"):
            dists["CS"] = careers.career_length_distribution(self.cs_profiles.values())
        if not dists:
            raise ConfigError(f"unknown careers scope {scope!r}")
        return report.careers_report(dists)

    def productivity(self) -> report.MetricReport:
        profiles = [
            careers.period_profile(
                careers.select_cohort(self.top_profiles, self.cs_profiles, c, self.config.min_career), c
            )
            for c in careers.COHORTS
        ]
        return report.productivity_report(profiles)

    def venue_mix(self, per_area: bool = True) -> report.MetricReport:
        profiles = list(self.top_profiles.values())
        hists = {"ALL": careers.venue_mix(profiles)}
        if per_area:
            hists.update(careers.venue_mix(profiles, per_area=True, exclude_areas=self.config.mix_excluded_areas))
        return report.venue_mix_report(hists)


def build_analysis(config: RunConfig, corpus: Corpus | None = None) -> Analysis:
    config.validate(need_input=corpus is None)
    if corpus is None:
        corpus = load_corpus(config)
    top = load_area_config(config.top_config)
    nontop = load_area_config(config.nontop_config)
    return Analysis(corpus, top, nontop, config)


def stamp(rep: report.MetricReport, analysis: Analysis) -> report.MetricReport:
    rep.provenance.update(
        {
            "config_sha256": analysis.config.digest(),
            "input_sha256": analysis.corpus.input_sha256,
        }
    )
    return rep


def run_pipeline(config: RunConfig, corpus: Corpus | None = None) -> dict[str, Path]:
    """Write every report plus plot data under ``config.out_dir``.

    Files are staged in a scratch directory and moved into place only when
    all of them succeeded; on failure nothing new is left behind.
    """
    out_dir = config.out_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    staging = out_dir / f".staging-{os.getpid()}"
    shutil.rmtree(staging, ignore_errors=True)
    staging.mkdir()
    try:
        analysis = build_analysis(config, corpus)
        analysis.prepare()
        ext = ".json" if config.json_mirror else ".csv"
        jobs: dict[str, Callable[[], report.MetricReport]] = {
            "collab-top": lambda: analysis.collab("TOP"),
            "collab-nontop": lambda: analysis.collab("NONTOP"),
            "stability-top": lambda: analysis.stability("TOP"),
            "stability-nontop": lambda: analysis.stability("NONTOP"),
            "growth": analysis.growth,
            "transitions": analysis.transitions,
            "careers": analysis.careers,
            "venue-mix": analysis.venue_mix,
            "productivity": analysis.productivity,
            "compare-growth": analysis.compare_growth,
        }
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            futures = {name: pool.submit(fn) for name, fn in jobs.items()}
            reports = {name: stamp(f.result(), analysis) for name, f in futures.items()}

        written: dict[str, Path] = {}
        for name, fname in REPORT_FILES.items():
            path = staging / fname
            if config.json_mirror:
                report.write_report(reports[name], path)
                report.write_report(reports[name], path.with_suffix(ext), as_json=True)
            else:
                report.write_report(reports[name], path)
            written[name] = out_dir / fname
        for name, fname in PLOT_FILES.items():
            report.emit_plot_data(reports[name], staging / "plots" / fname)
            written[f"plot:{name}"] = out_dir / "plots" / fname

        for src in sorted(staging.rglob("*")):
            if src.is_file():
                dst = out_dir / src.relative_to(staging)
                dst.parent.mkdir(parents=True, exist_ok=True)
                os.replace(src, dst)
        if config.json_mirror:
            for fname in REPORT_FILES.values():
                written[f"json:{fname}"] = out_dir / Path(fname).with_suffix(".json")
        return written
    finally:
        shutil.rmtree(staging, ignore_errors=True)
