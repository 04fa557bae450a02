"""Intermediate record file.

Line-delimited JSON, one object per line, optionally gzip-compressed when the
file name ends in ``.gz``::

    {"format": "lens-records", "version": 1, "cutoff_year": 2009, "source_sha256": "..."}
    {"t": "venue", "key": "conf/aaai/2009", "name": "AAAI", "year": 2009}
    {"t": "pub", "key": "conf/aaai/Zhou09", "authors": [...], "title": "...",
     "year": 2009, "venue": "conf/aaai/2009", "booktitle": "AAAI"}
    {"t": "stats", "total_seen": ..., "admitted": ..., ...}

The header is always first and the stats trailer always last. A file without
a trailer is an interrupted write and is rejected on load.
"""

from __future__ import annotations

import gzip
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO

from .ingest import (
    AuthorId,
    IngestStats,
    ProceedingsMeta,
    RawPublication,
    parse_file,
)

FORMAT_NAME = "lens-records"
FORMAT_VERSION = 1


class RecordFileError(Exception):
    pass


@dataclass
class RecordFile:
    header: dict
    publications: list[RawPublication] = field(default_factory=list)
    proceedings: list[ProceedingsMeta] = field(default_factory=list)
    stats: IngestStats = field(default_factory=IngestStats)


def _open(path: Path, mode: str) -> IO[str]:
    if path.suffix == ".gz":
        return gzip.open(path, mode + "t", encoding="utf-8", newline="\n")
    return open(path, mode, encoding="utf-8", newline="\n")


def _dump(obj: dict) -> str:
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":")) + "\n"


class RecordWriter:
    """Writes to ``<path>.partial`` and renames into place on :meth:`close`."""

    def __init__(self, path: str | Path, header: dict):
        self.path = Path(path)
        self._tmp = self.path.with_name(self.path.name + ".partial")
        self.path.parent.mkdir(parents=True, exist_ok=True)
        if self.path.suffix == ".gz":
            self._fh = gzip.open(self._tmp, "wt", encoding="utf-8", newline="\n")
        else:
            self._fh = open(self._tmp, "w", encoding="utf-8", newline="\n")
        self._fh.write(_dump({"format": FORMAT_NAME, "version": FORMAT_VERSION, **header}))

    def publication(self, pub: RawPublication) -> None:
        self._fh.write(
            _dump(
                {
                    "t": "pub",
                    "key": pub.dblp_key,
                    "authors": list(pub.authors),
                    "title": pub.title,
                    "year": pub.year,
                    "venue": pub.venue_token,
                    "booktitle": pub.booktitle,
                }
            )
        )

    def proceedings(self, meta: ProceedingsMeta) -> None:
        self._fh.write(_dump({"t": "venue", "key": meta.key, "name": meta.name, "year": meta.year}))

    def close(self, stats: IngestStats) -> Path:
        self._fh.write(_dump({"t": "stats", **stats.as_dict()}))
        self._fh.close()
        os.replace(self._tmp, self.path)
        return self.path

    def abort(self) -> None:
        self._fh.close()
        self._tmp.unlink(missing_ok=True)


def ingest_to_file(
    xml_path: str | Path,
    out_path: str | Path,
    *,
    cutoff_year: int,
    source_sha256: str = "",
    dtd_path: str | Path | None = None,
) -> IngestStats:
    writer = RecordWriter(out_path, {"cutoff_year": cutoff_year, "source_sha256": source_sha256})
    try:
        stats = parse_file(
            xml_path,
            writer.publication,
            venue_sink=writer.proceedings,
            cutoff_year=cutoff_year,
            dtd_path=dtd_path,
        )
    except BaseException:
        writer.abort()
        raise
    writer.close(stats)
    return stats


def load_records(path: str | Path) -> RecordFile:
    path = Path(path)
    with _open(path, "r") as fh:
        first = fh.readline()
        if not first:
            raise RecordFileError(f"{path}: empty record file")
        header = json.loads(first)
        if header.get("format") != FORMAT_NAME:
            raise RecordFileError(f"{path}: not a {FORMAT_NAME} file")
        if header.get("version") != FORMAT_VERSION:
            raise RecordFileError(f"{path}: unsupported version {header.get('version')}")
        out = RecordFile(header=header)
        got_stats = False
        for lineno, line in enumerate(fh, start=2):
            obj = json.loads(line)
            t = obj.get("t")
            if t == "pub":
                out.publications.append(
                    RawPublication(
                        dblp_key=obj["key"],
                        authors=tuple(AuthorId(a) for a in obj["authors"]),
                        title=obj["title"],
                        year=obj["year"],
                        venue_token=obj["venue"],
                        booktitle=obj.get("booktitle", ""),
                    )
                )
            elif t == "venue":
                out.proceedings.append(ProceedingsMeta(obj["key"], obj["name"], obj["year"]))
            elif t == "stats":
                obj.pop("t")
                out.stats = IngestStats(**obj)
                got_stats = True
            else:
                raise RecordFileError(f"{path}:{lineno}: unknown line type {t!r}")
    if not got_stats:
        raise RecordFileError(f"{path}: missing stats trailer (truncated write?)")
    return out
