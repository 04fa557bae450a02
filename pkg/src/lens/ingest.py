"""Streaming ingestion of the DBLP XML dump.

The parser is a single forward pass over the byte stream built on expat, so
memory stays flat no matter how large the dump is. Only ``inproceedings``
elements become publications; ``proceedings`` elements are forwarded as venue
metadata for the registry.
"""

from __future__ import annotations

import gzip
import html.entities
import io
import logging
import pyexpat
import unicodedata
from dataclasses import dataclass
from pathlib import Path
from typing import BinaryIO, Callable, NewType

logger = logging.getLogger(__name__)

AuthorId = NewType("AuthorId", str)

MIN_YEAR = 1970
DEFAULT_CUTOFF_YEAR = 2009
CHUNK_SIZE = 1 << 20

# Children of <dblp> that count as bibliographic records.
RECORD_TAGS = frozenset(
    {
        "article",
        "inproceedings",
        "proceedings",
        "book",
        "incollection",
        "phdthesis",
        "mastersthesis",
        "www",
        "person",
        "data",
    }
)
FIELD_TAGS = frozenset({"author", "title", "year", "booktitle", "crossref"})
_XML_CORE_ENTITIES = frozenset({"amp", "lt", "gt", "quot", "apos"})


class IngestError(Exception):
    """Fatal problem with the XML input."""


class MalformedXMLError(IngestError):
    def __init__(self, message: str, byte_offset: int, line: int | None = None):
        super().__init__(f"{message} at byte {byte_offset}" + (f" (line {line})" if line else ""))
        self.byte_offset = byte_offset
        self.line = line


class UnresolvedEntityError(IngestError):
    def __init__(self, entity: str, byte_offset: int):
        super().__init__(f"unresolvable XML entity '&{entity};' at byte {byte_offset}")
        self.entity = entity
        self.byte_offset = byte_offset


class InvalidAuthorName(ValueError):
    pass


@dataclass(frozen=True)
class RawPublication:
    dblp_key: str
    authors: tuple[AuthorId, ...]
    title: str
    year: int
    venue_token: str
    record_kind: str = "inproceedings"
    booktitle: str = ""


@dataclass(frozen=True)
class ProceedingsMeta:
    """One proceedings volume: a single event of a conference series."""

    key: str
    name: str
    year: int | None


@dataclass
class IngestStats:
    total_seen: int = 0
    admitted: int = 0
    dropped_incomplete: int = 0
    dropped_pre1970: int = 0
    dropped_after_cutoff: int = 0
    dropped_kind: int = 0

    @property
    def dropped(self) -> int:
        return (
            self.dropped_incomplete
            + self.dropped_pre1970
            + self.dropped_after_cutoff
            + self.dropped_kind
        )

    def check(self) -> None:
        if self.total_seen != self.admitted + self.dropped:
            raise AssertionError(f"ingest counters do not balance: {self}")

    def as_dict(self) -> dict[str, int]:
        return {
            "total_seen": self.total_seen,
            "admitted": self.admitted,
            "dropped_incomplete": self.dropped_incomplete,
            "dropped_pre1970": self.dropped_pre1970,
            "dropped_after_cutoff": self.dropped_after_cutoff,
            "dropped_kind": self.dropped_kind,
        }


def normalize_author(raw_name: str) -> AuthorId:
    """Canonical author identity: NFC form with collapsed whitespace.

    DBLP homonym suffixes such as ``0001`` are part of the name and survive.
    Diacritics are kept; stripping them would merge distinct DBLP identities.
    """
    if raw_name is None:
        raise InvalidAuthorName("author name is missing")
    name = " ".join(unicodedata.normalize("NFC", raw_name).split())
    if not name:
        raise InvalidAuthorName("author name is empty")
    return AuthorId(name)


def builtin_entity_declarations() -> bytes:
    """DTD text declaring the HTML/ISO-Latin named entities DBLP uses."""
    decls = [
        f'<!ENTITY {name} "&#{code};">'
        for name, code in sorted(html.entities.name2codepoint.items())
        if name not in _XML_CORE_ENTITIES
    ]
    return "\n".join(decls).encode("ascii")


def open_source(path: str | Path) -> BinaryIO:
    """Open a dump file, transparently decoding gzip transport."""
    fh = open(path, "rb")
    magic = fh.read(2)
    fh.seek(0)
    if magic == b"\x1f\x8b":
        return gzip.GzipFile(fileobj=fh, mode="rb")  # type: ignore[return-value]
    return fh


class _RecordBuilder:
    __slots__ = ("tag", "key", "fields", "authors", "current", "buf")

    def __init__(self, tag: str, key: str):
        self.tag = tag
        self.key = key
        self.fields: dict[str, str] = {}
        self.authors: list[str] = []
        self.current: str | None = None
        self.buf: list[str] = []


class DblpStreamParser:
    """Event-driven parser; feed it bytes, it calls sinks per finished record.

    ``dtd_path`` overrides DTD lookup. Otherwise the DOCTYPE system id is
    resolved against ``base_dir``; if no DTD file can be found the builtin
    HTML entity table is used instead.
    """

    def __init__(
        self,
        sink: Callable[[RawPublication], None],
        *,
        cutoff_year: int = DEFAULT_CUTOFF_YEAR,
        venue_sink: Callable[[ProceedingsMeta], None] | None = None,
        dtd_path: str | Path | None = None,
        base_dir: str | Path | None = None,
    ):
        self.sink = sink
        self.venue_sink = venue_sink
        self.cutoff_year = cutoff_year
        self.dtd_path = Path(dtd_path) if dtd_path else None
        self.base_dir = Path(base_dir) if base_dir else None
        self.stats = IngestStats()
        self._depth = 0
        self._rec: _RecordBuilder | None = None
        self._offset = 0

        p = pyexpat.ParserCreate()
        p.buffer_text = True
        p.SetParamEntityParsing(pyexpat.XML_PARAM_ENTITY_PARSING_ALWAYS)
        p.UseForeignDTD(True)
        p.ExternalEntityRefHandler = self._external_entity
        p.SkippedEntityHandler = self._skipped_entity
        p.StartElementHandler = self._start
        p.EndElementHandler = self._end
        p.CharacterDataHandler = self._chars
        self._parser = p

    # expat callbacks

    def _external_entity(self, context, base, system_id, public_id) -> int:
        data = None
        candidates = []
        if self.dtd_path is not None:
            candidates.append(self.dtd_path)
        if system_id:
            sid = Path(system_id)
            candidates.append(sid if sid.is_absolute() or self.base_dir is None else self.base_dir / sid)
        for cand in candidates:
            if cand.is_file():
                data = cand.read_bytes()
                break
        if data is None:
            if system_id:
                logger.warning("DTD %r not found; using builtin entity table", system_id)
            data = builtin_entity_declarations()
        sub = self._parser.ExternalEntityParserCreate(context)
        sub.SkippedEntityHandler = self._skipped_entity
        sub.Parse(data, True)
        return 1

    def _skipped_entity(self, name: str, is_parameter_entity: bool) -> None:
        raise UnresolvedEntityError(name, self._parser.CurrentByteIndex)

    def _start(self, tag: str, attrs: dict[str, str]) -> None:
        self._depth += 1
        if self._depth == 2:
            if tag in RECORD_TAGS:
                self._rec = _RecordBuilder(tag, attrs.get("key", ""))
            else:
                self._rec = None
        elif self._depth == 3 and self._rec is not None and tag in FIELD_TAGS:
            self._rec.current = tag
            self._rec.buf = []

    def _chars(self, data: str) -> None:
        rec = self._rec
        if rec is not None and rec.current is not None:
            rec.buf.append(data)

    def _end(self, tag: str) -> None:
        rec = self._rec
        if rec is not None:
            if self._depth == 3 and rec.current == tag:
                text = "".join(rec.buf)
                if tag == "author":
                    rec.authors.append(text)
                elif tag not in rec.fields:
                    rec.fields[tag] = text
                rec.current = None
                rec.buf = []
            elif self._depth == 2:
                self._finish(rec)
                self._rec = None
        self._depth -= 1

    def _finish(self, rec: _RecordBuilder) -> None:
        self.stats.total_seen += 1
        if rec.tag == "proceedings" and self.venue_sink is not None:
            year = _parse_year(rec.fields.get("year"))
            name = " ".join((rec.fields.get("booktitle") or rec.fields.get("title") or "").split())
            if rec.key:
                self.venue_sink(ProceedingsMeta(rec.key, name, year))
        if rec.tag != "inproceedings":
            self.stats.dropped_kind += 1
            return
        pub = _complete_publication(rec)
        if pub is None:
            self.stats.dropped_incomplete += 1
            return
        if pub.year < MIN_YEAR:
            self.stats.dropped_pre1970 += 1
            return
        if pub.year > self.cutoff_year:
            self.stats.dropped_after_cutoff += 1
            return
        self.stats.admitted += 1
        self.sink(pub)

    # driving

    def feed(self, data: bytes, final: bool = False) -> None:
        try:
            self._parser.Parse(data, final)
        except pyexpat.ExpatError as exc:
            raise MalformedXMLError(
                pyexpat.errors.messages[exc.code], self._parser.ErrorByteIndex, exc.lineno
            ) from None
        self._offset += len(data)

    def close(self) -> IngestStats:
        self.feed(b"", final=True)
        self.stats.check()
        return self.stats


def _parse_year(text: str | None) -> int | None:
    if text is None:
        return None
    try:
        return int(text.strip())
    except ValueError:
        return None


def _complete_publication(rec: _RecordBuilder) -> RawPublication | None:
    """Build a publication, or None if author list, title, year or venue is unusable."""
    if not rec.key or not rec.authors:
        return None
    title = " ".join(rec.fields.get("title", "").split())
    year = _parse_year(rec.fields.get("year"))
    if not title or year is None:
        return None
    try:
        names = [normalize_author(a) for a in rec.authors]
    except InvalidAuthorName:
        return None
    authors = tuple(dict.fromkeys(names))
    venue_token = rec.fields.get("crossref", "").strip() or rec.key
    booktitle = " ".join(rec.fields.get("booktitle", "").split())
    return RawPublication(
        dblp_key=rec.key,
        authors=authors,
        title=title,
        year=year,
        venue_token=venue_token,
        booktitle=booktitle,
    )


def stream_parse(
    xml_source: BinaryIO,
    sink: Callable[[RawPublication], None],
    *,
    cutoff_year: int = DEFAULT_CUTOFF_YEAR,
    venue_sink: Callable[[ProceedingsMeta], None] | None = None,
    dtd_path: str | Path | None = None,
    base_dir: str | Path | None = None,
    chunk_size: int = CHUNK_SIZE,
) -> IngestStats:
    """Parse a DBLP byte stream, delivering admitted publications in document order."""
    if base_dir is None:
        name = getattr(xml_source, "name", None)
        if isinstance(name, str):
            base_dir = Path(name).parent
    parser = DblpStreamParser(
        sink,
        cutoff_year=cutoff_year,
        venue_sink=venue_sink,
        dtd_path=dtd_path,
        base_dir=base_dir,
    )
    while True:
        chunk = xml_source.read(chunk_size)
        if not chunk:
            break
        parser.feed(chunk)
    return parser.close()


def parse_file(path: str | Path, sink, **kwargs) -> IngestStats:
    path = Path(path)
    kwargs.setdefault("base_dir", path.parent)
    with open_source(path) as fh:
        return stream_parse(fh, sink, **kwargs)


def parse_bytes(data: bytes, **kwargs) -> tuple[list[RawPublication], IngestStats]:
    """Convenience wrapper collecting everything into a list (tests, small inputs)."""
    out: list[RawPublication] = []
    stats = stream_parse(io.BytesIO(data), out.append, **kwargs)
    return out, stats
