import shutil
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import acceptance_log  # noqa: E402

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def dtd_dir(tmp_path: Path) -> Path:
    """Scratch directory that already holds the test DTD."""
    shutil.copy(FIXTURES / "dblp.dtd", tmp_path / "dblp.dtd")
    return tmp_path


TOP_AREAS = {"A1": ["conf/t1", "conf/t2"], "A2": ["conf/t3", "conf/t4"]}
NONTOP_AREAS = {"A1": ["conf/n1"], "A2": ["conf/n2"]}


def _area_yaml(label, mapping):
    import yaml

    doc = {
        "set": label,
        "expected_areas": len(mapping),
        "areas": [
            {"id": aid, "name": aid, "venues": [{"abbr": k.split("/")[1].upper(), "key": k} for k in keys]}
            for aid, keys in mapping.items()
        ],
    }
    return yaml.safe_dump(doc, sort_keys=False)


def mini_records(seed: int = 11):
    import random

    from synth import random_corpus

    venues = tuple(k for m in (TOP_AREAS, NONTOP_AREAS) for ks in m.values() for k in ks) + ("conf/other",)
    return random_corpus(random.Random(seed), n_authors=80, n_papers=600, venues=venues, years=(1995, 2009))


@pytest.fixture
def mini_dump(tmp_path: Path) -> dict:
    """A small dump with its DTD and matching TOP/NONTOP area configs."""
    from synth import corpus_to_xml

    d = tmp_path / "input"
    d.mkdir()
    shutil.copy(FIXTURES / "dblp.dtd", d / "dblp.dtd")
    (d / "dblp.xml").write_bytes(corpus_to_xml(mini_records()))
    (d / "top.yaml").write_text(_area_yaml("TOP", TOP_AREAS))
    (d / "nontop.yaml").write_text(_area_yaml("NONTOP", NONTOP_AREAS))
    return {
        "dir": d,
        "xml": d / "dblp.xml",
        "top": d / "top.yaml",
        "nontop": d / "nontop.yaml",
        "cache": tmp_path / "cache",
        "out": tmp_path / "out",
    }


def pytest_terminal_summary(terminalreporter):
    lines = acceptance_log.lines()
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
