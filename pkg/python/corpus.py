"""
Bundled Knot and Link Diagrams

Reads the corpus files under data/: one entry per line, "name<TAB>code",
where code is a PD[...] code or a braid word BR[strands, {g1, g2, ...}].
Blank lines and lines starting with # are skipped.
"""

import logging
import os
import re
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional

from python.diagram import LinkDiagram, PDParseError, braid_closure, parse_pd

logger = logging.getLogger(__name__)

DATA_DIR_ENV = "BQK_DATA_DIR"
DEFAULT_DATA_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "data")
CORPUS_FILES = ("knots.pd", "links.pd")


def data_dir() -> str:
    """Directory holding the corpus and JSON fixtures; BQK_DATA_DIR overrides the bundled one."""
    return os.getenv(DATA_DIR_ENV) or DEFAULT_DATA_DIR


_BRAID = re.compile(r"BR\[\s*(\d+)\s*,\s*\{([^}]*)\}\s*\]")


class CorpusError(ValueError):
    """Malformed corpus line or unknown entry name."""


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    code: str
    diagram: LinkDiagram

    @property
    def crossing_count(self) -> int:
        return self.diagram.crossing_count

    @property
    def component_count(self) -> int:
        return self.diagram.component_count

    @property
    def is_knot(self) -> bool:
        return self.component_count == 1


def diagram_from_code(code: str) -> LinkDiagram:
    """Parse a PD code or a BR[strands, {word}] braid."""
    match = _BRAID.fullmatch(code.strip())
    if match:
        strands = int(match.group(1))
        try:
            word = [int(g) for g in match.group(2).split(",") if g.strip()]
        except ValueError:
            raise PDParseError(f"Braid word is not a list of integers: {code!r}")
        return braid_closure(word, strands)
    return parse_pd(code)


def parse_corpus(lines: Iterable[str], source: str = "<corpus>") -> List[CorpusEntry]:
    entries = []
    seen = set()
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0].strip():
            raise CorpusError(f"{source}:{lineno}: expected 'name<TAB>code'")
        name, code = parts[0].strip(), parts[1].strip()
        if name in seen:
            raise CorpusError(f"{source}:{lineno}: duplicate entry {name}")
        try:
            diagram = diagram_from_code(code)
        except ValueError as e:
            raise CorpusError(f"{source}:{lineno}: {name}: {e}")
        seen.add(name)
        entries.append(CorpusEntry(name, code, diagram))
    return entries


def load_corpus(paths: Optional[Iterable[str]] = None) -> Dict[str, CorpusEntry]:
    """
    Load corpus files, in file order.

    Args:
        paths: Files to read; the bundled knots and links by default

    Returns:
        {name: CorpusEntry}
    """
    if paths is None:
        paths = [os.path.join(data_dir(), f) for f in CORPUS_FILES]
    corpus: Dict[str, CorpusEntry] = {}
    for path in paths:
        try:
            with open(path, 'r', encoding='utf-8') as f:
                entries = parse_corpus(f, source=os.path.basename(path))
        except OSError as e:
            raise CorpusError(f"Cannot read corpus file {path}: {e}")
        for entry in entries:
            if entry.name in corpus:
                raise CorpusError(f"{entry.name} appears in more than one corpus file")
            corpus[entry.name] = entry
    logger.debug(f"Loaded {len(corpus)} corpus entries")
    return corpus


def lookup(corpus: Dict[str, CorpusEntry], name: str) -> CorpusEntry:
    if name not in corpus:
        raise CorpusError(f"Unknown corpus entry {name!r}")
    return corpus[name]


def select(
    corpus: Dict[str, CorpusEntry],
    max_crossings: Optional[int] = None,
    knots: Optional[bool] = None,
) -> Dict[str, CorpusEntry]:
    """Entries with at most max_crossings crossings; knots=True/False keeps only knots/links."""
    return {
        name: e for name, e in corpus.items()
        if (max_crossings is None or e.crossing_count <= max_crossings)
        and (knots is None or e.is_knot == knots)
    }
