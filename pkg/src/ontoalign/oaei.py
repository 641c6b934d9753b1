"""Reading and writing alignments in the OAEI Alignment Format.

The interchange format is RDF/XML: a sequence of Cell elements, each
holding two entity references, a relation, and a confidence measure.
Only equivalence cells (relation "=") carry gold-standard meaning here;
cells with any other relation are skipped with a warning. A two-column
TSV reader covers the common flat variant of the same data.

The writer builds its output by plain string assembly rather than a DOM
so that identical alignments serialize to identical bytes on every run.
"""

from __future__ import annotations

import logging
import xml.etree.ElementTree as ET
from typing import List, Sequence, Tuple
from xml.sax.saxutils import escape, quoteattr

from .matching import AlignmentSet
from .model import Iri

logger = logging.getLogger(__name__)

ALIGN_NS = "http://knowledgeweb.semanticweb.org/heterogeneity/alignment"
RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
XSD_FLOAT = "http://www.w3.org/2001/XMLSchema#float"


class MalformedAlignment(Exception):
    """An alignment document that cannot be interpreted."""

    def __init__(self, detail: str) -> None:
        super().__init__(detail)
        self.detail = detail


def _dedupe(pairs: Sequence[Tuple[Iri, Iri]], origin: str) -> List[Tuple[Iri, Iri]]:
    seen = set()
    unique: List[Tuple[Iri, Iri]] = []
    for pair in pairs:
        if pair in seen:
            logger.warning("%s: duplicate pair %s skipped", origin, pair)
            continue
        seen.add(pair)
        unique.append(pair)
    return unique


def read_alignment_xml(data: bytes) -> List[Tuple[Iri, Iri]]:
    """Extract equivalence pairs from an Alignment Format document.

    Cells whose relation is anything other than "=" are skipped with a
    warning; a missing relation element counts as "=", the format's
    default. Raises MalformedAlignment for unparseable XML or cells
    without both entity references.
    """
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        raise MalformedAlignment(f"not well-formed XML: {exc}") from exc
    pairs: List[Tuple[Iri, Iri]] = []
    for number, cell in enumerate(root.iter(f"{{{ALIGN_NS}}}Cell"), start=1):
        refs = []
        for side in ("entity1", "entity2"):
            element = cell.find(f"{{{ALIGN_NS}}}{side}")
            resource = None if element is None else element.get(f"{{{RDF_NS}}}resource")
            if not resource:
                raise MalformedAlignment(
                    f"Cell {number}: {side} missing rdf:resource"
                )
            refs.append(resource)
        relation_el = cell.find(f"{{{ALIGN_NS}}}relation")
        relation = "=" if relation_el is None else (relation_el.text or "").strip()
        if relation != "=":
            logger.warning(
                "Cell %d: relation %r is not equivalence, skipped", number, relation
            )
            continue
        pairs.append((refs[0], refs[1]))
    return _dedupe(pairs, "alignment XML")


def read_alignment_tsv(data: bytes) -> List[Tuple[Iri, Iri]]:
    """Read source/target IRI pairs from two-column tab-separated text.

    Blank lines and lines starting with "#" are ignored; duplicates are
    dropped with a warning. Raises MalformedAlignment when a line does
    not split into exactly two fields or the bytes are not UTF-8.
    """
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise MalformedAlignment(f"not UTF-8 text: {exc}") from exc
    pairs: List[Tuple[Iri, Iri]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = line.rstrip("\n").split("\t")
        if len(fields) != 2 or not fields[0] or not fields[1]:
            raise MalformedAlignment(
                f"line {lineno}: expected 2 tab-separated IRIs"
            )
        pairs.append((fields[0], fields[1]))
    return _dedupe(pairs, "alignment TSV")


def write_alignment_xml(alignment: AlignmentSet) -> str:
    """Serialize an alignment deterministically.

    Cells are ordered by (source, target) and confidences formatted with
    exactly four decimal places, so equal alignments produce
    byte-identical documents.
    """
    lines = [
        '<?xml version="1.0" encoding="utf-8"?>',
        f'<rdf:RDF xmlns={quoteattr(ALIGN_NS)}',
        f'         xmlns:rdf={quoteattr(RDF_NS)}>',
        "<Alignment>",
        "  <xml>yes</xml>",
        "  <level>0</level>",
        "  <type>11</type>",
    ]
    cells = sorted(alignment.cells, key=lambda cell: (cell.source, cell.target))
    for cell in cells:
        lines.extend(
            [
                "  <map>",
                "    <Cell>",
                f"      <entity1 rdf:resource={quoteattr(cell.source)}/>",
                f"      <entity2 rdf:resource={quoteattr(cell.target)}/>",
                f"      <relation>{escape(cell.relation)}</relation>",
                f"      <measure rdf:datatype={quoteattr(XSD_FLOAT)}>"
                f"{cell.confidence:.4f}</measure>",
                "    </Cell>",
                "  </map>",
            ]
        )
    lines.extend(["</Alignment>", "</rdf:RDF>", ""])
    return "\n".join(lines)
