"""N-Triples and Turtle parsing into the ontology model.

Supported input:

* N-Triples: the full line-based grammar (IRIs, blank node labels,
  literals with language tags or datatypes, comments).
* Turtle: a documented subset sufficient for class/property ontologies:
  ``@prefix``/``PREFIX`` and ``@base``/``BASE`` directives, the ``a``
  keyword, predicate-object lists (``;``) and object lists (``,``),
  short and long string literals with language tags and datatypes,
  numeric and boolean shorthand literals, and labelled blank nodes.
  Collections ``( )``, anonymous blank nodes ``[ ]``, and quoted triples
  ``<< >>`` are outside the subset and raise :class:`UnsupportedFeature`
  rather than being silently misparsed.

Blank node labels are skolemized to stable IRIs under a reserved
namespace so the resulting model is IRI-keyed; the skolem IRI depends
only on the label, which keeps parsing insensitive to triple order.

Recognized predicates are rdfs:label, rdfs:comment, rdf:type,
rdfs:subClassOf, owl:equivalentClass, rdfs:domain, and rdfs:range.
Everything else is ignored, counted per predicate, and reported on the
returned ontology.
"""

from __future__ import annotations

import io
import logging
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import IO, Iterator, Optional, Tuple, Union
from urllib.parse import urljoin

from . import namespaces as ns
from .model import Entity, EntityKind, Iri, Ontology, normalize_language_tag

logger = logging.getLogger(__name__)


class RdfFormat(Enum):
    NTRIPLES = "ntriples"
    TURTLE = "turtle"


class ParseError(Exception):
    """Base class for parse failures, carrying a 1-based position."""

    def __init__(self, detail: str, line: int = 0, column: int = 0):
        self.detail = detail
        self.line = line
        self.column = column
        where = f" at line {line}, column {column}" if line else ""
        super().__init__(f"{detail}{where}")


class MalformedSyntax(ParseError):
    """The input violates the grammar of the declared format."""


class UnsupportedFeature(ParseError):
    """The input uses a Turtle construct outside the supported subset."""


@dataclass(frozen=True)
class _Term:
    """A parsed RDF term. ``lang``/``datatype`` only apply to literals."""

    value: str
    is_literal: bool = False
    is_bnode: bool = False
    lang: Optional[str] = None
    datatype: Optional[str] = None


_ESCAPES = {
    "t": "\t",
    "b": "\b",
    "n": "\n",
    "r": "\r",
    "f": "\f",
    '"': '"',
    "'": "'",
    "\\": "\\",
}

_LOCAL_NAME_CHARS = "_-.%"


class _Scanner:
    """Character scanner over a full document with line/column tracking."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.length = len(text)

    def at_end(self) -> bool:
        return self.pos >= self.length

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < self.length else ""

    def advance(self) -> str:
        ch = self.text[self.pos]
        self.pos += 1
        return ch

    def startswith(self, s: str) -> bool:
        return self.text.startswith(s, self.pos)

    def location(self, pos: Optional[int] = None) -> Tuple[int, int]:
        """1-based (line, column) of ``pos`` (defaults to current)."""
        p = self.pos if pos is None else pos
        line = self.text.count("\n", 0, p) + 1
        last_nl = self.text.rfind("\n", 0, p)
        return line, p - last_nl

    def error(self, detail: str, pos: Optional[int] = None) -> MalformedSyntax:
        line, col = self.location(pos)
        return MalformedSyntax(detail, line, col)

    def unsupported(self, detail: str) -> UnsupportedFeature:
        line, col = self.location()
        return UnsupportedFeature(detail, line, col)

    def skip_ws(self, newlines: bool = True) -> None:
        """Skip whitespace and comments ('#' to end of line)."""
        while self.pos < self.length:
            ch = self.text[self.pos]
            if ch == "#":
                nl = self.text.find("\n", self.pos)
                self.pos = self.length if nl < 0 else nl
            elif ch in " \t\r" or (newlines and ch == "\n"):
                self.pos += 1
            else:
                return

    def expect(self, ch: str) -> None:
        if self.peek() != ch:
            raise self.error(f"expected {ch!r}, found {self.peek()!r}")
        self.advance()

    def read_unicode_escape(self, width: int) -> str:
        hexdigits = self.text[self.pos : self.pos + width]
        if len(hexdigits) < width or not all(c in "0123456789abcdefABCDEF" for c in hexdigits):
            raise self.error(f"bad \\u escape {hexdigits!r}")
        self.pos += width
        return chr(int(hexdigits, 16))

    def read_iriref(self) -> str:
        """Read ``<...>`` (caller consumed nothing; '<' expected here)."""
        start = self.pos
        self.expect("<")
        out = []
        while True:
            if self.at_end():
                raise self.error("unterminated IRI", start)
            ch = self.advance()
            if ch == ">":
                return "".join(out)
            if ch == "\\":
                esc = self.advance() if not self.at_end() else ""
                if esc == "u":
                    out.append(self.read_unicode_escape(4))
                elif esc == "U":
                    out.append(self.read_unicode_escape(8))
                else:
                    raise self.error(f"bad IRI escape \\{esc}")
            elif ch in ' <"{}|^`' or ord(ch) <= 0x20:
                raise self.error(f"character {ch!r} not allowed in IRI")
            else:
                out.append(ch)

    def read_string_body(self, quote: str, long: bool) -> str:
        """Read characters up to the closing quote; opening already consumed."""
        start = self.pos
        terminator = quote * 3 if long else quote
        out = []
        while True:
            if self.at_end():
                raise self.error("unterminated string literal", start)
            if self.startswith(terminator):
                self.pos += len(terminator)
                return "".join(out)
            ch = self.advance()
            if ch == "\\":
                esc = self.advance() if not self.at_end() else ""
                if esc == "u":
                    out.append(self.read_unicode_escape(4))
                elif esc == "U":
                    out.append(self.read_unicode_escape(8))
                elif esc in _ESCAPES:
                    out.append(_ESCAPES[esc])
                else:
                    raise self.error(f"bad string escape \\{esc}")
            elif not long and ch in ("\n", "\r"):
                raise self.error("newline in single-line string literal")
            else:
                out.append(ch)

    def read_bnode_label(self) -> str:
        start = self.pos
        self.expect("_")
        self.expect(":")
        out = []
        while not self.at_end():
            ch = self.peek()
            if ch.isalnum() or ch in "_-." or ord(ch) > 127:
                out.append(self.advance())
            else:
                break
        label = "".join(out).rstrip(".")
        self.pos -= len("".join(out)) - len(label)
        if not label:
            raise self.error("empty blank node label", start)
        return label

    def read_langtag(self) -> str:
        self.expect("@")
        out = []
        while not self.at_end() and (self.peek().isalnum() or self.peek() == "-"):
            out.append(self.advance())
        tag = "".join(out)
        if not tag:
            raise self.error("empty language tag")
        return tag


class _DocumentParser:
    """Shared statement parser; ``fmt`` gates Turtle-only features."""

    def __init__(self, text: str, fmt: RdfFormat):
        self.s = _Scanner(text)
        self.fmt = fmt
        self.turtle = fmt is RdfFormat.TURTLE
        self.prefixes: dict[str, str] = {}
        self.base: Optional[str] = None

    def triples(self) -> Iterator[Tuple[_Term, _Term, _Term]]:
        s = self.s
        while True:
            s.skip_ws()
            if s.at_end():
                return
            if self.turtle and self._try_directive():
                continue
            subject = self._read_term(position="subject")
            yield from self._predicate_object_list(subject)
            s.skip_ws()
            s.expect(".")

    # -- directives --------------------------------------------------------

    def _try_directive(self) -> bool:
        s = self.s
        lowered = self.s.text[s.pos : s.pos + 8].lower()
        if s.startswith("@prefix") or lowered.startswith("prefix "):
            sparql_style = not s.startswith("@prefix")
            s.pos += 7 if s.startswith("@prefix") else 6
            s.skip_ws()
            name = self._read_prefix_name()
            s.skip_ws()
            iri = self._resolve(s.read_iriref())
            self.prefixes[name] = iri
            s.skip_ws()
            if not sparql_style:
                s.expect(".")
            elif s.peek() == ".":
                s.advance()
            return True
        if s.startswith("@base") or lowered.startswith("base "):
            sparql_style = not s.startswith("@base")
            s.pos += 5 if s.startswith("@base") else 4
            s.skip_ws()
            self.base = self._resolve(s.read_iriref())
            s.skip_ws()
            if not sparql_style:
                s.expect(".")
            elif s.peek() == ".":
                s.advance()
            return True
        return False

    def _read_prefix_name(self) -> str:
        s = self.s
        out = []
        while not s.at_end() and s.peek() != ":":
            ch = s.peek()
            if ch in " \t\n\r<":
                raise s.error("expected ':' in prefix declaration")
            out.append(s.advance())
        s.expect(":")
        return "".join(out)

    # -- statements --------------------------------------------------------

    def _predicate_object_list(self, subject: _Term) -> Iterator[Tuple[_Term, _Term, _Term]]:
        s = self.s
        while True:
            s.skip_ws()
            predicate = self._read_predicate()
            while True:
                s.skip_ws()
                obj = self._read_term(position="object")
                yield subject, predicate, obj
                s.skip_ws()
                if self.turtle and s.peek() == ",":
                    s.advance()
                    continue
                break
            if self.turtle and s.peek() == ";":
                s.advance()
                s.skip_ws()
                # Turtle allows trailing ';' before '.'
                if s.peek() in ".;":
                    while s.peek() == ";":
                        s.advance()
                        s.skip_ws()
                    break
                continue
            break

    def _read_predicate(self) -> _Term:
        s = self.s
        if self.turtle and s.peek() == "a":
            nxt = s.text[s.pos + 1 : s.pos + 2]
            if nxt == "" or nxt in " \t\n\r<#":
                s.advance()
                return _Term(ns.RDF_TYPE)
        term = self._read_term(position="predicate")
        if term.is_literal or term.is_bnode:
            raise s.error("predicate must be an IRI")
        return term

    def _read_term(self, position: str) -> _Term:
        s = self.s
        ch = s.peek()
        if ch == "":
            raise s.error(f"unexpected end of input, expected {position}")
        if ch == "<":
            if self.turtle and s.startswith("<<"):
                raise s.unsupported("quoted triples (RDF-star) are not supported")
            return _Term(self._resolve(s.read_iriref()))
        if ch == "_":
            label = s.read_bnode_label()
            return _Term(label, is_bnode=True)
        if ch in "\"'":
            if not self.turtle and ch == "'":
                raise s.error("single-quoted literals are not allowed in N-Triples")
            return self._read_literal()
        if self.turtle and ch == "(":
            raise s.unsupported("RDF collections '( )' are not supported")
        if self.turtle and ch == "[":
            raise s.unsupported("anonymous blank nodes '[ ]' are not supported")
        if self.turtle:
            shorthand = self._try_shorthand_literal()
            if shorthand is not None:
                return shorthand
            return _Term(self._read_prefixed_name())
        raise s.error(f"unexpected character {ch!r} in {position}")

    def _read_literal(self) -> _Term:
        s = self.s
        quote = s.advance()
        long = False
        if self.turtle and s.startswith(quote * 2):
            s.pos += 2
            long = True
        value = s.read_string_body(quote, long)
        lang = None
        datatype = None
        if s.peek() == "@":
            lang = s.read_langtag()
        elif s.startswith("^^"):
            s.pos += 2
            if s.peek() == "<":
                datatype = self._resolve(s.read_iriref())
            elif self.turtle:
                datatype = self._read_prefixed_name()
            else:
                raise s.error("datatype must be an IRI")
        return _Term(value, is_literal=True, lang=lang, datatype=datatype)

    def _try_shorthand_literal(self) -> Optional[_Term]:
        s = self.s
        for keyword, dtype in (("true", ns.XSD_BOOLEAN), ("false", ns.XSD_BOOLEAN)):
            if s.startswith(keyword):
                after = s.text[s.pos + len(keyword) : s.pos + len(keyword) + 1]
                if after == "" or not (after.isalnum() or after in "_:"):
                    s.pos += len(keyword)
                    return _Term(keyword, is_literal=True, datatype=dtype)
        ch = s.peek()
        if not (ch.isdigit() or ch in "+-."):
            return None
        start = s.pos
        if ch in "+-":
            s.advance()
        digits = ""
        while not s.at_end() and s.peek().isdigit():
            digits += s.advance()
        has_dot = False
        if s.peek() == "." and s.text[s.pos + 1 : s.pos + 2].isdigit():
            has_dot = True
            s.advance()
            while not s.at_end() and s.peek().isdigit():
                digits += s.advance()
        if not digits:
            s.pos = start
            return None
        has_exp = False
        if s.peek() in "eE":
            mark = s.pos
            s.advance()
            if s.peek() in "+-":
                s.advance()
            if s.peek().isdigit():
                has_exp = True
                while not s.at_end() and s.peek().isdigit():
                    s.advance()
            else:
                s.pos = mark
        value = s.text[start : s.pos]
        if has_exp:
            dtype = ns.XSD_DOUBLE
        elif has_dot:
            dtype = ns.XSD_DECIMAL
        else:
            dtype = ns.XSD_INTEGER
        return _Term(value, is_literal=True, datatype=dtype)

    def _read_prefixed_name(self) -> str:
        s = self.s
        start = s.pos
        prefix = []
        while not s.at_end() and s.peek() != ":":
            ch = s.peek()
            if ch.isalnum() or ch in "_-" or ord(ch) > 127:
                prefix.append(s.advance())
            else:
                raise s.error(f"unexpected character {ch!r} in term", start)
        if s.at_end():
            raise s.error("unexpected end of input in prefixed name", start)
        s.expect(":")
        local = []
        while not s.at_end():
            ch = s.peek()
            if ch.isalnum() or ch in _LOCAL_NAME_CHARS or ord(ch) > 127:
                local.append(s.advance())
            else:
                break
        local_str = "".join(local)
        while local_str.endswith("."):
            local_str = local_str[:-1]
            s.pos -= 1
        name = "".join(prefix)
        if name not in self.prefixes:
            raise s.error(f"undeclared prefix {name!r}", start)
        return self.prefixes[name] + local_str

    def _resolve(self, iri: str) -> str:
        if _is_absolute(iri):
            return iri
        if not self.turtle:
            raise self.s.error(f"relative IRI {iri!r} not allowed in N-Triples")
        if self.base is None:
            raise self.s.error(f"relative IRI {iri!r} without @base")
        return urljoin(self.base, iri)


def _is_absolute(iri: str) -> bool:
    idx = iri.find(":")
    if idx <= 0:
        return False
    head = iri[0]
    if not (head.isalpha() and head.isascii()):
        return False
    return all(c.isalnum() or c in "+.-" for c in iri[1:idx])


# -- ontology assembly -----------------------------------------------------

_EXPLICIT_KIND = {
    ns.OWL_CLASS: EntityKind.CLASS,
    ns.RDFS_CLASS: EntityKind.CLASS,
    ns.OWL_OBJECTPROPERTY: EntityKind.OBJECT_PROPERTY,
    ns.OWL + "TransitiveProperty": EntityKind.OBJECT_PROPERTY,
    ns.OWL + "SymmetricProperty": EntityKind.OBJECT_PROPERTY,
    ns.OWL + "AsymmetricProperty": EntityKind.OBJECT_PROPERTY,
    ns.OWL + "ReflexiveProperty": EntityKind.OBJECT_PROPERTY,
    ns.OWL + "IrreflexiveProperty": EntityKind.OBJECT_PROPERTY,
    ns.OWL + "FunctionalProperty": EntityKind.OBJECT_PROPERTY,
    ns.OWL + "InverseFunctionalProperty": EntityKind.OBJECT_PROPERTY,
    ns.OWL_DATATYPEPROPERTY: EntityKind.DATA_PROPERTY,
    ns.OWL_ANNOTATIONPROPERTY: EntityKind.DATA_PROPERTY,
    ns.OWL_NAMEDINDIVIDUAL: EntityKind.INDIVIDUAL,
}

#: rdf:type objects that carry no kind evidence for the subject.
_NEUTRAL_TYPES = {ns.OWL_ONTOLOGY, ns.OWL_RESTRICTION, ns.OWL_THING}

_KIND_PRIORITY = [
    EntityKind.CLASS,
    EntityKind.OBJECT_PROPERTY,
    EntityKind.DATA_PROPERTY,
    EntityKind.INDIVIDUAL,
]


class _Builder:
    def __init__(self) -> None:
        self.labels: dict[Iri, dict[str, set[str]]] = {}
        self.comments: dict[Iri, dict[str, set[str]]] = {}
        self.explicit_kind: dict[Iri, set[EntityKind]] = {}
        self.weak_kind: dict[Iri, set[EntityKind]] = {}
        self.mentioned: set[Iri] = set()
        self.subclass: set[Tuple[Iri, Iri]] = set()
        self.equivalence: set[Tuple[Iri, Iri]] = set()
        self.domains: dict[Iri, set[Iri]] = {}
        self.ranges: dict[Iri, set[Iri]] = {}
        self.ignored: dict[Iri, int] = {}
        self.dropped_self_loops = 0

    def term_iri(self, term: _Term) -> Iri:
        if term.is_bnode:
            return ns.SKOLEM + term.value
        return term.value

    def add(self, s: _Term, p: _Term, o: _Term) -> None:
        pred = p.value
        subject = self.term_iri(s)
        if pred == ns.RDFS_LABEL and o.is_literal:
            tag = normalize_language_tag(o.lang or "und")
            self.labels.setdefault(subject, {}).setdefault(tag, set()).add(o.value)
            self.mention(subject)
        elif pred == ns.RDFS_COMMENT and o.is_literal:
            tag = normalize_language_tag(o.lang or "und")
            self.comments.setdefault(subject, {}).setdefault(tag, set()).add(o.value)
            self.mention(subject)
        elif pred == ns.RDF_TYPE and not o.is_literal:
            self.add_type(subject, self.term_iri(o))
        elif pred == ns.RDFS_SUBCLASSOF and not o.is_literal:
            obj = self.term_iri(o)
            if obj == subject:
                self.dropped_self_loops += 1
                return
            self.subclass.add((subject, obj))
            self.mention(subject, obj)
            self.weak_kind.setdefault(subject, set()).add(EntityKind.CLASS)
            self.weak_kind.setdefault(obj, set()).add(EntityKind.CLASS)
        elif pred == ns.OWL_EQUIVALENTCLASS and not o.is_literal:
            obj = self.term_iri(o)
            if obj != subject:
                self.equivalence.add((min(subject, obj), max(subject, obj)))
            self.mention(subject, obj)
            self.weak_kind.setdefault(subject, set()).add(EntityKind.CLASS)
            self.weak_kind.setdefault(obj, set()).add(EntityKind.CLASS)
        elif pred == ns.RDFS_DOMAIN and not o.is_literal:
            obj = self.term_iri(o)
            self.domains.setdefault(subject, set()).add(obj)
            self.mention(subject, obj)
            self.weak_kind.setdefault(obj, set()).add(EntityKind.CLASS)
        elif pred == ns.RDFS_RANGE and not o.is_literal:
            obj = self.term_iri(o)
            self.ranges.setdefault(subject, set()).add(obj)
            self.mention(subject, obj)
            if not ns.in_vocab(obj):
                self.weak_kind.setdefault(obj, set()).add(EntityKind.CLASS)
        else:
            self.ignored[pred] = self.ignored.get(pred, 0) + 1

    def add_type(self, subject: Iri, type_iri: Iri) -> None:
        self.mention(subject)
        if type_iri in _EXPLICIT_KIND:
            self.explicit_kind.setdefault(subject, set()).add(_EXPLICIT_KIND[type_iri])
        elif type_iri in _NEUTRAL_TYPES or ns.in_vocab(type_iri):
            pass
        else:
            # Typed by a user class: the subject is an individual and the
            # class itself becomes a known entity.
            self.weak_kind.setdefault(subject, set()).add(EntityKind.INDIVIDUAL)
            self.mention(type_iri)
            self.weak_kind.setdefault(type_iri, set()).add(EntityKind.CLASS)

    def mention(self, *iris: Iri) -> None:
        self.mentioned.update(iris)

    def kind_of(self, iri: Iri) -> EntityKind:
        explicit = self.explicit_kind.get(iri, set())
        if explicit:
            if len(explicit) > 1:
                logger.warning("conflicting rdf:type kinds for %s: %s", iri, explicit)
            for kind in _KIND_PRIORITY:
                if kind in explicit:
                    return kind
        weak = self.weak_kind.get(iri, set())
        for kind in _KIND_PRIORITY:
            if kind in weak:
                return kind
        return EntityKind.UNKNOWN

    def build(self) -> Ontology:
        entities = {}
        for iri in sorted(self.mentioned):
            entities[iri] = Entity(
                iri=iri,
                kind=self.kind_of(iri),
                labels={
                    tag: tuple(sorted(vals))
                    for tag, vals in sorted(self.labels.get(iri, {}).items())
                },
                comments={
                    tag: tuple(sorted(vals))
                    for tag, vals in sorted(self.comments.get(iri, {}).items())
                },
            )
        if self.ignored:
            logger.info(
                "ignored %d triples over %d unrecognized predicates",
                sum(self.ignored.values()),
                len(self.ignored),
            )
        if self.dropped_self_loops:
            logger.warning("dropped %d rdfs:subClassOf self-loops", self.dropped_self_loops)
        return Ontology(
            entities=entities,
            subclass_edges=frozenset(self.subclass),
            equivalence_edges=frozenset(self.equivalence),
            property_domains={p: frozenset(cs) for p, cs in sorted(self.domains.items())},
            property_ranges={p: frozenset(cs) for p, cs in sorted(self.ranges.items())},
            ignored_predicates=dict(sorted(self.ignored.items())),
        )


Source = Union[str, bytes, IO[bytes], IO[str], Path]


def _read_text(source: Source) -> str:
    if isinstance(source, Path):
        data: Union[str, bytes] = source.read_bytes()
    elif isinstance(source, (str, bytes)):
        data = source
    else:
        data = source.read()
    if isinstance(data, bytes):
        try:
            return data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedSyntax(f"input is not valid UTF-8: {exc}") from exc
    return data


def parse_ontology(source: Source, format: RdfFormat) -> Ontology:
    """Parse an N-Triples or Turtle document into an :class:`Ontology`.

    Raises :class:`MalformedSyntax` with a line/column position on grammar
    violations and :class:`UnsupportedFeature` for Turtle constructs
    outside the supported subset.
    """
    text = _read_text(source)
    builder = _Builder()
    parser = _DocumentParser(text, format)
    for s, p, o in parser.triples():
        builder.add(s, p, o)
    return builder.build()


def parse_ontology_file(path: Union[str, Path], format: Optional[RdfFormat] = None) -> Ontology:
    """Parse a file, guessing the format from the extension when not given
    (.nt -> N-Triples, .ttl/.turtle -> Turtle; anything else defaults to
    Turtle, whose subset grammar is a superset of typical N-Triples files
    except that it resolves prefixed names)."""
    p = Path(path)
    if format is None:
        format = RdfFormat.NTRIPLES if p.suffix.lower() == ".nt" else RdfFormat.TURTLE
    with io.open(p, "rb") as fh:
        return parse_ontology(fh, format)


# -- serialization ---------------------------------------------------------

_KIND_TYPE_IRI = {
    EntityKind.CLASS: ns.OWL_CLASS,
    EntityKind.OBJECT_PROPERTY: ns.OWL_OBJECTPROPERTY,
    EntityKind.DATA_PROPERTY: ns.OWL_DATATYPEPROPERTY,
    EntityKind.INDIVIDUAL: ns.OWL_NAMEDINDIVIDUAL,
}


def _nt_iri(iri: Iri) -> str:
    out = []
    for ch in iri:
        if ch in ' <>"{}|^`\\' or ord(ch) <= 0x20:
            out.append(f"\\u{ord(ch):04X}")
        else:
            out.append(ch)
    return "<" + "".join(out) + ">"


def _nt_literal(value: str, lang: Optional[str] = None) -> str:
    out = []
    for ch in value:
        if ch == "\\":
            out.append("\\\\")
        elif ch == '"':
            out.append('\\"')
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\r":
            out.append("\\r")
        elif ch == "\t":
            out.append("\\t")
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04X}")
        else:
            out.append(ch)
    lit = '"' + "".join(out) + '"'
    if lang and lang != "und":
        lit += f"@{lang}"
    return lit


def serialize_ntriples(onto: Ontology) -> str:
    """Serialize an ontology back to N-Triples.

    The output is deterministic (sorted by subject, then statement kind)
    and re-parsing it yields an ontology equal to the input: entity kinds
    are emitted as rdf:type triples and "und" labels as untagged literals.
    """
    lines = []
    for iri in sorted(onto.entities):
        entity = onto.entities[iri]
        subj = _nt_iri(iri)
        type_iri = _KIND_TYPE_IRI.get(entity.kind)
        if type_iri is not None:
            lines.append(f"{subj} {_nt_iri(ns.RDF_TYPE)} {_nt_iri(type_iri)} .")
        for tag in sorted(entity.labels):
            for value in entity.labels[tag]:
                lines.append(f"{subj} {_nt_iri(ns.RDFS_LABEL)} {_nt_literal(value, tag)} .")
        for tag in sorted(entity.comments):
            for value in entity.comments[tag]:
                lines.append(f"{subj} {_nt_iri(ns.RDFS_COMMENT)} {_nt_literal(value, tag)} .")
    for child, parent in sorted(onto.subclass_edges):
        lines.append(f"{_nt_iri(child)} {_nt_iri(ns.RDFS_SUBCLASSOF)} {_nt_iri(parent)} .")
    for a, b in sorted(onto.equivalence_edges):
        lines.append(f"{_nt_iri(a)} {_nt_iri(ns.OWL_EQUIVALENTCLASS)} {_nt_iri(b)} .")
    for prop in sorted(onto.property_domains):
        for cls in sorted(onto.property_domains[prop]):
            lines.append(f"{_nt_iri(prop)} {_nt_iri(ns.RDFS_DOMAIN)} {_nt_iri(cls)} .")
    for prop in sorted(onto.property_ranges):
        for cls in sorted(onto.property_ranges[prop]):
            lines.append(f"{_nt_iri(prop)} {_nt_iri(ns.RDFS_RANGE)} {_nt_iri(cls)} .")
    return "\n".join(lines) + ("\n" if lines else "")
