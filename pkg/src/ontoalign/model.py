"""In-memory ontology model: entities, labels, and structural edges.

The model is deliberately small: entities keyed by IRI, multilingual
label/comment maps keyed by lowercase primary language subtags, and four
edge collections (subclass, equivalence, property domain, property range).
Everything is immutable after construction so ontologies can be shared
freely across threads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Optional, Sequence, Tuple

#: IRIs are plain strings; comparison is exact string equality.
Iri = str


class EntityKind(Enum):
    CLASS = "Class"
    OBJECT_PROPERTY = "ObjectProperty"
    DATA_PROPERTY = "DataProperty"
    INDIVIDUAL = "Individual"
    UNKNOWN = "Unknown"


def validate_iri(iri: str) -> Iri:
    """Check that ``iri`` is a non-empty absolute IRI (has a scheme separator)."""
    if not iri:
        raise ValueError("IRI must be non-empty")
    if ":" not in iri:
        raise ValueError(f"IRI {iri!r} has no scheme separator")
    return iri


def normalize_language_tag(tag: str) -> str:
    """Reduce a BCP-47 tag to its lowercase primary subtag ('en-US' -> 'en')."""
    return tag.split("-", 1)[0].lower() if tag else "und"


_LOCAL_NAME_SPLIT = re.compile(
    r"(?<=[a-z0-9])(?=[A-Z])|(?<=[A-Za-z])(?=[0-9])|[_\-]+"
)


def local_name(iri: Iri) -> str:
    """Extract the fragment or last path segment of an IRI."""
    for sep in ("#", "/", ":"):
        idx = iri.rfind(sep)
        if idx >= 0 and idx < len(iri) - 1:
            return iri[idx + 1 :]
    return iri


def split_local_name(iri: Iri) -> str:
    """Turn an IRI local name into words ('...#EducationalInstitution' ->
    'Educational Institution')."""
    name = local_name(iri)
    parts = [p for p in _LOCAL_NAME_SPLIT.split(name) if p]
    return " ".join(parts) if parts else name


@dataclass(frozen=True)
class Entity:
    """One ontology entity with its multilingual annotations.

    ``labels`` and ``comments`` map lowercase primary language subtags
    ("und" for untagged literals) to sorted tuples of distinct strings;
    sorting keeps the model independent of triple order in the input.
    """

    iri: Iri
    kind: EntityKind = EntityKind.UNKNOWN
    labels: Mapping[str, Tuple[str, ...]] = field(default_factory=dict)
    comments: Mapping[str, Tuple[str, ...]] = field(default_factory=dict)


@dataclass(frozen=True)
class Ontology:
    """Immutable parsed ontology.

    Edge collections reference entity IRIs only; every IRI mentioned in an
    edge resolves in ``entities`` (enforced by the parser). Equivalence
    edges are stored as ordered (min, max) pairs so set equality is
    insensitive to declaration direction. ``ignored_predicates`` is a
    diagnostic count of triples skipped during parsing and does not take
    part in equality.
    """

    entities: Mapping[Iri, Entity] = field(default_factory=dict)
    subclass_edges: frozenset[Tuple[Iri, Iri]] = frozenset()
    equivalence_edges: frozenset[Tuple[Iri, Iri]] = frozenset()
    property_domains: Mapping[Iri, frozenset[Iri]] = field(default_factory=dict)
    property_ranges: Mapping[Iri, frozenset[Iri]] = field(default_factory=dict)
    ignored_predicates: Mapping[Iri, int] = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        for child, parent in self.subclass_edges:
            if child == parent:
                raise ValueError(f"subclass self-loop on {child}")
        referenced: set[Iri] = set()
        for child, parent in self.subclass_edges:
            referenced.update((child, parent))
        for a, b in self.equivalence_edges:
            referenced.update((a, b))
        for prop, classes in self.property_domains.items():
            referenced.add(prop)
            referenced.update(classes)
        for prop, classes in self.property_ranges.items():
            referenced.add(prop)
            referenced.update(classes)
        missing = referenced - self.entities.keys()
        if missing:
            raise ValueError(f"edges reference unknown entities: {sorted(missing)}")

    def __len__(self) -> int:
        return len(self.entities)


def pick_labels(
    entity: Entity,
    preference: Sequence[str],
    fallback_any: bool = True,
) -> Tuple[str, list[str]]:
    """Pick the best label list for an entity, with the tag it came from.

    Fallback order: first preferred language present, then "und", then any
    language (deterministic by tag sort, when ``fallback_any`` is on), then
    the IRI local name split on camelCase and underscores (reported as
    "und"). The label list is never empty.
    """
    for tag in preference:
        normalized = normalize_language_tag(tag)
        found = entity.labels.get(normalized)
        if found:
            return normalized, list(found)
    found = entity.labels.get("und")
    if found:
        return "und", list(found)
    if fallback_any:
        for tag in sorted(entity.labels):
            if entity.labels[tag]:
                return tag, list(entity.labels[tag])
    return "und", [split_local_name(entity.iri)]


def get_labels(
    entity: Entity,
    preference: Sequence[str],
    fallback_any: bool = True,
) -> list[str]:
    """Best labels for an entity; see :func:`pick_labels` for the order."""
    return pick_labels(entity, preference, fallback_any)[1]


def get_comment(
    entity: Entity,
    preference: Sequence[str],
) -> Optional[str]:
    """First comment in the first preferred language present, else None.

    Unlike labels there is no local-name fallback: a missing comment just
    means the verbalizer drops that clause.
    """
    for tag in list(preference) + ["und"]:
        found = entity.comments.get(normalize_language_tag(tag))
        if found:
            return found[0]
    return None
