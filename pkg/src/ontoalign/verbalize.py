"""Render ontology entities as short natural-language descriptions.

Each entity kind has one template, filled from the structural closure:

* class: ``A <label> is a <parent> which has <properties>, alongside
  <siblings>.`` Every clause after the label is dropped when its slot
  is empty, so an isolated class renders as just ``A <label>.``
* property: ``<label> is a relation from <domain> to <range>.``
* individual (and unknown kinds): ``<label>.``

Comments and optional externally supplied descriptions are appended as
trailing sentences. Sibling context is only added for classes whose
chosen label is shorter than a configurable threshold: short generic
labels are the ones that need disambiguation, and unconditional sibling
lists would bloat every description.

No article agreement or inflection is attempted ("a Educational
Institution" is accepted as-is); downstream embedding models tolerate
minor disfluency, and correct multilingual generation is out of scope.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Mapping, Optional, Sequence, Tuple, Union

from .closure import InferredOntology
from .model import (
    EntityKind,
    Iri,
    get_comment,
    get_labels,
    normalize_language_tag,
    pick_labels,
    validate_iri,
)

logger = logging.getLogger(__name__)

#: Kinds verbalized by default; individuals rarely help class alignment.
DEFAULT_KINDS = frozenset(
    {EntityKind.CLASS, EntityKind.OBJECT_PROPERTY, EntityKind.DATA_PROPERTY}
)


class Template(Enum):
    """FULL renders the kind-specific template; LABEL_ONLY emits the bare
    label (the degenerate mode used to measure how much the templates
    contribute)."""

    FULL = "full"
    LABEL_ONLY = "label-only"


class UnknownEntity(Exception):
    """Raised when asked to verbalize an IRI the ontology does not contain."""

    def __init__(self, iri: Iri) -> None:
        super().__init__(f"unknown entity: {iri}")
        self.iri = iri


@dataclass(frozen=True)
class VerbalizerConfig:
    kinds: frozenset = DEFAULT_KINDS
    template: Template = Template.FULL
    disambiguate: bool = True
    short_label_threshold: int = 8
    max_siblings: int = 3
    external_descriptions: Mapping[Tuple[Iri, str], str] = field(default_factory=dict)


@dataclass(frozen=True)
class Slots:
    """What actually got rendered, for inspection and debugging."""

    label: str
    parent_label: Optional[str] = None
    property_labels: Tuple[str, ...] = ()
    comment: Optional[str] = None
    sibling_labels: Tuple[str, ...] = ()


@dataclass(frozen=True)
class Verbalization:
    entity: Iri
    language: str
    text: str
    slots_used: Slots


def _join(labels: Sequence[str]) -> str:
    """Natural-language list join: "a", "a and b", "a, b and c"."""
    if len(labels) == 1:
        return labels[0]
    return ", ".join(labels[:-1]) + " and " + labels[-1]


def _as_sentence(text: str) -> str:
    stripped = text.strip()
    return stripped if stripped.endswith((".", "!", "?")) else stripped + "."


def _labels_by_iri(
    iris: Sequence[Iri], inferred: InferredOntology, preference: Sequence[str]
) -> Tuple[str, ...]:
    return tuple(
        get_labels(inferred.base.entities[iri], preference)[0] for iri in iris
    )


def _external_description(
    iri: Iri, preference: Sequence[str], config: VerbalizerConfig
) -> Optional[str]:
    for tag in list(preference) + ["und"]:
        text = config.external_descriptions.get((iri, normalize_language_tag(tag)))
        if text:
            return text
    return None


def verbalize(
    entity: Iri,
    inferred: InferredOntology,
    preference: Sequence[str],
    config: VerbalizerConfig = VerbalizerConfig(),
) -> Verbalization:
    """Render one entity. Deterministic: same inputs, byte-identical text.

    The rendered text always contains the chosen label. Missing slots drop
    their whole clause rather than leaving empty placeholders.
    """
    record = inferred.base.entities.get(entity)
    if record is None:
        raise UnknownEntity(entity)
    language, labels = pick_labels(record, preference)
    label = labels[0]

    if config.template is Template.LABEL_ONLY:
        return Verbalization(
            entity=entity, language=language, text=label, slots_used=Slots(label=label)
        )

    parent_label: Optional[str] = None
    property_labels: Tuple[str, ...] = ()
    sibling_labels: Tuple[str, ...] = ()
    comment = get_comment(record, preference)

    if record.kind is EntityKind.CLASS:
        ancestors = inferred.ancestors.get(entity, ())
        if ancestors:
            parent_label = _labels_by_iri(ancestors[:1], inferred, preference)[0]
        property_labels = _labels_by_iri(
            sorted(inferred.attached_properties.get(entity, ())), inferred, preference
        )
        if config.disambiguate and len(label) < config.short_label_threshold:
            near = sorted(inferred.siblings.get(entity, ()))[: config.max_siblings]
            sibling_labels = _labels_by_iri(near, inferred, preference)
        text = f"A {label}"
        if parent_label:
            text += f" is a {parent_label}"
        if property_labels:
            text += f" which has {_join(property_labels)}"
        if sibling_labels:
            text += f", alongside {_join(sibling_labels)}"
        text += "."
    elif record.kind in (EntityKind.OBJECT_PROPERTY, EntityKind.DATA_PROPERTY):
        domains = sorted(inferred.base.property_domains.get(entity, ()))
        ranges = sorted(inferred.base.property_ranges.get(entity, ()))
        text = f"{label} is a relation"
        if domains:
            text += f" from {_join(_labels_by_iri(domains, inferred, preference))}"
        if ranges:
            text += f" to {_join(_labels_by_iri(ranges, inferred, preference))}"
        text += "."
    else:
        text = f"{label}."

    if comment:
        text += " " + _as_sentence(comment)
    extra = _external_description(entity, preference, config)
    if extra:
        text += " " + _as_sentence(extra)

    return Verbalization(
        entity=entity,
        language=language,
        text=text,
        slots_used=Slots(
            label=label,
            parent_label=parent_label,
            property_labels=property_labels,
            comment=comment,
            sibling_labels=sibling_labels,
        ),
    )


def verbalize_all(
    inferred: InferredOntology,
    preference: Sequence[str],
    config: VerbalizerConfig = VerbalizerConfig(),
) -> list[Verbalization]:
    """Verbalize every entity whose kind is in ``config.kinds``, ordered by
    IRI so output is stable regardless of storage or execution order."""
    return [
        verbalize(iri, inferred, preference, config)
        for iri in sorted(inferred.base.entities)
        if inferred.base.entities[iri].kind in config.kinds
    ]


def load_external_descriptions(path: Union[str, os.PathLike]) -> Dict[Tuple[Iri, str], str]:
    """Read per-entity description records from a UTF-8 TSV file.

    Each non-blank, non-comment line holds IRI, language tag, and text,
    tab-separated. Later records for the same (IRI, language) override
    earlier ones. Records with empty text are skipped.
    """
    table: Dict[Tuple[Iri, str], str] = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, 1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line.strip() or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 3:
                raise ValueError(
                    f"{path}:{lineno}: expected 3 tab-separated fields, got {len(fields)}"
                )
            iri, tag, text = fields
            if not text.strip():
                logger.debug("%s:%d: empty description for %s skipped", path, lineno, iri)
                continue
            table[(validate_iri(iri), normalize_language_tag(tag))] = text.strip()
    return table
