import pytest

from ontoalign.model import (
    Entity,
    EntityKind,
    Ontology,
    get_comment,
    get_labels,
    split_local_name,
    validate_iri,
)


def entity(iri="http://x/A", labels=None, comments=None):
    return Entity(iri=iri, labels=labels or {}, comments=comments or {})


class TestGetLabels:
    def test_first_preferred_language(self):
        e = entity(labels={"de": ("Universität",), "en": ("University",)})
        assert get_labels(e, ["en", "de"]) == ["University"]
        assert get_labels(e, ["de", "en"]) == ["Universität"]

    def test_local_name_fallback_splits_camel_case(self):
        e = entity(iri="http://x/onto#EducationalInstitution")
        assert get_labels(e, ["en"]) == ["Educational Institution"]

    def test_any_language_fallback(self):
        e = entity(labels={"fr": ("Université",)})
        assert get_labels(e, ["en", "de"]) == ["Université"]

    def test_any_language_fallback_disabled(self):
        e = entity(iri="http://x/onto#Thing", labels={"fr": ("Université",)})
        assert get_labels(e, ["en"], fallback_any=False) == ["Thing"]

    def test_und_preferred_over_other_languages(self):
        e = entity(labels={"und": ("plain",), "fr": ("français",)})
        assert get_labels(e, ["en"]) == ["plain"]

    def test_underscore_local_name(self):
        e = entity(iri="http://x/onto#educational_institution")
        assert get_labels(e, ["en"]) == ["educational institution"]

    def test_never_empty(self):
        e = entity(iri="http://x/")
        assert get_labels(e, []) != []


class TestLocalNames:
    @pytest.mark.parametrize(
        "iri,expected",
        [
            ("http://x/onto#EducationalInstitution", "Educational Institution"),
            ("http://x/onto/hasMaxSpeed2", "has Max Speed 2"),
            ("http://x/onto#snake_case_name", "snake case name"),
            ("urn:ontoalign:skolem:b1", "b 1"),
        ],
    )
    def test_split(self, iri, expected):
        assert split_local_name(iri) == expected


class TestGetComment:
    def test_preferred_then_und(self):
        e = entity(comments={"und": ("fallback",), "de": ("deutsch",)})
        assert get_comment(e, ["de"]) == "deutsch"
        assert get_comment(e, ["en"]) == "fallback"

    def test_missing_returns_none(self):
        assert get_comment(entity(), ["en"]) is None


class TestValidation:
    def test_validate_iri(self):
        assert validate_iri("http://x/A") == "http://x/A"
        with pytest.raises(ValueError):
            validate_iri("")
        with pytest.raises(ValueError):
            validate_iri("no-scheme-here")

    def test_ontology_rejects_unresolved_edge(self):
        with pytest.raises(ValueError):
            Ontology(entities={}, subclass_edges=frozenset({("http://x/A", "http://x/B")}))

    def test_ontology_rejects_subclass_self_loop(self):
        e = entity("http://x/A")
        with pytest.raises(ValueError):
            Ontology(
                entities={"http://x/A": e},
                subclass_edges=frozenset({("http://x/A", "http://x/A")}),
            )
