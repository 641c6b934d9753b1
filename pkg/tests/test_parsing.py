"""Parser tests: grammar coverage, hand-counted fixtures, and model
invariants (round-trip, permutation insensitivity, edge resolution)."""

import random

import pytest

from ontoalign import namespaces as ns
from ontoalign.model import EntityKind
from ontoalign.parsing import (
    MalformedSyntax,
    RdfFormat,
    UnsupportedFeature,
    parse_ontology,
    serialize_ntriples,
)

RDFS_LABEL = f"<{ns.RDFS_LABEL}>"
RDFS_COMMENT = f"<{ns.RDFS_COMMENT}>"
RDF_TYPE = f"<{ns.RDF_TYPE}>"
SUBCLASS = f"<{ns.RDFS_SUBCLASSOF}>"

# Hand-counted: 5 triples, 3 distinct entities, 1 subclass edge, 2 labels.
FIVE_TRIPLE_TTL = """\
@prefix ex: <http://example.org/uni#> .
@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .
@prefix owl: <http://www.w3.org/2002/07/owl#> .

ex:University a owl:Class ;
    rdfs:label "University"@en ;
    rdfs:label "Universit\\u00E4t"@de ;
    rdfs:subClassOf ex:EducationalInstitution .
ex:Student a owl:Class .
"""


def parse_nt(text):
    return parse_ontology(text, RdfFormat.NTRIPLES)


def parse_ttl(text):
    return parse_ontology(text, RdfFormat.TURTLE)


class TestNTriples:
    def test_single_label_triple(self):
        onto = parse_nt(f'<http://x/A> {RDFS_LABEL} "Universit\\u00E4t"@de .\n')
        assert len(onto.entities) == 1
        assert onto.entities["http://x/A"].labels == {"de": ("Universität",)}

    def test_empty_stream(self):
        onto = parse_nt("")
        assert len(onto.entities) == 0
        assert not onto.subclass_edges
        assert not onto.equivalence_edges

    def test_comments_and_blank_lines(self):
        text = (
            "# a comment\n\n"
            f'<http://x/A> {RDFS_LABEL} "a" . # trailing\n'
        )
        onto = parse_nt(text)
        assert onto.entities["http://x/A"].labels == {"und": ("a",)}

    def test_string_escapes(self):
        onto = parse_nt(f'<http://x/A> {RDFS_COMMENT} "line\\nbreak \\"q\\" \\\\" .\n')
        assert onto.entities["http://x/A"].comments["und"] == ('line\nbreak "q" \\',)

    def test_language_tag_normalized_to_primary_subtag(self):
        onto = parse_nt(f'<http://x/A> {RDFS_LABEL} "color"@en-US .\n')
        assert onto.entities["http://x/A"].labels == {"en": ("color",)}

    def test_duplicate_labels_collapse(self):
        text = (
            f'<http://x/A> {RDFS_LABEL} "same"@en .\n'
            f'<http://x/A> {RDFS_LABEL} "same"@en .\n'
        )
        onto = parse_nt(text)
        assert onto.entities["http://x/A"].labels["en"] == ("same",)

    def test_blank_node_skolemized(self):
        text = f'_:b1 {RDFS_LABEL} "anon" .\n'
        onto = parse_nt(text)
        assert ns.SKOLEM + "b1" in onto.entities

    def test_datatyped_literal(self):
        onto = parse_nt(
            f'<http://x/A> {RDFS_LABEL} "5"^^<{ns.XSD_STRING}> .\n'
        )
        assert onto.entities["http://x/A"].labels == {"und": ("5",)}

    def test_missing_dot_is_malformed(self):
        with pytest.raises(MalformedSyntax):
            parse_nt(f'<http://x/A> {RDFS_LABEL} "a"\n')

    def test_error_carries_position(self):
        text = f'<http://x/A> {RDFS_LABEL} "ok" .\n<http://x/B> {RDFS_LABEL} bad .\n'
        with pytest.raises(MalformedSyntax) as err:
            parse_nt(text)
        assert err.value.line == 2

    def test_single_quotes_rejected_in_ntriples(self):
        with pytest.raises(MalformedSyntax):
            parse_nt(f"<http://x/A> {RDFS_LABEL} 'a' .\n")

    def test_relative_iri_rejected(self):
        with pytest.raises(MalformedSyntax):
            parse_nt(f'<A> {RDFS_LABEL} "a" .\n')


class TestTurtle:
    def test_five_triple_fixture(self):
        onto = parse_ttl(FIVE_TRIPLE_TTL)
        assert len(onto.entities) == 3
        assert len(onto.subclass_edges) == 1
        uni = onto.entities["http://example.org/uni#University"]
        assert uni.kind == EntityKind.CLASS
        assert uni.labels == {"de": ("Universität",), "en": ("University",)}
        assert ("http://example.org/uni#University",
                "http://example.org/uni#EducationalInstitution") in onto.subclass_edges

    def test_object_list_comma(self):
        onto = parse_ttl(
            '@prefix ex: <http://x/> .\n'
            '@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .\n'
            'ex:A rdfs:label "one"@en, "two"@en .\n'
        )
        assert onto.entities["http://x/A"].labels["en"] == ("one", "two")

    def test_sparql_style_prefix_and_base(self):
        onto = parse_ttl(
            "PREFIX rdfs: <http://www.w3.org/2000/01/rdf-schema#>\n"
            "BASE <http://base.org/onto/>\n"
            '<Thing> rdfs:label "thing"@en .\n'
        )
        assert "http://base.org/onto/Thing" in onto.entities

    def test_numeric_and_boolean_shorthand_ignored_predicate(self):
        onto = parse_ttl(
            "@prefix ex: <http://x/> .\n"
            "ex:A ex:weight 3.5 ; ex:active true ; ex:count 7 .\n"
        )
        # unrecognized predicates with shorthand objects parse but are counted
        assert sum(onto.ignored_predicates.values()) == 3
        assert len(onto.entities) == 0

    def test_long_string_literal(self):
        onto = parse_ttl(
            '@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .\n'
            '@prefix ex: <http://x/> .\n'
            'ex:A rdfs:comment """multi\nline "quoted" text"""@en .\n'
        )
        assert onto.entities["http://x/A"].comments["en"] == ('multi\nline "quoted" text',)

    def test_undeclared_prefix(self):
        with pytest.raises(MalformedSyntax) as err:
            parse_ttl('nope:A <http://x/p> <http://x/B> .\n')
        assert "nope" in err.value.detail

    def test_collections_unsupported(self):
        with pytest.raises(UnsupportedFeature):
            parse_ttl(
                "@prefix ex: <http://x/> .\n"
                "ex:A ex:list (1 2 3) .\n"
            )

    def test_anonymous_bnode_unsupported(self):
        with pytest.raises(UnsupportedFeature):
            parse_ttl(
                "@prefix ex: <http://x/> .\n"
                "ex:A ex:p [ ex:q 1 ] .\n"
            )

    def test_quoted_triples_unsupported(self):
        with pytest.raises(UnsupportedFeature):
            parse_ttl(
                "@prefix ex: <http://x/> .\n"
                "<< ex:A ex:p ex:B >> ex:q 1 .\n"
            )

    def test_trailing_semicolon(self):
        onto = parse_ttl(
            '@prefix ex: <http://x/> .\n'
            '@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .\n'
            'ex:A rdfs:label "a"@en ; .\n'
        )
        assert onto.entities["http://x/A"].labels["en"] == ("a",)


class TestKindEvidence:
    def test_explicit_kinds(self):
        onto = parse_ttl(
            "@prefix ex: <http://x/> .\n"
            "@prefix owl: <http://www.w3.org/2002/07/owl#> .\n"
            "ex:C a owl:Class .\n"
            "ex:P a owl:ObjectProperty .\n"
            "ex:D a owl:DatatypeProperty .\n"
            "ex:I a owl:NamedIndividual .\n"
        )
        kinds = {iri: e.kind for iri, e in onto.entities.items()}
        assert kinds["http://x/C"] == EntityKind.CLASS
        assert kinds["http://x/P"] == EntityKind.OBJECT_PROPERTY
        assert kinds["http://x/D"] == EntityKind.DATA_PROPERTY
        assert kinds["http://x/I"] == EntityKind.INDIVIDUAL

    def test_instance_typing_makes_individual_and_class(self):
        onto = parse_ttl(
            "@prefix ex: <http://x/> .\n"
            "ex:marie a ex:Scientist .\n"
        )
        assert onto.entities["http://x/marie"].kind == EntityKind.INDIVIDUAL
        assert onto.entities["http://x/Scientist"].kind == EntityKind.CLASS

    def test_subclass_participation_implies_class(self):
        onto = parse_ttl(
            "@prefix ex: <http://x/> .\n"
            "@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .\n"
            "ex:A rdfs:subClassOf ex:B .\n"
        )
        assert onto.entities["http://x/A"].kind == EntityKind.CLASS
        assert onto.entities["http://x/B"].kind == EntityKind.CLASS

    def test_explicit_wins_over_weak_evidence(self):
        onto = parse_ttl(
            "@prefix ex: <http://x/> .\n"
            "@prefix owl: <http://www.w3.org/2002/07/owl#> .\n"
            "@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .\n"
            "ex:P a owl:ObjectProperty ; rdfs:subClassOf ex:Q .\n"
        )
        assert onto.entities["http://x/P"].kind == EntityKind.OBJECT_PROPERTY

    def test_untyped_property_with_domain_is_unknown(self):
        onto = parse_ttl(
            "@prefix ex: <http://x/> .\n"
            "@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .\n"
            "ex:p rdfs:domain ex:C .\n"
        )
        assert onto.entities["http://x/p"].kind == EntityKind.UNKNOWN
        assert onto.entities["http://x/C"].kind == EntityKind.CLASS


class TestStructure:
    def test_self_loop_subclass_dropped(self):
        onto = parse_nt(f"<http://x/A> {SUBCLASS} <http://x/A> .\n")
        assert not onto.subclass_edges

    def test_equivalence_stored_direction_insensitive(self):
        a = parse_nt(f"<http://x/A> <{ns.OWL_EQUIVALENTCLASS}> <http://x/B> .\n")
        b = parse_nt(f"<http://x/B> <{ns.OWL_EQUIVALENTCLASS}> <http://x/A> .\n")
        assert a.equivalence_edges == b.equivalence_edges

    def test_domain_range_collected(self):
        onto = parse_ttl(
            "@prefix ex: <http://x/> .\n"
            "@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .\n"
            "ex:teaches rdfs:domain ex:Professor ; rdfs:range ex:Course .\n"
        )
        assert onto.property_domains["http://x/teaches"] == frozenset({"http://x/Professor"})
        assert onto.property_ranges["http://x/teaches"] == frozenset({"http://x/Course"})

    def test_edges_always_resolve_to_entities(self):
        onto = parse_ttl(FIVE_TRIPLE_TTL)
        for child, parent in onto.subclass_edges:
            assert child in onto.entities
            assert parent in onto.entities
        for prop, classes in onto.property_domains.items():
            assert prop in onto.entities
            assert classes <= onto.entities.keys()

    def test_unrecognized_predicates_counted(self):
        onto = parse_nt(
            "<http://x/A> <http://x/custom> <http://x/B> .\n"
            "<http://x/A> <http://x/custom> <http://x/C> .\n"
        )
        assert onto.ignored_predicates == {"http://x/custom": 2}
        # ignored triples do not create entities
        assert len(onto.entities) == 0


ROUNDTRIP_TTL = """\
@prefix ex: <http://example.org/z#> .
@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .
@prefix owl: <http://www.w3.org/2002/07/owl#> .
@prefix xsd: <http://www.w3.org/2001/XMLSchema#> .

ex:University a owl:Class ;
    rdfs:label "University"@en, "Universit\\u00E4t"@de ;
    rdfs:label "untagged" ;
    rdfs:comment "Grants degrees."@en ;
    rdfs:subClassOf ex:EducationalInstitution .
ex:EducationalInstitution a owl:Class ; rdfs:label "Educational Institution"@en .
ex:College a owl:Class ; owl:equivalentClass ex:University .
ex:teaches a owl:ObjectProperty ; rdfs:domain ex:Professor ; rdfs:range ex:Course .
ex:hasName a owl:DatatypeProperty ; rdfs:domain ex:Professor ; rdfs:range xsd:string .
ex:Professor a owl:Class .
ex:Course a owl:Class .
ex:marie a ex:Professor .
"""


class TestModelInvariants:
    def test_ntriples_round_trip(self):
        first = parse_ttl(ROUNDTRIP_TTL)
        reparsed = parse_nt(serialize_ntriples(first))
        assert reparsed == first

    def test_round_trip_is_stable(self):
        first = parse_ttl(ROUNDTRIP_TTL)
        once = serialize_ntriples(first)
        twice = serialize_ntriples(parse_nt(once))
        assert once == twice

    def test_permutation_insensitive(self):
        base = parse_ttl(ROUNDTRIP_TTL)
        lines = [ln for ln in serialize_ntriples(base).splitlines() if ln]
        rng = random.Random(7)
        for _ in range(5):
            rng.shuffle(lines)
            assert parse_nt("\n".join(lines) + "\n") == base

    def test_empty_serialization(self):
        assert serialize_ntriples(parse_nt("")) == ""
