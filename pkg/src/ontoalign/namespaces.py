"""Namespace constants for the RDF vocabularies the engine understands."""

RDF = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS = "http://www.w3.org/2000/01/rdf-schema#"
OWL = "http://www.w3.org/2002/07/owl#"
XSD = "http://www.w3.org/2001/XMLSchema#"

RDF_TYPE = RDF + "type"
RDFS_LABEL = RDFS + "label"
RDFS_COMMENT = RDFS + "comment"
RDFS_SUBCLASSOF = RDFS + "subClassOf"
RDFS_DOMAIN = RDFS + "domain"
RDFS_RANGE = RDFS + "range"
RDFS_CLASS = RDFS + "Class"
OWL_CLASS = OWL + "Class"
OWL_EQUIVALENTCLASS = OWL + "equivalentClass"
OWL_OBJECTPROPERTY = OWL + "ObjectProperty"
OWL_DATATYPEPROPERTY = OWL + "DatatypeProperty"
OWL_ANNOTATIONPROPERTY = OWL + "AnnotationProperty"
OWL_NAMEDINDIVIDUAL = OWL + "NamedIndividual"
OWL_ONTOLOGY = OWL + "Ontology"
OWL_RESTRICTION = OWL + "Restriction"
OWL_THING = OWL + "Thing"

XSD_STRING = XSD + "string"
XSD_INTEGER = XSD + "integer"
XSD_DECIMAL = XSD + "decimal"
XSD_DOUBLE = XSD + "double"
XSD_BOOLEAN = XSD + "boolean"

#: Namespace under which blank nodes are skolemized to stable IRIs.
SKOLEM = "urn:ontoalign:skolem:"

#: Vocabulary namespaces whose members never become ontology entities
#: when seen as the object of an rdf:type triple.
VOCAB_NAMESPACES = (RDF, RDFS, OWL, XSD)


def in_vocab(iri: str) -> bool:
    return iri.startswith(VOCAB_NAMESPACES)
