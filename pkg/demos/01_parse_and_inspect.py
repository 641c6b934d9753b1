"""Parse a small Turtle ontology and walk through what the model captured.

Run from the repository root:

    python3 demos/01_parse_and_inspect.py
"""

from pathlib import Path

from ontoalign import compute_closure, local_name, parse_ontology_file

DATA = Path(__file__).parent / "data"


def main() -> None:
    onto = parse_ontology_file(DATA / "bilingual_en.ttl")

    print(f"parsed {len(onto)} entities from {DATA / 'bilingual_en.ttl'}")
    print()

    # Every entity carries a kind (class / property / unknown) and its
    # language-tagged labels exactly as declared in the source file.
    print("entities and labels:")
    for iri in sorted(onto.entities):
        entity = onto.entities[iri]
        labels = {lang: list(values) for lang, values in entity.labels.items()}
        print(f"  {local_name(iri):16s} {entity.kind.name:9s} {labels}")
    print()

    print("subclass edges (child -> parent):")
    for child, parent in sorted(onto.subclass_edges):
        print(f"  {local_name(child)} -> {local_name(parent)}")
    print()

    print("property domains:")
    for prop, classes in sorted(onto.property_domains.items()):
        names = ", ".join(sorted(local_name(c) for c in classes))
        print(f"  {local_name(prop)} applies to {names}")
    print()

    # The structural closure turns those edges into per-entity context:
    # all ancestors, siblings via a shared parent, and properties reaching
    # the class through its ancestry.
    inferred = compute_closure(onto)
    print("closure context:")
    for iri in sorted(onto.entities):
        ancestors = [local_name(a) for a in inferred.ancestors[iri]]
        siblings = sorted(local_name(s) for s in inferred.siblings[iri])
        props = sorted(local_name(p) for p in inferred.attached_properties[iri])
        print(f"  {local_name(iri):16s} ancestors={ancestors} siblings={siblings} properties={props}")


if __name__ == "__main__":
    main()
