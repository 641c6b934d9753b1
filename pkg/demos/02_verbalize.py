"""Turn ontology entities into natural-language descriptions.

The verbalizer renders one sentence per entity from its label plus the
structural context the closure derived (parents, siblings, properties,
domains). Those sentences are what gets embedded downstream, so two
ontologies in different languages become comparable text.

    python3 demos/02_verbalize.py
"""

from pathlib import Path

from ontoalign import (
    Template,
    VerbalizerConfig,
    compute_closure,
    local_name,
    parse_ontology_file,
    verbalize,
    verbalize_all,
)

DATA = Path(__file__).parent / "data"


def show_side(path: Path, preference: list) -> None:
    inferred = compute_closure(parse_ontology_file(path))
    print(f"--- {path.name} (label preference {preference}) ---")
    for rendered in verbalize_all(inferred, preference):
        print(f"  {local_name(rendered.entity):16s} [{rendered.language}] {rendered.text}")
    print()


def main() -> None:
    show_side(DATA / "bilingual_en.ttl", ["en"])
    show_side(DATA / "bilingual_de.ttl", ["de"])

    # Templates control how much context goes into the sentence. LABEL_ONLY
    # is the degenerate form used by the "no verbalization" ablation: the
    # bare label with no structural context at all.
    inferred = compute_closure(parse_ontology_file(DATA / "bilingual_en.ttl"))
    product = next(iri for iri in inferred.base.entities if local_name(iri) == "Product")
    full = verbalize(product, inferred, ["en"])
    bare = verbalize(product, inferred, ["en"], VerbalizerConfig(template=Template.LABEL_ONLY))
    print("template comparison for Product:")
    print(f"  full sentence: {full.text}")
    print(f"  label only:    {bare.text}")


if __name__ == "__main__":
    main()
