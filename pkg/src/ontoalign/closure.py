"""Structural closure over a parsed ontology.

Derives the context downstream stages consume: transitive ancestor lists
over the subclass graph (with cycles collapsed onto one representative),
equivalence classes, sibling sets, and property attachments inherited
down the hierarchy. Only structural inference happens here; a full OWL
reasoner could be slotted in behind the same interface if consistency
checking or disjointness reasoning were ever needed.
"""

from __future__ import annotations

import logging
from collections import defaultdict, deque
from dataclasses import dataclass
from typing import Dict, FrozenSet, Mapping, Tuple

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .model import Iri, Ontology

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class InferredOntology:
    """An ontology plus everything the structural closure derived from it.

    All four maps are total over ``base.entities``; entities without
    hierarchy information map to empty collections (or to themselves, for
    ``equivalence_class``).

    ``ancestors`` lists are nearest-first by edge distance in the
    cycle-collapsed subclass graph, ties broken by IRI sort, and never
    contain the key or another member of the key's own cycle.
    ``equivalence_class`` maps each entity to the lexicographically
    smallest IRI of its equivalence class and is idempotent.
    ``siblings`` holds entities sharing at least one direct parent,
    excluding the key and its own cycle members. ``attached_properties``
    holds every property whose declared domain covers the class itself or
    any of its ancestors.
    """

    base: Ontology
    ancestors: Mapping[Iri, Tuple[Iri, ...]]
    equivalence_class: Mapping[Iri, Iri]
    siblings: Mapping[Iri, FrozenSet[Iri]]
    attached_properties: Mapping[Iri, FrozenSet[Iri]]


class _DisjointSet:
    def __init__(self) -> None:
        self._parent: Dict[str, str] = {}

    def find(self, x: str) -> str:
        parent = self._parent.setdefault(x, x)
        if parent != x:
            root = self.find(parent)
            self._parent[x] = root
            return root
        return x

    def union(self, a: str, b: str) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self._parent[rb] = ra

    def classes(self) -> Dict[str, list]:
        groups: Dict[str, list] = defaultdict(list)
        for member in self._parent:
            groups[self.find(member)].append(member)
        return groups


def _equivalence_map(onto: Ontology) -> Dict[Iri, Iri]:
    ds = _DisjointSet()
    for a, b in onto.equivalence_edges:
        ds.union(a, b)
    canonical = {iri: iri for iri in onto.entities}
    for members in ds.classes().values():
        smallest = min(members)
        for member in members:
            canonical[member] = smallest
    return canonical


def _collapse_cycles(onto: Ontology) -> Tuple[Dict[Iri, Iri], Dict[Iri, Tuple[Iri, ...]]]:
    """Map every entity to its cycle representative (lexicographically
    smallest member of its strongly connected component) and return the
    representative -> sorted members map."""
    nodes = sorted(onto.entities)
    if not nodes or not onto.subclass_edges:
        return {iri: iri for iri in nodes}, {iri: (iri,) for iri in nodes}
    index = {iri: i for i, iri in enumerate(nodes)}
    rows = [index[child] for child, _ in onto.subclass_edges]
    cols = [index[parent] for _, parent in onto.subclass_edges]
    graph = coo_matrix(
        (np.ones(len(rows)), (rows, cols)), shape=(len(nodes), len(nodes))
    )
    _, labels = connected_components(graph, directed=True, connection="strong")

    by_component: Dict[int, list] = defaultdict(list)
    for iri, component in zip(nodes, labels):
        by_component[int(component)].append(iri)

    representative: Dict[Iri, Iri] = {}
    members: Dict[Iri, Tuple[Iri, ...]] = {}
    cycles = []
    for group in by_component.values():
        group.sort()
        rep = group[0]
        members[rep] = tuple(group)
        for iri in group:
            representative[iri] = rep
        if len(group) > 1:
            cycles.append(group)
    if cycles:
        cycles.sort()
        logger.warning(
            "collapsed %d subclass cycle(s): %s",
            len(cycles),
            "; ".join(" <-> ".join(group) for group in cycles),
        )
    return representative, members


def compute_closure(onto: Ontology) -> InferredOntology:
    """Compute ancestor lists, equivalence classes, siblings, and inherited
    property attachments for every entity.

    Subclass cycles never raise: each strongly connected component is
    collapsed onto its lexicographically smallest member and reported as a
    warning, and every member of the cycle shares the collapsed node's
    ancestry.
    """
    equivalence = _equivalence_map(onto)
    rep_of, members = _collapse_cycles(onto)

    # Collapsed subclass graph over representatives, intra-cycle edges dropped.
    parents_of: Dict[Iri, set] = defaultdict(set)
    for child, parent in onto.subclass_edges:
        child_rep, parent_rep = rep_of[child], rep_of[parent]
        if child_rep != parent_rep:
            parents_of[child_rep].add(parent_rep)

    rep_ancestors: Dict[Iri, Tuple[Iri, ...]] = {}
    for rep in parents_of:
        distance = {rep: 0}
        queue = deque([rep])
        while queue:
            current = queue.popleft()
            for parent in parents_of.get(current, ()):
                if parent not in distance:
                    distance[parent] = distance[current] + 1
                    queue.append(parent)
        del distance[rep]
        rep_ancestors[rep] = tuple(
            sorted(distance, key=lambda iri: (distance[iri], iri))
        )

    children_of: Dict[Iri, set] = defaultdict(set)
    for child_rep, parent_reps in parents_of.items():
        for parent_rep in parent_reps:
            children_of[parent_rep].add(child_rep)

    rep_siblings: Dict[Iri, FrozenSet[Iri]] = {}
    for rep, parent_reps in parents_of.items():
        other_reps: set = set()
        for parent_rep in parent_reps:
            other_reps.update(children_of[parent_rep])
        other_reps.discard(rep)
        rep_siblings[rep] = frozenset(
            iri for other in other_reps for iri in members[other]
        )

    # Invert ancestry so a domain declaration on a class attaches the
    # property to every descendant in one pass.
    descendants: Dict[Iri, set] = defaultdict(set)
    for rep, ancestor_reps in rep_ancestors.items():
        for ancestor in ancestor_reps:
            descendants[ancestor].add(rep)
    rep_properties: Dict[Iri, set] = defaultdict(set)
    for prop, domains in onto.property_domains.items():
        for domain in domains:
            domain_rep = rep_of[domain]
            rep_properties[domain_rep].add(prop)
            for below in descendants.get(domain_rep, ()):
                rep_properties[below].add(prop)

    empty: FrozenSet[Iri] = frozenset()
    ancestors = {
        iri: rep_ancestors.get(rep_of[iri], ()) for iri in onto.entities
    }
    siblings = {
        iri: rep_siblings.get(rep_of[iri], empty) for iri in onto.entities
    }
    attached = {
        iri: frozenset(rep_properties.get(rep_of[iri], empty))
        for iri in onto.entities
    }
    return InferredOntology(
        base=onto,
        ancestors=ancestors,
        equivalence_class=equivalence,
        siblings=siblings,
        attached_properties=attached,
    )


def bare_closure(onto: Ontology) -> InferredOntology:
    """A closure with no derived structure: every map total but empty.

    Verbalizing against this strips parents, siblings, and inherited
    properties from the generated text, which is how the
    context-free ablation arm is realized without touching the
    verbalizer itself.
    """
    return InferredOntology(
        base=onto,
        ancestors={iri: () for iri in onto.entities},
        equivalence_class={iri: iri for iri in onto.entities},
        siblings={iri: frozenset() for iri in onto.entities},
        attached_properties={iri: frozenset() for iri in onto.entities},
    )
