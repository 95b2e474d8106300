"""Per-piece story backbone: a rooted minimum spanning tree over the charts.

The root is the simplest chart (fewest specifications, earliest creation on
ties); among weight-tied spanning trees the one with the most parent/child
pairs sharing an attribute set wins, so root-to-leaf walks stay on-topic.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .chart_model import ChartEnsemble, ChartSpec, attribute_set
from .errors import ShapeOverflow
from .rational import to_fraction


class BackboneShape(str, Enum):
    SINGLE = "SINGLE"
    CHAIN2 = "CHAIN2"
    CHAIN3 = "CHAIN3"
    FORK3 = "FORK3"
    CHAIN4 = "CHAIN4"
    STAR4 = "STAR4"
    FORK_DEEP4 = "FORK_DEEP4"
    FORK_SIDE4 = "FORK_SIDE4"


@dataclass(frozen=True)
class BackboneEdge:
    parent: str
    child: str
    weight: Fraction


@dataclass(frozen=True)
class StoryBackbone:
    root: str
    edges: frozenset[BackboneEdge]
    shape: BackboneShape

    @property
    def total_weight(self) -> Fraction:
        return sum((e.weight for e in self.edges), Fraction(0))

    def children_of(self, node: str) -> list[str]:
        return [e.child for e in self.edges if e.parent == node]

    def nodes(self) -> set[str]:
        out = {self.root}
        for e in self.edges:
            out.add(e.parent)
            out.add(e.child)
        return out


def _root_key(chart: ChartSpec) -> tuple:
    return (chart.spec_count, chart.created_at, chart.id)


def pick_root(charts: Sequence[ChartSpec]) -> ChartSpec:
    """Simplest chart; ties break on earliest created_at, then smallest id."""
    return min(charts, key=_root_key)


def _is_spanning_tree(ids: list[str], edge_set) -> bool:
    if len(edge_set) != len(ids) - 1:
        return False
    parent = {i: i for i in ids}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in edge_set:
        ru, rv = find(u), find(v)
        if ru == rv:
            return False
        parent[ru] = rv
    return True


def _kruskal(ids: list[str], weights: dict[tuple[str, str], Fraction]) -> list[tuple[str, str]]:
    parent = {i: i for i in ids}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    tree = []
    for (u, v) in sorted(weights, key=lambda e: (weights[e], e)):
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            tree.append((u, v))
            if len(tree) == len(ids) - 1:
                break
    return tree


def _attr_consistency(edge_set, attrs: dict[str, frozenset]) -> int:
    return sum(1 for u, v in edge_set if attrs[u] == attrs[v])


def build_backbone(piece: Iterable[str], matrix: Sequence[Sequence], ensemble: ChartEnsemble) -> StoryBackbone:
    """Build the rooted MST for a piece, given the full ensemble matrix."""
    ids = sorted(piece)
    charts = {cid: ensemble.chart_by_id(cid) for cid in ids}
    root = pick_root(list(charts.values())).id

    if len(ids) == 1:
        return StoryBackbone(root=root, edges=frozenset(), shape=BackboneShape.SINGLE)

    idx = {cid: ensemble.index_of(cid) for cid in ids}
    weights = {
        (u, v): to_fraction(matrix[idx[u]][idx[v]]) for u, v in combinations(ids, 2)
    }

    if len(ids) <= 4:
        # Small enough to enumerate every spanning tree: keep the minimum
        # weight ones, then prefer attribute-consistent adjacency.
        attrs = {cid: attribute_set(charts[cid]) for cid in ids}
        best_edges = None
        best_key = None
        for edge_set in combinations(sorted(weights), len(ids) - 1):
            if not _is_spanning_tree(ids, edge_set):
                continue
            total = sum((weights[e] for e in edge_set), Fraction(0))
            key = (total, -_attr_consistency(edge_set, attrs), edge_set)
            if best_key is None or key < best_key:
                best_key = key
                best_edges = edge_set
        tree_edges = list(best_edges)
    else:
        tree_edges = _kruskal(ids, weights)

    # Orient away from the root.
    adjacency: dict[str, list[str]] = {i: [] for i in ids}
    for u, v in tree_edges:
        adjacency[u].append(v)
        adjacency[v].append(u)
    edges: list[BackboneEdge] = []
    seen = {root}
    frontier = [root]
    while frontier:
        node = frontier.pop()
        for neighbor in sorted(adjacency[node]):
            if neighbor in seen:
                continue
            seen.add(neighbor)
            key = (node, neighbor) if (node, neighbor) in weights else (neighbor, node)
            edges.append(BackboneEdge(parent=node, child=neighbor, weight=weights[key]))
            frontier.append(neighbor)

    backbone = StoryBackbone(root=root, edges=frozenset(edges), shape=BackboneShape.SINGLE)
    return StoryBackbone(root=root, edges=frozenset(edges), shape=classify_shape(backbone))


def classify_shape(backbone: StoryBackbone) -> BackboneShape:
    """Classify a rooted tree of 1-4 nodes into one of the 8 tier shapes."""
    nodes = backbone.nodes()
    n = len(nodes)
    if n > 4:
        raise ShapeOverflow(f"backbone has {n} nodes; tiers support at most 4")
    if n == 1:
        return BackboneShape.SINGLE
    if n == 2:
        return BackboneShape.CHAIN2

    root_children = backbone.children_of(backbone.root)
    if n == 3:
        return BackboneShape.FORK3 if len(root_children) == 2 else BackboneShape.CHAIN3

    if len(root_children) == 3:
        return BackboneShape.STAR4
    if len(root_children) == 1:
        child = root_children[0]
        grandchildren = backbone.children_of(child)
        return BackboneShape.FORK_DEEP4 if len(grandchildren) == 2 else BackboneShape.CHAIN4
    return BackboneShape.FORK_SIDE4
