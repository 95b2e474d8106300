"""Tier layouts for story pieces and the linear order of pieces.

Each backbone shape maps to one comic layout pattern; cells live in
tier-fraction coordinates and tile the tier exactly. Pieces are ordered by
the cheapest open path through their root charts.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import permutations
from typing import Sequence

from .backbone import BackboneShape, StoryBackbone
from .chart_model import ChartSpec
from .rational import to_fraction

F = Fraction


class LayoutPattern(str, Enum):
    FULL = "FULL"
    PARALLEL2 = "PARALLEL2"
    PARALLEL3 = "PARALLEL3"
    LARGE_LEFT = "LARGE_LEFT"
    GRID2X2 = "GRID2x2"
    HERO_PLUS3 = "HERO_PLUS3"
    WIDE_TOP = "WIDE_TOP"
    L_SHAPE = "L_SHAPE"


@dataclass(frozen=True)
class Cell:
    chart_id: str
    x: Fraction
    y: Fraction
    w: Fraction
    h: Fraction


@dataclass
class TierLayout:
    pattern: LayoutPattern
    cells: list[Cell]
    reading_order: list[str]


@dataclass
class StoryOrder:
    sequence: list[int]
    total_cost: Fraction


PATTERN_FOR_SHAPE: dict[BackboneShape, LayoutPattern] = {
    BackboneShape.SINGLE: LayoutPattern.FULL,
    BackboneShape.CHAIN2: LayoutPattern.PARALLEL2,
    BackboneShape.CHAIN3: LayoutPattern.PARALLEL3,
    BackboneShape.FORK3: LayoutPattern.LARGE_LEFT,
    BackboneShape.CHAIN4: LayoutPattern.GRID2X2,
    BackboneShape.STAR4: LayoutPattern.HERO_PLUS3,
    BackboneShape.FORK_DEEP4: LayoutPattern.WIDE_TOP,
    BackboneShape.FORK_SIDE4: LayoutPattern.L_SHAPE,
}

# Cell rectangles (x, y, w, h) in tier fractions, in placement order.
PATTERN_CELLS: dict[LayoutPattern, list[tuple[Fraction, Fraction, Fraction, Fraction]]] = {
    LayoutPattern.FULL: [(F(0), F(0), F(1), F(1))],
    LayoutPattern.PARALLEL2: [
        (F(0), F(0), F(1, 2), F(1)),
        (F(1, 2), F(0), F(1, 2), F(1)),
    ],
    LayoutPattern.PARALLEL3: [
        (F(0), F(0), F(1, 3), F(1)),
        (F(1, 3), F(0), F(1, 3), F(1)),
        (F(2, 3), F(0), F(1, 3), F(1)),
    ],
    LayoutPattern.LARGE_LEFT: [
        (F(0), F(0), F(3, 5), F(1)),
        (F(3, 5), F(0), F(2, 5), F(1, 2)),
        (F(3, 5), F(1, 2), F(2, 5), F(1, 2)),
    ],
    LayoutPattern.GRID2X2: [
        (F(0), F(0), F(1, 2), F(1, 2)),
        (F(1, 2), F(0), F(1, 2), F(1, 2)),
        (F(0), F(1, 2), F(1, 2), F(1, 2)),
        (F(1, 2), F(1, 2), F(1, 2), F(1, 2)),
    ],
    LayoutPattern.HERO_PLUS3: [
        (F(0), F(0), F(1, 2), F(1)),
        (F(1, 2), F(0), F(1, 2), F(1, 3)),
        (F(1, 2), F(1, 3), F(1, 2), F(1, 3)),
        (F(1, 2), F(2, 3), F(1, 2), F(1, 3)),
    ],
    LayoutPattern.WIDE_TOP: [
        (F(0), F(0), F(1), F(1, 2)),
        (F(0), F(1, 2), F(1, 3), F(1, 2)),
        (F(1, 3), F(1, 2), F(1, 3), F(1, 2)),
        (F(2, 3), F(1, 2), F(1, 3), F(1, 2)),
    ],
    LayoutPattern.L_SHAPE: [
        (F(0), F(0), F(2, 3), F(2, 3)),
        (F(2, 3), F(0), F(1, 3), F(2, 3)),
        (F(0), F(2, 3), F(1, 2), F(1, 3)),
        (F(1, 2), F(2, 3), F(1, 2), F(1, 3)),
    ],
}


def parse_pattern_table(raw: dict) -> dict[BackboneShape, LayoutPattern]:
    """Parse a config-level shape-to-pattern override map (string keys)."""
    table = {}
    for shape_name, pattern_name in raw.items():
        shape = BackboneShape(shape_name)
        pattern = LayoutPattern(pattern_name)
        if len(PATTERN_CELLS[pattern]) != len(PATTERN_CELLS[PATTERN_FOR_SHAPE[shape]]):
            raise ValueError(
                f"pattern {pattern.value} cannot hold a {shape.value} piece"
            )
        table[shape] = pattern
    return table


def _sorted_children(backbone: StoryBackbone, node: str) -> list[str]:
    pairs = [(e.weight, e.child) for e in backbone.edges if e.parent == node]
    return [child for _, child in sorted(pairs)]


def reading_order(backbone: StoryBackbone) -> list[str]:
    """Preorder walk from the root, children by ascending edge weight."""
    order: list[str] = []
    stack = [backbone.root]
    while stack:
        node = stack.pop()
        order.append(node)
        stack.extend(reversed(_sorted_children(backbone, node)))
    return order


def _structural_placement(backbone: StoryBackbone, pattern: LayoutPattern) -> list[str] | None:
    """Chart placement for patterns whose cells have structural meaning."""
    root = backbone.root
    children = _sorted_children(backbone, root)
    if pattern in (LayoutPattern.LARGE_LEFT, LayoutPattern.HERO_PLUS3):
        return [root, *children]
    if pattern is LayoutPattern.WIDE_TOP:
        mid = children[0]
        return [root, mid, *_sorted_children(backbone, mid)]
    if pattern is LayoutPattern.L_SHAPE:
        # Chain child sits right of the root, its child bottom-left,
        # the leaf child bottom-right.
        chain = next(c for c in children if _sorted_children(backbone, c))
        leaf = next(c for c in children if c != chain)
        return [root, chain, _sorted_children(backbone, chain)[0], leaf]
    return None


def assign_layout(
    backbone: StoryBackbone,
    pattern_table: dict[BackboneShape, LayoutPattern] | None = None,
) -> TierLayout:
    """Lay a backbone out as one tier.

    `pattern_table` overrides the shape-to-pattern mapping (for restyling);
    the replacement pattern must hold the same number of charts.
    """
    table = dict(PATTERN_FOR_SHAPE)
    if pattern_table:
        table.update(pattern_table)
    pattern = table[backbone.shape]
    rects = PATTERN_CELLS[pattern]
    order = reading_order(backbone)
    if len(rects) != len(order):
        raise ValueError(
            f"pattern {pattern.value} holds {len(rects)} charts, "
            f"shape {backbone.shape.value} has {len(order)}"
        )

    native = PATTERN_FOR_SHAPE[backbone.shape] is pattern
    placement = _structural_placement(backbone, pattern) if native else None
    if placement is None:
        placement = order
    cells = [
        Cell(chart_id=cid, x=r[0], y=r[1], w=r[2], h=r[3])
        for cid, r in zip(placement, rects)
    ]
    return TierLayout(pattern=pattern, cells=cells, reading_order=order)


def _path_cost(seq: tuple[int, ...], dist) -> Fraction:
    return sum((dist[seq[i]][seq[i + 1]] for i in range(len(seq) - 1)), Fraction(0))


def order_pieces(roots: Sequence[ChartSpec], matrix: Sequence[Sequence]) -> StoryOrder:
    """Linear order of pieces: the minimum-cost open path through root charts.

    Exact for up to 8 pieces (brute force over orientations and permutations);
    nearest-neighbor from the designated start beyond that. The start piece is
    the one whose root has the fewest specifications (ties: earliest created).
    Cost ties prefer paths that begin at the start piece, then the
    lexicographically smallest sequence.
    """
    k = len(roots)
    if k == 0:
        raise ValueError("no pieces to order")
    dist = [[to_fraction(matrix[i][j]) for j in range(k)] for i in range(k)]
    start = min(range(k), key=lambda i: (roots[i].spec_count, roots[i].created_at, roots[i].id))
    if k == 1:
        return StoryOrder(sequence=[0], total_cost=Fraction(0))

    if k <= 8:
        best_seq = None
        best_key = None
        for seq in permutations(range(k)):
            key = (_path_cost(seq, dist), 0 if seq[0] == start else 1, seq)
            if best_key is None or key < best_key:
                best_key = key
                best_seq = seq
        return StoryOrder(sequence=list(best_seq), total_cost=best_key[0])

    sequence = [start]
    remaining = set(range(k)) - {start}
    while remaining:
        here = sequence[-1]
        nxt = min(remaining, key=lambda j: (dist[here][j], j))
        sequence.append(nxt)
        remaining.discard(nxt)
    return StoryOrder(sequence=sequence, total_cost=_path_cost(tuple(sequence), dist))
