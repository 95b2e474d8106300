"""Group charts into story pieces with size-capped average-linkage clustering.

Greedy agglomeration over the distance matrix: repeatedly merge the cheapest
cluster pair whose merged size stays within the cap and whose linkage stays
under the threshold. Over-cap candidates are skipped, not fatal, so small
clusters can still find partners.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import InvalidThreshold
from .rational import to_fraction


@dataclass(frozen=True)
class MergeStep:
    a: frozenset
    b: frozenset
    linkage: Fraction


@dataclass
class Partition:
    pieces: list[frozenset]
    merge_log: list[MergeStep]


def default_threshold(matrix: Sequence[Sequence]) -> Fraction:
    """Mean of all off-diagonal pairwise distances."""
    n = len(matrix)
    if n < 2:
        raise ValueError("default threshold needs at least 2 charts")
    total = Fraction(0)
    count = 0
    for i in range(n):
        for j in range(i + 1, n):
            total += to_fraction(matrix[i][j])
            count += 1
    return total / count


def partition(
    matrix: Sequence[Sequence],
    max_size: int = 4,
    tau=None,
    labels: Sequence | None = None,
) -> Partition:
    """Cluster matrix rows into pieces of at most `max_size` members.

    `labels` names the rows (chart ids); ties between equal-linkage merges
    break on the sorted (min label of A, min label of B) pair, so permuting
    the input order permutes only the labels, not the grouping. `tau` defaults
    to the mean pairwise distance.
    """
    n = len(matrix)
    if max_size < 1:
        raise ValueError("max_size must be at least 1")
    if labels is None:
        labels = list(range(n))
    labels = list(labels)
    if len(labels) != n:
        raise ValueError("labels must match matrix size")

    if tau is None:
        tau = default_threshold(matrix) if n >= 2 else Fraction(0)
    else:
        tau = to_fraction(tau)
        if tau < 0:
            raise InvalidThreshold(f"threshold must be nonnegative, got {tau}")

    dist = [[to_fraction(matrix[i][j]) for j in range(n)] for i in range(n)]

    # Clusters keyed by a stable integer id; linkage maintained pairwise via
    # the Lance-Williams average-linkage update (exact in Fractions).
    members: dict[int, frozenset] = {i: frozenset([labels[i]]) for i in range(n)}
    sizes: dict[int, int] = {i: 1 for i in range(n)}
    linkage: dict[tuple[int, int], Fraction] = {}
    for i in range(n):
        for j in range(i + 1, n):
            linkage[(i, j)] = dist[i][j]
    next_id = n
    merge_log: list[MergeStep] = []

    def pair_key(i: int, j: int) -> tuple[int, int]:
        return (i, j) if i < j else (j, i)

    while True:
        best = None
        for (i, j), d in linkage.items():
            if sizes[i] + sizes[j] > max_size or d > tau:
                continue
            lo_i, lo_j = min(members[i]), min(members[j])
            first, second = (i, j) if lo_i < lo_j else (j, i)
            key = (d, min(members[first]), min(members[second]))
            if best is None or key < best[0]:
                best = (key, first, second)
        if best is None:
            break
        _, a, b = best
        merge_log.append(MergeStep(a=members[a], b=members[b], linkage=linkage[pair_key(a, b)]))

        new_id = next_id
        next_id += 1
        merged = members[a] | members[b]
        for other in list(members):
            if other in (a, b):
                continue
            da = linkage.pop(pair_key(a, other))
            db = linkage.pop(pair_key(b, other))
            linkage[pair_key(new_id, other)] = (sizes[a] * da + sizes[b] * db) / (
                sizes[a] + sizes[b]
            )
        linkage.pop(pair_key(a, b))
        members[new_id] = merged
        sizes[new_id] = sizes[a] + sizes[b]
        del members[a], members[b], sizes[a], sizes[b]

    pieces = sorted(members.values(), key=lambda piece: min(piece))
    return Partition(pieces=pieces, merge_log=merge_log)
