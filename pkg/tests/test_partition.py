import random
from fractions import Fraction
from itertools import combinations

import pytest

from comicforge.errors import InvalidThreshold
from comicforge.partition import default_threshold, partition

from conftest import random_matrix


def oracle_merge_order(matrix, max_size, tau, labels):
    """From-scratch average-linkage oracle: recompute every pair's linkage
    from the raw matrix at each step (no incremental updates)."""
    n = len(matrix)
    clusters = [frozenset([i]) for i in range(n)]
    log = []
    while True:
        best = None
        for a, b in combinations(range(len(clusters)), 2):
            ca, cb = clusters[a], clusters[b]
            if len(ca) + len(cb) > max_size:
                continue
            link = Fraction(sum(matrix[i][j] for i in ca for j in cb), len(ca) * len(cb))
            if link > tau:
                continue
            la = min(labels[i] for i in ca)
            lb = min(labels[i] for i in cb)
            first, second = (a, b) if la < lb else (b, a)
            key = (
                link,
                min(labels[i] for i in clusters[first]),
                min(labels[i] for i in clusters[second]),
            )
            if best is None or key < best[0]:
                best = (key, first, second)
        if best is None:
            break
        _, a, b = best
        log.append(
            (
                frozenset(labels[i] for i in clusters[a]),
                frozenset(labels[i] for i in clusters[b]),
                best[0][0],
            )
        )
        merged = clusters[a] | clusters[b]
        clusters = [c for k, c in enumerate(clusters) if k not in (a, b)] + [merged]
    pieces = sorted(
        (frozenset(labels[i] for i in c) for c in clusters), key=lambda p: min(p)
    )
    return pieces, log


def test_four_identical_charts_form_one_piece():
    matrix = [[0] * 4 for _ in range(4)]
    result = partition(matrix, max_size=4, tau=0)
    assert result.pieces == [frozenset({0, 1, 2, 3})]


def test_five_identical_charts_leave_last_as_singleton():
    matrix = [[0] * 5 for _ in range(5)]
    result = partition(matrix, max_size=4, tau=0)
    assert result.pieces == [frozenset({0, 1, 2, 3}), frozenset({4})]


def test_two_well_separated_blobs():
    n = 6
    half = Fraction(1, 2)
    matrix = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            same = (i < 3) == (j < 3)
            matrix[i][j] = half if same else Fraction(10)
    result = partition(matrix, max_size=4, tau=2)
    assert result.pieces == [frozenset({0, 1, 2}), frozenset({3, 4, 5})]
    # no cross-blob pair could have merged under tau
    for step in result.merge_log:
        assert step.linkage <= 2


def test_default_threshold_zero_matrix():
    assert default_threshold([[0, 0], [0, 0]]) == 0


def test_default_threshold_simple_mean():
    matrix = [
        [0, 1, 2],
        [1, 0, 3],
        [2, 3, 0],
    ]
    assert default_threshold(matrix) == 2


def test_default_threshold_random_matches_upper_triangle():
    rng = random.Random(5)
    matrix = random_matrix(rng, 6)
    cells = [matrix[i][j] for i in range(6) for j in range(i + 1, 6)]
    assert default_threshold(matrix) == sum(cells) / len(cells)


def test_negative_threshold_rejected():
    with pytest.raises(InvalidThreshold):
        partition([[0, 1], [1, 0]], tau=-1)


def test_merge_order_matches_oracle_small_ensembles():
    rng = random.Random(13)
    for _ in range(60):
        n = rng.randint(2, 6)
        matrix = random_matrix(rng, n)
        tau = default_threshold(matrix)
        labels = [f"c{i}" for i in range(n)]
        got = partition(matrix, max_size=4, tau=tau, labels=labels)
        want_pieces, want_log = oracle_merge_order(matrix, 4, tau, labels)
        assert got.pieces == want_pieces
        assert [(s.a, s.b, s.linkage) for s in got.merge_log] == want_log


def test_pieces_cover_all_and_respect_cap():
    rng = random.Random(17)
    for _ in range(40):
        n = rng.randint(1, 10)
        matrix = random_matrix(rng, n)
        result = partition(matrix, max_size=4)
        union = set()
        for piece in result.pieces:
            assert 1 <= len(piece) <= 4
            assert not (piece & union)
            union |= piece
        assert union == set(range(n))


def test_merge_log_nondecreasing_without_cap():
    rng = random.Random(23)
    for _ in range(40):
        n = rng.randint(2, 7)
        matrix = random_matrix(rng, n)
        result = partition(matrix, max_size=n, tau=Fraction(10**6))
        linkages = [s.linkage for s in result.merge_log]
        assert linkages == sorted(linkages)


def test_permuting_input_order_preserves_grouping():
    rng = random.Random(29)
    for _ in range(25):
        n = rng.randint(2, 7)
        matrix = random_matrix(rng, n)
        labels = [f"c{i}" for i in range(n)]
        tau = default_threshold(matrix)
        base = partition(matrix, max_size=4, tau=tau, labels=labels)

        perm = list(range(n))
        rng.shuffle(perm)
        shuffled = [[matrix[perm[i]][perm[j]] for j in range(n)] for i in range(n)]
        shuffled_labels = [labels[perm[i]] for i in range(n)]
        again = partition(shuffled, max_size=4, tau=tau, labels=shuffled_labels)
        assert set(base.pieces) == set(again.pieces)


def test_max_size_one_forces_singletons():
    matrix = [[0] * 3 for _ in range(3)]
    result = partition(matrix, max_size=1, tau=0)
    assert result.pieces == [frozenset({0}), frozenset({1}), frozenset({2})]
    assert result.merge_log == []
