import numpy as np
from hypothesis import HealthCheck, given, settings, strategies as st

from bunkbed.unionfind import DisjointSet, batched_roots


def test_disjoint_set():
    sets = DisjointSet('abcde')
    assert sets.union('a', 'b')
    assert sets.union('d', 'e')
    assert not sets.union('b', 'a')
    assert sets.connected('a', 'b')
    assert not sets.connected('a', 'c')
    assert sets.groups('edcba') == [['e', 'd'], ['c'], ['b', 'a']]
    assert sorted(sorted(s) for s in sets.itersets()) == [['a', 'b'], ['c'], ['d', 'e']]


def test_batched_roots_are_smallest_members():
    mask = np.array([[False, False], [True, False], [False, True], [True, True]])
    roots = batched_roots(3, [(0, 1), (1, 2)], mask)
    assert roots.tolist() == [[0, 1, 2], [0, 0, 2], [0, 1, 1], [0, 0, 0]]


@st.composite
def configurations(draw):
    n = draw(st.integers(min_value=1, max_value=6))
    pair = st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(lambda e: e[0] != e[1])
    edges = draw(st.lists(pair, max_size=8))
    row = st.lists(st.booleans(), min_size=len(edges), max_size=len(edges))
    rows = draw(st.lists(row, min_size=1, max_size=5))
    return n, edges, rows


@settings(max_examples=60, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(configurations())
def test_batched_roots_agree_with_disjoint_set(configuration):
    n, edges, rows = configuration
    mask = np.array(rows, dtype=bool).reshape(len(rows), len(edges))
    roots = batched_roots(n, edges, mask)

    for r, row in enumerate(rows):
        sets = DisjointSet(range(n))
        for (a, b), is_open in zip(edges, row):
            if is_open:
                sets.union(a, b)
        expected = [min(x for x in range(n) if sets.connected(x, v)) for v in range(n)]
        assert roots[r].tolist() == expected
