from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from _oracles import sat_scan
from supermetric.index import Space, select_fft, select_random, select_sat


def line_space(values):
    return Space(np.asarray(values, dtype=float).reshape(-1, 1), "euclidean")


def test_fft_greedy_max_min():
    sp = line_space(range(11))
    assert select_fft(sp, range(11), 2, seed=0, first=0) == [0, 10]
    assert select_fft(sp, range(11), 3, seed=0, first=0) == [0, 10, 5]


def test_fft_seeded_first_pick_is_reproducible():
    sp = line_space(np.random.default_rng(0).random(50))
    assert select_fft(sp, range(50), 5, seed=7) == select_fft(sp, range(50), 5, seed=7)


def test_random_reproducible_and_distinct():
    a = select_random(range(100), 10, seed=3)
    assert a == select_random(range(100), 10, seed=3)
    assert len(set(a)) == 10


@pytest.mark.parametrize("fn", [select_random, lambda c, k, s: select_fft(line_space(range(5)), c, k, s)])
def test_too_many_pivots(fn):
    with pytest.raises(ValueError):
        fn(list(range(5)), 6, 0)


def test_sat_hand_simulation():
    sp = line_space([0, 1, 2, 3])
    assert select_sat(sp, [1, 2, 3], 0, "proximal") == [1]
    assert select_sat(sp, [1, 2, 3], 0, "distal") == [3, 1]
    assert select_sat(sp, [1, 2, 3], 0, "distal", cap=1) == [3]
    assert select_sat(sp, [], 0, "proximal") == []


def test_sat_global_order_uses_tree_centre():
    # scan order comes from the tree centre (id 4 at 10): -1, 2, 3; 3 is nearer 2 than the node centre
    sp = line_space([0, -1, 2, 3, 10])
    assert select_sat(sp, [1, 2, 3], 0, "global", global_centre=4) == [1, 2]
    assert select_sat(sp, [1, 2, 3], 0, "distal") == [3, 1]


@given(st.lists(st.integers(-1000, 1000).filter(lambda v: v != 0), min_size=1, max_size=25, unique=True),
       st.sampled_from(["proximal", "distal"]))
def test_sat_scan_matches_reference(values, order):
    # unique absolute values keep the scan order free of ties
    seen, vals = set(), []
    for v in values:
        if abs(v) not in seen:
            seen.add(abs(v))
            vals.append(v)
    sp = line_space([0] + vals)
    ids = list(range(1, len(vals) + 1))
    got = [int(sp.data[i, 0]) for i in select_sat(sp, ids, 0, order)]
    assert got == sat_scan(vals, 0, order)
