from collections import Counter

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from primereg.distributions import ValueDist, count_equal, sum_of, sumset

small = st.lists(st.tuples(st.integers(-300, 300), st.integers(1, 9)), min_size=0, max_size=25)


def dist(pairs, dtype=np.int64):
    if not pairs:
        return ValueDist(np.empty(0, dtype=np.int64), np.empty(0, dtype=dtype))
    v, w = zip(*pairs)
    return ValueDist.from_values(v, np.array(w, dtype=dtype))


def as_counter(pairs):
    c = Counter()
    for v, w in pairs:
        c[v] += w
    return c


@given(small, small)
def test_sumset_is_convolution(a, b):
    got = sumset(dist(a), dist(b))
    want = Counter()
    for u, wu in as_counter(a).items():
        for v, wv in as_counter(b).items():
            want[u + v] += wu * wv
    assert dict(zip(got.values.tolist(), got.weights.tolist())) == {k: v for k, v in want.items() if v}


@given(small, small)
def test_sparse_and_dense_paths_agree(a, b):
    d1 = sumset(dist(a), dist(b))
    d2 = sumset(dist(a), dist(b), dense_limit=0)
    assert np.array_equal(d1.values, d2.values) and np.array_equal(d1.weights, d2.weights)


@given(small, small, st.integers(-600, 600))
def test_count_equal_brute(a, b, t):
    ca, cb = as_counter(a), as_counter(b)
    want = sum(wu * cb.get(t - u, 0) for u, wu in ca.items())
    assert count_equal(dist(a), dist(b), t) == want


@given(small, small)
def test_float_weights(a, b):
    d = sumset(dist(a, np.float64), dist(b))
    assert d.weights.dtype == np.float64
    assert abs(d.total - dist(a).total * dist(b).total) < 1e-6


def test_scaled_and_sum_of():
    d = ValueDist.from_values([1, 2, 2, 5])
    neg = d.scaled(-3)
    assert neg.values.tolist() == [-15, -6, -3] and neg.weights.tolist() == [1, 2, 1]
    assert d.scaled(0).values.tolist() == [0] and d.scaled(0).weights.tolist() == [4]
    three = sum_of([d, d, d])
    assert three.total == 64
