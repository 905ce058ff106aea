import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from raysep.address import ExternalAddress, canonical, compare, enumerate_periodic, shift

symbol = st.integers(-3, 3)
addresses = st.builds(
    ExternalAddress,
    st.lists(symbol, max_size=3).map(tuple),
    st.lists(symbol, min_size=1, max_size=3).map(tuple),
)


def P(*block):
    return ExternalAddress.periodic(*block)


def test_shift_examples():
    assert shift(P(0)) == P(0)
    assert shift(ExternalAddress((3,), (1, 2))) == P(1, 2)
    assert shift(P(1, 2)) == P(2, 1)


def test_compare_examples():
    assert compare(P(0), P(1)) == -1
    assert compare(P(1, 0), P(1, 1)) == -1
    a = ExternalAddress((2,), (0, 1))
    assert compare(a, a) == 0


def test_enumerate_examples():
    assert enumerate_periodic(1, 1) == [P(-1), P(0), P(1)]
    assert enumerate_periodic(2, 0) == [P(0)]
    two = enumerate_periodic(2, 1)
    assert len(two) == 9
    assert sum(a.period_length == 1 for a in two) == 3
    assert sum(a.period_length == 2 for a in two) == 6


def test_enumerate_rejects_bad_window():
    with pytest.raises(ValueError):
        enumerate_periodic(0, 1)
    with pytest.raises(ValueError):
        enumerate_periodic(1, -1)


def test_canonical_forms():
    assert canonical((), (1, 1)) == ((), (1,))
    assert canonical((2, 1), (2, 1)) == ((), (2, 1))
    assert canonical((5, 0), (0,)) == ((5,), (0,))
    with pytest.raises(ValueError):
        canonical((1,), ())


def test_parse_and_text_round_trip():
    a = ExternalAddress.parse("3|1,2")
    assert a.preperiod == (3,) and a.period == (1, 2)
    assert str(a) == "3|1,2"
    assert ExternalAddress.parse("|0") == P(0)
    assert ExternalAddress.parse(" -1 | 2 ") == ExternalAddress((-1,), (2,))
    for bad in ("0", "1|", "|a", "1||2"):
        with pytest.raises(ValueError):
            ExternalAddress.parse(bad)


def test_shift_preserves_period_length():
    for a in enumerate_periodic(3, 1):
        assert shift(a).period_length == a.period_length


@given(st.integers(1, 3), st.integers(0, 2), st.data())
def test_sigma_p_fixed(p, M, data):
    addrs = enumerate_periodic(p, M)
    a = data.draw(st.sampled_from(addrs))
    b = a
    for _ in range(p):
        b = shift(b)
    assert b == a
    assert all(abs(s) <= M for s in a.period)


@given(addresses)
def test_canonical_idempotent(a):
    assert canonical(a.preperiod, a.period) == (a.preperiod, a.period)
    assert ExternalAddress.parse(str(a)) == a


@given(addresses, addresses)
def test_compare_antisymmetric_and_lexicographic(a, b):
    assert compare(a, b) == -compare(b, a)
    k = 2 * max(len(a.preperiod) + len(a.period), len(b.preperiod) + len(b.period))
    sa, sb = a.symbols(k), b.symbols(k)
    if sa != sb:
        assert compare(a, b) == (-1 if sa < sb else 1)
    else:
        # agreement that far forces equal sequences
        assert compare(a, b) == 0 and a == b


@given(addresses, addresses, addresses)
def test_compare_transitive(a, b, c):
    if compare(a, b) <= 0 and compare(b, c) <= 0:
        assert compare(a, c) <= 0


@given(addresses, addresses)
def test_equality_is_sequence_equality(a, b):
    n = 4 * (len(a.preperiod) + len(b.preperiod) + len(a.period) * len(b.period))
    assert (a == b) == (a.symbols(n) == b.symbols(n))


def test_enumeration_sorted_and_complete():
    for p, M in itertools.product((1, 2, 3), (0, 1, 2)):
        addrs = enumerate_periodic(p, M)
        assert len(addrs) == (2 * M + 1) ** p
        assert all(compare(x, y) < 0 for x, y in zip(addrs, addrs[1:]))
